#pragma once

#include <vector>

#include "netgame/estimate.hpp"

namespace netgame {

// Result of the circle matching estimator for one player.
struct NpEstimate {
  double estimate = 0.0;  // average outcome over matched players
  int matches = 0;        // matched players, including the target itself
  int h = 0;              // window radius actually used
};

// Default window radius floor(0.5 * log2(n)): grows without bound but
// slowly enough that expected match counts still grow for discrete
// covariates.
int np_default_h(int n);

// Nonparametric peer-outcome estimator on a circle network with
// discrete covariates: player j matches the target i when the covariate
// sequence along j's window of h ring neighbors on each side equals the
// target's window position by position (a rotation of the data maps
// matches to matches; the target always matches itself).  The estimate
// is the average outcome over matches, an approximation of the target's
// conditional choice probability that sharpens as n grows.
//
// Requirements checked: the network must be a single symmetric cycle and
// every covariate column discrete (a small set of distinct values);
// pass h < 0 to use np_default_h.  Windows may not wrap (2h + 1 <= n).
NpEstimate np_estimate(const Dataset& data, int target, int h = -1);

// Matching estimates for every player in one pass (windows are hashed,
// so the cost is near-linear in n rather than quadratic).
std::vector<NpEstimate> np_estimate_all(const Dataset& data, int h = -1);

}  // namespace netgame

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "netgame/game.hpp"

namespace netgame {

// Observed data for estimation: the network, covariates, and one action
// per player.
struct Dataset {
  GameState state;
  std::vector<int> y;

  // Throws unless y has one entry per player, each in {0, ..., K}.
  void validate(int num_actions) const;
};

// Subnetwork radius rule h = floor(h0 * n^a).  The defaults grow the
// radius slowly enough that subnetworks stay small relative to n while
// the approximation error 2 * lambda^(h+1) vanishes.
int choose_h(int n, double h0 = 0.1, double a = 0.5);

// Parameter vector layout used by the likelihood derivatives and
// standard errors: beta and alpha rows interleaved per action,
//   theta = (beta(1,:), alpha(1,:), beta(2,:), alpha(2,:), ...)
// for a total of K * (d + K) entries.
Eigen::VectorXd pack_params(const PayoffParams& params);
PayoffParams unpack_params(const Eigen::VectorXd& theta, int num_actions, int num_covariates);

// Average approximate log-likelihood: each player's choice probability
// is computed from their own h-hop subnetwork game, so no full-network
// solve is needed.  Probabilities are floored at 1e-300 before taking
// logs.  h = 0 reduces to the plain multinomial logit likelihood.
double loglik_approx(const Dataset& data, const PayoffParams& params, int h, double tol = 1e-10);

// Analytic gradient of loglik_approx, obtained per player by implicit
// differentiation of the subnetwork fixed point.
Eigen::VectorXd score_approx(const Dataset& data, const PayoffParams& params, int h,
                             double tol = 1e-10);

struct AmleOptions {
  std::optional<PayoffParams> init;  // default: plain-logit beta, alpha = 0
  double alpha_bound = 1.99;         // box |alpha(k,l)| <= alpha_bound
  double grad_tol = 1e-6;            // sup-norm of the projected gradient
  double step_tol = 1e-9;            // sup-norm of the last parameter step
  int max_iter = 500;
  double solver_tol = 1e-10;         // subnetwork fixed-point tolerance
  int solver_max_iter = 10000;
  bool compute_std_errors = true;
};

struct EstimateResult {
  PayoffParams theta;
  double loglik = 0.0;
  int h = 0;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;            // projected-gradient sup-norm at theta
  Eigen::MatrixXd fisher;            // K(d+K) square
  Eigen::VectorXd std_errors;        // empty when suppressed
  bool se_suppressed = false;
  double fisher_condition = 0.0;
};

// Approximate maximum-likelihood estimation: maximizes loglik_approx over
// theta with alpha confined to the box, by projected BFGS with analytic
// gradients and Armijo backtracking.  Convergence requires both the
// projected-gradient and step tolerances.  Line-search evaluations that
// hit the probability floor are rejected as safeguard violations.
EstimateResult amle(const Dataset& data, int h, const AmleOptions& options = {});

// Sample information matrix: the average outer product of per-player
// score contributions at `params` (typically the estimate).
Eigen::MatrixXd fisher_info(const Dataset& data, const PayoffParams& params, int h,
                            double tol = 1e-10);

struct StdErrors {
  Eigen::VectorXd se;        // sqrt(diag(fisher^-1) / n); empty when suppressed
  bool suppressed = false;   // set when the information matrix is ill-conditioned
  double condition = 0.0;
};

StdErrors std_errors(const Eigen::MatrixXd& fisher, int n);

// Identification diagnostics built from the linear system that the
// equilibrium log-odds satisfy.  With W_i = (x_i', peer shares), the
// moment matrix E[W W'] must be non-singular for the closed-form
// inversion of (beta, alpha) from log-odds regressions to be defined;
// fed exact equilibrium probabilities, that inversion recovers the true
// parameters exactly.
struct IdentDiagnostics {
  Eigen::MatrixXd moment_matrix;  // (d+K) square sample average of W W'
  double min_eigenvalue = 0.0;
  double determinant = 0.0;
  Eigen::VectorXd mean_delta;     // average log-odds per action vs action 0
  Eigen::VectorXd mean_phi;       // average peer share per action
  PayoffParams inversion;         // regression-based (beta, alpha)
};

// Diagnostics from supplied choice probabilities (e.g. an exact
// equilibrium profile).
IdentDiagnostics ident_diagnostics(const GameState& state, const ChoiceProfile& probs);

// Diagnostics with probabilities computed via h-hop subnetwork solves at
// a candidate parameter value.
IdentDiagnostics ident_diagnostics(const GameState& state, const PayoffParams& params, int h,
                                   double tol = 1e-10);

}  // namespace netgame

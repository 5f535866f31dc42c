#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "netgame/estimate.hpp"
#include "netgame/game.hpp"
#include "netgame/rng.hpp"

namespace netgame {

// One simulated action per player, drawn independently across players
// from the rows of a choice-probability profile (the equilibrium induces
// independence conditional on covariates and the network).
struct SimDraw {
  std::vector<int> actions;
  uint64_t seed = 0;
};

SimDraw draw_actions(const ChoiceProfile& profile, uint64_t seed);

// Marginal distribution of one covariate column.
struct XColumnSpec {
  enum class Dist { Uniform, Normal, Bernoulli };
  Dist dist = Dist::Uniform;
  double a = 0.0;  // uniform lower / normal mean / bernoulli success prob
  double b = 1.0;  // uniform upper / normal sd     / unused
};

// Draws an n x d covariate matrix, independent across players and
// columns, consuming the generator player-major (all columns of player
// 0, then player 1, ...).
Eigen::MatrixXd draw_covariates(int n, std::span<const XColumnSpec> columns, Rng& rng);

// A Monte Carlo experiment: R independent replications of
// draw network -> draw covariates -> solve equilibrium -> draw actions
// -> estimate via subnetwork maximum likelihood with radius h.
//
// Replication r uses the stream seed derive_stream(base_seed, r), with
// sub-streams 0 (network), 1 (covariates), 2 (actions).  Results are
// therefore bit-identical for a given base seed regardless of thread
// count, and the simulated data do not depend on h.
struct McDesign {
  enum class NetworkKind { Circle, Random };
  NetworkKind network = NetworkKind::Circle;
  int n = 0;
  int replications = 0;
  uint64_t base_seed = 0;
  PayoffParams theta;            // data-generating parameters
  std::vector<XColumnSpec> x;    // one entry per covariate column
  int h = 0;                     // estimation radius
  double solver_tol = 1e-10;     // equilibrium tolerance for data generation
  AmleOptions estimation;        // estimator settings (init is ignored)
};

struct McReplication {
  Eigen::VectorXd theta;       // packed estimates; empty on failure
  Eigen::VectorXd std_errors;  // empty when suppressed or failed
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct McResult {
  std::vector<McReplication> replications;
  Eigen::VectorXd mean;  // over converged replications
  Eigen::VectorXd sd;    // sample SD over converged replications
  int failures = 0;
};

// Runs the experiment.  Failed replications (estimator non-convergence
// or numerical errors) keep their slot, are excluded from mean/sd, and
// are tallied in `failures` rather than aborting the run.
McResult run_montecarlo(const McDesign& design, int threads = 1);

}  // namespace netgame

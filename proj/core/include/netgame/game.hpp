#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "netgame/network.hpp"

namespace netgame {

// Payoff parameters of the discrete-choice network game.
//
// Players simultaneously pick one action from {0, 1, ..., K}.  Action 0
// is the outside option, normalized to zero payoff.  The deterministic
// payoff of action k >= 1 for player i is
//
//   x_i' beta_k  +  sum_l alpha(k, l) * (share of i's friends choosing l)
//
// where the friend shares are the friends' equilibrium choice
// probabilities (players observe x and the network, not realized
// actions).  beta is K x d, alpha is K x K; alpha(k, l) is the marginal
// value to a k-chooser of friends playing l.
struct PayoffParams {
  Eigen::MatrixXd beta;   // K x d
  Eigen::MatrixXd alpha;  // K x K

  int num_actions() const { return static_cast<int>(beta.rows()); }
  int num_covariates() const { return static_cast<int>(beta.cols()); }

  // Throws std::invalid_argument on shape mismatch or non-finite entries.
  void validate() const;
};

// Modulus of the equilibrium best-response map: K/(K+1) times the
// largest spread, across any two actions (including the zero payoffs of
// action 0), of the peer weights attached to one friend action.  The
// map is a sup-L1 contraction with this modulus, so a value < 1
// guarantees a unique equilibrium and geometric convergence.
double contraction_modulus(const PayoffParams& params);

// Worst-case sup-L1 gap between a player's h-hop subnetwork choice
// probabilities and their full-network equilibrium values: 2 * lambda^(h+1).
double ndd_bound(double lambda, int h);

// A network plus player covariates (row i of x belongs to player i).
struct GameState {
  DirectedNetwork net;
  Eigen::MatrixXd x;  // n x d

  // Throws if row count differs from the player count or entries are
  // not finite.
  void validate() const;
};

// Choice probabilities, one row per player over actions 0..K.  Rows of a
// valid profile are strictly positive and sum to one within 1e-12.
struct ChoiceProfile {
  Eigen::MatrixXd probs;  // n x (K+1)

  static ChoiceProfile uniform(int n, int num_actions);
  int num_players() const { return static_cast<int>(probs.rows()); }
  int num_actions() const { return static_cast<int>(probs.cols()) - 1; }
  void validate() const;
};

// One player's multinomial-logit best response: the probability vector
// over actions 0..K given the player's covariates and the choice
// probabilities of their q_i friends (one row each).  With q_i = 0 the
// peer term is dropped and this is a plain logit in x_i.
Eigen::VectorXd best_response(const Eigen::VectorXd& x_i, int q_i,
                              const Eigen::MatrixXd& friend_probs,
                              const PayoffParams& params);

struct SolveOptions {
  double tol = 1e-10;     // stop when the sup-L1 sweep step falls to tol
  int max_iter = 10000;
  // Starting profile; defaults to the uniform profile.
  std::optional<Eigen::MatrixXd> initial;
};

struct SolveReport {
  int iterations = 0;
  double final_step = 0.0;  // sup-L1 norm of the last Jacobi sweep
  double lambda = 0.0;      // contraction modulus of the supplied params
  bool converged = false;
  std::vector<double> step_norms;  // one entry per sweep
};

// Computes the equilibrium profile by Jacobi iteration of the joint
// best-response map.  With lambda < 1 the fixed point is unique and the
// returned profile is within tol * lambda / (1 - lambda) of it.  A
// modulus >= 1 triggers a warning on stderr; iteration still runs and
// `converged` reports whether the step tolerance was met.
std::pair<ChoiceProfile, SolveReport> solve_equilibrium(const GameState& state,
                                                        const PayoffParams& params,
                                                        const SolveOptions& options = {});

// Solves the h-hop subnetwork game rooted at player i -- the same game
// restricted to i's h-hop neighborhood -- and returns the center's
// probability row.  Friend lists are cut to the neighborhood, but each
// player's peer average keeps its full-network denominator: a friend
// beyond the horizon contributes zero rather than being renormalized
// away.  The gap to the full-equilibrium row is at most
// ndd_bound(contraction_modulus(params), h).
std::pair<Eigen::VectorXd, SolveReport> solve_subnetwork(const GameState& state, int center,
                                                         int radius, const PayoffParams& params,
                                                         const SolveOptions& options = {});

// Constructive lower bound on every equilibrium choice probability:
// minimizes each action's exponent over players and the possible peer
// shares.  Strictly positive for finite inputs.
double sigma_lower_bound(const GameState& state, const PayoffParams& params);

}  // namespace netgame

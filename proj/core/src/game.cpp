#include "netgame/game.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "fixed_point.hpp"

namespace netgame {

void PayoffParams::validate() const {
  const int K = num_actions();
  const int d = num_covariates();
  if (K < 1) throw std::invalid_argument("params: need at least one inside action");
  if (d < 1) throw std::invalid_argument("params: need at least one covariate");
  if (alpha.rows() != K || alpha.cols() != K)
    throw std::invalid_argument("params: alpha must be K x K");
  if (!beta.allFinite() || !alpha.allFinite())
    throw std::invalid_argument("params: non-finite entries");
}

double contraction_modulus(const PayoffParams& params) {
  params.validate();
  const int K = params.num_actions();
  // Spread of peer weights per friend action l, over action pairs drawn
  // from {0, ..., K}; action 0 contributes a zero row.
  double gap = 0.0;
  for (int l = 0; l < K; ++l) {
    double lo = 0.0, hi = 0.0;
    for (int k = 0; k < K; ++k) {
      lo = std::min(lo, params.alpha(k, l));
      hi = std::max(hi, params.alpha(k, l));
    }
    gap = std::max(gap, hi - lo);
  }
  return static_cast<double>(K) / (K + 1.0) * gap;
}

double ndd_bound(double lambda, int h) {
  if (lambda < 0.0) throw std::invalid_argument("ndd_bound: negative modulus");
  if (h < 0) throw std::invalid_argument("ndd_bound: negative radius");
  return 2.0 * std::pow(lambda, h + 1);
}

void GameState::validate() const {
  if (x.rows() != net.num_players())
    throw std::invalid_argument("state: covariate rows must match player count");
  if (x.cols() < 1) throw std::invalid_argument("state: need at least one covariate");
  if (!x.allFinite()) throw std::invalid_argument("state: non-finite covariates");
}

ChoiceProfile ChoiceProfile::uniform(int n, int num_actions) {
  ChoiceProfile p;
  p.probs = Eigen::MatrixXd::Constant(n, num_actions + 1, 1.0 / (num_actions + 1));
  return p;
}

void ChoiceProfile::validate() const {
  if (probs.rows() < 1 || probs.cols() < 2)
    throw std::invalid_argument("profile: need at least one player and two actions");
  for (int i = 0; i < probs.rows(); ++i) {
    double sum = 0.0;
    for (int k = 0; k < probs.cols(); ++k) {
      const double p = probs(i, k);
      if (!(p > 0.0) || p >= 1.0)
        throw std::invalid_argument("profile: row " + std::to_string(i) +
                                    " has an entry outside (0, 1)");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("profile: row " + std::to_string(i) + " does not sum to one");
  }
}

Eigen::VectorXd best_response(const Eigen::VectorXd& x_i, int q_i,
                              const Eigen::MatrixXd& friend_probs, const PayoffParams& params) {
  params.validate();
  const int K = params.num_actions();
  if (x_i.size() != params.num_covariates())
    throw std::invalid_argument("best_response: covariate length mismatch");
  if (friend_probs.rows() != q_i)
    throw std::invalid_argument("best_response: friend row count must equal q_i");
  if (q_i > 0 && friend_probs.cols() != K + 1)
    throw std::invalid_argument("best_response: friend rows must cover actions 0..K");
  for (int r = 0; r < friend_probs.rows(); ++r) {
    double sum = friend_probs.row(r).sum();
    if (friend_probs.row(r).minCoeff() < 0.0 || std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("best_response: friend row " + std::to_string(r) +
                                  " is not a probability vector");
  }

  Eigen::VectorXd z = Eigen::VectorXd::Zero(K);
  if (q_i > 0)
    z = friend_probs.rightCols(K).colwise().sum().transpose() / static_cast<double>(q_i);
  Eigen::VectorXd xb = params.beta * x_i;
  Eigen::VectorXd out(K + 1);
  detail::logit_row(xb.data(), z.data(), params.alpha, K, out.data());
  return out;
}

namespace {

std::pair<ChoiceProfile, SolveReport> solve_impl(const detail::CompactGame& game,
                                                 const Eigen::MatrixXd& x,
                                                 const PayoffParams& params,
                                                 const SolveOptions& options) {
  const int K = params.num_actions();
  SolveReport report;
  report.lambda = contraction_modulus(params);
  if (report.lambda >= 1.0)
    std::cerr << "netgame: warning: contraction modulus " << report.lambda
              << " >= 1, equilibrium may not be unique\n";
  if (options.tol <= 0.0 || options.max_iter < 1)
    throw std::invalid_argument("solve: tol must be positive and max_iter >= 1");

  detail::RowMajorMatrix sigma;
  if (options.initial) {
    ChoiceProfile init{*options.initial};
    if (init.probs.rows() != game.m || init.probs.cols() != K + 1)
      throw std::invalid_argument("solve: initial profile has wrong shape");
    init.validate();
    sigma = *options.initial;
  } else {
    sigma = detail::RowMajorMatrix::Constant(game.m, K + 1, 1.0 / (K + 1));
  }

  detail::RowMajorMatrix xb = x * params.beta.transpose();
  auto res = detail::jacobi_solve(game, xb, params.alpha, sigma, options.tol, options.max_iter,
                                  &report.step_norms);
  report.iterations = res.iterations;
  report.final_step = res.final_step;
  report.converged = res.converged;

  ChoiceProfile profile;
  profile.probs = sigma;
  return {std::move(profile), std::move(report)};
}

}  // namespace

std::pair<ChoiceProfile, SolveReport> solve_equilibrium(const GameState& state,
                                                        const PayoffParams& params,
                                                        const SolveOptions& options) {
  params.validate();
  state.validate();
  if (state.x.cols() != params.num_covariates())
    throw std::invalid_argument("solve: covariate width differs from beta");
  detail::CompactGame game(state.net);
  return solve_impl(game, state.x, params, options);
}

std::pair<Eigen::VectorXd, SolveReport> solve_subnetwork(const GameState& state, int center,
                                                         int radius, const PayoffParams& params,
                                                         const SolveOptions& options) {
  params.validate();
  state.validate();
  if (state.x.cols() != params.num_covariates())
    throw std::invalid_argument("solve: covariate width differs from beta");
  SubgraphResult sub = extract_subgraph(state.net, center, radius);
  const int m = sub.graph.num_players();
  Eigen::MatrixXd x_sub(m, state.x.cols());
  for (int u = 0; u < m; ++u) x_sub.row(u) = state.x.row(sub.original_ids[u]);

  SolveOptions sub_options = options;
  if (options.initial) {
    // A caller-supplied initial profile refers to the full network; pick
    // out the neighborhood rows.
    Eigen::MatrixXd init(m, options.initial->cols());
    for (int u = 0; u < m; ++u) init.row(u) = options.initial->row(sub.original_ids[u]);
    sub_options.initial = std::move(init);
  }

  std::vector<int> degree(m);
  for (int u = 0; u < m; ++u) degree[u] = state.net.num_friends(sub.original_ids[u]);
  detail::CompactGame game(sub.graph, degree);
  auto [profile, report] = solve_impl(game, x_sub, params, sub_options);
  return {profile.probs.row(sub.center).transpose(), std::move(report)};
}

double sigma_lower_bound(const GameState& state, const PayoffParams& params) {
  params.validate();
  state.validate();
  const int K = params.num_actions();
  Eigen::MatrixXd xb = state.x * params.beta.transpose();  // n x K
  // Bound each action's exponent over players and over peer shares in
  // [0, 1]^K, then take the softmax floor.
  double denom = 1.0;
  Eigen::VectorXd lo(K);
  for (int k = 0; k < K; ++k) {
    double alpha_lo = 0.0, alpha_hi = 0.0;
    for (int l = 0; l < K; ++l) {
      alpha_lo += std::min(0.0, params.alpha(k, l));
      alpha_hi += std::max(0.0, params.alpha(k, l));
    }
    lo[k] = xb.col(k).minCoeff() + alpha_lo;
    denom += std::exp(xb.col(k).maxCoeff() + alpha_hi);
  }
  double bound = 1.0 / denom;  // action 0
  for (int k = 0; k < K; ++k) bound = std::min(bound, std::exp(lo[k]) / denom);
  return bound;
}

}  // namespace netgame

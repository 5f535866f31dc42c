#include "netgame/estimate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "fixed_point.hpp"

namespace netgame {

namespace {

constexpr double kProbFloor = 1e-300;

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace

void Dataset::validate(int num_actions) const {
  state.validate();
  if (static_cast<int>(y.size()) != state.net.num_players())
    throw std::invalid_argument("dataset: need one outcome per player");
  for (size_t i = 0; i < y.size(); ++i)
    if (y[i] < 0 || y[i] > num_actions)
      throw std::invalid_argument("dataset: outcome of player " + std::to_string(i) +
                                  " outside {0..K}");
}

int choose_h(int n, double h0, double a) {
  if (n < 1) throw std::invalid_argument("choose_h: need n >= 1");
  if (h0 < 0.0 || a < 0.0) throw std::invalid_argument("choose_h: negative rule constants");
  return static_cast<int>(std::floor(h0 * std::pow(static_cast<double>(n), a)));
}

Eigen::VectorXd pack_params(const PayoffParams& params) {
  params.validate();
  const int K = params.num_actions(), d = params.num_covariates();
  Eigen::VectorXd theta(K * (d + K));
  for (int k = 0; k < K; ++k) {
    theta.segment(k * (d + K), d) = params.beta.row(k).transpose();
    theta.segment(k * (d + K) + d, K) = params.alpha.row(k).transpose();
  }
  return theta;
}

PayoffParams unpack_params(const Eigen::VectorXd& theta, int num_actions, int num_covariates) {
  const int K = num_actions, d = num_covariates;
  if (theta.size() != K * (d + K))
    throw std::invalid_argument("unpack_params: length must be K * (d + K)");
  PayoffParams params;
  params.beta.resize(K, d);
  params.alpha.resize(K, K);
  for (int k = 0; k < K; ++k) {
    params.beta.row(k) = theta.segment(k * (d + K), d).transpose();
    params.alpha.row(k) = theta.segment(k * (d + K) + d, K).transpose();
  }
  return params;
}

namespace {

using detail::CompactGame;
using detail::RowMajorMatrix;

// Per-player subnetwork system, kept across likelihood evaluations so
// solves warm-start from the previous parameter value.
struct PlayerSystem {
  CompactGame game;
  std::vector<int> original_ids;
  int center;
  RowMajorMatrix sigma;
};

struct EvalOutput {
  double loglik = 0.0;
  Eigen::VectorXd score;        // mean of per-player contributions
  bool clamped = false;
};

class Workspace {
 public:
  Workspace(const Dataset& data, int h, int num_actions)
      : data_(data), K_(num_actions), d_(static_cast<int>(data.state.x.cols())), h_(h) {
    if (h < 0) throw std::invalid_argument("estimate: negative radius");
    data.validate(num_actions);
    const int n = data.state.net.num_players();
    systems_.reserve(n);
    for (int i = 0; i < n; ++i) {
      SubgraphResult sub = extract_subgraph(data.state.net, i, h);
      const int m = sub.graph.num_players();
      // Peer averages keep the parent-network degrees: friends beyond the
      // neighborhood contribute nothing but still count in the weight.
      std::vector<int> degree(m);
      for (int u = 0; u < m; ++u) degree[u] = data.state.net.num_friends(sub.original_ids[u]);
      systems_.push_back(PlayerSystem{CompactGame(sub.graph, degree),
                                      std::move(sub.original_ids), sub.center,
                                      RowMajorMatrix::Constant(m, K_ + 1, 1.0 / (K_ + 1))});
    }
  }

  int num_params() const { return K_ * (d_ + K_); }
  int num_players() const { return data_.state.net.num_players(); }

  // Evaluates the average log-likelihood and, if want_scores, the
  // per-player score rows (n x P) plus their mean.  Throws EvalError,
  // tagged with the player id, if a subnetwork solve fails to converge.
  EvalOutput eval(const PayoffParams& params, double tol, int max_iter, bool want_scores,
                  Eigen::MatrixXd* player_scores = nullptr) {
    const int n = num_players();
    const int P = num_params();
    Eigen::MatrixXd xb_full = data_.state.x * params.beta.transpose();  // n x K
    EvalOutput out;
    if (want_scores) {
      out.score = Eigen::VectorXd::Zero(P);
      if (player_scores) player_scores->setZero(n, P);
    }
    RowMajorMatrix xb;
    for (int i = 0; i < n; ++i) {
      PlayerSystem& sys = systems_[i];
      const int m = sys.game.m;
      xb.resize(m, K_);
      for (int u = 0; u < m; ++u) xb.row(u) = xb_full.row(sys.original_ids[u]);
      auto res = detail::jacobi_solve(sys.game, xb, params.alpha, sys.sigma, tol, max_iter);
      if (!res.converged)
        throw EvalError("subnetwork solve for player " + std::to_string(i) +
                        " did not converge (final step " + std::to_string(res.final_step) + ")");
      double p = sys.sigma(sys.center, data_.y[i]);
      if (p < kProbFloor) {
        p = kProbFloor;
        out.clamped = true;
      }
      out.loglik += std::log(p);
      if (want_scores) {
        Eigen::VectorXd g = player_score(sys, params, i, p);
        out.score += g;
        if (player_scores) player_scores->row(i) = g.transpose();
      }
    }
    out.loglik /= n;
    if (want_scores) out.score /= n;
    return out;
  }

 private:
  // d(log p_i)/d(theta) by implicit differentiation of the subnetwork
  // fixed point sigma = Gamma(sigma; theta):
  //   (I - dGamma/dsigma) dsigma/dtheta = dGamma/dtheta,
  // then one adjoint solve picks out the center row for action y_i.
  Eigen::VectorXd player_score(const PlayerSystem& sys, const PayoffParams& params, int i,
                               double prob) {
    const int m = sys.game.m;
    const int K = K_, d = d_, P = num_params();
    const RowMajorMatrix& sig = sys.sigma;

    // Peer shares z and the weighted sums c(j, l) = sum_q sig(j,q) alpha(q,l).
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(m, K);
    for (int j = 0; j < m; ++j) {
      if (sys.game.inv_q[j] == 0.0) continue;
      for (int e = sys.game.offsets[j]; e < sys.game.offsets[j + 1]; ++e)
        z.row(j) += sig.row(sys.game.adj[e]).tail(K);
      z.row(j) *= sys.game.inv_q[j];
    }
    Eigen::MatrixXd c = sig.rightCols(K) * params.alpha;  // m x K

    // A = I - dGamma/dsigma over the free coordinates (actions 1..K).
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m * K, m * K);
    for (int j = 0; j < m; ++j) {
      if (sys.game.inv_q[j] == 0.0) continue;
      for (int e = sys.game.offsets[j]; e < sys.game.offsets[j + 1]; ++e) {
        const int jp = sys.game.adj[e];
        for (int k = 0; k < K; ++k)
          for (int l = 0; l < K; ++l)
            A(j * K + k, jp * K + l) -=
                sys.game.inv_q[j] * sig(j, k + 1) * (params.alpha(k, l) - c(j, l));
      }
    }

    // B = dGamma/dtheta.  Utilities: u(j,k') = x_j' beta_k' + alpha(k',:) z_j,
    // so dGamma(j,k)/du(j,k') = sig(j,k)(1{k=k'} - sig(j,k')).
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m * K, P);
    for (int j = 0; j < m; ++j) {
      const auto x_j = data_.state.x.row(sys.original_ids[j]);
      for (int k = 0; k < K; ++k) {
        for (int kp = 0; kp < K; ++kp) {
          const double w = sig(j, k + 1) * ((k == kp ? 1.0 : 0.0) - sig(j, kp + 1));
          if (w == 0.0) continue;
          const int base = kp * (d + K);
          for (int t = 0; t < d; ++t) B(j * K + k, base + t) += w * x_j(t);
          for (int l = 0; l < K; ++l) B(j * K + k, base + d + l) += w * z(j, l);
        }
      }
    }

    // Adjoint: g = B' (A^-T w), with w selecting the center's action row.
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m * K);
    const int yi = data_.y[i];
    if (yi >= 1) {
      w(sys.center * K + (yi - 1)) = 1.0 / prob;
    } else {
      for (int k = 0; k < K; ++k) w(sys.center * K + k) = -1.0 / prob;
    }
    Eigen::VectorXd v = A.transpose().partialPivLu().solve(w);
    return B.transpose() * v;
  }

  const Dataset& data_;
  int K_, d_, h_;
  std::vector<PlayerSystem> systems_;
};

Eigen::VectorXd project_box(Eigen::VectorXd theta, int K, int d, double bound) {
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) {
      double& a = theta(k * (d + K) + d + l);
      a = std::min(bound, std::max(-bound, a));
    }
  return theta;
}

struct OptimizeOutcome {
  Eigen::VectorXd theta;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

// Projected BFGS ascent on the average log-likelihood (implemented as
// descent on its negative).  Convergence requires the projected-gradient
// sup-norm and the last step sup-norm to meet their tolerances together.
OptimizeOutcome optimize(Workspace& ws, const Eigen::VectorXd& theta0, int K, int d,
                         const AmleOptions& opt) {
  const int P = K * (d + K);
  const auto project = [&](const Eigen::VectorXd& t) {
    return project_box(t, K, d, opt.alpha_bound);
  };
  const auto evaluate = [&](const Eigen::VectorXd& t, bool* clamped) {
    EvalOutput e = ws.eval(unpack_params(t, K, d), opt.solver_tol, opt.solver_max_iter, true);
    if (clamped) *clamped = e.clamped;
    return std::make_pair(-e.loglik, Eigen::VectorXd(-e.score));
  };

  OptimizeOutcome out;
  Eigen::VectorXd x = project(theta0);
  bool clamped = false;
  auto [f, g] = evaluate(x, &clamped);
  if (clamped) throw EvalError("estimate: probability floor hit at the starting value");

  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(P, P);
  double last_step = 0.0;
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    out.iterations = iter;
    const double pg_norm = (x - project(x - g)).lpNorm<Eigen::Infinity>();
    out.grad_norm = pg_norm;
    if (pg_norm <= opt.grad_tol && last_step <= opt.step_tol) {
      out.converged = true;
      break;
    }

    // Alpha coordinates pinned by the box (at a bound with the gradient
    // pushing outward) are frozen out of the search direction so the
    // quasi-Newton model lives on the free subspace.
    std::vector<char> pinned(P, 0);
    for (int k = 0; k < K; ++k)
      for (int l = 0; l < K; ++l) {
        const int idx = k * (d + K) + d + l;
        if ((x(idx) >= opt.alpha_bound && g(idx) < 0.0) ||
            (x(idx) <= -opt.alpha_bound && g(idx) > 0.0))
          pinned[idx] = 1;
      }
    Eigen::VectorXd g_free = g;
    for (int i = 0; i < P; ++i)
      if (pinned[i]) g_free(i) = 0.0;

    Eigen::VectorXd x_new, g_new;
    double f_new = 0.0;
    const auto try_direction = [&](Eigen::VectorXd p) {
      for (int i = 0; i < P; ++i)
        if (pinned[i]) p(i) = 0.0;
      if (g_free.dot(p) >= 0.0) return false;
      double t = 1.0;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        x_new = project(x + t * p);
        const double dir = g.dot(x_new - x);
        if ((x_new - x).lpNorm<Eigen::Infinity>() == 0.0) return false;
        bool step_clamped = false;
        try {
          std::tie(f_new, g_new) = evaluate(x_new, &step_clamped);
        } catch (const EvalError&) {
          step_clamped = true;  // treat solver failure like a safeguard hit
        }
        // The margin absorbs fixed-point solver noise: near the optimum
        // the true decrease falls below evaluation reproducibility, and
        // insisting on a strict decrease would deadlock the search.
        if (!step_clamped && f_new <= f + 1e-4 * dir + 1e-11 * (1.0 + std::abs(f)))
          return true;
      }
      return false;
    };

    bool accepted = try_direction(-(H * g_free));
    if (!accepted) {
      // The quasi-Newton direction can point nowhere useful once the box
      // activates; retry from scratch along steepest descent.
      H.setIdentity();
      accepted = try_direction(-g_free);
    }
    if (!accepted) {
      // No acceptable step remains; declare convergence only if the
      // gradient criterion already holds (the step is effectively zero).
      out.converged = pg_norm <= opt.grad_tol;
      break;
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd yv = g_new - g;
    last_step = s.lpNorm<Eigen::Infinity>();
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      // Inverse update (I - rho s y') H (I - rho y s') + rho s s'.
      const double rho = 1.0 / sy;
      const Eigen::VectorXd Hy = H * yv;
      H -= rho * (Hy * s.transpose() + s * Hy.transpose());
      H += (rho * rho * yv.dot(Hy) + rho) * (s * s.transpose());
    }
    x = x_new;
    f = f_new;
    g = g_new;
  }
  out.theta = x;
  out.loglik = -f;
  return out;
}

}  // namespace

double loglik_approx(const Dataset& data, const PayoffParams& params, int h, double tol) {
  params.validate();
  Workspace ws(data, h, params.num_actions());
  return ws.eval(params, tol, 10000, false).loglik;
}

Eigen::VectorXd score_approx(const Dataset& data, const PayoffParams& params, int h, double tol) {
  params.validate();
  Workspace ws(data, h, params.num_actions());
  return ws.eval(params, tol, 10000, true).score;
}

Eigen::MatrixXd fisher_info(const Dataset& data, const PayoffParams& params, int h, double tol) {
  params.validate();
  Workspace ws(data, h, params.num_actions());
  Eigen::MatrixXd scores;
  ws.eval(params, tol, 10000, true, &scores);
  return scores.transpose() * scores / static_cast<double>(ws.num_players());
}

StdErrors std_errors(const Eigen::MatrixXd& fisher, int n) {
  if (fisher.rows() != fisher.cols() || fisher.rows() < 1)
    throw std::invalid_argument("std_errors: information matrix must be square");
  if (n < 1) throw std::invalid_argument("std_errors: need n >= 1");
  StdErrors out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fisher);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  out.condition = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(lo > 0.0) || out.condition > 1e12) {
    out.suppressed = true;
    return out;
  }
  Eigen::MatrixXd inv = fisher.ldlt().solve(
      Eigen::MatrixXd::Identity(fisher.rows(), fisher.cols()));
  out.se = (inv.diagonal() / static_cast<double>(n)).cwiseSqrt();
  return out;
}

EstimateResult amle(const Dataset& data, int h, const AmleOptions& options) {
  int K = 1;
  if (options.init) {
    options.init->validate();
    K = options.init->num_actions();
  } else {
    for (int yi : data.y) K = std::max(K, yi);
  }
  const int d = static_cast<int>(data.state.x.cols());
  data.validate(K);

  Eigen::VectorXd theta0;
  if (options.init) {
    if (options.init->num_covariates() != d)
      throw std::invalid_argument("estimate: init has wrong covariate width");
    theta0 = pack_params(*options.init);
  } else {
    // Plain-logit warm start: the radius-0 likelihood has no peer term,
    // so alpha keeps its zero gradient and stays at zero.
    theta0 = Eigen::VectorXd::Zero(K * (d + K));
    if (h > 0) {
      Workspace ws0(data, 0, K);
      theta0 = optimize(ws0, theta0, K, d, options).theta;
    }
  }

  Workspace ws(data, h, K);
  OptimizeOutcome opt = optimize(ws, theta0, K, d, options);

  EstimateResult result;
  result.theta = unpack_params(opt.theta, K, d);
  result.loglik = opt.loglik;
  result.h = h;
  result.converged = opt.converged;
  result.iterations = opt.iterations;
  result.grad_norm = opt.grad_norm;
  if (options.compute_std_errors) {
    Eigen::MatrixXd scores;
    ws.eval(result.theta, options.solver_tol, options.solver_max_iter, true, &scores);
    result.fisher = scores.transpose() * scores / static_cast<double>(ws.num_players());
    StdErrors se = std_errors(result.fisher, ws.num_players());
    result.std_errors = se.se;
    result.se_suppressed = se.suppressed;
    result.fisher_condition = se.condition;
  }
  return result;
}

IdentDiagnostics ident_diagnostics(const GameState& state, const ChoiceProfile& probs) {
  state.validate();
  probs.validate();
  const int n = state.net.num_players();
  if (probs.num_players() != n)
    throw std::invalid_argument("ident_diagnostics: profile row count mismatch");
  const int K = probs.num_actions();
  const int d = static_cast<int>(state.x.cols());

  // W_i stacks covariates with the player's normalized peer shares;
  // delta_ik is the log-odds of action k against action 0.
  Eigen::MatrixXd W(n, d + K);
  Eigen::MatrixXd delta(n, K);
  for (int i = 0; i < n; ++i) {
    W.row(i).head(d) = state.x.row(i);
    Eigen::RowVectorXd phi = Eigen::RowVectorXd::Zero(K);
    const auto friends = state.net.friends(i);
    if (!friends.empty()) {
      for (int j : friends) phi += probs.probs.row(j).tail(K);
      phi /= static_cast<double>(friends.size());
    }
    W.row(i).tail(K) = phi;
    for (int k = 0; k < K; ++k)
      delta(i, k) = std::log(probs.probs(i, k + 1)) - std::log(probs.probs(i, 0));
  }

  IdentDiagnostics diag;
  diag.moment_matrix = W.transpose() * W / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(diag.moment_matrix);
  diag.min_eigenvalue = eig.eigenvalues().minCoeff();
  diag.determinant = diag.moment_matrix.determinant();
  diag.mean_delta = delta.colwise().mean().transpose();
  diag.mean_phi = W.rightCols(K).colwise().mean().transpose();

  diag.inversion.beta.resize(K, d);
  diag.inversion.alpha.resize(K, K);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(diag.moment_matrix);
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd rhs = W.transpose() * delta.col(k) / static_cast<double>(n);
    Eigen::VectorXd theta_k = ldlt.solve(rhs);
    diag.inversion.beta.row(k) = theta_k.head(d).transpose();
    diag.inversion.alpha.row(k) = theta_k.tail(K).transpose();
  }
  return diag;
}

IdentDiagnostics ident_diagnostics(const GameState& state, const PayoffParams& params, int h,
                                   double tol) {
  params.validate();
  state.validate();
  const int n = state.net.num_players();
  const int K = params.num_actions();
  ChoiceProfile profile;
  profile.probs.resize(n, K + 1);
  for (int i = 0; i < n; ++i) {
    auto [row, report] = solve_subnetwork(state, i, h, params, SolveOptions{tol, 10000, {}});
    if (!report.converged)
      throw std::runtime_error("ident_diagnostics: subnetwork solve for player " +
                               std::to_string(i) + " did not converge");
    profile.probs.row(i) = row.transpose();
  }
  return ident_diagnostics(state, profile);
}

}  // namespace netgame

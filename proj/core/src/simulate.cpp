#include "netgame/simulate.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace netgame {

SimDraw draw_actions(const ChoiceProfile& profile, uint64_t seed) {
  profile.validate();
  const int n = profile.num_players();
  const int cols = profile.num_actions() + 1;
  Rng rng(seed);
  SimDraw draw;
  draw.seed = seed;
  draw.actions.resize(n);
  std::vector<double> row(cols);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < cols; ++k) row[k] = profile.probs(i, k);
    draw.actions[i] = rng.categorical(row);
  }
  return draw;
}

Eigen::MatrixXd draw_covariates(int n, std::span<const XColumnSpec> columns, Rng& rng) {
  if (n < 1) throw std::invalid_argument("draw_covariates: need n >= 1");
  if (columns.empty()) throw std::invalid_argument("draw_covariates: need at least one column");
  Eigen::MatrixXd x(n, static_cast<int>(columns.size()));
  for (int i = 0; i < n; ++i) {
    for (size_t c = 0; c < columns.size(); ++c) {
      const XColumnSpec& spec = columns[c];
      switch (spec.dist) {
        case XColumnSpec::Dist::Uniform:
          x(i, c) = rng.uniform(spec.a, spec.b);
          break;
        case XColumnSpec::Dist::Normal:
          x(i, c) = rng.normal(spec.a, spec.b);
          break;
        case XColumnSpec::Dist::Bernoulli:
          x(i, c) = rng.bernoulli(spec.a) ? 1.0 : 0.0;
          break;
      }
    }
  }
  return x;
}

namespace {

McReplication run_one(const McDesign& design, int r) {
  const uint64_t rep_seed = derive_stream(design.base_seed, r);
  McReplication rep;

  DirectedNetwork net = (design.network == McDesign::NetworkKind::Circle)
                            ? generate_circle(design.n)
                            : generate_random(design.n, derive_stream(rep_seed, 0));
  Rng x_rng(derive_stream(rep_seed, 1));
  GameState state{std::move(net), draw_covariates(design.n, design.x, x_rng)};

  auto [profile, report] = solve_equilibrium(state, design.theta, SolveOptions{design.solver_tol,
                                                                               10000, {}});
  if (!report.converged) return rep;
  SimDraw draw = draw_actions(profile, derive_stream(rep_seed, 2));

  AmleOptions options = design.estimation;
  options.init.reset();
  EstimateResult est = amle(Dataset{std::move(state), std::move(draw.actions)}, design.h, options);
  rep.converged = est.converged;
  rep.loglik = est.loglik;
  rep.iterations = est.iterations;
  if (est.converged) {
    rep.theta = pack_params(est.theta);
    rep.std_errors = est.std_errors;
  }
  return rep;
}

}  // namespace

McResult run_montecarlo(const McDesign& design, int threads) {
  design.theta.validate();
  if (design.n < 1 || design.replications < 1)
    throw std::invalid_argument("montecarlo: need n >= 1 and at least one replication");
  if (static_cast<int>(design.x.size()) != design.theta.num_covariates())
    throw std::invalid_argument("montecarlo: covariate spec width differs from beta");
  if (design.h < 0) throw std::invalid_argument("montecarlo: negative radius");

  const int R = design.replications;
  McResult result;
  result.replications.resize(R);

  const int workers = std::max(1, std::min(threads, R));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int r = next.fetch_add(1); r < R; r = next.fetch_add(1)) {
      try {
        result.replications[r] = run_one(design, r);
      } catch (const std::exception&) {
        result.replications[r] = McReplication{};  // tallied as a failure
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const int P = design.theta.num_actions() *
                (design.theta.num_covariates() + design.theta.num_actions());
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(P);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(P);
  int good = 0;
  for (const McReplication& rep : result.replications) {
    if (!rep.converged) {
      ++result.failures;
      continue;
    }
    sum += rep.theta;
    sumsq += rep.theta.cwiseProduct(rep.theta);
    ++good;
  }
  if (good > 0) result.mean = sum / good;
  if (good > 1)
    result.sd = ((sumsq - sum.cwiseProduct(sum) / good) / (good - 1)).cwiseMax(0.0).cwiseSqrt();
  return result;
}

}  // namespace netgame

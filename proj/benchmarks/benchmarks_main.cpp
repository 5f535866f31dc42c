// Microbenchmarks for the hot paths: full equilibrium solves, the
// per-player subnetwork solves that dominate estimation, likelihood and
// score evaluation, the end-to-end estimator, and window matching.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "netgame/estimate.hpp"
#include "netgame/game.hpp"
#include "netgame/network.hpp"
#include "netgame/npest.hpp"
#include "netgame/rng.hpp"
#include "netgame/simulate.hpp"

namespace {

using namespace netgame;

PayoffParams binary_params(double alpha) {
  PayoffParams params;
  params.beta = Eigen::MatrixXd::Ones(1, 2);
  params.alpha = Eigen::MatrixXd::Constant(1, 1, alpha);
  return params;
}

Eigen::MatrixXd benchmark_covariates(int n, uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd x(n, 2);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = rng.uniform(-0.5, 0.5);
    x(i, 1) = rng.normal();
  }
  return x;
}

GameState circle_state(int n) { return {generate_circle(n), benchmark_covariates(n, 17)}; }

GameState random_state(int n) {
  return {generate_random(n, 29), benchmark_covariates(n, 17)};
}

void BM_SolveEquilibriumCircle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GameState game = circle_state(n);
  const PayoffParams params = binary_params(0.8);
  for (auto _ : state) {
    auto [profile, report] = solve_equilibrium(game, params);
    benchmark::DoNotOptimize(profile.probs.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SolveEquilibriumCircle)->Arg(1000)->Arg(10000);

void BM_SolveEquilibriumRandom(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GameState game = random_state(n);
  const PayoffParams params = binary_params(0.8);
  for (auto _ : state) {
    auto [profile, report] = solve_equilibrium(game, params);
    benchmark::DoNotOptimize(profile.probs.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SolveEquilibriumRandom)->Arg(1000)->Arg(10000);

// One sweep of what each likelihood evaluation does: solve every player's
// h-hop subnetwork game from a cold start.
void BM_SubnetworkSweep(benchmark::State& state) {
  const int h = static_cast<int>(state.range(0));
  const GameState game = circle_state(1000);
  const PayoffParams params = binary_params(0.8);
  for (auto _ : state) {
    for (int i = 0; i < game.net.num_players(); ++i) {
      auto [row, report] = solve_subnetwork(game, i, h, params);
      benchmark::DoNotOptimize(row.data());
    }
  }
  state.SetItemsProcessed(state.iterations() * game.net.num_players());
}
BENCHMARK(BM_SubnetworkSweep)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

void BM_LoglikApprox(benchmark::State& state) {
  const GameState game = circle_state(1000);
  const PayoffParams params = binary_params(0.8);
  auto [profile, report] = solve_equilibrium(game, params);
  const Dataset data{game, draw_actions(profile, 3).actions};
  for (auto _ : state) benchmark::DoNotOptimize(loglik_approx(data, params, 3));
}
BENCHMARK(BM_LoglikApprox);

void BM_ScoreApprox(benchmark::State& state) {
  const GameState game = circle_state(1000);
  const PayoffParams params = binary_params(0.8);
  auto [profile, report] = solve_equilibrium(game, params);
  const Dataset data{game, draw_actions(profile, 3).actions};
  for (auto _ : state) {
    Eigen::VectorXd g = score_approx(data, params, 3);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_ScoreApprox);

void BM_Amle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GameState game = circle_state(n);
  const PayoffParams params = binary_params(0.8);
  auto [profile, report] = solve_equilibrium(game, params);
  const Dataset data{game, draw_actions(profile, 3).actions};
  AmleOptions options;
  options.compute_std_errors = false;
  for (auto _ : state) {
    EstimateResult fit = amle(data, 2, options);
    benchmark::DoNotOptimize(fit.loglik);
  }
}
BENCHMARK(BM_Amle)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_NpEstimateAll(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(43);
  Eigen::MatrixXd x(n, 1);
  for (int i = 0; i < n; ++i) x(i, 0) = rng.bernoulli(0.75) ? 1.0 : 0.0;
  GameState game{generate_circle(n), std::move(x)};
  PayoffParams params;
  params.beta = Eigen::MatrixXd::Constant(1, 1, 1.0);
  params.alpha = Eigen::MatrixXd::Constant(1, 1, 0.8);
  auto [profile, report] = solve_equilibrium(game, params);
  const Dataset data{std::move(game), draw_actions(profile, 7).actions};
  for (auto _ : state) {
    std::vector<NpEstimate> estimates = np_estimate_all(data);
    benchmark::DoNotOptimize(estimates.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_NpEstimateAll)->Arg(1000)->Arg(16000);

}  // namespace

BENCHMARK_MAIN();

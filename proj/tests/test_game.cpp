#include <cmath>

#include "doctest.h"
#include "netgame/game.hpp"
#include "netgame/rng.hpp"
#include "netgame/simulate.hpp"
#include "oracles.hpp"

using namespace netgame;

namespace {

PayoffParams binary_params(double b1, double b2, double alpha) {
  PayoffParams p;
  p.beta.resize(1, 2);
  p.beta << b1, b2;
  p.alpha.resize(1, 1);
  p.alpha << alpha;
  return p;
}

GameState random_state(int n, uint64_t seed, int d = 2) {
  Rng rng(derive_stream(seed, 1));
  std::vector<XColumnSpec> cols(d);
  cols[0] = {XColumnSpec::Dist::Uniform, -0.5, 0.5};
  for (int c = 1; c < d; ++c) cols[c] = {XColumnSpec::Dist::Normal, 0.0, 1.0};
  return GameState{generate_random(n, derive_stream(seed, 0)), draw_covariates(n, cols, rng)};
}

// Sup over players of the L1 distance between best-response output and
// the profile itself -- the residual the solver promises to control.
double fixed_point_residual(const GameState& state, const PayoffParams& params,
                            const ChoiceProfile& profile) {
  double worst = 0.0;
  for (int i = 0; i < state.net.num_players(); ++i) {
    auto friends = state.net.friends(i);
    Eigen::MatrixXd fp(friends.size(), profile.probs.cols());
    for (size_t r = 0; r < friends.size(); ++r) fp.row(r) = profile.probs.row(friends[r]);
    Eigen::VectorXd br = best_response(state.x.row(i).transpose(),
                                       static_cast<int>(friends.size()), fp, params);
    worst = std::max(worst, (br - profile.probs.row(i).transpose()).lpNorm<1>());
  }
  return worst;
}

}  // namespace

TEST_CASE("contraction modulus: binary closed form and multi-action spread") {
  CHECK(contraction_modulus(binary_params(1, 1, 0.8)) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(contraction_modulus(binary_params(1, 1, 1.6)) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(contraction_modulus(binary_params(1, 1, -0.6)) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(contraction_modulus(binary_params(1, 1, 0.0)) == 0.0);

  PayoffParams p;
  p.beta = Eigen::MatrixXd::Zero(2, 1);
  p.alpha.resize(2, 2);
  p.alpha << 0.5, -0.3, 0.2, 0.4;
  // Column spreads against the zero row: max(0,.5,.2)-min(0,.5,.2)=0.5
  // and max(0,-.3,.4)-min(0,-.3,.4)=0.7; modulus = (2/3) * 0.7.
  CHECK(contraction_modulus(p) == doctest::Approx(2.0 / 3.0 * 0.7).epsilon(1e-14));
}

TEST_CASE("decay bound halves geometrically in the radius") {
  CHECK(ndd_bound(0.4, 0) == doctest::Approx(0.8));
  CHECK(ndd_bound(0.4, 3) == doctest::Approx(2.0 * std::pow(0.4, 4)));
  CHECK(ndd_bound(0.0, 2) == 0.0);
  CHECK_THROWS_AS(ndd_bound(-0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(ndd_bound(0.4, -1), std::invalid_argument);
}

TEST_CASE("best response: friendless players collapse to plain logit") {
  PayoffParams p = binary_params(1.0, -0.5, 0.8);
  Eigen::VectorXd x(2);
  x << 0.3, 1.2;
  Eigen::VectorXd br = best_response(x, 0, Eigen::MatrixXd(0, 0), p);
  const double u = 1.0 * 0.3 - 0.5 * 1.2;
  CHECK(br(1) == doctest::Approx(std::exp(u) / (1 + std::exp(u))).epsilon(1e-14));
  CHECK(br(0) + br(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("best response aggregates friend probabilities evenly") {
  PayoffParams p = binary_params(0.5, 0.0, 1.2);
  Eigen::VectorXd x(2);
  x << 1.0, 0.0;
  Eigen::MatrixXd fp(2, 2);
  fp << 0.6, 0.4, 0.2, 0.8;  // friend shares of action 1: 0.4 and 0.8
  Eigen::VectorXd br = best_response(x, 2, fp, p);
  const double u = 0.5 + 1.2 * 0.6;  // z = (0.4 + 0.8) / 2
  CHECK(br(1) == doctest::Approx(1.0 / (1.0 + std::exp(-u))).epsilon(1e-14));

  Eigen::MatrixXd bad(1, 2);
  bad << 0.6, 0.6;
  CHECK_THROWS_AS(best_response(x, 1, bad, p), std::invalid_argument);
  CHECK_THROWS_AS(best_response(x, 2, fp.topRows(1), p), std::invalid_argument);
}

TEST_CASE("three-action best response matches a hand-rolled softmax") {
  PayoffParams p;
  p.beta.resize(2, 2);
  p.beta << 0.4, -0.2, 0.1, 0.3;
  p.alpha.resize(2, 2);
  p.alpha << 0.6, -0.1, 0.2, 0.5;
  Eigen::VectorXd x(2);
  x << 0.7, -1.1;
  Eigen::MatrixXd fp(3, 3);
  fp << 0.2, 0.5, 0.3, 0.6, 0.1, 0.3, 0.4, 0.4, 0.2;
  Eigen::VectorXd br = best_response(x, 3, fp, p);

  Eigen::Vector2d z((0.5 + 0.1 + 0.4) / 3.0, (0.3 + 0.3 + 0.2) / 3.0);
  Eigen::Vector2d u = p.beta * x + p.alpha * z;
  const double denom = 1.0 + std::exp(u(0)) + std::exp(u(1));
  CHECK(br(0) == doctest::Approx(1.0 / denom).epsilon(1e-13));
  CHECK(br(1) == doctest::Approx(std::exp(u(0)) / denom).epsilon(1e-13));
  CHECK(br(2) == doctest::Approx(std::exp(u(1)) / denom).epsilon(1e-13));
}

TEST_CASE("symmetric circle equilibrium matches the scalar bisection oracle") {
  const int n = 50;
  GameState state{generate_circle(n), Eigen::MatrixXd::Constant(n, 1, 0.4)};
  PayoffParams p;
  p.beta = Eigen::MatrixXd::Constant(1, 1, 0.9);
  p.alpha = Eigen::MatrixXd::Constant(1, 1, 1.1);

  auto [profile, report] = solve_equilibrium(state, p);
  CHECK(report.converged);
  const double target = oracles::bisect_symmetric_equilibrium(0.9 * 0.4, 1.1);
  for (int i = 0; i < n; ++i)
    CHECK(profile.probs(i, 1) == doctest::Approx(target).epsilon(1e-9));
}

TEST_CASE("solver meets its fixed-point residual contract") {
  GameState state = random_state(120, 5);
  PayoffParams p = binary_params(1.0, 1.0, 1.4);
  auto [profile, report] = solve_equilibrium(state, p);
  CHECK(report.converged);
  CHECK(report.lambda == doctest::Approx(0.7));
  CHECK(report.final_step <= 1e-10);
  CHECK(fixed_point_residual(state, p, profile) <= 1e-10);
  profile.validate();

  // Three inside actions, same contract.
  Rng rng(3);
  PayoffParams p3;
  p3.beta.resize(3, 2);
  p3.alpha.resize(3, 3);
  for (int k = 0; k < 3; ++k) {
    for (int c = 0; c < 2; ++c) p3.beta(k, c) = rng.uniform(-1, 1);
    for (int l = 0; l < 3; ++l) p3.alpha(k, l) = rng.uniform(-0.4, 0.4);
  }
  auto [profile3, report3] = solve_equilibrium(state, p3);
  CHECK(report3.converged);
  CHECK(fixed_point_residual(state, p3, profile3) <= 1e-10);
}

TEST_CASE("distinct starting profiles land on the same equilibrium") {
  GameState state = random_state(100, 17);
  PayoffParams p = binary_params(1.0, 1.0, 1.6);  // modulus 0.8
  const double tol = 1e-10;

  Rng rng(99);
  Eigen::MatrixXd init1(100, 2), init2(100, 2);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(0.01, 0.99), b = rng.uniform(0.01, 0.99);
    init1.row(i) << a, 1 - a;
    init2.row(i) << b, 1 - b;
  }
  SolveOptions o1{tol, 10000, init1}, o2{tol, 10000, init2};
  auto [prof1, rep1] = solve_equilibrium(state, p, o1);
  auto [prof2, rep2] = solve_equilibrium(state, p, o2);
  CHECK(rep1.converged);
  CHECK(rep2.converged);
  double gap = 0.0;
  for (int i = 0; i < 100; ++i)
    gap = std::max(gap, (prof1.probs.row(i) - prof2.probs.row(i)).lpNorm<1>());
  CHECK(gap <= 2.0 * tol / (1.0 - rep1.lambda));
}

TEST_CASE("sweep steps contract at the modulus rate") {
  GameState state = random_state(150, 23);
  for (double alpha : {0.8, 1.6, -1.2}) {
    PayoffParams p = binary_params(1.0, 1.0, alpha);
    auto [profile, report] = solve_equilibrium(state, p);
    REQUIRE(report.converged);
    for (size_t t = 0; t + 1 < report.step_norms.size(); ++t) {
      if (report.step_norms[t] < 1e-6) break;  // below this, rounding noise dominates
      CHECK(report.step_norms[t + 1] <= report.lambda * report.step_norms[t] * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("every equilibrium probability clears the constructive floor") {
  for (uint64_t seed : {2u, 11u}) {
    GameState state = random_state(80, seed);
    PayoffParams p = binary_params(0.7, -0.9, 1.1);
    const double floor = sigma_lower_bound(state, p);
    CHECK(floor > 0.0);
    auto [profile, report] = solve_equilibrium(state, p);
    REQUIRE(report.converged);
    CHECK(profile.probs.minCoeff() >= floor - 1e-15);
  }
}

TEST_CASE("subnetwork solve covers the whole graph once the radius does") {
  const int n = 11;
  GameState state{generate_circle(n), Eigen::MatrixXd::Zero(n, 2)};
  Rng rng(7);
  for (int i = 0; i < n; ++i) {
    state.x(i, 0) = rng.uniform(-0.5, 0.5);
    state.x(i, 1) = rng.normal();
  }
  PayoffParams p = binary_params(1.0, 1.0, 0.8);
  const double tol = 1e-12;
  auto [profile, report] = solve_equilibrium(state, p, SolveOptions{tol, 10000, {}});
  REQUIRE(report.converged);
  for (int i : {0, 4, 10}) {
    auto [row, sub_report] = solve_subnetwork(state, i, 5, p, SolveOptions{tol, 10000, {}});
    CHECK(sub_report.converged);
    CHECK((row.transpose() - profile.probs.row(i)).lpNorm<1>() <=
          2.0 * tol / (1.0 - report.lambda));
  }
}

TEST_CASE("subnetwork truncation error sits inside the decay bound") {
  GameState state = random_state(60, 31);
  PayoffParams p = binary_params(1.0, 1.0, 1.5);  // modulus 0.75
  const double tol = 1e-12;
  auto [profile, report] = solve_equilibrium(state, p, SolveOptions{tol, 20000, {}});
  REQUIRE(report.converged);
  for (int i = 0; i < 60; i += 7) {
    for (int h = 0; h <= 4; ++h) {
      auto [row, sub_report] = solve_subnetwork(state, i, h, p, SolveOptions{tol, 20000, {}});
      REQUIRE(sub_report.converged);
      const double gap = (row.transpose() - profile.probs.row(i)).lpNorm<1>();
      CHECK(gap <= ndd_bound(report.lambda, h) * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("an explosive modulus warns but still iterates") {
  GameState state = random_state(30, 41);
  PayoffParams p = binary_params(0.5, 0.5, 3.0);  // modulus 1.5
  auto [profile, report] = solve_equilibrium(state, p, SolveOptions{1e-10, 50, {}});
  CHECK(report.lambda == doctest::Approx(1.5));
  CHECK(report.iterations <= 50);
  profile.validate();  // still a proper profile even without convergence
}

// Internal Jacobi fixed-point kernel shared by the equilibrium solver and
// the estimation workspaces.  Not installed.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "netgame/network.hpp"

namespace netgame::detail {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Flattened adjacency of one (sub)game, tuned for repeated sweeps.
struct CompactGame {
  int m = 0;  // players
  std::vector<int> offsets;     // m + 1 entries into adj
  std::vector<int> adj;         // concatenated friend lists
  std::vector<double> inv_q;    // averaging weight; 0 for friendless players

  // Full game: each player's weight is 1 over their own friend count.
  explicit CompactGame(const DirectedNetwork& net)
      : CompactGame(net, own_degrees(net)) {}

  // Induced subgame: `degree` carries the players' friend counts in the
  // parent network, so friends cut from the subgame still occupy their
  // share of the averaging weight while contributing nothing to the peer
  // sum.
  CompactGame(const DirectedNetwork& net, const std::vector<int>& degree) {
    m = net.num_players();
    offsets.resize(m + 1);
    inv_q.resize(m);
    offsets[0] = 0;
    for (int i = 0; i < m; ++i) {
      auto f = net.friends(i);
      adj.insert(adj.end(), f.begin(), f.end());
      offsets[i + 1] = static_cast<int>(adj.size());
      inv_q[i] = degree[i] == 0 ? 0.0 : 1.0 / static_cast<double>(degree[i]);
    }
  }

 private:
  static std::vector<int> own_degrees(const DirectedNetwork& net) {
    std::vector<int> degree(net.num_players());
    for (int i = 0; i < net.num_players(); ++i) degree[i] = net.num_friends(i);
    return degree;
  }
};

// One best-response evaluation written into `out` (length K+1).
// xb points at the player's K systematic utilities x_i' beta_k;
// z points at the K peer shares.
inline void logit_row(const double* xb, const double* z, const Eigen::MatrixXd& alpha, int K,
                      double* out) {
  double umax = 0.0;
  for (int k = 0; k < K; ++k) {
    double u = xb[k];
    for (int l = 0; l < K; ++l) u += alpha(k, l) * z[l];
    out[k + 1] = u;
    if (u > umax) umax = u;
  }
  double total = std::exp(-umax);
  out[0] = total;
  for (int k = 1; k <= K; ++k) {
    out[k] = std::exp(out[k] - umax);
    total += out[k];
  }
  const double inv = 1.0 / total;
  for (int k = 0; k <= K; ++k) out[k] *= inv;
}

struct FixedPointResult {
  int iterations = 0;
  double final_step = 0.0;
  bool converged = false;
};

// Jacobi iteration of the joint best-response map on `sigma`
// (m x (K+1), overwritten with the final iterate).  Stops when the
// sup-L1 step across players falls to tol.  If step_norms is non-null,
// one entry per sweep is appended.
inline FixedPointResult jacobi_solve(const CompactGame& game, const RowMajorMatrix& xb,
                                     const Eigen::MatrixXd& alpha, RowMajorMatrix& sigma,
                                     double tol, int max_iter,
                                     std::vector<double>* step_norms = nullptr) {
  const int m = game.m;
  const int K = static_cast<int>(alpha.rows());
  RowMajorMatrix next(m, K + 1);
  std::vector<double> z(K);
  FixedPointResult res;
  for (int iter = 0; iter < max_iter; ++iter) {
    double step = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int l = 0; l < K; ++l) z[l] = 0.0;
      if (game.inv_q[i] != 0.0) {
        for (int e = game.offsets[i]; e < game.offsets[i + 1]; ++e) {
          const double* row = sigma.data() + game.adj[e] * (K + 1);
          for (int l = 0; l < K; ++l) z[l] += row[l + 1];
        }
        for (int l = 0; l < K; ++l) z[l] *= game.inv_q[i];
      }
      logit_row(xb.data() + i * K, z.data(), alpha, K, next.data() + i * (K + 1));
      double diff = 0.0;
      for (int k = 0; k <= K; ++k) diff += std::abs(next(i, k) - sigma(i, k));
      if (diff > step) step = diff;
    }
    sigma.swap(next);
    ++res.iterations;
    res.final_step = step;
    if (step_norms) step_norms->push_back(step);
    if (step <= tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace netgame::detail

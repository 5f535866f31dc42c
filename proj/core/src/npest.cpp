#include "netgame/npest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace netgame {

namespace {

// Recovers ring positions of a single symmetric cycle; throws if the
// network is anything else.  Orientation is fixed by walking from player
// 0 toward its smaller-id friend; the match indicator is invariant to
// reflecting the orientation (both windows reverse together), so either
// walk direction yields identical estimates.
std::vector<int> ring_order(const DirectedNetwork& net) {
  const int n = net.num_players();
  if (n < 3) throw std::invalid_argument("np_estimate: a circle needs n >= 3");
  for (int i = 0; i < n; ++i) {
    auto f = net.friends(i);
    if (f.size() != 2)
      throw std::invalid_argument("np_estimate: player " + std::to_string(i) +
                                  " does not have exactly two friends; not a circle");
    for (int j : f) {
      auto fj = net.friends(j);
      if (!std::binary_search(fj.begin(), fj.end(), i))
        throw std::invalid_argument("np_estimate: link between players " + std::to_string(i) +
                                    " and " + std::to_string(j) +
                                    " is not mutual; not a circle");
    }
  }
  std::vector<int> order;
  order.reserve(n);
  int prev = 0, cur = net.friends(0)[0];
  order.push_back(0);
  while (cur != 0) {
    order.push_back(cur);
    if (static_cast<int>(order.size()) > n)
      throw std::invalid_argument("np_estimate: network is not a single cycle");
    auto f = net.friends(cur);
    const int next = (f[0] == prev) ? f[1] : f[0];
    prev = cur;
    cur = next;
  }
  if (static_cast<int>(order.size()) != n)
    throw std::invalid_argument("np_estimate: network is not a single cycle");
  return order;
}

void check_discrete(const Eigen::MatrixXd& x) {
  const int n = static_cast<int>(x.rows());
  const size_t limit =
      static_cast<size_t>(std::min(64.0, std::max(4.0, static_cast<double>(n) / 4.0)));
  for (int c = 0; c < x.cols(); ++c) {
    std::vector<double> vals(x.col(c).data(), x.col(c).data() + n);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    if (vals.size() > limit)
      throw std::invalid_argument("np_estimate: covariate column " + std::to_string(c) +
                                  " has " + std::to_string(vals.size()) +
                                  " distinct values; matching requires discrete columns");
  }
}

struct Prepared {
  std::vector<int> order;     // ring position -> player id
  std::vector<int> position;  // player id -> ring position
  int h = 0;
};

Prepared prepare(const Dataset& data, int h) {
  data.state.validate();
  const int n = data.state.net.num_players();
  if (static_cast<int>(data.y.size()) != n)
    throw std::invalid_argument("np_estimate: need one outcome per player");
  Prepared prep;
  prep.h = (h < 0) ? np_default_h(n) : h;
  if (2 * prep.h + 1 > n)
    throw std::invalid_argument("np_estimate: window of radius " + std::to_string(prep.h) +
                                " wraps around a circle of " + std::to_string(n));
  prep.order = ring_order(data.state.net);
  prep.position.resize(n);
  for (int p = 0; p < n; ++p) prep.position[prep.order[p]] = p;
  check_discrete(data.state.x);
  return prep;
}

// Copies the covariate window around ring position p into buf
// (2h+1 positions by d columns, position-major).
void fill_window(const Dataset& data, const Prepared& prep, int p, double* buf) {
  const int n = static_cast<int>(prep.order.size());
  const int d = static_cast<int>(data.state.x.cols());
  int idx = 0;
  for (int l = -prep.h; l <= prep.h; ++l) {
    const int j = prep.order[(p + l + n) % n];
    for (int c = 0; c < d; ++c) buf[idx++] = data.state.x(j, c);
  }
}

struct WindowHash {
  size_t operator()(const std::vector<double>& w) const {
    // FNV-1a over the raw bit patterns; exact-equality matching needs an
    // exact-representation hash.
    size_t hash = 1469598103934665603ULL;
    for (double v : w) {
      uint64_t bits;
      std::memcpy(&bits, &v, sizeof(bits));
      for (int b = 0; b < 8; ++b) {
        hash ^= (bits >> (8 * b)) & 0xFF;
        hash *= 1099511628211ULL;
      }
    }
    return hash;
  }
};

}  // namespace

int np_default_h(int n) {
  if (n < 1) throw std::invalid_argument("np_default_h: need n >= 1");
  return static_cast<int>(std::floor(0.5 * std::log2(static_cast<double>(n))));
}

NpEstimate np_estimate(const Dataset& data, int target, int h) {
  const int n = data.state.net.num_players();
  if (target < 0 || target >= n)
    throw std::invalid_argument("np_estimate: target player out of range");
  Prepared prep = prepare(data, h);
  const int d = static_cast<int>(data.state.x.cols());
  const int width = (2 * prep.h + 1) * d;

  std::vector<double> target_window(width), window(width);
  fill_window(data, prep, prep.position[target], target_window.data());
  double sum = 0.0;
  int matches = 0;
  for (int p = 0; p < n; ++p) {
    fill_window(data, prep, p, window.data());
    if (std::equal(window.begin(), window.end(), target_window.begin())) {
      sum += data.y[prep.order[p]];
      ++matches;
    }
  }
  if (matches == 0)
    throw std::runtime_error("np_estimate: no matching window for target player");
  return NpEstimate{sum / matches, matches, prep.h};
}

std::vector<NpEstimate> np_estimate_all(const Dataset& data, int h) {
  Prepared prep = prepare(data, h);
  const int n = data.state.net.num_players();
  const int d = static_cast<int>(data.state.x.cols());
  const int width = (2 * prep.h + 1) * d;

  struct Bucket {
    double sum = 0.0;
    int count = 0;
  };
  std::unordered_map<std::vector<double>, Bucket, WindowHash> buckets;
  buckets.reserve(2 * n);
  std::vector<double> window(width);
  for (int p = 0; p < n; ++p) {
    fill_window(data, prep, p, window.data());
    auto [it, inserted] = buckets.try_emplace(window);
    it->second.sum += data.y[prep.order[p]];
    it->second.count += 1;
  }

  std::vector<NpEstimate> out(n);
  for (int p = 0; p < n; ++p) {
    fill_window(data, prep, p, window.data());
    const Bucket& b = buckets.at(window);
    out[prep.order[p]] = NpEstimate{b.sum / b.count, b.count, prep.h};
  }
  return out;
}

}  // namespace netgame

#include "netgame/network.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "netgame/rng.hpp"

namespace netgame {

DirectedNetwork::DirectedNetwork(std::vector<std::vector<int>> friends)
    : friends_(std::move(friends)) {
  validate_and_index();
}

DirectedNetwork::DirectedNetwork(int n, std::span<const std::pair<int, int>> edges) {
  if (n < 1) throw std::invalid_argument("network: need at least one player");
  friends_.resize(n);
  for (const auto& [src, dst] : edges) {
    if (src < 0 || src >= n || dst < 0 || dst >= n)
      throw std::invalid_argument("network: edge (" + std::to_string(src) + ", " +
                                  std::to_string(dst) + ") out of range");
    friends_[src].push_back(dst);
  }
  validate_and_index();
}

void DirectedNetwork::validate_and_index() {
  const int n = num_players();
  if (n < 1) throw std::invalid_argument("network: need at least one player");
  in_degree_.assign(n, 0);
  num_edges_ = 0;
  for (int i = 0; i < n; ++i) {
    auto& list = friends_[i];
    std::sort(list.begin(), list.end());
    for (size_t k = 0; k < list.size(); ++k) {
      const int j = list[k];
      if (j < 0 || j >= n)
        throw std::invalid_argument("network: player " + std::to_string(i) +
                                    " has out-of-range friend " + std::to_string(j));
      if (j == i)
        throw std::invalid_argument("network: player " + std::to_string(i) +
                                    " lists itself as a friend");
      if (k > 0 && list[k - 1] == j)
        throw std::invalid_argument("network: player " + std::to_string(i) +
                                    " lists friend " + std::to_string(j) + " twice");
      ++in_degree_[j];
    }
    num_edges_ += static_cast<int>(list.size());
  }
}

std::span<const int> DirectedNetwork::friends(int i) const {
  return std::span<const int>(friends_[i]);
}

int DirectedNetwork::num_friends(int i) const {
  return static_cast<int>(friends_[i].size());
}

Neighborhood neighborhood(const DirectedNetwork& net, int center, int radius) {
  const int n = net.num_players();
  if (center < 0 || center >= n)
    throw std::invalid_argument("neighborhood: center out of range");
  if (radius < 0) throw std::invalid_argument("neighborhood: negative radius");

  std::vector<char> seen(n, 0);
  std::vector<int> frontier{center}, next;
  seen[center] = 1;
  Neighborhood out;
  out.center = center;
  out.radius = radius;
  out.members.push_back(center);
  for (int hop = 0; hop < radius && !frontier.empty(); ++hop) {
    next.clear();
    for (int u : frontier) {
      for (int v : net.friends(u)) {
        if (!seen[v]) {
          seen[v] = 1;
          next.push_back(v);
          out.members.push_back(v);
        }
      }
    }
    frontier.swap(next);
  }
  std::sort(out.members.begin(), out.members.end());
  return out;
}

SubgraphResult extract_subgraph(const DirectedNetwork& net, int center, int radius) {
  Neighborhood hood = neighborhood(net, center, radius);
  const int m = static_cast<int>(hood.members.size());

  // hood.members is sorted, so subgraph ids preserve the original order
  // and membership tests reduce to binary search.
  std::vector<std::vector<int>> sub_friends(m);
  for (int u = 0; u < m; ++u) {
    for (int v : net.friends(hood.members[u])) {
      auto it = std::lower_bound(hood.members.begin(), hood.members.end(), v);
      if (it != hood.members.end() && *it == v)
        sub_friends[u].push_back(static_cast<int>(it - hood.members.begin()));
    }
  }

  SubgraphResult out{DirectedNetwork(std::move(sub_friends)), std::move(hood.members), 0};
  auto it = std::lower_bound(out.original_ids.begin(), out.original_ids.end(), center);
  out.center = static_cast<int>(it - out.original_ids.begin());
  return out;
}

namespace {

// Ring position of player id under the spiral labeling: even ids fan out
// on one side of player 0, odd ids on the other.
int circle_position(int id, int n) {
  return (id % 2 == 0) ? id / 2 : n - (id + 1) / 2;
}

// Inverse of circle_position.
int circle_id_at(int pos, int n) {
  return (pos <= (n - 1) / 2) ? 2 * pos : 2 * (n - pos) - 1;
}

}  // namespace

DirectedNetwork generate_circle(int n) {
  if (n < 3) throw std::invalid_argument("generate_circle: need n >= 3");
  std::vector<std::vector<int>> friends(n);
  for (int id = 0; id < n; ++id) {
    const int pos = circle_position(id, n);
    const int left = circle_id_at((pos + n - 1) % n, n);
    const int right = circle_id_at((pos + 1) % n, n);
    friends[id] = {std::min(left, right), std::max(left, right)};
  }
  return DirectedNetwork(std::move(friends));
}

DirectedNetwork generate_random(int n, uint64_t seed) {
  if (n < 5) throw std::invalid_argument("generate_random: need n >= 5");
  Rng rng(seed);
  const double p = 1.0 / n;
  std::vector<std::vector<int>> friends(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double u = rng.uniform01();
      // States: below 1-4/n no link; then one-directional links with
      // probability 1/n each; the top 2/n slice is a mutual link.
      if (u < 1.0 - 4.0 * p) continue;
      if (u < 1.0 - 3.0 * p) {
        friends[i].push_back(j);
      } else if (u < 1.0 - 2.0 * p) {
        friends[j].push_back(i);
      } else {
        friends[i].push_back(j);
        friends[j].push_back(i);
      }
    }
  }
  return DirectedNetwork(std::move(friends));
}

}  // namespace netgame

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "netgame/network.hpp"
#include "netgame/rng.hpp"
#include "oracles.hpp"

using namespace netgame;

namespace {

std::vector<int> to_vec(std::span<const int> s) { return {s.begin(), s.end()}; }

// Relabels a network by a permutation: player i becomes perm[i].
DirectedNetwork permuted(const DirectedNetwork& net, const std::vector<int>& perm) {
  std::vector<std::vector<int>> friends(net.num_players());
  for (int i = 0; i < net.num_players(); ++i)
    for (int j : net.friends(i)) friends[perm[i]].push_back(perm[j]);
  return DirectedNetwork(std::move(friends));
}

}  // namespace

TEST_CASE("construction validates ids, self loops, duplicates") {
  using Lists = std::vector<std::vector<int>>;
  CHECK_THROWS_AS(DirectedNetwork(Lists{{0}}), std::invalid_argument);         // self loop
  CHECK_THROWS_AS(DirectedNetwork(Lists{{1, 1}, {}}), std::invalid_argument);  // duplicate
  CHECK_THROWS_AS(DirectedNetwork(Lists{{2}, {0}}), std::invalid_argument);    // out of range
  CHECK_THROWS_AS(DirectedNetwork(Lists{}), std::invalid_argument);

  DirectedNetwork net(Lists{{2, 1}, {}, {0}});
  CHECK(net.num_players() == 3);
  CHECK(to_vec(net.friends(0)) == std::vector<int>{1, 2});  // sorted
  CHECK(net.num_friends(1) == 0);
  CHECK(net.num_edges() == 3);
  CHECK(net.centrality(0) == 1);
  CHECK(net.centrality(1) == 1);
  CHECK(net.centrality(2) == 1);
}

TEST_CASE("circle generator: ring structure and spiral labels") {
  DirectedNetwork c5 = generate_circle(5);
  CHECK(to_vec(c5.friends(0)) == std::vector<int>{1, 2});
  for (int i = 0; i < 5; ++i) {
    CHECK(c5.num_friends(i) == 2);
    CHECK(c5.centrality(i) == 2);
    for (int j : c5.friends(i)) {
      auto fj = c5.friends(j);
      CHECK(std::binary_search(fj.begin(), fj.end(), i));  // mutual
    }
  }

  // n = 3 degenerates to the complete triangle.
  DirectedNetwork c3 = generate_circle(3);
  for (int i = 0; i < 3; ++i) CHECK(c3.num_friends(i) == 2);

  // One cycle covering all players.
  DirectedNetwork c100 = generate_circle(100);
  std::set<int> visited{0};
  int prev = 0, cur = c100.friends(0)[0];
  while (cur != 0) {
    visited.insert(cur);
    auto f = c100.friends(cur);
    const int next = (f[0] == prev) ? f[1] : f[0];
    prev = cur;
    cur = next;
  }
  CHECK(visited.size() == 100);

  CHECK_THROWS_AS(generate_circle(2), std::invalid_argument);
}

TEST_CASE("circle labels spiral outward, so prefixes are neighborhoods") {
  DirectedNetwork net = generate_circle(100);
  for (int h : {0, 1, 2, 3, 7}) {
    Neighborhood hood = neighborhood(net, 0, h);
    std::vector<int> expect(2 * h + 1);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(hood.members == expect);
  }
}

TEST_CASE("neighborhood matches the inductive definition on random networks") {
  for (uint64_t seed : {1u, 2u, 3u}) {
    DirectedNetwork net = generate_random(60, seed);
    for (int i = 0; i < 60; ++i) {
      for (int h = 0; h <= 4; ++h) {
        Neighborhood hood = neighborhood(net, i, h);
        CHECK(hood.members == oracles::inductive_neighborhood(net, i, h));
        CHECK(hood.center == i);
        CHECK(std::binary_search(hood.members.begin(), hood.members.end(), i));
      }
    }
  }
}

TEST_CASE("neighborhood radius zero and saturation") {
  DirectedNetwork net = generate_random(40, 9);
  CHECK(neighborhood(net, 5, 0).members == std::vector<int>{5});
  // Once the reachable set stabilizes, growing the radius changes nothing.
  auto at39 = neighborhood(net, 5, 39).members;
  CHECK(neighborhood(net, 5, 40).members == at39);
  CHECK_THROWS_AS(neighborhood(net, -1, 1), std::invalid_argument);
  CHECK_THROWS_AS(neighborhood(net, 0, -1), std::invalid_argument);
}

TEST_CASE("subgraph keeps exactly the inside edges") {
  DirectedNetwork c10 = generate_circle(10);
  SubgraphResult sub = extract_subgraph(c10, 0, 1);
  CHECK(sub.original_ids == std::vector<int>{0, 1, 2});
  CHECK(sub.center == 0);
  // A radius-1 circle neighborhood induces a path: the center keeps both
  // friends, each end keeps only its edge back.
  CHECK(to_vec(sub.graph.friends(0)) == std::vector<int>{1, 2});
  CHECK(to_vec(sub.graph.friends(1)) == std::vector<int>{0});
  CHECK(to_vec(sub.graph.friends(2)) == std::vector<int>{0});

  DirectedNetwork net = generate_random(80, 4);
  for (int i : {0, 17, 42}) {
    for (int h : {0, 1, 2, 3}) {
      SubgraphResult s = extract_subgraph(net, i, h);
      CHECK(std::is_sorted(s.original_ids.begin(), s.original_ids.end()));
      CHECK(s.original_ids[s.center] == i);
      const auto& ids = s.original_ids;
      for (int u = 0; u < s.graph.num_players(); ++u) {
        // Friends inside the subgraph are exactly the original friends
        // that fall in the neighborhood.
        std::vector<int> expect;
        for (int v : net.friends(ids[u]))
          if (std::binary_search(ids.begin(), ids.end(), v)) expect.push_back(v);
        std::vector<int> got;
        for (int v : s.graph.friends(u)) got.push_back(ids[v]);
        CHECK(got == expect);
      }
    }
  }
}

TEST_CASE("relabeling commutes with neighborhoods and subgraphs") {
  DirectedNetwork net = generate_random(50, 12);
  std::vector<int> perm(50);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(5);
  for (int i = 49; i > 0; --i) std::swap(perm[i], perm[rng.next_u64() % (i + 1)]);
  DirectedNetwork relabeled = permuted(net, perm);

  for (int i : {0, 7, 31}) {
    for (int h : {1, 2, 3}) {
      auto members = neighborhood(net, i, h).members;
      for (int& m : members) m = perm[m];
      std::sort(members.begin(), members.end());
      CHECK(neighborhood(relabeled, perm[i], h).members == members);
    }
  }
}

TEST_CASE("random generator hits its degree and reciprocity targets") {
  const int n = 2000;
  DirectedNetwork net = generate_random(n, 2024);

  double total_out = 0.0;
  for (int i = 0; i < n; ++i) total_out += net.num_friends(i);
  const double mean_q = total_out / n;
  // E[mean degree] = 3(n-1)/n; the pair-state variance puts sd(mean)
  // near sqrt(5/n).
  CHECK(std::abs(mean_q - 3.0 * (n - 1) / n) < 3.0 * std::sqrt(5.0 / n));

  int pairs_linked = 0, pairs_mutual = 0;
  for (int i = 0; i < n; ++i) {
    auto fi = net.friends(i);
    for (int j = i + 1; j < n; ++j) {
      auto fj = net.friends(j);
      const bool ij = std::binary_search(fi.begin(), fi.end(), j);
      const bool ji = std::binary_search(fj.begin(), fj.end(), i);
      if (ij || ji) {
        ++pairs_linked;
        pairs_mutual += (ij && ji);
      }
    }
  }
  const double frac_mutual = pairs_mutual / static_cast<double>(pairs_linked);
  // Linked pairs split 1:1:2 across one-way and mutual states.
  CHECK(std::abs(frac_mutual - 0.5) < 3.0 * std::sqrt(0.25 / pairs_linked));

  // Determinism and seed sensitivity.
  DirectedNetwork again = generate_random(n, 2024);
  bool same = true;
  for (int i = 0; i < n; ++i) same = same && (to_vec(net.friends(i)) == to_vec(again.friends(i)));
  CHECK(same);
  DirectedNetwork other = generate_random(n, 2025);
  bool identical = true;
  for (int i = 0; i < n; ++i)
    identical = identical && (to_vec(net.friends(i)) == to_vec(other.friends(i)));
  CHECK_FALSE(identical);

  CHECK_THROWS_AS(generate_random(4, 1), std::invalid_argument);
}

TEST_CASE("in-degree index is consistent with friend lists") {
  DirectedNetwork net = generate_random(300, 8);
  std::vector<int> indeg(300, 0);
  for (int i = 0; i < 300; ++i)
    for (int j : net.friends(i)) ++indeg[j];
  CHECK(net.in_degrees() == indeg);
  CHECK(std::accumulate(indeg.begin(), indeg.end(), 0) == net.num_edges());
}

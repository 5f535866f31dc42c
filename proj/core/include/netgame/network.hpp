#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace netgame {

// Directed friendship network on players 0 .. n-1.
//
// Ids are 0-based throughout the library; file formats and the command
// line use 1-based ids and the I/O layer translates.  An edge (i, j)
// means "j is a friend of i": player i observes j and reacts to j's
// behavior.  Edges need not be mutual.  Friend lists are stored sorted
// ascending, and instances are immutable after construction, so sharing
// one network across concurrent workers is safe.
class DirectedNetwork {
 public:
  // Builds from per-player friend lists.  Lists are sorted; self loops,
  // duplicate entries, and out-of-range ids are rejected.
  explicit DirectedNetwork(std::vector<std::vector<int>> friends);

  // Builds from an edge list.  Each pair (src, dst) adds dst to src's
  // friend list.
  DirectedNetwork(int n, std::span<const std::pair<int, int>> edges);

  int num_players() const { return static_cast<int>(friends_.size()); }

  // Sorted friend list of player i (the players i reacts to).
  std::span<const int> friends(int i) const;

  // Out-degree: the number of friends player i has.
  int num_friends(int i) const;

  // In-degree: the number of players that list i as a friend.
  int centrality(int i) const { return in_degree_[i]; }

  const std::vector<int>& in_degrees() const { return in_degree_; }

  int num_edges() const { return num_edges_; }

 private:
  void validate_and_index();

  std::vector<std::vector<int>> friends_;
  std::vector<int> in_degree_;
  int num_edges_ = 0;
};

// The h-hop neighborhood of a player: the closure of {center} under h
// rounds of friend expansion, so radius 0 is the singleton {center} and
// radius h adds the friends of everyone reached at radius h-1.
struct Neighborhood {
  int center = 0;
  int radius = 0;
  std::vector<int> members;  // sorted ascending, always contains center
};

Neighborhood neighborhood(const DirectedNetwork& net, int center, int radius);

// A neighborhood-induced subgame network.  `graph` is the induced
// subnetwork on the h-hop neighborhood of the center: vertex u keeps
// exactly the friends it has inside the neighborhood.  `original_ids`
// maps subgraph ids to ids in the parent network (sorted ascending) and
// `center` is the subgraph id of the neighborhood's center.
struct SubgraphResult {
  DirectedNetwork graph;
  std::vector<int> original_ids;
  int center = 0;
};

SubgraphResult extract_subgraph(const DirectedNetwork& net, int center, int radius);

// Circle network: players sit on a ring and befriend their two ring
// neighbors.  Labels spiral outward from player 0: player 1 sits to one
// side of 0, player 2 to the other, player 3 beyond 1, and so on, which
// makes {0, ..., 2h} the h-hop neighborhood of player 0.  Requires
// n >= 3; n = 3 degenerates to the complete triangle.
DirectedNetwork generate_circle(int n);

// Sparse random network: every unordered pair {i, j} (scanned in
// lexicographic order, consuming exactly one uniform draw each) is
// independently assigned one of four states -- no link, i->j only,
// j->i only, or mutual -- with probabilities 1-4/n, 1/n, 1/n, 2/n.
// Expected out-degree is about 3 and about half of all linked pairs are
// mutual.  Requires n >= 5 so the probabilities are valid.
DirectedNetwork generate_random(int n, uint64_t seed);

}  // namespace netgame

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace exsamp {

// Undirected simple graph over vertices 0..n-1, CSR adjacency with sorted
// neighbor lists.  Immutable after construction.
class Graph {
 public:
  Graph() = default;

  // Builds from an edge list.  Duplicate edges collapse; self-loops and
  // out-of-range endpoints are rejected.
  static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  int vertex_count() const { return static_cast<int>(offsets_.size()) - 1; }
  int edge_count() const { return static_cast<int>(adj_.size()) / 2; }

  std::span<const int> neighbors(int v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }
  int max_degree() const;
  bool has_edge(int u, int v) const;

  // Vertices at distance <= k from v, including v itself, sorted ascending.
  std::vector<int> k_hop_ball(int v, int k) const;

  // Size of the largest exclusive k-hop neighborhood.
  int delta_k(int k) const;

  // BFS distance; -1 when disconnected.
  int distance(int u, int v) const;

  // Max pairwise distance in G between members of vs; -1 if some pair is
  // disconnected.
  int set_diameter(std::span<const int> vs) const;

 private:
  std::vector<int> offsets_{0};
  std::vector<int> adj_;
};

// Families: path, cycle, grid (rows, cols), random_regular (n, d),
// erdos_renyi (n, prob).  Deterministic in (family, params, seed).
Graph generate_graph(const std::string& family,
                     const std::map<std::string, std::string>& params,
                     std::uint64_t seed);

// "family:key=val,key=val" shorthand, e.g. "cycle:n=64".
Graph parse_graph_spec(const std::string& spec, std::uint64_t seed);

// File format: first line "n m", then m lines "u v".
Graph read_graph_file(std::istream& in);
void write_graph_file(const Graph& g, std::ostream& out);

}  // namespace exsamp

#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "signalkit/matrix.hpp"

namespace signalkit {

using Edge = std::pair<std::size_t, std::size_t>;

// Simple undirected graph on vertices 0..n-1 with a dense adjacency table.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n) : n_(n), adj_(n * n, 0) {}

  // Throws on self-loops or out-of-range endpoints; duplicate edges are merged.
  static Graph from_edges(std::size_t n, const std::vector<Edge>& edges);

  std::size_t num_vertices() const { return n_; }
  bool has_edge(std::size_t u, std::size_t v) const { return adj_[u * n_ + v] != 0; }
  void add_edge(std::size_t u, std::size_t v);

  // Sorted (u < v) edge list.
  std::vector<Edge> edges() const;
  std::size_t num_edges() const;
  std::size_t degree(std::size_t v) const;
  Matrix adjacency() const;

  // 0/1 colouring if the graph is bipartite.
  std::optional<std::vector<int>> bipartition() const;

  bool operator==(const Graph&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<unsigned char> adj_;
};

}  // namespace signalkit

#include "signalkit/graph.hpp"

#include <queue>
#include <string>

#include "signalkit/errors.hpp"

namespace signalkit {

Graph Graph::from_edges(std::size_t n, const std::vector<Edge>& edges) {
  Graph g(n);
  for (const auto& [u, v] : edges) g.add_edge(u, v);
  return g;
}

void Graph::add_edge(std::size_t u, std::size_t v) {
  if (u >= n_ || v >= n_) throw DimensionError("edge endpoint out of range");
  if (u == v) throw ContractViolation("self-loop at vertex " + std::to_string(u));
  adj_[u * n_ + v] = adj_[v * n_ + u] = 1;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t v = u + 1; v < n_; ++v)
      if (has_edge(u, v)) out.emplace_back(u, v);
  return out;
}

std::size_t Graph::num_edges() const {
  std::size_t m = 0;
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t v = u + 1; v < n_; ++v) m += has_edge(u, v);
  return m;
}

std::size_t Graph::degree(std::size_t v) const {
  std::size_t d = 0;
  for (std::size_t u = 0; u < n_; ++u) d += has_edge(u, v);
  return d;
}

Matrix Graph::adjacency() const {
  Matrix a(n_, n_, 0.0);
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t v = 0; v < n_; ++v) a(u, v) = has_edge(u, v) ? 1.0 : 0.0;
  return a;
}

std::optional<std::vector<int>> Graph::bipartition() const {
  std::vector<int> colour(n_, -1);
  for (std::size_t s = 0; s < n_; ++s) {
    if (colour[s] >= 0) continue;
    colour[s] = 0;
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t v = 0; v < n_; ++v) {
        if (!has_edge(u, v)) continue;
        if (colour[v] < 0) {
          colour[v] = 1 - colour[u];
          q.push(v);
        } else if (colour[v] == colour[u]) {
          return std::nullopt;
        }
      }
    }
  }
  return colour;
}

}  // namespace signalkit

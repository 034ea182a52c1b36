// Small named instances shared by the unit and acceptance tests.
#pragma once

#include <random>

#include "signalkit/routing.hpp"
#include "signalkit/security.hpp"
#include "signalkit/zerosum.hpp"

namespace fixtures {

using namespace signalkit;

// s = 0, t = 1; a constant link and a linear link.
inline LatencyNetwork pigou() { return {2, {{0, 1}, {0, 1}}, {{0.0, 1.0}, {1.0, 0.0}}}; }

// s = 0, v = 1, w = 2, t = 3. Edge 4 is the zero-latency shortcut v -> w.
inline LatencyNetwork braess() {
  return {4,
          {{0, 1}, {1, 3}, {0, 2}, {2, 3}, {1, 2}},
          {{1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}, {0.0, 0.0}}};
}

inline Commodity unit_demand(std::size_t s, std::size_t t) { return {s, t, 1.0}; }

// Random DAG on `nodes` nodes with a guaranteed 0 -> nodes-1 chain, affine
// latencies per state and a random prior.
inline RoutingInstance random_routing(std::mt19937_64& gen, std::size_t nodes, std::size_t states) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RoutingInstance inst;
  inst.num_nodes = nodes;
  for (std::size_t i = 0; i + 1 < nodes; ++i) inst.arcs.push_back({i, i + 1});
  for (std::size_t i = 0; i < nodes; ++i)
    for (std::size_t j = i + 2; j < nodes; ++j)
      if (u(gen) < 0.5) inst.arcs.push_back({i, j});
  for (std::size_t t = 0; t < states; ++t) {
    std::vector<AffineLatency> lat;
    for (std::size_t e = 0; e < inst.arcs.size(); ++e) lat.push_back({2.0 * u(gen), 2.0 * u(gen)});
    inst.latency.push_back(std::move(lat));
  }
  double total = 0.0;
  for (std::size_t t = 0; t < states; ++t) total += (inst.prior.emplace_back(0.05 + u(gen)));
  for (auto& p : inst.prior) p /= total;
  inst.commodities = {{0, nodes - 1, 0.5 + u(gen)}};
  return inst;
}

// Payoffs k/8 with k uniform in [-8, 8]; exact in binary and in rationals.
inline Matrix random_eighths(std::mt19937_64& gen, std::size_t r, std::size_t c) {
  std::uniform_int_distribution<int> k(-8, 8);
  Matrix a(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) a(i, j) = k(gen) / 8.0;
  return a;
}

inline std::vector<double> random_simplex(std::mt19937_64& gen, std::size_t m) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(m);
  double s = 0.0;
  for (auto& v : p) s += (v = e(gen));
  for (auto& v : p) v /= s;
  return p;
}

inline BayesianGame random_game(std::mt19937_64& gen, std::size_t states, std::size_t r, std::size_t c) {
  BayesianGame g;
  for (std::size_t t = 0; t < states; ++t) g.payoffs.push_back(random_eighths(gen, r, c));
  g.prior = random_simplex(gen, states);
  return g;
}

// States A1 = [[1],[-1]], A2 = [[-1],[1]]: val(mu) = |2 mu_1 - 1|.
inline BayesianGame convex_example() {
  return {{Matrix{{1.0}, {-1.0}}, Matrix{{-1.0}, {1.0}}}, {0.5, 0.5}, 1.0};
}

// |payoffs| <= 1 and a Lipschitz bound of at most 1.8 for M <= 3.
inline ExtendedSecurityGame random_esg(std::mt19937_64& gen, std::size_t states, std::size_t r, std::size_t c) {
  std::uniform_real_distribution<double> small(-0.2, 0.2), wide(-0.6, 0.6);
  ExtendedSecurityGame g;
  g.abar = Matrix(r, c);
  g.b = Matrix(r, states);
  g.d = Matrix(c, states);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) g.abar(i, j) = small(gen);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t t = 0; t < states; ++t) g.b(i, t) = small(gen);
  for (std::size_t j = 0; j < c; ++j)
    for (std::size_t t = 0; t < states; ++t) g.d(j, t) = wide(gen);
  g.prior = random_simplex(gen, states);
  g.payoff_bound = 1.0;
  return g;
}

inline Graph cycle(std::size_t n) {
  Graph g(n);
  for (std::size_t v = 0; v < n; ++v) g.add_edge(v, (v + 1) % n);
  return g;
}

inline Graph complete(std::size_t n) {
  Graph g(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

// K_{a,b} with sides {0..a-1} and {a..a+b-1}.
inline Graph complete_bipartite(std::size_t a, std::size_t b) {
  Graph g(a + b);
  for (std::size_t u = 0; u < a; ++u)
    for (std::size_t v = 0; v < b; ++v) g.add_edge(u, a + v);
  return g;
}

}  // namespace fixtures

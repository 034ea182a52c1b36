#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "signalkit/graph.hpp"
#include "signalkit/matrix.hpp"
#include "signalkit/zerosum.hpp"

namespace signalkit {

using VertexSet = std::vector<std::size_t>;  // sorted, distinct

struct PlantedGraph {
  Graph graph;
  std::vector<VertexSet> planted_sets;
  std::vector<Edge> background_edges;  // E-: drawn before planting
  std::vector<Edge> clique_edges;      // E+: pairs added by planting that were not in E-
  std::uint64_t seed = 0;
  double p = 0.0;
  std::size_t k = 0;

  std::size_t n() const { return graph.num_vertices(); }
  Graph background_graph() const { return Graph::from_edges(n(), background_edges); }
};

PlantedGraph gen_pcover(std::size_t n, double p, std::size_t k, std::size_t r, std::uint64_t seed);

double bi_density(const Graph& graph, const VertexSet& s, const VertexSet& t);

struct HardnessGameParams {
  double Z = 20.0;
  int c2_scaled = 8;
  std::size_t N_scaled = 2000;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Compact form of the game with A^theta = [a^theta  B  1 (d^theta)^T].
/// States and row strategies are vertices; column block sizes are 1, N, N.
struct HardnessGame {
  Matrix adjacency;  // n x n, column theta is a^theta
  Matrix b;          // n x N
  Matrix d;          // n x N, row theta is d^theta
  double Z = 20.0;

  std::size_t n() const { return adjacency.rows(); }
  std::size_t num_columns() const { return 2 * b.cols() + 1; }
  std::vector<double> prior() const { return std::vector<double>(n(), 1.0 / static_cast<double>(n())); }

  // Payoff matrix at mu restricted to undominated columns: [A_G mu, B, min_j (mu^T D)_j].
  Matrix reduced_payoffs(std::span<const double> mu) const;
  Equilibrium equilibrium(std::span<const double> mu) const;
  double val(std::span<const double> mu) const { return equilibrium(mu).value; }

  // Dense Bayesian game; throws CapExceeded above `max_entries` stored doubles.
  BayesianGame dense(std::size_t max_entries = 50'000'000) const;
  ValueFunction value_function() const;
};

// Per-column streams: B column j uses derive_seed(seed, "B", j), D column j uses derive_seed(seed, "D", j).
HardnessGame build_hardness_game(const PlantedGraph& graph, const HardnessGameParams& params);

// Signals uniform on S'_i = S_i minus earlier sets (kept when |S'_i| >= min_frac * k), plus one residual signal.
SignalingScheme clique_cover_scheme(const PlantedGraph& graph, double min_frac = 1e-4);

struct ClusterThresholds {
  double value;   // 1 - sqrt(eps)
  double degree;  // 1 - Z sqrt(eps) / (Z - 2)
};

ClusterThresholds cluster_thresholds(double eps, double Z);

std::vector<VertexSet> extract_clusters(const HardnessGame& game, const SignalingScheme& scheme, double eps);

struct RecoveryOptions {
  double eps = 0.5;             // assumed |S cap T| / |T|
  std::size_t max_subsets = 2000;
};

struct RecoveryResult {
  bool success = false;  // a clique of size >= k was found
  VertexSet clique;
  std::size_t subsets_tried = 0;
  std::size_t subset_size = 0;
};

RecoveryResult recover_clique(const Graph& graph, const VertexSet& t, std::size_t k, double c3_scaled,
                              std::uint64_t seed, const RecoveryOptions& options = {});

double check_cover_condition(const std::vector<VertexSet>& family, const std::vector<VertexSet>& planted_sets,
                             double eps, double c3_scaled, std::size_t n);

}  // namespace signalkit

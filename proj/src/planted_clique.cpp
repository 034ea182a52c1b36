#include "signalkit/planted_clique.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "signalkit/errors.hpp"
#include "signalkit/rng.hpp"

namespace signalkit {

PlantedGraph gen_pcover(std::size_t n, double p, std::size_t k, std::size_t r, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("edge probability must lie in [0, 1]");
  if (k > n) throw ContractViolation("clique size exceeds vertex count");
  PlantedGraph out;
  out.graph = Graph(n);
  out.seed = seed;
  out.p = p;
  out.k = k;

  Rng background(derive_seed(seed, "background"));
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (background.bernoulli(p)) {
        out.graph.add_edge(u, v);
        out.background_edges.emplace_back(u, v);
      }

  for (std::size_t i = 0; i < r; ++i) {
    Rng pick(derive_seed(seed, "clique", i));
    VertexSet s = pick.sample(n, k);
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = a + 1; b < s.size(); ++b)
        if (!out.graph.has_edge(s[a], s[b])) {
          out.graph.add_edge(s[a], s[b]);
          out.clique_edges.emplace_back(s[a], s[b]);
        }
    out.planted_sets.push_back(std::move(s));
  }
  std::sort(out.clique_edges.begin(), out.clique_edges.end());
  return out;
}

double bi_density(const Graph& graph, const VertexSet& s, const VertexSet& t) {
  if (s.empty() || t.empty()) throw ContractViolation("bi_density of an empty set");
  std::size_t hits = 0;
  for (auto u : s)
    for (auto v : t)
      if (u != v && graph.has_edge(u, v)) ++hits;
  return static_cast<double>(hits) / (static_cast<double>(s.size()) * static_cast<double>(t.size()));
}

void HardnessGameParams::validate() const {
  if (!(Z > 2.0)) throw ContractViolation("Z must exceed 2");
  if (N_scaled < 1) throw ContractViolation("N_scaled must be at least 1");
  if (c2_scaled < 1) throw ContractViolation("c2_scaled must be positive");
}

Matrix HardnessGame::reduced_payoffs(std::span<const double> mu) const {
  const std::size_t nn = n(), N = b.cols();
  if (mu.size() != nn) throw DimensionError("posterior length differs from vertex count");
  const auto amu = right_multiply(adjacency, mu);
  const auto dmu = left_multiply(mu, d);
  const double dmin = dmu.empty() ? 0.0 : *std::min_element(dmu.begin(), dmu.end());
  Matrix out(nn, N + 2);
  for (std::size_t i = 0; i < nn; ++i) {
    out(i, 0) = amu[i];
    for (std::size_t j = 0; j < N; ++j) out(i, j + 1) = b(i, j);
    out(i, N + 1) = dmin;
  }
  return out;
}

Equilibrium HardnessGame::equilibrium(std::span<const double> mu) const {
  check_posterior(mu, n(), 1e-9);
  const std::size_t N = b.cols();
  Equilibrium red = game_value(reduced_payoffs(mu));
  // Map the reduced column strategy back: mass on the constant column goes to an argmin D column.
  Equilibrium eq;
  eq.value = red.value;
  eq.row_strategy = std::move(red.row_strategy);
  eq.col_strategy.assign(num_columns(), 0.0);
  eq.col_strategy[0] = red.col_strategy[0];
  for (std::size_t j = 0; j < N; ++j) eq.col_strategy[1 + j] = red.col_strategy[1 + j];
  const auto dmu = left_multiply(mu, d);
  const std::size_t jmin = static_cast<std::size_t>(std::min_element(dmu.begin(), dmu.end()) - dmu.begin());
  eq.col_strategy[1 + N + jmin] = red.col_strategy[N + 1];
  return eq;
}

BayesianGame HardnessGame::dense(std::size_t max_entries) const {
  const std::size_t nn = n(), c = num_columns(), N = b.cols();
  const double entries = static_cast<double>(nn) * static_cast<double>(nn) * static_cast<double>(c);
  if (entries > static_cast<double>(max_entries))
    throw CapExceeded("dense hardness game would hold " + std::to_string(static_cast<long long>(entries)) +
                      " entries, above cap " + std::to_string(max_entries));
  BayesianGame g;
  g.prior = prior();
  g.payoff_bound = Z;
  for (std::size_t theta = 0; theta < nn; ++theta) {
    Matrix a(nn, c);
    for (std::size_t i = 0; i < nn; ++i) {
      a(i, 0) = adjacency(i, theta);
      for (std::size_t j = 0; j < N; ++j) {
        a(i, 1 + j) = b(i, j);
        a(i, 1 + N + j) = d(theta, j);
      }
    }
    g.payoffs.push_back(std::move(a));
  }
  return g;
}

ValueFunction HardnessGame::value_function() const {
  ValueFunction f;
  f.num_states = n();
  f.payoff_bound = Z;
  f.prior = prior();
  f.value = [this](std::span<const double> mu) { return val(mu); };
  return f;
}

HardnessGame build_hardness_game(const PlantedGraph& graph, const HardnessGameParams& params) {
  params.validate();
  const std::size_t n = graph.n(), N = params.N_scaled;
  HardnessGame g;
  g.Z = params.Z;
  g.adjacency = graph.graph.adjacency();
  g.b = Matrix(n, N);
  g.d = Matrix(n, N);
  const double low = 2.0 - params.Z;
  const double prob = 3.0 / (4.0 * params.Z);
  for (std::size_t j = 0; j < N; ++j) {
    Rng rb(derive_seed(params.seed, "B", j));
    for (std::size_t i = 0; i < n; ++i) g.b(i, j) = rb.bernoulli(prob) ? low : 2.0;
    Rng rd(derive_seed(params.seed, "D", j));
    for (std::size_t t = 0; t < n; ++t) g.d(t, j) = rd.bernoulli(prob) ? low : 2.0;
  }
  return g;
}

SignalingScheme clique_cover_scheme(const PlantedGraph& graph, double min_frac) {
  const std::size_t n = graph.n();
  if (n == 0) throw DimensionError("empty graph");
  std::vector<char> covered(n, 0);
  std::vector<Signal> signals;
  const double nd = static_cast<double>(n);
  for (const auto& s : graph.planted_sets) {
    VertexSet fresh;
    for (auto v : s)
      if (!covered[v]) fresh.push_back(v);
    if (fresh.empty() || static_cast<double>(fresh.size()) < min_frac * static_cast<double>(graph.k)) continue;
    Posterior mu(n, 0.0);
    for (auto v : fresh) {
      covered[v] = 1;
      mu[v] = 1.0 / static_cast<double>(fresh.size());
    }
    signals.push_back({static_cast<double>(fresh.size()) / nd, std::move(mu)});
  }
  VertexSet rest;
  for (std::size_t v = 0; v < n; ++v)
    if (!covered[v]) rest.push_back(v);
  if (!rest.empty()) {
    Posterior mu(n, 0.0);
    for (auto v : rest) mu[v] = 1.0 / static_cast<double>(rest.size());
    signals.push_back({static_cast<double>(rest.size()) / nd, std::move(mu)});
  }
  std::vector<double> prior(n, 1.0 / nd);
  return make_scheme(std::move(signals), prior);
}

ClusterThresholds cluster_thresholds(double eps, double Z) {
  if (!(eps >= 0.0)) throw ContractViolation("eps must be nonnegative");
  const double root = std::sqrt(eps);
  return {1.0 - root, 1.0 - Z * root / (Z - 2.0)};
}

std::vector<VertexSet> extract_clusters(const HardnessGame& game, const SignalingScheme& scheme, double eps) {
  const auto prior = game.prior();
  const auto rep = validate_scheme(prior, scheme, 1e-6);
  if (!rep.ok) throw InvalidScheme("extract_clusters: " + rep.message);
  const ClusterThresholds th = cluster_thresholds(eps, game.Z);
  std::vector<VertexSet> family;
  for (const auto& sig : scheme.signals) {
    if (game.val(sig.posterior) < th.value) continue;
    const auto amu = right_multiply(game.adjacency, sig.posterior);
    VertexSet t;
    for (std::size_t i = 0; i < amu.size(); ++i)
      if (amu[i] >= th.degree) t.push_back(i);
    if (!t.empty()) family.push_back(std::move(t));
  }
  return family;
}

namespace {

bool is_clique(const Graph& g, const VertexSet& s) {
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = a + 1; b < s.size(); ++b)
      if (!g.has_edge(s[a], s[b])) return false;
  return true;
}

}  // namespace

RecoveryResult recover_clique(const Graph& graph, const VertexSet& t, std::size_t k, double c3_scaled,
                              std::uint64_t seed, const RecoveryOptions& options) {
  const std::size_t n = graph.num_vertices();
  RecoveryResult res;
  if (t.empty() || n == 0) return res;
  const double s_real = std::ceil(c3_scaled * std::log(static_cast<double>(n)));
  const std::size_t s = std::min(t.size(), static_cast<std::size_t>(std::max(1.0, s_real)));
  res.subset_size = s;
  const std::size_t q = std::min(t.size(), static_cast<std::size_t>(std::ceil(static_cast<double>(s) / options.eps)));

  Rng rng(derive_seed(seed, "recover"));
  VertexSet sampled;
  for (auto idx : rng.sample(t.size(), q)) sampled.push_back(t[idx]);

  const std::size_t budget = (q == s) ? 1 : options.max_subsets;
  for (std::size_t attempt = 0; attempt < budget; ++attempt) {
    ++res.subsets_tried;
    VertexSet r;
    for (auto idx : rng.sample(q, s)) r.push_back(sampled[idx]);

    VertexSet common;
    for (std::size_t v = 0; v < n; ++v) {
      bool all = true;
      for (auto u : r)
        if (u != v && !graph.has_edge(u, v)) {
          all = false;
          break;
        }
      if (all) common.push_back(v);
    }
    VertexSet hat;
    for (auto v : common) {
      std::size_t deg = 0;
      for (auto u : common) deg += (u != v && graph.has_edge(u, v));
      if (deg + 1 >= k) hat.push_back(v);  // at least k-1 neighbours inside S'
    }
    if (hat.size() >= k && is_clique(graph, hat)) {
      res.success = true;
      res.clique = std::move(hat);
      return res;
    }
  }
  return res;
}

double check_cover_condition(const std::vector<VertexSet>& family, const std::vector<VertexSet>& planted_sets,
                             double eps, double c3_scaled, std::size_t n) {
  if (planted_sets.empty()) return 0.0;
  const double floor_size = c3_scaled * std::log(static_cast<double>(std::max<std::size_t>(n, 1)));
  std::size_t good = 0;
  for (const auto& s : planted_sets) {
    for (const auto& t : family) {
      std::size_t inter = 0;
      for (auto v : t) inter += std::binary_search(s.begin(), s.end(), v);
      const double need = std::max(eps * static_cast<double>(t.size()), floor_size);
      if (static_cast<double>(inter) >= need) {
        ++good;
        break;
      }
    }
  }
  return static_cast<double>(good) / static_cast<double>(planted_sets.size());
}

}  // namespace signalkit

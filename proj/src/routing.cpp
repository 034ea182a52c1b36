#include "signalkit/routing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "signalkit/errors.hpp"
#include "signalkit/lp.hpp"
#include "signalkit/parallel.hpp"
#include "signalkit/rng.hpp"
#include "signalkit/signaling.hpp"

namespace signalkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_coefficient(double v, const char* what, std::size_t e) {
  if (!std::isfinite(v) || v < 0.0) {
    std::ostringstream msg;
    msg << what << " of edge " << e << " must be finite and nonnegative, got " << v;
    throw ContractViolation(msg.str());
  }
}

void check_arcs(std::size_t num_nodes, std::span<const Arc> arcs) {
  for (std::size_t e = 0; e < arcs.size(); ++e)
    if (arcs[e].from >= num_nodes || arcs[e].to >= num_nodes)
      throw DimensionError("edge " + std::to_string(e) + " references a missing node");
}

struct Adjacency {
  std::vector<std::vector<std::size_t>> out;
  explicit Adjacency(const LatencyNetwork& net) : out(net.num_nodes) {
    for (std::size_t e = 0; e < net.arcs.size(); ++e) out[net.arcs[e].from].push_back(e);
  }
};

std::optional<std::vector<std::size_t>> spfa(const LatencyNetwork& net, const Adjacency& adj,
                                             std::span<const double> w, std::size_t s, std::size_t t) {
  std::vector<double> dist(net.num_nodes, kInf);
  std::vector<std::size_t> pred(net.num_nodes, SIZE_MAX);
  std::vector<char> queued(net.num_nodes, 0);
  std::deque<std::size_t> queue{s};
  dist[s] = 0.0;
  queued[s] = 1;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    queued[u] = 0;
    for (std::size_t e : adj.out[u]) {
      const std::size_t v = net.arcs[e].to;
      const double nd = dist[u] + w[e];
      if (nd < dist[v]) {
        dist[v] = nd;
        pred[v] = e;
        if (!queued[v]) {
          queued[v] = 1;
          if (!queue.empty() && nd < dist[queue.front()])
            queue.push_front(v);
          else
            queue.push_back(v);
        }
      }
    }
  }
  if (dist[t] == kInf) return std::nullopt;
  std::vector<std::size_t> path;
  for (std::size_t v = t; v != s;) {
    const std::size_t e = pred[v];
    path.push_back(e);
    v = net.arcs[e].from;
    if (path.size() > net.arcs.size()) throw NumericalFailure("shortest-path predecessor cycle");
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Minimizes sum_e (k/2) a_e x_e^2 + b_e x_e over feasible flows: k = 1 is the
// Beckmann potential (Wardrop flow), k = 2 the total latency (optimal flow).
class FlowSolver {
 public:
  FlowSolver(const LatencyNetwork& net, std::span<const Commodity> commodities, double k, const FlowOptions& opts)
      : net_(net), adj_(net), commodities_(commodities.begin(), commodities.end()), k_(k), opts_(opts) {
    net.validate();
    for (std::size_t i = 0; i < commodities_.size(); ++i) {
      const auto& c = commodities_[i];
      if (c.source >= net.num_nodes || c.sink >= net.num_nodes)
        throw DimensionError("commodity " + std::to_string(i) + " references a missing node");
      if (!std::isfinite(c.demand) || c.demand < 0.0)
        throw ContractViolation("commodity " + std::to_string(i) + " has invalid demand");
    }
    x_.assign(net.num_edges(), 0.0);
    paths_.resize(commodities_.size());
  }

  Flow run() {
    initialize();
    std::size_t it = 0;
    double gap = relative_gap();
    double residual = wardrop_residual();
    while (it < opts_.max_iterations && (gap > opts_.relative_gap || residual > opts_.tol)) {
      ++it;
      frank_wolfe_step();
      equilibrate();
      gap = relative_gap();
      residual = wardrop_residual();
    }
    if (gap > opts_.relative_gap && residual > opts_.tol) {
      std::ostringstream msg;
      msg << "flow solver hit the iteration cap (relative gap " << gap << ", residual " << residual << ")";
      throw NumericalFailure(msg.str());
    }
    Flow out;
    out.iterations = it;
    out.wardrop_residual = residual;
    out.paths = paths_;
    out.commodity.assign(commodities_.size(), std::vector<double>(net_.num_edges(), 0.0));
    for (std::size_t i = 0; i < paths_.size(); ++i)
      for (const auto& p : paths_[i])
        for (auto e : p.edges) out.commodity[i][e] += p.flow;
    out.edge = x_;
    out.total_latency = total_latency(net_, x_);
    return out;
  }

 private:
  std::vector<double> costs() const {
    std::vector<double> c(net_.num_edges());
    for (std::size_t e = 0; e < c.size(); ++e) c[e] = k_ * net_.latency[e].a * x_[e] + net_.latency[e].b;
    return c;
  }

  std::vector<std::size_t> route(std::span<const double> w, std::size_t i) const {
    const auto& c = commodities_[i];
    auto p = spfa(net_, adj_, w, c.source, c.sink);
    if (!p) throw ContractViolation("commodity " + std::to_string(i) + " has no source-sink path");
    return *p;
  }

  static double path_cost(std::span<const double> c, const std::vector<std::size_t>& path) {
    double s = 0.0;
    for (auto e : path) s += c[e];
    return s;
  }

  void add_path_flow(std::size_t i, const std::vector<std::size_t>& path, double amount) {
    for (auto& p : paths_[i])
      if (p.edges == path) {
        p.flow += amount;
        return;
      }
    paths_[i].push_back({path, amount});
  }

  void rebuild_edges() {
    std::fill(x_.begin(), x_.end(), 0.0);
    for (auto& ps : paths_) {
      std::erase_if(ps, [](const PathFlow& p) { return p.flow <= 0.0; });
      for (const auto& p : ps)
        for (auto e : p.edges) x_[e] += p.flow;
    }
  }

  void initialize() {
    std::vector<double> w(net_.num_edges());
    for (std::size_t e = 0; e < w.size(); ++e) w[e] = net_.latency[e].b;
    if (!opts_.seed) {
      for (std::size_t i = 0; i < commodities_.size(); ++i)
        if (commodities_[i].demand > 0.0) add_path_flow(i, route(w, i), commodities_[i].demand);
      rebuild_edges();
      return;
    }
    Rng rng(*opts_.seed);
    for (std::size_t i = 0; i < commodities_.size(); ++i) {
      const double d = commodities_[i].demand;
      if (d <= 0.0) continue;
      // Split the demand over a few randomly perturbed shortest paths.
      std::vector<double> share(3);
      double total = 0.0;
      for (auto& s : share) total += (s = 0.1 + rng.uniform());
      double used = 0.0;
      for (std::size_t j = 0; j < share.size(); ++j) {
        std::vector<double> pw(w.size());
        for (std::size_t e = 0; e < w.size(); ++e)
          pw[e] = w[e] + (net_.latency[e].a + 1.0) * d * 2.0 * rng.uniform();
        const double amount = j + 1 == share.size() ? d - used : d * share[j] / total;
        used += amount;
        add_path_flow(i, route(pw, i), amount);
      }
    }
    rebuild_edges();
  }

  double relative_gap() const {
    const auto c = costs();
    double current = 0.0;
    for (std::size_t e = 0; e < c.size(); ++e) current += c[e] * x_[e];
    double best = 0.0;
    for (std::size_t i = 0; i < commodities_.size(); ++i)
      if (commodities_[i].demand > 0.0) best += commodities_[i].demand * path_cost(c, route(c, i));
    return (current - best) / std::max(std::abs(current), 1e-300);
  }

  double wardrop_residual() const {
    const auto c = costs();
    double worst = 0.0;
    for (std::size_t i = 0; i < commodities_.size(); ++i) {
      if (paths_[i].empty()) continue;
      const double shortest = path_cost(c, route(c, i));
      for (const auto& p : paths_[i]) worst = std::max(worst, path_cost(c, p.edges) - shortest);
    }
    return worst;
  }

  void frank_wolfe_step() {
    const auto c = costs();
    std::vector<std::vector<std::size_t>> targets(commodities_.size());
    std::vector<double> dir(net_.num_edges(), 0.0);
    for (std::size_t e = 0; e < dir.size(); ++e) dir[e] = -x_[e];
    for (std::size_t i = 0; i < commodities_.size(); ++i) {
      if (commodities_[i].demand <= 0.0) continue;
      targets[i] = route(c, i);
      for (auto e : targets[i]) dir[e] += commodities_[i].demand;
    }
    double slope = 0.0;
    double curvature = 0.0;
    for (std::size_t e = 0; e < dir.size(); ++e) {
      slope += c[e] * dir[e];
      curvature += k_ * net_.latency[e].a * dir[e] * dir[e];
    }
    if (slope >= 0.0) return;
    const double step = curvature > 0.0 ? std::min(1.0, -slope / curvature) : 1.0;
    for (std::size_t i = 0; i < commodities_.size(); ++i) {
      if (targets[i].empty()) continue;
      for (auto& p : paths_[i]) p.flow *= 1.0 - step;
      add_path_flow(i, targets[i], step * commodities_[i].demand);
    }
    rebuild_edges();
  }

  // One sweep of pairwise shifts from the costliest used path to the shortest one.
  void equilibrate() {
    for (std::size_t i = 0; i < commodities_.size(); ++i) {
      if (commodities_[i].demand <= 0.0) continue;
      for (int round = 0; round < 4 * static_cast<int>(paths_[i].size()) + 4; ++round) {
        const auto c = costs();
        const auto shortest = route(c, i);
        const double low = path_cost(c, shortest);
        std::size_t worst = SIZE_MAX;
        double high = low;
        for (std::size_t j = 0; j < paths_[i].size(); ++j) {
          const double pc = path_cost(c, paths_[i][j].edges);
          if (paths_[i][j].flow > 0.0 && pc > high) {
            high = pc;
            worst = j;
          }
        }
        if (worst == SIZE_MAX || high - low <= 0.25 * opts_.tol) break;
        std::vector<int> diff(net_.num_edges(), 0);
        for (auto e : paths_[i][worst].edges) diff[e] += 1;
        for (auto e : shortest) diff[e] -= 1;
        double curvature = 0.0;
        for (std::size_t e = 0; e < diff.size(); ++e)
          if (diff[e] != 0) curvature += k_ * net_.latency[e].a;
        const double available = paths_[i][worst].flow;
        const double amount = curvature > 0.0 ? std::min(available, (high - low) / curvature) : available;
        if (amount >= available) {
          paths_[i][worst].flow = 0.0;
        } else {
          paths_[i][worst].flow -= amount;
        }
        add_path_flow(i, shortest, amount);
        rebuild_edges();
      }
    }
  }

  const LatencyNetwork& net_;
  Adjacency adj_;
  std::vector<Commodity> commodities_;
  double k_;
  FlowOptions opts_;
  std::vector<double> x_;
  std::vector<std::vector<PathFlow>> paths_;
};

LatencyNetwork with_tolls(const LatencyNetwork& net, std::span<const double> tolls) {
  LatencyNetwork out = net;
  for (std::size_t e = 0; e < out.latency.size(); ++e) out.latency[e].b += tolls[e];
  return out;
}

}  // namespace

void LatencyNetwork::validate() const {
  if (latency.size() != arcs.size()) throw DimensionError("latency count does not match edge count");
  check_arcs(num_nodes, arcs);
  for (std::size_t e = 0; e < latency.size(); ++e) {
    check_coefficient(latency[e].a, "slope", e);
    check_coefficient(latency[e].b, "intercept", e);
  }
}

void RoutingInstance::validate() const {
  if (latency.empty()) throw DimensionError("routing instance has no states");
  if (prior.size() != latency.size()) throw DimensionError("prior length does not match state count");
  check_arcs(num_nodes, arcs);
  for (std::size_t t = 0; t < latency.size(); ++t) {
    if (latency[t].size() != arcs.size())
      throw DimensionError("state " + std::to_string(t) + " latency count does not match edge count");
    for (std::size_t e = 0; e < arcs.size(); ++e) {
      check_coefficient(latency[t][e].a, "slope", e);
      check_coefficient(latency[t][e].b, "intercept", e);
    }
  }
  check_posterior(prior, prior.size());
  if (commodities.empty()) throw ContractViolation("routing instance has no commodities");
  const LatencyNetwork net = state_network(0);
  const Adjacency adj(net);
  const std::vector<double> zero(arcs.size(), 0.0);
  for (std::size_t i = 0; i < commodities.size(); ++i) {
    const auto& c = commodities[i];
    if (c.source >= num_nodes || c.sink >= num_nodes)
      throw DimensionError("commodity " + std::to_string(i) + " references a missing node");
    if (!std::isfinite(c.demand) || c.demand < 0.0)
      throw ContractViolation("commodity " + std::to_string(i) + " has invalid demand");
    if (!spfa(net, adj, zero, c.source, c.sink))
      throw ContractViolation("commodity " + std::to_string(i) + " has no source-sink path");
  }
}

LatencyNetwork RoutingInstance::state_network(std::size_t theta) const {
  if (theta >= latency.size()) throw DimensionError("state index out of range");
  return {num_nodes, arcs, latency[theta]};
}

LatencyNetwork mix_latencies(const RoutingInstance& inst, std::span<const double> mu) {
  check_posterior(mu, inst.num_states());
  LatencyNetwork net{inst.num_nodes, inst.arcs, std::vector<AffineLatency>(inst.num_edges())};
  for (std::size_t t = 0; t < mu.size(); ++t) {
    if (mu[t] == 0.0) continue;
    for (std::size_t e = 0; e < inst.num_edges(); ++e) {
      net.latency[e].a += mu[t] * inst.latency[t][e].a;
      net.latency[e].b += mu[t] * inst.latency[t][e].b;
    }
  }
  return net;
}

std::optional<std::vector<std::size_t>> shortest_path(const LatencyNetwork& net, std::span<const double> weights,
                                                      std::size_t s, std::size_t t) {
  if (weights.size() != net.num_edges()) throw DimensionError("weight count does not match edge count");
  if (s >= net.num_nodes || t >= net.num_nodes) throw DimensionError("endpoint out of range");
  for (double w : weights)
    if (!(w >= 0.0)) throw ContractViolation("shortest_path needs nonnegative weights");
  return spfa(net, Adjacency(net), weights, s, t);
}

Flow nash_flow(const LatencyNetwork& net, std::span<const Commodity> commodities, const FlowOptions& options) {
  return FlowSolver(net, commodities, 1.0, options).run();
}

Flow optimal_flow(const LatencyNetwork& net, std::span<const Commodity> commodities, const FlowOptions& options) {
  return FlowSolver(net, commodities, 2.0, options).run();
}

double total_latency(const LatencyNetwork& net, std::span<const double> edge_flows) {
  if (edge_flows.size() != net.num_edges()) throw DimensionError("flow length does not match edge count");
  double s = 0.0;
  for (std::size_t e = 0; e < edge_flows.size(); ++e) s += edge_flows[e] * net.latency[e](edge_flows[e]);
  return s;
}

double conservation_residual(const LatencyNetwork& net, std::span<const Commodity> commodities, const Flow& flow) {
  double worst = 0.0;
  for (std::size_t i = 0; i < commodities.size(); ++i) {
    std::vector<double> balance(net.num_nodes, 0.0);
    for (std::size_t e = 0; e < net.num_edges(); ++e) {
      balance[net.arcs[e].from] += flow.commodity[i][e];
      balance[net.arcs[e].to] -= flow.commodity[i][e];
    }
    if (commodities[i].source != commodities[i].sink) {
      balance[commodities[i].source] -= commodities[i].demand;
      balance[commodities[i].sink] += commodities[i].demand;
    }
    for (double b : balance) worst = std::max(worst, std::abs(b));
  }
  return worst;
}

double price_of_anarchy(const LatencyNetwork& net, std::span<const Commodity> commodities, double tol) {
  FlowOptions opts;
  opts.tol = tol;
  const double opt = optimal_flow(net, commodities, opts).total_latency;
  if (!(opt > 0.0)) throw ContractViolation("price of anarchy undefined: optimal latency is zero");
  return nash_flow(net, commodities, opts).total_latency / opt;
}

double routing_value(const RoutingInstance& inst, std::span<const double> mu, double tol) {
  FlowOptions opts;
  opts.tol = tol;
  return nash_flow(mix_latencies(inst, mu), inst.commodities, opts).total_latency;
}

double routing_scheme_value(const RoutingInstance& inst, const SignalingScheme& scheme, double tol) {
  const auto report = validate_scheme(inst.prior, scheme);
  if (!report.ok) throw InvalidScheme(report.message);
  std::vector<double> values(scheme.signals.size());
  parallel_for(values.size(), [&](std::size_t s) { values[s] = routing_value(inst, scheme.signals[s].posterior, tol); });
  double total = 0.0;
  for (std::size_t s = 0; s < values.size(); ++s) total += scheme.signals[s].weight * values[s];
  return total;
}

RoutingSchemeResult full_revelation_routing(const RoutingInstance& inst, double tol) {
  inst.validate();
  RoutingSchemeResult out;
  out.scheme = baseline_scheme(inst.prior, BaselineMode::kFull);
  out.value = routing_scheme_value(inst, out.scheme, tol);
  return out;
}

RoutingSchemeResult best_routing_scheme_grid(const RoutingInstance& inst, double delta, double tol) {
  inst.validate();
  const std::size_t m = inst.num_states();
  const DeltaNet net = delta_net(m, delta);
  std::vector<double> values(net.size());
  parallel_for(values.size(), [&](std::size_t p) { values[p] = routing_value(inst, net.points[p], tol); });

  LinearProgram lp;
  lp.sense = ObjectiveSense::kMinimize;
  lp.objective = values;
  lp.constraints = Matrix(m, net.size(), 0.0);
  for (std::size_t p = 0; p < net.size(); ++p)
    for (std::size_t t = 0; t < m; ++t) lp.constraints(t, p) = net.points[p][t];
  lp.rhs = inst.prior;
  lp.senses.assign(m, RowSense::kEqual);
  const auto sol = solve_lp(lp);
  if (!sol.optimal()) throw NumericalFailure("grid routing LP failed: " + to_string(sol.status));

  std::vector<Signal> signals;
  for (std::size_t p = 0; p < net.size(); ++p)
    if (sol.primal[p] > 0.0) signals.push_back({sol.primal[p], net.points[p]});
  RoutingSchemeResult out;
  out.scheme = make_scheme(std::move(signals), inst.prior);
  out.value = sol.value;
  return out;
}

LatencyNetwork remove_edges(const LatencyNetwork& net, std::span<const std::size_t> edges) {
  std::vector<char> drop(net.num_edges(), 0);
  for (auto e : edges) {
    if (e >= net.num_edges()) throw DimensionError("removed edge out of range");
    drop[e] = 1;
  }
  LatencyNetwork out{net.num_nodes, {}, {}};
  for (std::size_t e = 0; e < net.num_edges(); ++e)
    if (!drop[e]) {
      out.arcs.push_back(net.arcs[e]);
      out.latency.push_back(net.latency[e]);
    }
  return out;
}

TollsGadget tolls_gadget(const LatencyNetwork& base, const Commodity& commodity, std::vector<std::size_t> removed) {
  base.validate();
  const std::size_t m = base.num_edges();
  if (m < 2) throw ContractViolation("tolls gadget needs at least two edges");
  if (!(commodity.demand > 0.0)) throw ContractViolation("tolls gadget needs positive demand");
  std::sort(removed.begin(), removed.end());
  removed.erase(std::unique(removed.begin(), removed.end()), removed.end());

  TollsGadget g;
  g.m = m;
  g.removed = removed;
  g.demand_scale = commodity.demand;
  g.base = base;
  for (auto& l : g.base.latency) l.a *= commodity.demand;
  g.base_commodity = {commodity.source, commodity.sink, 1.0};
  const std::vector<Commodity> single{g.base_commodity};
  g.nash_latency = nash_flow(g.base, single).total_latency;
  g.tolled_latency = nash_flow(remove_edges(g.base, removed), single).total_latency;

  const std::size_t n = base.num_nodes;
  const std::size_t s = 0;
  const std::size_t t = 1 + 2 * n;
  RoutingInstance& h = g.instance;
  h.num_nodes = 2 * n + 2;
  std::vector<AffineLatency> plain;
  for (std::size_t copy = 0; copy < 2; ++copy)
    for (std::size_t e = 0; e < m; ++e) {
      h.arcs.push_back({1 + copy * n + base.arcs[e].from, 1 + copy * n + base.arcs[e].to});
      plain.push_back(g.base.latency[e]);
    }
  for (std::size_t copy = 0; copy < 2; ++copy) {
    h.arcs.push_back({s, 1 + copy * n + commodity.source});
    plain.push_back({});
  }
  for (std::size_t copy = 0; copy < 2; ++copy) {
    h.arcs.push_back({1 + copy * n + commodity.sink, t});
    plain.push_back({});
  }
  const double md = static_cast<double>(m);
  const double big = 8.0 * md * md * md * g.nash_latency;
  const std::size_t states = 2 * m + 2;
  for (std::size_t theta = 0; theta < states; ++theta) {
    auto lat = plain;
    lat[theta].b += big;
    h.latency.push_back(std::move(lat));
    h.prior.push_back(theta < 2 * m ? 1.0 / (md * md) : (1.0 - 2.0 / md) / 2.0);
  }
  h.commodities = {{s, t, 1.0}};
  h.validate();
  return g;
}

SignalingScheme scheme_from_tolls(const TollsGadget& g) {
  const std::size_t m = g.m;
  const double md = static_cast<double>(m);
  std::vector<char> in_k(m, 0);
  for (auto e : g.removed) in_k[e] = 1;
  std::vector<Signal> signals;
  for (int copy = 0; copy < 2; ++copy) {
    // The posterior that keeps copy `copy` minus K* connected to s.
    Posterior mu(2 * m + 2, 0.0);
    const std::size_t own = static_cast<std::size_t>(copy) * m;
    const std::size_t other = static_cast<std::size_t>(1 - copy) * m;
    for (std::size_t e = 0; e < m; ++e) {
      if (in_k[e]) mu[own + e] = 2.0 / (md * md);
      if (!in_k[e]) mu[other + e] = 2.0 / (md * md);
    }
    mu[g.source_link(1 - copy)] = 1.0 - 2.0 / md;
    signals.push_back({0.5, std::move(mu)});
  }
  return make_scheme(std::move(signals), g.instance.prior);
}

double tolled_nash_cost(const LatencyNetwork& base, const Commodity& commodity, std::span<const double> tolls,
                        double tol) {
  if (tolls.size() != base.num_edges()) throw DimensionError("toll count does not match edge count");
  const auto net = with_tolls(base, tolls);
  FlowOptions opts;
  opts.tol = tol;
  const std::vector<Commodity> single{commodity};
  return nash_flow(net, single, opts).total_latency;
}

TollsResult tolls_from_scheme(const TollsGadget& g, const SignalingScheme& scheme, double tol) {
  const std::size_t m = g.m;
  const double md = static_cast<double>(m);
  TollsResult out;
  out.tolls.assign(m, 0.0);
  out.scheme_latency = routing_scheme_value(g.instance, scheme, tol);
  if (out.scheme_latency > g.nash_latency) {
    out.nash_cost = tolled_nash_cost(g.base, g.base_commodity, out.tolls, tol);
    return out;
  }
  std::size_t best = SIZE_MAX;
  double best_value = kInf;
  for (std::size_t s = 0; s < scheme.signals.size(); ++s) {
    const auto& mu = scheme.signals[s].posterior;
    if (mu[g.source_link(0)] + mu[g.source_link(1)] < 1.0 / md) continue;
    const double v = routing_value(g.instance, mu, tol);
    if (v < best_value) {
      best_value = v;
      best = s;
    }
  }
  if (best == SIZE_MAX) throw ContractViolation("no posterior puts mass 1/m on the source links");
  const auto& mu = scheme.signals[best].posterior;
  // A heavy (s,s1) link pushes the flow into the second copy, and vice versa.
  out.copy = mu[g.source_link(0)] >= 1.0 / (2.0 * md) ? 1 : 0;
  const double big = 8.0 * md * md * md * g.nash_latency;
  for (std::size_t e = 0; e < m; ++e) out.tolls[e] = mu[static_cast<std::size_t>(out.copy) * m + e] * big;
  out.nash_cost = tolled_nash_cost(g.base, g.base_commodity, out.tolls, tol);
  return out;
}

}  // namespace signalkit

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "signalkit/zerosum.hpp"

namespace signalkit {

struct AffineLatency {
  double a = 0.0;  // slope
  double b = 0.0;  // intercept

  double operator()(double x) const { return a * x + b; }
  bool operator==(const AffineLatency&) const = default;
};

struct Commodity {
  std::size_t source = 0;
  std::size_t sink = 0;
  double demand = 1.0;
  bool operator==(const Commodity&) const = default;
};

struct Arc {
  std::size_t from = 0;
  std::size_t to = 0;
  bool operator==(const Arc&) const = default;
};

/// Single-state network: one affine latency per arc.
struct LatencyNetwork {
  std::size_t num_nodes = 0;
  std::vector<Arc> arcs;
  std::vector<AffineLatency> latency;

  std::size_t num_edges() const { return arcs.size(); }
  void validate() const;
};

struct RoutingInstance {
  std::size_t num_nodes = 0;
  std::vector<Arc> arcs;
  std::vector<std::vector<AffineLatency>> latency;  // [state][edge]
  std::vector<Commodity> commodities;
  std::vector<double> prior;

  std::size_t num_states() const { return latency.size(); }
  std::size_t num_edges() const { return arcs.size(); }
  // Throws DimensionError / ContractViolation (negative or non-finite coefficients,
  // disconnected commodity, bad prior).
  void validate() const;
  LatencyNetwork state_network(std::size_t theta) const;
};

struct PathFlow {
  std::vector<std::size_t> edges;
  double flow = 0.0;
};

struct Flow {
  std::vector<std::vector<PathFlow>> paths;     // per commodity
  std::vector<std::vector<double>> commodity;   // [commodity][edge]
  std::vector<double> edge;                     // aggregated
  double total_latency = 0.0;
  double wardrop_residual = 0.0;  // w.r.t. the objective's marginal costs
  std::size_t iterations = 0;
};

struct FlowOptions {
  double tol = 1e-9;
  double relative_gap = 1e-6;
  std::size_t max_iterations = 100000;
  std::optional<std::uint64_t> seed;  // randomizes the starting flow
};

LatencyNetwork mix_latencies(const RoutingInstance& inst, std::span<const double> mu);

// Label-correcting shortest path; returns edge ids, or nullopt if t is unreachable.
std::optional<std::vector<std::size_t>> shortest_path(const LatencyNetwork& net, std::span<const double> weights,
                                                      std::size_t s, std::size_t t);

Flow nash_flow(const LatencyNetwork& net, std::span<const Commodity> commodities, const FlowOptions& options = {});
Flow optimal_flow(const LatencyNetwork& net, std::span<const Commodity> commodities, const FlowOptions& options = {});

double total_latency(const LatencyNetwork& net, std::span<const double> edge_flows);

// Max over commodities and nodes of |outflow - inflow - net demand|.
double conservation_residual(const LatencyNetwork& net, std::span<const Commodity> commodities, const Flow& flow);

double price_of_anarchy(const LatencyNetwork& net, std::span<const Commodity> commodities, double tol = 1e-9);

double routing_value(const RoutingInstance& inst, std::span<const double> mu, double tol = 1e-9);
double routing_scheme_value(const RoutingInstance& inst, const SignalingScheme& scheme, double tol = 1e-9);

struct RoutingSchemeResult {
  SignalingScheme scheme;
  double value = 0.0;
};

RoutingSchemeResult full_revelation_routing(const RoutingInstance& inst, double tol = 1e-9);

// Cheapest scheme supported on the delta-net (an upper bound on the optimum).
RoutingSchemeResult best_routing_scheme_grid(const RoutingInstance& inst, double delta, double tol = 1e-9);

LatencyNetwork remove_edges(const LatencyNetwork& net, std::span<const std::size_t> edges);

struct TollsGadget {
  RoutingInstance instance;
  LatencyNetwork base;       // demand-normalized
  Commodity base_commodity;  // demand 1
  double demand_scale = 1.0;
  std::vector<std::size_t> removed;  // K*, as base edge ids
  double nash_latency = 0.0;         // L
  double tolled_latency = 0.0;       // L* (Nash latency with K* removed)
  std::size_t m = 0;
  // Node layout: s = 0, copy i of base node v = 1 + i*n + v, t = 1 + 2n.
  // Edge layout: copy i of base edge e = i*m + e, then (s,s1), (s,s2), (t1,t), (t2,t).
  std::size_t source_link(int copy) const { return 2 * m + static_cast<std::size_t>(copy); }
  std::size_t sink_link(int copy) const { return 2 * m + 2 + static_cast<std::size_t>(copy); }
};

TollsGadget tolls_gadget(const LatencyNetwork& base, const Commodity& commodity, std::vector<std::size_t> removed);

SignalingScheme scheme_from_tolls(const TollsGadget& gadget);

struct TollsResult {
  std::vector<double> tolls;  // per base edge
  double scheme_latency = 0.0;  // L'
  double nash_cost = 0.0;       // total latency + tolls at the tolled Nash flow
  int copy = -1;                // copy carrying the flow (-1 when tau = 0)
};

TollsResult tolls_from_scheme(const TollsGadget& gadget, const SignalingScheme& scheme, double tol = 1e-9);

// Nash latency of (base, l + tau); the cost counts tolls.
double tolled_nash_cost(const LatencyNetwork& base, const Commodity& commodity, std::span<const double> tolls,
                        double tol = 1e-9);

}  // namespace signalkit

#include "signalkit/signaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "signalkit/ellipsoid.hpp"
#include "signalkit/errors.hpp"
#include "signalkit/lp.hpp"
#include "signalkit/parallel.hpp"

namespace signalkit {

int net_resolution(double delta) {
  if (!(delta > 0.0) || delta > 1.0) throw ContractViolation("delta must lie in (0, 1]");
  const double inv = 1.0 / delta;
  const double k = std::round(inv);
  if (std::fabs(inv - k) > 1e-9 * k) throw ContractViolation("1/delta must be an integer");
  if (k > 1e9) throw CapExceeded("delta too small");
  return static_cast<int>(k);
}

std::size_t net_size(std::size_t num_states, int resolution) {
  if (num_states == 0) return 0;
  // C(K + M - 1, M - 1) built incrementally; each partial product is itself a binomial.
  const std::size_t k = static_cast<std::size_t>(resolution);
  const std::size_t r = num_states - 1;
  unsigned __int128 acc = 1;
  for (std::size_t i = 1; i <= r; ++i) {
    acc = acc * (k + i) / i;
    if (acc > std::numeric_limits<std::size_t>::max()) return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(acc);
}

DeltaNet delta_net(std::size_t num_states, double delta, std::size_t cap) {
  if (num_states < 1) throw DimensionError("delta_net needs at least one state");
  DeltaNet net;
  net.resolution = net_resolution(delta);
  net.delta = 1.0 / net.resolution;
  net.num_states = num_states;
  const std::size_t total = net_size(num_states, net.resolution);
  if (total > cap) throw CapExceeded("delta-net has " + std::to_string(total) + " points, above cap " + std::to_string(cap));
  net.counts.reserve(total);
  net.points.reserve(total);

  const int K = net.resolution;
  const std::size_t M = num_states;
  std::vector<int> k(M, 0);
  k[M - 1] = K;
  // Lexicographic enumeration of compositions of K into M parts.
  while (true) {
    net.counts.push_back(k);
    Posterior p(M);
    for (std::size_t t = 0; t < M; ++t) p[t] = static_cast<double>(k[t]) / K;
    net.points.push_back(std::move(p));
    if (M == 1) break;
    // Find the rightmost position before the last that can be incremented.
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(M) - 2;
    while (i >= 0) {
      int prefix = 0;
      for (std::ptrdiff_t j = 0; j <= i; ++j) prefix += k[static_cast<std::size_t>(j)];
      if (prefix < K) break;
      --i;
    }
    if (i < 0) break;
    ++k[static_cast<std::size_t>(i)];
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < M; ++j) k[j] = 0;
    int prefix = 0;
    for (std::size_t j = 0; j + 1 < M; ++j) prefix += k[j];
    k[M - 1] = K - prefix;
  }
  return net;
}

Posterior round_to_net(std::span<const double> mu, double delta, std::span<const double> w) {
  const int K = net_resolution(delta);
  const std::size_t M = mu.size();
  if (w.size() != M) throw DimensionError("round_to_net: w length differs from posterior length");
  check_posterior(mu, M, 1e-9);
  bool on_net = true;
  for (std::size_t t = 0; t < M; ++t)
    if (std::fabs(mu[t] * K - std::round(mu[t] * K)) > 1e-9) on_net = false;
  if (on_net) {
    Posterior out(M);
    for (std::size_t t = 0; t < M; ++t) out[t] = std::round(mu[t] * K) / K;
    return out;
  }
  std::vector<int> lo(M), hi(M);
  int total = 0;
  for (std::size_t t = 0; t < M; ++t) {
    const double s = mu[t] * K;
    lo[t] = std::max(0, static_cast<int>(std::ceil(s - 1.0 - 1e-9)));
    hi[t] = std::min(K, static_cast<int>(std::floor(s + 1.0 + 1e-9)));
    total += lo[t];
  }
  std::vector<std::size_t> order(M);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });
  std::vector<int> k = lo;
  int need = K - total;
  for (std::size_t idx : order) {
    if (need <= 0) break;
    const int add = std::min(need, hi[idx] - lo[idx]);
    k[idx] += add;
    need -= add;
  }
  if (need != 0) throw NumericalFailure("round_to_net: empty neighbourhood");
  Posterior out(M);
  for (std::size_t t = 0; t < M; ++t) out[t] = static_cast<double>(k[t]) / K;
  return out;
}

namespace {

std::vector<double> evaluate_points(const ValueFunction& f, const std::vector<Posterior>& points) {
  std::vector<double> values(points.size());
  parallel_for(points.size(), [&](std::size_t i) { values[i] = f.value(points[i]); });
  return values;
}

// max sum_k alpha_k v_k  s.t.  sum_k alpha_k p_k = prior, alpha >= 0.
SignalingResult concavify(const std::vector<Posterior>& points, const std::vector<double>& values,
                          std::span<const double> prior) {
  const std::size_t n = points.size();
  const std::size_t M = prior.size();
  LinearProgram lp;
  lp.objective = values;
  lp.constraints = Matrix(M, n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t t = 0; t < M; ++t) lp.constraints(t, k) = points[k][t];
  lp.rhs.assign(prior.begin(), prior.end());
  lp.senses.assign(M, RowSense::kEqual);
  LpSolution sol = solve_lp(lp);
  if (!sol.optimal()) {
    LpOptions alt;
    alt.rule = PivotRule::kDantzig;
    sol = solve_lp(lp, alt);
  }
  if (!sol.optimal()) throw NumericalFailure("concavification LP failed: " + to_string(sol.status));

  std::vector<Signal> signals;
  for (std::size_t k = 0; k < n; ++k)
    if (sol.primal[k] > 0.0) signals.push_back({sol.primal[k], points[k]});
  SignalingResult res;
  res.scheme = make_scheme(std::move(signals), prior);
  res.value = 0.0;
  for (const auto& s : res.scheme.signals) {
    for (std::size_t k = 0; k < n; ++k)
      if (points[k] == s.posterior) {
        res.value += s.weight * values[k];
        break;
      }
  }
  res.dual = sol.dual;
  return res;
}

}  // namespace

SignalingResult optimal_signaling_dnet(const ValueFunction& f, double delta, std::size_t cap) {
  check_posterior(f.prior, f.num_states, 1e-9);
  const DeltaNet net = delta_net(f.num_states, delta, cap);
  const auto values = evaluate_points(f, net.points);
  return concavify(net.points, values, f.prior);
}

SignalingResult optimal_signaling_dnet(const BayesianGame& game, double delta, std::size_t cap) {
  return optimal_signaling_dnet(value_function(game), delta, cap);
}

DualGridOracle::DualGridOracle(const ValueFunction& f, double delta, std::size_t cap)
    : net_(delta_net(f.num_states, delta, cap)), values_(evaluate_points(f, net_.points)) {}

DualOracleAnswer DualGridOracle::query(std::span<const double> w, double /*eps*/) const {
  if (w.size() != net_.num_states) throw DimensionError("dual oracle: w length differs from number of states");
  DualOracleAnswer ans;
  std::size_t best = 0;
  double best_slack = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < net_.size(); ++k) {
    const double s = values_[k] - dot(w, net_.points[k]);
    if (s > best_slack) {
      best_slack = s;
      best = k;
    }
  }
  ans.slack = best_slack;
  if (best_slack >= 0.0) {
    ans.which = DualOracleAnswer::Case::kWitness;
    ans.witness = net_.points[best];
  }
  return ans;
}

double oracle_delta(double gamma, double eps) {
  if (!(eps > 0.0)) throw ContractViolation("eps must be positive");
  if (!(gamma > 0.0)) return 1.0;
  return 1.0 / std::ceil(gamma / eps - 1e-12);
}

DualOracleAnswer dual_oracle_grid(const ValueFunction& f, std::span<const double> w, double eps, double delta,
                                  std::size_t cap) {
  return DualGridOracle(f, delta, cap).query(w, eps);
}

DualOracleAnswer dual_oracle_grid(const BayesianGame& game, std::span<const double> w, double eps, double delta,
                                  std::size_t cap) {
  return dual_oracle_grid(value_function(game), w, eps, delta, cap);
}

EllipsoidSignalingResult ellipsoid_signaling(const ValueFunction& f, double eps, const DualOracle& oracle) {
  if (!(eps > 0.0)) throw ContractViolation("eps must be positive");
  check_posterior(f.prior, f.num_states, 1e-9);
  const std::size_t M = f.num_states;
  const double bound = f.payoff_bound;
  EllipsoidSignalingResult res;
  res.delta = 1.0 / std::ceil(static_cast<double>(M) * bound / eps - 1e-12);

  if (M == 1) {
    res.scheme.signals.push_back({1.0, Posterior{1.0}});
    res.value = f.value(res.scheme.signals[0].posterior);
    return res;
  }

  // val on the rounding net, keyed by integer counts.
  const int K = net_resolution(res.delta);
  std::map<std::vector<long>, double> cache;
  auto net_value = [&](const Posterior& mu) {
    std::vector<long> key(M);
    for (std::size_t t = 0; t < M; ++t) key[t] = std::lround(mu[t] * K);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double v = f.value(mu);
    cache.emplace(std::move(key), v);
    return v;
  };

  const double radius = static_cast<double>(M) * bound;
  const double volume_tol = eps / (8.0 * static_cast<double>(M));

  auto run = [&](double nu) {
    ++res.ellipsoid_runs;
    SeparationOracle sep = [&](const std::vector<double>& w) {
      const double wl = dot(w, f.prior);
      if (wl > nu) return SeparationAnswer::cut(f.prior, nu);
      DualOracleAnswer ans = oracle(w, eps);
      if (ans.which == DualOracleAnswer::Case::kEmpty) return SeparationAnswer::inside();
      check_posterior(ans.witness, M, 1e-7);
      Posterior mu = round_to_net(ans.witness, res.delta, w);
      const double v = net_value(mu);
      res.cuts.push_back({w, mu, v, nu});
      std::vector<double> normal(M);
      for (std::size_t t = 0; t < M; ++t) normal[t] = -mu[t];
      return SeparationAnswer::cut(std::move(normal), -(v + 2.0 * eps));
    };
    return ellipsoid_feasibility(sep, static_cast<int>(M), radius, volume_tol).feasible;
  };

  double lo = -bound;
  double hi = bound + eps;
  if (!run(hi)) throw NumericalFailure("ellipsoid_signaling: threshold search failed to bracket the optimum");
  while (hi - lo > eps / 4.0) {
    const double mid = 0.5 * (lo + hi);
    if (run(mid)) hi = mid;
    else lo = mid;
  }
  res.nu_star = hi;

  // Compact primal over every cut posterior plus the simplex vertices.
  std::vector<Posterior> support;
  std::vector<double> values;
  std::map<std::vector<long>, std::size_t> seen;
  auto add = [&](const Posterior& mu) {
    std::vector<long> key(M);
    for (std::size_t t = 0; t < M; ++t) key[t] = std::lround(mu[t] * K);
    if (seen.count(key)) return;
    seen.emplace(key, support.size());
    support.push_back(mu);
    values.push_back(net_value(mu));
  };
  for (std::size_t t = 0; t < M; ++t) {
    Posterior e(M, 0.0);
    e[t] = 1.0;
    add(e);
  }
  for (const auto& c : res.cuts) add(c.mu);
  res.support_size = support.size();
  SignalingResult compact = concavify(support, values, f.prior);
  res.scheme = std::move(compact.scheme);
  res.value = compact.value;
  return res;
}

MaxPriorResult max_prior_grid(const ValueFunction& f, double delta, std::size_t cap) {
  const DeltaNet net = delta_net(f.num_states, delta, cap);
  const auto values = evaluate_points(f, net.points);
  std::vector<double> opt(net.size());
  parallel_for(net.size(), [&](std::size_t k) { opt[k] = concavify(net.points, values, net.points[k]).value; });
  const std::size_t best = static_cast<std::size_t>(std::max_element(opt.begin(), opt.end()) - opt.begin());
  return {net.points[best], opt[best]};
}

MaxPriorResult max_prior_grid(const BayesianGame& game, double delta, std::size_t cap) {
  return max_prior_grid(value_function(game), delta, cap);
}

double lipschitz_bound(const Matrix& a) {
  double gamma = 0.0;
  const double half_rows = static_cast<double>(a.rows()) / 2.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      lo = std::min(lo, a(i, j));
      hi = std::max(hi, a(i, j));
    }
    if (a.rows() > 0) gamma = std::max(gamma, half_rows * (hi - lo));
  }
  return gamma;
}

}  // namespace signalkit

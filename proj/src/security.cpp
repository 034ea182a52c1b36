#include "signalkit/security.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "signalkit/errors.hpp"

namespace signalkit {

void ExtendedSecurityGame::validate() const {
  const std::size_t r = rows(), c = cols(), m = num_states();
  if (r == 0 || c == 0 || m == 0) throw DimensionError("extended security game has an empty dimension");
  if (b.rows() != r) throw DimensionError("B must have one row per row strategy");
  if (d.rows() != c || d.cols() != m) throw DimensionError("D must be cols x states");
  if (prior.size() != m) throw DimensionError("prior length differs from number of states");
  for (const Matrix* mat : {&abar, &b, &d})
    for (double v : mat->data())
      if (!std::isfinite(v)) throw DimensionError("non-finite entry in extended security game");
  check_posterior(prior, m, 1e-12 * static_cast<double>(m) + 1e-15);
}

double ExtendedSecurityGame::max_abs_payoff() const {
  double best = 0.0;
  for (std::size_t t = 0; t < num_states(); ++t)
    for (std::size_t i = 0; i < rows(); ++i)
      for (std::size_t j = 0; j < cols(); ++j) best = std::max(best, std::fabs(abar(i, j) + b(i, t) + d(j, t)));
  return best;
}

BayesianGame expand(const ExtendedSecurityGame& esg) {
  esg.validate();
  BayesianGame g;
  g.prior = esg.prior;
  g.payoff_bound = esg.payoff_bound;
  for (std::size_t t = 0; t < esg.num_states(); ++t) {
    Matrix a(esg.rows(), esg.cols());
    for (std::size_t i = 0; i < esg.rows(); ++i)
      for (std::size_t j = 0; j < esg.cols(); ++j) a(i, j) = esg.abar(i, j) + esg.b(i, t) + esg.d(j, t);
    g.payoffs.push_back(std::move(a));
  }
  return g;
}

Equilibrium val_compact(const ExtendedSecurityGame& esg, std::span<const double> mu) {
  const std::size_t r = esg.rows(), c = esg.cols();
  check_posterior(mu, esg.num_states(), 1e-9);
  const auto bmu = right_multiply(esg.b, mu);
  const auto dmu = right_multiply(esg.d, mu);

  LinearProgram lp;
  lp.objective.assign(bmu.begin(), bmu.end());
  lp.objective.push_back(1.0);
  lp.constraints = Matrix(c + 1, r + 1, 0.0);
  lp.rhs.assign(c + 1, 0.0);
  lp.senses.assign(c + 1, RowSense::kLessEqual);
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t i = 0; i < r; ++i) lp.constraints(j, i) = -esg.abar(i, j);
    lp.constraints(j, r) = 1.0;
    lp.rhs[j] = dmu[j];
  }
  for (std::size_t i = 0; i < r; ++i) lp.constraints(c, i) = 1.0;
  lp.rhs[c] = 1.0;
  lp.senses[c] = RowSense::kEqual;
  lp.lower_bounds.assign(r + 1, 0.0);
  lp.lower_bounds[r] = std::nullopt;

  LpSolution sol = solve_lp(lp);
  if (!sol.optimal()) {
    LpOptions alt;
    alt.rule = PivotRule::kDantzig;
    sol = solve_lp(lp, alt);
  }
  if (!sol.optimal()) throw NumericalFailure("compact minimax LP failed: " + to_string(sol.status));

  Equilibrium eq;
  eq.value = sol.value;
  eq.row_strategy.assign(sol.primal.begin(), sol.primal.begin() + static_cast<std::ptrdiff_t>(r));
  eq.col_strategy.assign(sol.dual.begin(), sol.dual.begin() + static_cast<std::ptrdiff_t>(c));
  for (auto* p : {&eq.row_strategy, &eq.col_strategy}) {
    double s = 0.0;
    for (double& v : *p) s += (v = std::max(v, 0.0));
    if (s > 0.0)
      for (double& v : *p) v /= s;
  }
  return eq;
}

double strategy_value(const ExtendedSecurityGame& esg, std::span<const double> x, std::span<const double> mu) {
  if (x.size() != esg.rows()) throw DimensionError("row strategy length differs from row count");
  const auto bmu = right_multiply(esg.b, mu);
  const auto xa = left_multiply(x, esg.abar);
  const auto dmu = right_multiply(esg.d, mu);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < esg.cols(); ++j) worst = std::min(worst, xa[j] + dmu[j]);
  return dot(x, bmu) + worst;
}

ValueFunction value_function(const ExtendedSecurityGame& esg) {
  esg.validate();
  ValueFunction f;
  f.num_states = esg.num_states();
  f.payoff_bound = esg.payoff_bound;
  f.prior = esg.prior;
  f.value = [&esg](std::span<const double> mu) { return val_compact(esg, mu).value; };
  return f;
}

double lipschitz_bound(const ExtendedSecurityGame& esg) { return lipschitz_bound(esg.d.transpose()); }

ExtendedSecurityGame network_security_game(const Graph& graph, double rho) {
  const std::size_t n = graph.num_vertices();
  if (n == 0) throw DimensionError("network security game needs at least one vertex");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw ContractViolation("rho must be finite and nonnegative");
  ExtendedSecurityGame g;
  g.b = graph.adjacency();
  g.abar = Matrix(n, n, 0.0);
  g.d = Matrix(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) g.abar(i, i) = g.d(i, i) = -rho;
  g.prior.assign(n, 1.0 / static_cast<double>(n));
  g.payoff_bound = std::max(1.0, 2.0 * rho);
  return g;
}

BcbsParameters bcbs_parameters(int n, int r) {
  if (n < 2 || r < 1) throw ContractViolation("BCBS gadget needs n >= 2 and r >= 1");
  BcbsParameters p;
  Rational n8 = 1;
  for (int i = 0; i < 8; ++i) n8 *= n;
  p.eps = Rational(1) / (2 * n8);
  p.eta = 1 - (2 * n + 1) * p.eps;
  p.rho = 2 * r * n * p.eps;
  return p;
}

BcbsGadget bcbs_gadget(const Graph& bipartite_graph, int r) {
  const int n = static_cast<int>(bipartite_graph.num_vertices());
  if (!bipartite_graph.bipartition()) throw ContractViolation("BCBS gadget needs a bipartite graph");
  const BcbsParameters p = bcbs_parameters(n, r);
  BcbsGadget g;
  g.n = n;
  g.r = r;
  g.eps = static_cast<double>(p.eps);
  g.eta = static_cast<double>(p.eta);
  g.rho = static_cast<double>(p.rho);
  g.graph = bipartite_graph;
  g.game = network_security_game(bipartite_graph, g.rho);
  return g;
}

BcbsExtraction bcbs_extract(const BcbsGadget& gadget, std::span<const double> mu, std::span<const double> x) {
  const std::size_t n = gadget.graph.num_vertices();
  if (mu.size() != n || x.size() != n) throw DimensionError("bcbs_extract: vectors must have one entry per vertex");
  const double threshold = 1.0 / (static_cast<double>(n) * n * n);
  BcbsExtraction out;
  for (std::size_t v = 0; v < n; ++v) {
    if (mu[v] >= threshold) out.v_side.push_back(v);
    if (x[v] >= threshold) out.w_side.push_back(v);
  }
  out.value = strategy_value(gadget.game, x, mu);
  out.precondition = out.value >= gadget.eta - gadget.eps;
  out.biclique = !out.v_side.empty() && !out.w_side.empty();
  for (auto v : out.v_side)
    for (auto w : out.w_side)
      if (!gadget.graph.has_edge(v, w)) out.biclique = false;
  const std::size_t r = static_cast<std::size_t>(gadget.r);
  out.large_enough = out.v_side.size() >= r && out.w_side.size() >= r;
  return out;
}

bool bcbs_value_at_least_exact(const BcbsGadget& gadget, const std::vector<Rational>& mu, const Rational& target) {
  const std::size_t n = gadget.graph.num_vertices();
  if (mu.size() != n) throw DimensionError("posterior length differs from vertex count");
  const Rational rho = bcbs_parameters(gadget.n, gadget.r).rho;
  // max v  s.t.  v <= sum_a x_a A^mu(a, d)  for every d,  sum x = 1.
  std::vector<Rational> bmu(n, Rational(0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t t = 0; t < n; ++t)
      if (gadget.graph.has_edge(a, t)) bmu[a] += mu[t];
  RationalProgram lp;
  lp.objective.assign(n + 1, Rational(0));
  lp.objective[n] = 1;
  lp.constraints = RationalMatrix(n + 1, n + 1, Rational(0));
  lp.rhs.assign(n + 1, Rational(0));
  lp.senses.assign(n + 1, RowSense::kLessEqual);
  for (std::size_t dcol = 0; dcol < n; ++dcol) {
    for (std::size_t a = 0; a < n; ++a) {
      Rational entry = bmu[a] - rho * mu[dcol];
      if (a == dcol) entry -= rho;
      lp.constraints(dcol, a) = -entry;
    }
    lp.constraints(dcol, n) = 1;
  }
  for (std::size_t a = 0; a < n; ++a) lp.constraints(n, a) = 1;
  lp.rhs[n] = 1;
  lp.senses[n] = RowSense::kEqual;
  lp.lower_bounds.assign(n + 1, Rational(0));
  lp.lower_bounds[n] = std::nullopt;
  const auto sol = solve_lp_exact(lp);
  if (!sol.optimal()) throw NumericalFailure("exact BCBS value LP failed");
  return sol.value >= target;
}

ExtendedSecurityGame bimatrix_gadget(const Matrix& R, const Matrix& C, double eps) {
  if (R.rows() != C.rows() || R.cols() != C.cols() || R.rows() == 0 || R.cols() == 0)
    throw DimensionError("bimatrix gadget needs equal-shape non-empty R and C");
  if (!(eps > 0.0)) throw ContractViolation("eps must be positive");
  for (const Matrix* mat : {&R, &C})
    for (double v : mat->data())
      if (!(std::fabs(v) <= 1.0)) throw ContractViolation("bimatrix payoffs must lie in [-1, 1]");
  const std::size_t m = R.rows(), n = R.cols();
  ExtendedSecurityGame g;
  g.abar = Matrix(m, m * n, 0.0);
  g.b = Matrix(m, n, 0.0);
  g.d = Matrix(m * n, n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t ip = 0; ip < m; ++ip)
      for (std::size_t j = 0; j < n; ++j) g.abar(i, ip * n + j) = -C(i, j) / eps;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) g.b(i, j) = (1.0 + 1.0 / eps) * (R(i, j) + C(i, j));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t jp = 0; jp < n; ++jp)
      for (std::size_t j = 0; j < n; ++j) g.d(i * n + jp, j) = -R(i, j) / eps;
  g.prior.assign(n, 1.0 / static_cast<double>(n));
  g.payoff_bound = 2.0 + 4.0 / eps;
  return g;
}

BimatrixExtraction bimatrix_extract(const Matrix& R, const Matrix& C, double eps, std::span<const double> mu) {
  const ExtendedSecurityGame g = bimatrix_gadget(R, C, eps);
  const Equilibrium eq = val_compact(g, mu);
  BimatrixExtraction out;
  out.x = eq.row_strategy;
  out.mu.assign(mu.begin(), mu.end());
  out.value = eq.value;
  Matrix sum(R.rows(), R.cols());
  for (std::size_t i = 0; i < R.rows(); ++i)
    for (std::size_t j = 0; j < R.cols(); ++j) sum(i, j) = R(i, j) + C(i, j);
  out.welfare = dot(out.x, right_multiply(sum, mu));
  const auto rmu = right_multiply(R, mu);
  const auto xc = left_multiply(out.x, C);
  out.nash_residual = *std::max_element(rmu.begin(), rmu.end()) + *std::max_element(xc.begin(), xc.end()) - out.welfare;
  return out;
}

WelfareSearch bimatrix_welfare_search(const Matrix& R, const Matrix& C, double eps, double delta) {
  const ExtendedSecurityGame g = bimatrix_gadget(R, C, eps);
  const ValueFunction f = value_function(g);
  const DualGridOracle oracle(f, delta);
  const std::size_t M = g.num_states();
  WelfareSearch out;
  auto probe = [&](double target) {
    std::vector<double> w(M, target - eps);
    return oracle.query(w, eps);
  };
  double lo = -2.0, hi = 2.0;
  DualOracleAnswer best = probe(lo);
  if (best.which != DualOracleAnswer::Case::kWitness) return out;
  out.found = true;
  out.target = lo;
  while (hi - lo > eps / 4.0) {
    const double mid = 0.5 * (lo + hi);
    DualOracleAnswer ans = probe(mid);
    if (ans.which == DualOracleAnswer::Case::kWitness) {
      lo = mid;
      best = std::move(ans);
    } else {
      hi = mid;
    }
  }
  out.target = lo;
  out.extraction = bimatrix_extract(R, C, eps, best.witness);
  return out;
}

VertexCoverGadget vertex_cover_gadget(const Graph& graph) {
  const std::size_t n = graph.num_vertices();
  if (n < 3) throw ContractViolation("vertex-cover gadget needs n >= 3");
  VertexCoverGadget g;
  g.graph = graph;
  g.edges = graph.edges();
  const std::size_t c = n + g.edges.size() + 1;
  const double high = static_cast<double>(n) / static_cast<double>(n - 2);
  g.game.prior.assign(n, 1.0 / static_cast<double>(n));
  g.game.payoff_bound = high;
  for (std::size_t theta = 0; theta < n; ++theta) {
    Matrix a(n, c, 0.0);  // row player's payoff = -(column player's payoff)
    Matrix f(n, c, 0.0);
    for (std::size_t v1 = 0; v1 < n; ++v1) {
      for (std::size_t v = 0; v < n; ++v)
        if (v != theta && v != v1) a(v1, v) = -high;
      for (std::size_t k = 0; k < g.edges.size(); ++k) {
        const auto [u, w] = g.edges[k];
        if (u != theta && w != theta) a(v1, n + k) = -high;
      }
      a(v1, c - 1) = -1.0;
      f(v1, c - 1) = 1.0;
    }
    g.game.payoffs.push_back(std::move(a));
    g.objective.entries.push_back(std::move(f));
  }
  return g;
}

PrincipalValue vc_principal_value(const VertexCoverGadget& gadget, std::span<const double> mu) {
  const std::size_t n = gadget.graph.num_vertices();
  check_posterior(mu, n, 1e-9);
  const double high = static_cast<double>(n) / static_cast<double>(n - 2);
  constexpr double tol = 1e-9;
  PrincipalValue out;
  for (const auto& [u, v] : gadget.edges)
    if (high * (1.0 - mu[u] - mu[v]) > 1.0 + tol) return out;

  // (n/(n-2)) (1 - x_v)(1 - mu_v) <= 1   <=>   (1 - mu_v) x_v >= (1 - mu_v) - (n-2)/n.
  LinearProgram lp;
  lp.sense = ObjectiveSense::kMinimize;
  lp.objective.assign(n, 0.0);
  lp.constraints = Matrix(n + 1, n, 0.0);
  lp.rhs.assign(n + 1, 0.0);
  lp.senses.assign(n + 1, RowSense::kGreaterEqual);
  for (std::size_t v = 0; v < n; ++v) {
    lp.constraints(v, v) = 1.0 - mu[v];
    lp.rhs[v] = (1.0 - mu[v]) - 1.0 / high - tol;
  }
  for (std::size_t v = 0; v < n; ++v) lp.constraints(n, v) = 1.0;
  lp.rhs[n] = 1.0;
  lp.senses[n] = RowSense::kEqual;
  const LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::kInfeasible) return out;
  if (!sol.optimal()) throw NumericalFailure("principal feasibility LP failed: " + to_string(sol.status));
  out.value = 1;
  out.x = sol.primal;
  return out;
}

ValueFunction vc_value_function(const VertexCoverGadget& gadget) {
  ValueFunction f;
  f.num_states = gadget.graph.num_vertices();
  f.payoff_bound = 1.0;
  f.prior = gadget.game.prior;
  f.value = [&gadget](std::span<const double> mu) { return static_cast<double>(vc_principal_value(gadget, mu).value); };
  return f;
}

SignalingScheme vc_cover_scheme(const VertexCoverGadget& gadget, std::span<const std::size_t> cover) {
  const std::size_t n = gadget.graph.num_vertices();
  std::vector<char> in(n, 0);
  for (auto v : cover) {
    if (v >= n) throw DimensionError("cover vertex out of range");
    in[v] = 1;
  }
  const auto size = static_cast<std::size_t>(std::count(in.begin(), in.end(), 1));
  std::vector<Signal> signals;
  for (char side : {1, 0}) {
    const std::size_t count = side ? size : n - size;
    if (count == 0) continue;
    Posterior mu(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
      if (in[v] == side) mu[v] = 1.0 / static_cast<double>(count);
    signals.push_back({static_cast<double>(count) / static_cast<double>(n), std::move(mu)});
  }
  return make_scheme(std::move(signals), gadget.game.prior);
}

}  // namespace signalkit

#include "signalkit/zerosum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "signalkit/errors.hpp"
#include "signalkit/lp.hpp"

namespace signalkit {

void BayesianGame::validate() const {
  if (payoffs.empty()) throw DimensionError("game has no states");
  const std::size_t r = rows(), c = cols();
  if (r == 0 || c == 0) throw DimensionError("payoff matrices must be non-empty");
  if (prior.size() != payoffs.size()) throw DimensionError("prior length differs from number of states");
  for (const auto& a : payoffs) {
    if (a.rows() != r || a.cols() != c) throw DimensionError("payoff matrices differ in shape");
    for (double v : a.data()) {
      if (!std::isfinite(v)) throw DimensionError("non-finite payoff entry");
      if (std::fabs(v) > payoff_bound + 1e-12) throw ContractViolation("payoff entry exceeds payoff_bound");
    }
  }
  double s = 0.0;
  for (double p : prior) {
    if (!(p >= 0.0)) throw ContractViolation("prior has a negative entry");
    s += p;
  }
  if (std::fabs(s - 1.0) > 1e-12 * static_cast<double>(prior.size())) throw ContractViolation("prior does not sum to one");
}

void check_posterior(std::span<const double> mu, std::size_t num_states, double tol) {
  if (mu.size() != num_states) throw DimensionError("posterior length differs from number of states");
  double s = 0.0;
  for (double p : mu) {
    if (!std::isfinite(p) || p < -tol) throw ContractViolation("posterior has a negative or non-finite entry");
    s += p;
  }
  if (std::fabs(s - 1.0) > tol) throw ContractViolation("posterior does not sum to one");
}

Matrix mix_payoffs(const BayesianGame& game, std::span<const double> mu) {
  if (mu.size() != game.num_states()) throw DimensionError("posterior length differs from number of states");
  Matrix out(game.rows(), game.cols(), 0.0);
  auto dst = out.data();
  for (std::size_t t = 0; t < mu.size(); ++t) {
    if (mu[t] == 0.0) continue;
    auto src = game.payoffs[t].data();
    if (src.size() != dst.size()) throw DimensionError("payoff matrices differ in shape");
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += mu[t] * src[k];
  }
  return out;
}

namespace {

void clean_distribution(std::vector<double>& p) {
  double s = 0.0;
  for (double& v : p) {
    if (v < 0.0) v = 0.0;
    s += v;
  }
  if (s > 0.0)
    for (double& v : p) v /= s;
}

// Column player's program on the shifted matrix A' = A + shift > 0:
//   max sum_j w_j  s.t.  sum_j A'_ij w_j <= 1 for every row i,  w >= 0.
// The value of A' is 1 / sum w; row duals normalised give the row strategy.
struct RestrictedSolution {
  double value = 0.0;
  std::vector<double> x;
  std::vector<double> y;  // over the restricted columns
};

RestrictedSolution solve_restricted(const Matrix& a, const std::vector<std::size_t>& cols, double shift) {
  const std::size_t r = a.rows();
  LinearProgram lp;
  lp.objective.assign(cols.size(), 1.0);
  lp.constraints = Matrix(r, cols.size(), 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < cols.size(); ++k) lp.constraints(i, k) = a(i, cols[k]) + shift;
  lp.rhs.assign(r, 1.0);
  lp.senses.assign(r, RowSense::kLessEqual);

  // Dantzig pricing is far faster on these LPs; Bland is the fallback.
  LpOptions fast;
  fast.rule = PivotRule::kDantzig;
  fast.perturbation = 1e-6;
  LpSolution sol = solve_lp(lp, fast);
  if (!sol.optimal()) {
    LpOptions careful;
    careful.perturbation = 1e-6;
    sol = solve_lp(lp, careful);
  }
  if (!sol.optimal() || !(sol.value > 0.0)) {
    const auto cert = certify(lp, sol);
    std::ostringstream msg;
    msg << "minimax LP failed: " << to_string(sol.status) << " after " << sol.iterations
        << " pivots (primal violation " << cert.primal_violation << ", duality gap " << cert.duality_gap << ")";
    throw NumericalFailure(msg.str());
  }
  RestrictedSolution out;
  out.value = 1.0 / sol.value - shift;
  out.y = sol.primal;
  out.x = sol.dual;
  clean_distribution(out.y);
  clean_distribution(out.x);
  return out;
}

}  // namespace

Equilibrium game_value(const Matrix& a, const GameValueOptions& options) {
  const std::size_t r = a.rows(), c = a.cols();
  if (r == 0 || c == 0) throw DimensionError("game_value on an empty matrix");
  for (double v : a.data())
    if (!std::isfinite(v)) throw DimensionError("non-finite payoff entry");

  std::vector<std::size_t> cols;
  if (c <= options.column_generation_threshold) {
    cols.resize(c);
    std::iota(cols.begin(), cols.end(), 0);
  } else {
    std::vector<char> used(c, 0);
    auto add = [&](std::size_t j) {
      if (!used[j]) {
        used[j] = 1;
        cols.push_back(j);
      }
    };
    std::vector<double> uniform(r, 1.0 / static_cast<double>(r));
    const auto u = left_multiply(uniform, a);
    add(static_cast<std::size_t>(std::min_element(u.begin(), u.end()) - u.begin()));
    for (std::size_t i = 0; i < r && cols.size() < 64; ++i) {
      const auto row = a.row(i);
      add(static_cast<std::size_t>(std::min_element(row.begin(), row.end()) - row.begin()));
    }
  }

  double lowest = a(0, 0);
  for (double v : a.data()) lowest = std::min(lowest, v);
  const double shift = 1.0 - lowest;
  const double scale = 1.0 + max_abs_entry(a);
  while (true) {
    RestrictedSolution sol = solve_restricted(a, cols, shift);
    // Exact value of the row strategy against every column.
    const auto payoff = left_multiply(sol.x, a);
    if (cols.size() < c) {
      std::vector<std::pair<double, std::size_t>> violated;
      std::vector<char> in(c, 0);
      for (auto j : cols) in[j] = 1;
      for (std::size_t j = 0; j < c; ++j)
        if (!in[j] && payoff[j] < sol.value - 1e-10 * scale) violated.push_back({payoff[j], j});
      if (!violated.empty()) {
        const std::size_t take = std::min<std::size_t>(violated.size(), 32);
        std::partial_sort(violated.begin(), violated.begin() + static_cast<std::ptrdiff_t>(take), violated.end());
        for (std::size_t k = 0; k < take; ++k) cols.push_back(violated[k].second);
        continue;
      }
    }
    Equilibrium eq;
    eq.value = sol.value;
    eq.row_strategy = std::move(sol.x);
    eq.col_strategy.assign(c, 0.0);
    for (std::size_t k = 0; k < cols.size(); ++k) eq.col_strategy[cols[k]] = sol.y[k];
    return eq;
  }
}

double val(const BayesianGame& game, std::span<const double> mu) {
  return game_value(mix_payoffs(game, mu)).value;
}

ValueFunction value_function(const BayesianGame& game) {
  game.validate();
  ValueFunction f;
  f.num_states = game.num_states();
  f.payoff_bound = game.payoff_bound;
  f.prior = game.prior;
  f.value = [&game](std::span<const double> mu) { return val(game, mu); };
  return f;
}

SchemeReport validate_scheme(std::span<const double> prior, const SignalingScheme& scheme, double tol) {
  SchemeReport rep;
  const std::size_t m = prior.size();
  std::vector<double> acc(m, 0.0);
  std::ostringstream msg;
  bool shape_ok = true;
  for (std::size_t s = 0; s < scheme.signals.size(); ++s) {
    const auto& sig = scheme.signals[s];
    rep.weight_sum += sig.weight;
    if (!(sig.weight > 0.0)) {
      shape_ok = false;
      msg << "signal " << s << " has non-positive weight; ";
    }
    if (sig.posterior.size() != m) {
      shape_ok = false;
      msg << "signal " << s << " has a posterior of wrong length; ";
      continue;
    }
    double ps = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
      const double p = sig.posterior[t];
      if (!std::isfinite(p) || p < -tol) {
        shape_ok = false;
        msg << "signal " << s << " posterior entry " << t << " is negative; ";
      }
      ps += p;
      acc[t] += sig.weight * p;
    }
    if (std::fabs(ps - 1.0) > tol) {
      shape_ok = false;
      msg << "signal " << s << " posterior does not sum to one; ";
    }
  }
  for (std::size_t t = 0; t < m; ++t) rep.max_residual = std::max(rep.max_residual, std::fabs(acc[t] - prior[t]));
  if (scheme.signals.empty()) {
    shape_ok = false;
    msg << "scheme has no signals; ";
  }
  if (std::fabs(rep.weight_sum - 1.0) > tol) msg << "weights sum to " << rep.weight_sum << "; ";
  if (rep.max_residual > tol) msg << "decomposition residual " << rep.max_residual << "; ";
  rep.ok = shape_ok && std::fabs(rep.weight_sum - 1.0) <= tol && rep.max_residual <= tol;
  rep.message = msg.str();
  return rep;
}

SchemeReport validate_scheme(const BayesianGame& game, const SignalingScheme& scheme, double tol) {
  return validate_scheme(game.prior, scheme, tol);
}

SignalingScheme make_scheme(std::vector<Signal> signals, std::span<const double> prior) {
  SignalingScheme out;
  for (auto& s : signals) {
    if (s.weight < 0.0) throw InvalidScheme("negative signal weight");
    if (s.weight > 0.0) out.signals.push_back(std::move(s));
  }
  SignalingScheme pruned;
  double kept = 0.0;
  for (const auto& s : out.signals)
    if (s.weight >= 1e-12) {
      pruned.signals.push_back(s);
      kept += s.weight;
    }
  if (pruned.signals.size() != out.signals.size() && kept > 0.0) {
    for (auto& s : pruned.signals) s.weight /= kept;
    if (validate_scheme(prior, pruned, 1e-8).max_residual <= 1e-8) return pruned;
  }
  if (validate_scheme(prior, out, 1e-8).max_residual > 1e-8) throw InvalidScheme("scheme does not decompose the prior");
  return out;
}

double scheme_value(const ValueFunction& f, const SignalingScheme& scheme) {
  const auto rep = validate_scheme(f.prior, scheme, 1e-6);
  if (!rep.ok) throw InvalidScheme("invalid signaling scheme: " + rep.message);
  double total = 0.0;
  for (const auto& s : scheme.signals) total += s.weight * f.value(s.posterior);
  return total;
}

double scheme_value(const BayesianGame& game, const SignalingScheme& scheme) {
  return scheme_value(value_function(game), scheme);
}

SignalingScheme baseline_scheme(std::span<const double> prior, BaselineMode mode) {
  SignalingScheme s;
  if (mode == BaselineMode::kNone) {
    s.signals.push_back({1.0, Posterior(prior.begin(), prior.end())});
    return s;
  }
  for (std::size_t t = 0; t < prior.size(); ++t) {
    if (prior[t] <= 0.0) continue;
    Posterior e(prior.size(), 0.0);
    e[t] = 1.0;
    s.signals.push_back({prior[t], std::move(e)});
  }
  return s;
}

}  // namespace signalkit

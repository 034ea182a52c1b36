#include "signalkit/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "signalkit/errors.hpp"

namespace signalkit {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

bool finite(double v) { return std::isfinite(v); }
bool finite(const Rational&) { return true; }

double abs_value(double v) { return std::fabs(v); }
Rational abs_value(const Rational& v) { return boost::multiprecision::abs(v); }

}  // namespace

template <class T>
void BasicLinearProgram<T>::validate() const {
  const std::size_t n = objective.size();
  const std::size_t m = rhs.size();
  if (senses.size() != m) throw DimensionError("row_senses length differs from rhs length");
  if (m > 0 && constraints.rows() != m) throw DimensionError("constraint row count differs from rhs length");
  if (m > 0 && constraints.cols() != n) throw DimensionError("constraint column count differs from objective length");
  if (!lower_bounds.empty() && lower_bounds.size() != n)
    throw DimensionError("lower_bounds length differs from objective length");
  for (const auto& v : objective)
    if (!finite(v)) throw DimensionError("non-finite objective coefficient");
  for (const auto& v : rhs)
    if (!finite(v)) throw DimensionError("non-finite right-hand side");
  for (const auto& v : constraints.data())
    if (!finite(v)) throw DimensionError("non-finite constraint coefficient");
  for (const auto& l : lower_bounds)
    if (l && !finite(*l)) throw DimensionError("non-finite lower bound (use nullopt for a free variable)");
}

template struct BasicLinearProgram<double>;
template struct BasicLinearProgram<Rational>;

namespace {

template <class T>
struct Tolerances {
  T feas{};
  T pivot{};
  T opt{};
};

// Two-phase tableau simplex on the standard form  min c'u  s.t.  A'u = b' >= 0, u >= 0.
// The identity columns of the initial basis are kept for the whole run so that
// B^-1, and therefore the row duals, can be read off the final tableau.
template <class T>
class Simplex {
 public:
  Simplex(const BasicLinearProgram<T>& lp, Tolerances<T> tol, PivotRule rule, int max_iterations,
          double perturbation = 0.0)
      : lp_(lp), tol_(tol), rule_(rule) {
    build_standard_form();
    if constexpr (std::is_same_v<T, double>) {
      tab0_ = tab_;
      beta0_ = beta_;
      if (perturbation > 0.0) {
        original_beta_ = beta_;
        std::uint64_t state = 0x9e3779b97f4a7c15ULL;
        for (std::size_t i = 0; i < m_; ++i) {
          if (lp_.senses[i] == RowSense::kEqual) continue;
          state = state * 6364136223846793005ULL + 1442695040888963407ULL;
          const double u = 0.5 + static_cast<double>(state >> 11) * 0x1.0p-53;
          beta_[i] += perturbation * u * (1.0 + std::fabs(beta_[i]));
        }
        beta0_ = beta_;
      }
    }
    max_iterations_ = max_iterations > 0 ? max_iterations
                                         : static_cast<int>(50 * (m_ + ncols_) + 1000);
  }

  BasicLpSolution<T> run() {
    BasicLpSolution<T> out;
    if (num_artificial_ > 0) {
      set_phase_costs(/*phase_one=*/true);
      const auto st = iterate();
      if (st != LpStatus::kOptimal) {
        // Phase one is bounded below by zero; anything else is a numerical stall.
        out.status = LpStatus::kNumericalFailure;
        out.iterations = iterations_;
        return out;
      }
      T scale = T(1);
      for (const auto& b : beta_) scale = std::max(scale, abs_value(b));
      if (z_ > tol_.feas * scale) {
        out.status = LpStatus::kInfeasible;
        out.iterations = iterations_;
        return out;
      }
      drive_out_artificials();
    }
    set_phase_costs(/*phase_one=*/false);
    const auto st = iterate();
    out.iterations = iterations_;
    if (st != LpStatus::kOptimal) {
      out.status = st;
      return out;
    }
    if constexpr (std::is_same_v<T, double>) {
      if (!original_beta_.empty()) {
        beta0_ = original_beta_;
        if (!refactor()) {
          out.status = LpStatus::kNumericalFailure;
          return out;
        }
      }
    }
    extract(out);
    out.status = LpStatus::kOptimal;
    return out;
  }

 private:
  struct StructColumn {
    std::size_t original;
    int sign;
  };

  void build_standard_form() {
    const std::size_t n = lp_.num_vars();
    m_ = lp_.num_rows();
    shift_.assign(n, T(0));
    for (std::size_t j = 0; j < n; ++j) {
      const bool free_var = !lp_.lower_bounds.empty() && !lp_.lower_bounds[j].has_value();
      if (!lp_.lower_bounds.empty() && lp_.lower_bounds[j]) shift_[j] = *lp_.lower_bounds[j];
      columns_.push_back({j, +1});
      if (free_var) columns_.push_back({j, -1});
    }
    nstruct_ = columns_.size();

    row_sign_.assign(m_, 1);
    std::vector<RowSense> sense(m_);
    std::vector<T> b(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      T bi = lp_.rhs[i];
      for (std::size_t j = 0; j < n; ++j)
        if (shift_[j] != T(0)) bi -= lp_.constraints(i, j) * shift_[j];
      sense[i] = lp_.senses[i];
      if (bi < T(0)) {
        row_sign_[i] = -1;
        bi = -bi;
        if (sense[i] == RowSense::kLessEqual) sense[i] = RowSense::kGreaterEqual;
        else if (sense[i] == RowSense::kGreaterEqual) sense[i] = RowSense::kLessEqual;
      }
      b[i] = bi;
    }

    std::size_t nslack = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (sense[i] != RowSense::kEqual) ++nslack;
      if (sense[i] != RowSense::kLessEqual) ++num_artificial_;
    }
    first_slack_ = nstruct_;
    first_artificial_ = nstruct_ + nslack;
    ncols_ = first_artificial_ + num_artificial_;

    tab_.assign(m_ * ncols_, T(0));
    beta_ = b;
    basis_.assign(m_, 0);
    unit_col_.assign(m_, 0);
    std::size_t slack = first_slack_;
    std::size_t art = first_artificial_;
    for (std::size_t i = 0; i < m_; ++i) {
      const T s = T(row_sign_[i]);
      for (std::size_t k = 0; k < nstruct_; ++k) {
        const auto& col = columns_[k];
        const T& a = lp_.constraints(i, col.original);
        if (a != T(0)) at(i, k) = s * T(col.sign) * a;
      }
      if (sense[i] == RowSense::kLessEqual) {
        at(i, slack) = T(1);
        basis_[i] = unit_col_[i] = slack++;
      } else if (sense[i] == RowSense::kGreaterEqual) {
        at(i, slack++) = T(-1);
        at(i, art) = T(1);
        basis_[i] = unit_col_[i] = art++;
      } else {
        at(i, art) = T(1);
        basis_[i] = unit_col_[i] = art++;
      }
    }

    const T dir = lp_.sense == ObjectiveSense::kMaximize ? T(-1) : T(1);
    cost_.assign(ncols_, T(0));
    for (std::size_t k = 0; k < nstruct_; ++k)
      cost_[k] = dir * T(columns_[k].sign) * lp_.objective[columns_[k].original];
  }

  T& at(std::size_t i, std::size_t j) { return tab_[i * ncols_ + j]; }
  const T& at(std::size_t i, std::size_t j) const { return tab_[i * ncols_ + j]; }

  bool is_artificial(std::size_t j) const { return j >= first_artificial_; }

  void set_phase_costs(bool phase_one) {
    phase_one_ = phase_one;
    std::vector<T> c(ncols_, T(0));
    if (phase_one) {
      for (std::size_t j = first_artificial_; j < ncols_; ++j) c[j] = T(1);
    } else {
      c = cost_;
    }
    d_ = c;
    z_ = T(0);
    for (std::size_t i = 0; i < m_; ++i) {
      const T& cb = c[basis_[i]];
      if (cb == T(0)) continue;
      for (std::size_t j = 0; j < ncols_; ++j) d_[j] -= cb * at(i, j);
      z_ += cb * beta_[i];
    }
  }

  void pivot(std::size_t r, std::size_t e) {
    const T piv = at(r, e);
    for (std::size_t j = 0; j < ncols_; ++j) at(r, j) /= piv;
    beta_[r] /= piv;
    at(r, e) = T(1);
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const T f = at(i, e);
      if (f == T(0)) continue;
      for (std::size_t j = 0; j < ncols_; ++j) {
        const T& v = at(r, j);
        if (v != T(0)) at(i, j) -= f * v;
      }
      at(i, e) = T(0);
      beta_[i] -= f * beta_[r];
      if constexpr (std::is_same_v<T, double>) {
        if (beta_[i] < 0.0 && beta_[i] > -tol_.feas) beta_[i] = 0.0;
      }
    }
    const T de = d_[e];
    if (de != T(0)) {
      for (std::size_t j = 0; j < ncols_; ++j) {
        const T& v = at(r, j);
        if (v != T(0)) d_[j] -= de * v;
      }
      d_[e] = T(0);
      z_ += de * beta_[r];
    }
    basis_[r] = e;
  }

  bool may_enter(std::size_t j) const { return phase_one_ || !is_artificial(j); }

  LpStatus iterate() {
    int degenerate_streak = 0;
    int final_checks = 0;
    PivotRule rule = rule_;
    while (true) {
      if (iterations_ >= max_iterations_) return LpStatus::kNumericalFailure;
      std::size_t enter = ncols_;
      T best{};
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (!may_enter(j) || !(d_[j] < -tol_.opt)) continue;
        if (rule == PivotRule::kBland) {
          enter = j;
          break;
        }
        if (enter == ncols_ || d_[j] < best) {
          enter = j;
          best = d_[j];
        }
      }
      if (enter == ncols_) {
        if constexpr (std::is_same_v<T, double>) {
          // Confirm optimality on a freshly factored tableau before stopping.
          if (since_refactor_ > 0 && final_checks++ < 3 && refactor()) continue;
        }
        return LpStatus::kOptimal;
      }

      const std::size_t leave = ratio_test(enter, rule);
      if (leave == m_) return LpStatus::kUnbounded;

      if (!(beta_[leave] > tol_.feas)) {
        if (++degenerate_streak > 50) rule = PivotRule::kBland;
      } else {
        degenerate_streak = 0;
      }
      pivot(leave, enter);
      ++iterations_;
      if constexpr (std::is_same_v<T, double>) {
        if (++since_refactor_ >= std::max<std::size_t>(100, m_)) refactor();
      }
    }
  }

  std::size_t ratio_test(std::size_t enter, PivotRule rule) const {
    std::size_t leave = m_;
    if constexpr (std::is_same_v<T, double>) {
      double colmax = 0.0;
      for (std::size_t i = 0; i < m_; ++i) colmax = std::max(colmax, at(i, enter));
      const double floor = std::max(tol_.pivot, 1e-9 * colmax);
      if (rule == PivotRule::kBland) {
        double best_ratio = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
          const double a = at(i, enter);
          if (!(a > floor)) continue;
          const double ratio = std::max(beta_[i], 0.0) / a;
          const double slack = 1e-12 * (1.0 + std::fabs(best_ratio));
          if (leave == m_ || ratio < best_ratio - slack) {
            leave = i;
            best_ratio = ratio;
          } else if (ratio <= best_ratio + slack && basis_[i] < basis_[leave]) {
            leave = i;
            best_ratio = std::min(best_ratio, ratio);
          }
        }
        return leave;
      }
      // Harris two-pass test: bound the step with relaxed bounds, then take the largest pivot.
      double theta = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a > floor) theta = std::min(theta, (std::max(beta_[i], 0.0) + tol_.feas) / a);
      }
      if (!std::isfinite(theta)) return m_;
      double best_a = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a > floor && std::max(beta_[i], 0.0) / a <= theta && a > best_a) {
          best_a = a;
          leave = i;
        }
      }
      return leave;
    } else {
      T best_ratio{};
      for (std::size_t i = 0; i < m_; ++i) {
        const T& a = at(i, enter);
        if (!(a > tol_.pivot)) continue;
        const T ratio = beta_[i] / a;
        if (leave == m_ || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      return leave;
    }
  }

  // Rebuilds the tableau for the current basis from the original standard-form data.
  bool refactor() {
    since_refactor_ = 0;
    std::vector<T> tab = tab0_;
    std::vector<T> beta = beta0_;
    std::vector<std::size_t> basis(m_, ncols_);
    std::vector<char> row_done(m_, 0);
    for (std::size_t k = 0; k < m_; ++k) {
      const std::size_t col = basis_[k];
      std::size_t piv = m_;
      T best{};
      for (std::size_t i = 0; i < m_; ++i) {
        if (row_done[i]) continue;
        const T a = abs_value(tab[i * ncols_ + col]);
        if (piv == m_ || a > best) {
          piv = i;
          best = a;
        }
      }
      if (piv == m_ || !(best > T(1e-12))) return false;  // keep the current tableau
      const T inv = T(1) / tab[piv * ncols_ + col];
      for (std::size_t j = 0; j < ncols_; ++j) tab[piv * ncols_ + j] *= inv;
      beta[piv] *= inv;
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == piv) continue;
        const T f = tab[i * ncols_ + col];
        if (f == T(0)) continue;
        for (std::size_t j = 0; j < ncols_; ++j) tab[i * ncols_ + j] -= f * tab[piv * ncols_ + j];
        beta[i] -= f * beta[piv];
      }
      row_done[piv] = 1;
      basis[piv] = col;
    }
    for (std::size_t i = 0; i < m_; ++i)
      if (beta[i] < T(0)) {
        if (beta[i] < -T(1e-7)) return false;  // drifted basis is not primal feasible; keep going as is
        beta[i] = T(0);
      }
    tab_ = std::move(tab);
    beta_ = std::move(beta);
    basis_ = std::move(basis);
    set_phase_costs(phase_one_);
    return true;
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      std::size_t pick = ncols_;
      T best{};
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        const T a = abs_value(at(r, j));
        if (a > tol_.pivot && (pick == ncols_ || a > best)) {
          pick = j;
          best = a;
        }
      }
      if constexpr (std::is_same_v<T, double>) beta_[r] = 0.0;
      if (pick != ncols_) pivot(r, pick);
      // Otherwise the row is redundant; its artificial stays basic at zero.
    }
  }

  void extract(BasicLpSolution<T>& out) const {
    const std::size_t n = lp_.num_vars();
    std::vector<T> u(ncols_, T(0));
    for (std::size_t i = 0; i < m_; ++i) u[basis_[i]] = beta_[i];
    out.primal = shift_;
    for (std::size_t k = 0; k < nstruct_; ++k)
      out.primal[columns_[k].original] += T(columns_[k].sign) * u[k];
    out.value = T(0);
    for (std::size_t j = 0; j < n; ++j) out.value += lp_.objective[j] * out.primal[j];

    const T dir = lp_.sense == ObjectiveSense::kMaximize ? T(-1) : T(1);
    out.dual.assign(m_, T(0));
    for (std::size_t i = 0; i < m_; ++i) {
      T y{};
      for (std::size_t k = 0; k < m_; ++k) {
        const T& cb = cost_[basis_[k]];
        if (cb != T(0)) y += cb * at(k, unit_col_[i]);
      }
      out.dual[i] = dir * T(row_sign_[i]) * y;
    }
  }

  const BasicLinearProgram<T>& lp_;
  Tolerances<T> tol_;
  PivotRule rule_;
  int max_iterations_ = 0;
  int iterations_ = 0;
  bool phase_one_ = false;

  std::size_t m_ = 0;
  std::size_t nstruct_ = 0;
  std::size_t first_slack_ = 0;
  std::size_t first_artificial_ = 0;
  std::size_t num_artificial_ = 0;
  std::size_t ncols_ = 0;

  std::vector<StructColumn> columns_;
  std::vector<T> shift_;
  std::vector<int> row_sign_;
  std::vector<T> tab_;
  std::vector<T> tab0_;
  std::vector<T> beta0_;
  std::vector<T> original_beta_;  // unperturbed right-hand side
  std::size_t since_refactor_ = 0;
  std::vector<T> beta_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> unit_col_;
  std::vector<T> cost_;
  std::vector<T> d_;
  T z_{};
};

double scaled_row_violation(const LinearProgram& lp, std::span<const double> x, std::size_t i) {
  double ax = 0.0;
  double mag = 1.0 + std::fabs(lp.rhs[i]);
  for (std::size_t j = 0; j < x.size(); ++j) {
    ax += lp.constraints(i, j) * x[j];
    mag = std::max(mag, std::fabs(lp.constraints(i, j) * x[j]));
  }
  double v = 0.0;
  switch (lp.senses[i]) {
    case RowSense::kLessEqual: v = ax - lp.rhs[i]; break;
    case RowSense::kGreaterEqual: v = lp.rhs[i] - ax; break;
    case RowSense::kEqual: v = std::fabs(ax - lp.rhs[i]); break;
  }
  return std::max(0.0, v) / mag;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  lp.validate();
  Tolerances<double> tol{options.feas_tol, options.pivot_tol, options.feas_tol * 1e-1};
  auto attempt = [&](double perturbation) {
    Simplex<double> simplex(lp, tol, options.rule, options.max_iterations, perturbation);
    LpSolution sol = simplex.run();
    if (!sol.optimal()) return sol;
    // Never hand back an "optimal" point that fails its own certificate.
    const LpCertificate cert = certify(lp, sol);
    const double scale = 1.0 + std::fabs(sol.value);
    if (cert.primal_violation > 1e-8 || cert.duality_gap > options.duality_tol * scale) {
      sol.status = LpStatus::kNumericalFailure;
    }
    return sol;
  };
  if (options.perturbation > 0.0) {
    LpSolution sol = attempt(options.perturbation);
    // Unboundedness does not depend on the right-hand side; infeasibility might.
    if (sol.optimal() || sol.status == LpStatus::kUnbounded) return sol;
    const int spent = sol.iterations;
    sol = attempt(0.0);
    sol.iterations += spent;
    return sol;
  }
  return attempt(0.0);
}

RationalLpSolution solve_lp_exact(const RationalProgram& lp) {
  lp.validate();
  Tolerances<Rational> tol{};
  Simplex<Rational> simplex(lp, tol, PivotRule::kBland, 0);
  return simplex.run();
}

LpCertificate certify(const LinearProgram& lp, const LpSolution& sol) {
  LpCertificate cert;
  const std::size_t n = lp.num_vars();
  const std::size_t m = lp.num_rows();
  if (sol.primal.size() != n || sol.dual.size() != m) {
    cert.primal_violation = cert.duality_gap = std::numeric_limits<double>::infinity();
    return cert;
  }
  const bool maximize = lp.sense == ObjectiveSense::kMaximize;

  for (std::size_t i = 0; i < m; ++i)
    cert.primal_violation = std::max(cert.primal_violation, scaled_row_violation(lp, sol.primal, i));

  std::vector<double> reduced(lp.objective);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) reduced[j] -= lp.constraints(i, j) * sol.dual[i];

  double dual_value = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    dual_value += lp.rhs[i] * sol.dual[i];
    double ax = 0.0;
    for (std::size_t j = 0; j < n; ++j) ax += lp.constraints(i, j) * sol.primal[j];
    cert.complementary_slackness =
        std::max(cert.complementary_slackness, std::fabs(sol.dual[i] * (lp.rhs[i] - ax)));
    // Max problems: <= rows carry y >= 0, >= rows y <= 0. Min problems flip.
    double wrong = 0.0;
    if (lp.senses[i] == RowSense::kLessEqual) wrong = maximize ? -sol.dual[i] : sol.dual[i];
    if (lp.senses[i] == RowSense::kGreaterEqual) wrong = maximize ? sol.dual[i] : -sol.dual[i];
    cert.dual_sign_violation = std::max(cert.dual_sign_violation, wrong);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const bool has_lower = lp.lower_bounds.empty() || lp.lower_bounds[j].has_value();
    const double lower = lp.lower_bounds.empty() ? 0.0 : lp.lower_bounds[j].value_or(0.0);
    if (has_lower) {
      dual_value += lower * reduced[j];
      cert.primal_violation = std::max(cert.primal_violation, (lower - sol.primal[j]) / (1.0 + std::fabs(lower)));
      cert.complementary_slackness =
          std::max(cert.complementary_slackness, std::fabs(reduced[j] * (sol.primal[j] - lower)));
      cert.dual_sign_violation = std::max(cert.dual_sign_violation, maximize ? reduced[j] : -reduced[j]);
    } else {
      cert.dual_sign_violation = std::max(cert.dual_sign_violation, std::fabs(reduced[j]));
    }
  }
  cert.duality_gap = std::fabs(sol.value - dual_value);
  return cert;
}

}  // namespace signalkit

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "signalkit/matrix.hpp"

namespace signalkit {

using Rational = boost::multiprecision::cpp_rational;
using RationalMatrix = BasicMatrix<Rational>;

enum class RowSense { kLessEqual, kEqual, kGreaterEqual };
enum class ObjectiveSense { kMaximize, kMinimize };
enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };
enum class PivotRule { kBland, kDantzig };

std::string to_string(LpStatus status);

/// Dense LP:  optimize objective·x  s.t.  row_i·x (sense_i) rhs_i,  x_j >= lower_j.
///
/// A missing lower bound (std::nullopt) makes the variable free. An empty
/// `lower_bounds` vector means every variable is bounded below by zero.
template <class T>
struct BasicLinearProgram {
  std::vector<T> objective;
  BasicMatrix<T> constraints;
  std::vector<T> rhs;
  std::vector<RowSense> senses;
  std::vector<std::optional<T>> lower_bounds;
  ObjectiveSense sense = ObjectiveSense::kMaximize;

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return rhs.size(); }

  // Throws DimensionError on shape mismatch (and on non-finite doubles).
  void validate() const;
};

using LinearProgram = BasicLinearProgram<double>;
using RationalProgram = BasicLinearProgram<Rational>;

template <class T>
struct BasicLpSolution {
  LpStatus status = LpStatus::kNumericalFailure;
  std::vector<T> primal;
  // Row multipliers with the convention  objective = A^T dual + reduced,
  // so the dual objective is  rhs·dual + sum_j lower_j * reduced_j.
  std::vector<T> dual;
  T value{};
  int iterations = 0;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

using LpSolution = BasicLpSolution<double>;
using RationalLpSolution = BasicLpSolution<Rational>;

struct LpOptions {
  double feas_tol = 1e-9;
  double duality_tol = 1e-7;
  double pivot_tol = 1e-11;
  PivotRule rule = PivotRule::kBland;
  // 0 picks a size-dependent default.
  int max_iterations = 0;
  // Relative size of a deterministic right-hand-side perturbation on inequality
  // rows (0 disables). The optimal basis is then re-evaluated on the original
  // data; if that is not primal feasible the program is re-solved unperturbed.
  double perturbation = 0.0;
};

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

// Exact arithmetic; meant for small programs (test oracles, parameter identities).
RationalLpSolution solve_lp_exact(const RationalProgram& lp);

/// Residual report of a candidate solution against its program.
struct LpCertificate {
  double primal_violation = 0.0;        // max scaled row/bound violation
  double complementary_slackness = 0.0;  // max |y_i * slack_i| and |r_j * (x_j - l_j)|
  double duality_gap = 0.0;              // |primal value - dual value|
  double dual_sign_violation = 0.0;      // wrong-signed multipliers / reduced costs
};

LpCertificate certify(const LinearProgram& lp, const LpSolution& solution);

}  // namespace signalkit

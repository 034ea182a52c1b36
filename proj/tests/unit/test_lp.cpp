#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "signalkit/errors.hpp"
#include "signalkit/lp.hpp"

using namespace signalkit;

TEST_CASE("lp: single bounded variable") {
  LinearProgram lp;
  lp.objective = {1.0};
  lp.constraints = Matrix{{1.0}};
  lp.rhs = {3.0};
  lp.senses = {RowSense::kLessEqual};
  auto sol = solve_lp(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.value == doctest::Approx(3.0));
  CHECK(sol.dual[0] == doctest::Approx(1.0));
}

TEST_CASE("lp: empty feasible set") {
  LinearProgram lp;
  lp.objective = {2.0};
  lp.constraints = Matrix{{1.0}};
  lp.rhs = {-1.0};
  lp.senses = {RowSense::kLessEqual};
  CHECK(solve_lp(lp).status == LpStatus::kInfeasible);
}

TEST_CASE("lp: unbounded") {
  LinearProgram lp;
  lp.objective = {1.0, 1.0};
  lp.constraints = Matrix{{1.0, -1.0}};
  lp.rhs = {1.0};
  lp.senses = {RowSense::kLessEqual};
  CHECK(solve_lp(lp).status == LpStatus::kUnbounded);
}

TEST_CASE("lp: dimension mismatch is a structural error") {
  LinearProgram lp;
  lp.objective = {1.0, 1.0};
  lp.constraints = Matrix{{1.0}};
  lp.rhs = {1.0};
  lp.senses = {RowSense::kLessEqual};
  CHECK_THROWS_AS(solve_lp(lp), DimensionError);
}

TEST_CASE("lp: free variables, lower bounds and equality rows") {
  // min x + y  s.t. x - y = 1, x >= -5 (bound), y free, x + y >= -3
  LinearProgram lp;
  lp.sense = ObjectiveSense::kMinimize;
  lp.objective = {1.0, 1.0};
  lp.constraints = Matrix{{1.0, -1.0}, {1.0, 1.0}};
  lp.rhs = {1.0, -3.0};
  lp.senses = {RowSense::kEqual, RowSense::kGreaterEqual};
  lp.lower_bounds = {-5.0, std::nullopt};
  auto sol = solve_lp(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.value == doctest::Approx(-3.0));
  auto cert = certify(lp, sol);
  CHECK(cert.duality_gap < 1e-9);
  CHECK(cert.dual_sign_violation < 1e-9);
}

TEST_CASE("lp: random programs agree with vertex enumeration") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> nvar(1, 4), nrow(1, 6), coef(-5, 5), sense(0, 2);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = nvar(rng), m = nrow(rng);
    LinearProgram lp;
    lp.sense = trial % 2 ? ObjectiveSense::kMaximize : ObjectiveSense::kMinimize;
    lp.constraints = Matrix(m, n);
    for (int j = 0; j < n; ++j) lp.objective.push_back(coef(rng));
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) lp.constraints(i, j) = coef(rng);
      lp.rhs.push_back(coef(rng) + 3);
      lp.senses.push_back(static_cast<RowSense>(sense(rng)));
    }
    // Box rows keep the oracle's answer finite.
    for (int j = 0; j < n; ++j) {
      std::vector<double> row(n, 0.0);
      row[j] = 1.0;
      auto rows = lp.constraints.to_rows();
      rows.push_back(row);
      lp.constraints = Matrix::from_rows(rows);
      lp.rhs.push_back(10.0);
      lp.senses.push_back(RowSense::kLessEqual);
    }
    auto oracle = oracles::enumerate_vertices(lp);
    auto sol = solve_lp(lp);
    if (!oracle.has_value()) {
      CHECK(sol.status == LpStatus::kInfeasible);
      continue;
    }
    REQUIRE(sol.optimal());
    CHECK(sol.value == doctest::Approx(*oracle).epsilon(1e-7));
    auto cert = certify(lp, sol);
    CHECK(cert.primal_violation <= 1e-8);
    CHECK(cert.duality_gap <= 1e-7 * (1 + std::abs(sol.value)));
    CHECK(cert.complementary_slackness <= 1e-7);
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("lp: exact rational mode") {
  RationalProgram lp;
  lp.objective = {Rational(1), Rational(1)};
  lp.constraints = RationalMatrix{{Rational(3), Rational(1)}, {Rational(1), Rational(3)}};
  lp.rhs = {Rational(1), Rational(1)};
  lp.senses = {RowSense::kLessEqual, RowSense::kLessEqual};
  auto sol = solve_lp_exact(lp);
  REQUIRE(sol.optimal());
  CHECK(sol.value == Rational(1, 2));
  CHECK(sol.dual[0] == Rational(1, 4));
}

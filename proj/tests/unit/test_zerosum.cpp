#include "doctest.h"

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "signalkit/errors.hpp"
#include "signalkit/zerosum.hpp"

using namespace signalkit;

namespace {

RationalMatrix to_rational(const Matrix& a) {
  RationalMatrix q(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) q(i, j) = Rational(static_cast<int>(std::lround(a(i, j) * 8))) / 8;
  return q;
}

void check_best_responses(const Matrix& a, const Equilibrium& eq, double tol) {
  const auto xa = left_multiply(eq.row_strategy, a);
  const auto ay = right_multiply(a, eq.col_strategy);
  for (double v : xa) CHECK(v >= eq.value - tol);
  for (double v : ay) CHECK(v <= eq.value + tol);
}

}  // namespace

TEST_CASE("zerosum: closed forms") {
  CHECK(game_value(Matrix{{1.0, 0.0}, {0.0, 1.0}}).value == doctest::Approx(0.5).epsilon(1e-12));

  const Matrix rps{{0.0, -1.0, 1.0}, {1.0, 0.0, -1.0}, {-1.0, 1.0, 0.0}};
  const auto eq = game_value(rps);
  CHECK(std::fabs(eq.value) <= 1e-12);
  for (double p : eq.row_strategy) CHECK(p == doctest::Approx(1.0 / 3.0));

  const Matrix pennies{{1.0, -1.0}, {-1.0, 1.0}};
  CHECK(std::fabs(game_value(pennies).value) <= 1e-12);

  // Saddle point.
  const auto saddle = game_value(Matrix{{3.0, 5.0}, {1.0, 2.0}});
  CHECK(saddle.value == doctest::Approx(3.0));
  CHECK(saddle.row_strategy[0] == doctest::Approx(1.0));
  CHECK(saddle.col_strategy[0] == doctest::Approx(1.0));
}

TEST_CASE("zerosum: random games agree with exact support enumeration") {
  std::mt19937_64 gen(101);
  std::uniform_int_distribution<std::size_t> dim(1, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix a = fixtures::random_eighths(gen, dim(gen), dim(gen));
    const auto exact = oracles::support_enumeration_value(to_rational(a));
    REQUIRE(exact.has_value());
    const auto eq = game_value(a);
    CHECK(std::fabs(eq.value - exact->convert_to<double>()) <= 1e-7);
    check_best_responses(a, eq, 1e-7);
  }
}

TEST_CASE("zerosum: column generation path on wide matrices") {
  std::mt19937_64 gen(7);
  const Matrix a = fixtures::random_eighths(gen, 4, 300);
  const auto wide = game_value(a);
  GameValueOptions dense;
  dense.column_generation_threshold = 1000;
  const auto ref = game_value(a, dense);
  CHECK(wide.value == doctest::Approx(ref.value).epsilon(1e-9));
  check_best_responses(a, wide, 1e-7);
}

TEST_CASE("zerosum: mix_payoffs is linear in the posterior") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = fixtures::random_game(gen, 3, 3, 4);
    const auto mu = fixtures::random_simplex(gen, 3), nu = fixtures::random_simplex(gen, 3);
    std::vector<double> mid(3);
    for (int t = 0; t < 3; ++t) mid[t] = 0.5 * (mu[t] + nu[t]);
    const Matrix am = mix_payoffs(g, mu), an = mix_payoffs(g, nu), amid = mix_payoffs(g, mid);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(std::fabs(amid(i, j) - 0.5 * (am(i, j) + an(i, j))) <= 1e-12);
  }
}

TEST_CASE("zerosum: convex example") {
  const auto g = fixtures::convex_example();
  CHECK(std::fabs(val(g, std::vector<double>{0.5, 0.5})) <= 1e-12);
  CHECK(val(g, std::vector<double>{1.0, 0.0}) == doctest::Approx(1.0));
  CHECK(val(g, std::vector<double>{0.8, 0.2}) == doctest::Approx(0.6));

  CHECK(scheme_value(g, baseline_scheme(g, BaselineMode::kFull)) == doctest::Approx(1.0));
  CHECK(std::fabs(scheme_value(g, baseline_scheme(g, BaselineMode::kNone))) <= 1e-12);
  const SignalingScheme halves{{{0.5, {1.0, 0.0}}, {0.5, {0.0, 1.0}}}};
  CHECK(scheme_value(g, halves) == doctest::Approx(1.0));
}

TEST_CASE("zerosum: val is Lipschitz in the sup norm") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = fixtures::random_game(gen, 3, 3, 3);
    const auto mu = fixtures::random_simplex(gen, 3), nu = fixtures::random_simplex(gen, 3);
    double dist = 0.0;
    for (int t = 0; t < 3; ++t) dist = std::max(dist, std::fabs(mu[t] - nu[t]));
    CHECK(std::fabs(val(g, mu) - val(g, nu)) <= 3.0 * g.payoff_bound * dist + 1e-9);
  }
}

TEST_CASE("zerosum: scheme value is the weighted sum of posterior values") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = fixtures::random_game(gen, 3, 2, 3);
    std::vector<Signal> signals;
    std::vector<double> prior(3, 0.0);
    const auto w = fixtures::random_simplex(gen, 4);
    for (int s = 0; s < 4; ++s) {
      signals.push_back({w[s], fixtures::random_simplex(gen, 3)});
      for (int t = 0; t < 3; ++t) prior[t] += w[s] * signals.back().posterior[t];
    }
    g.prior = prior;
    const auto scheme = make_scheme(signals, prior);
    CHECK(validate_scheme(g, scheme).ok);
    double manual = 0.0;
    for (const auto& s : signals) manual += s.weight * val(g, s.posterior);
    CHECK(scheme_value(g, scheme) == doctest::Approx(manual).epsilon(1e-9));
  }
}

TEST_CASE("zerosum: validation errors") {
  auto g = fixtures::convex_example();
  CHECK_THROWS_AS(check_posterior(std::vector<double>{0.7, 0.7}, 2), ContractViolation);
  CHECK_THROWS_AS(check_posterior(std::vector<double>{1.0}, 2), Error);
  g.payoffs[1] = Matrix{{1.0, 2.0}};
  CHECK_THROWS_AS(g.validate(), DimensionError);

  const SignalingScheme off{{{1.0, {1.0, 0.0}}}};
  const auto rep = validate_scheme(std::vector<double>{0.5, 0.5}, off);
  CHECK_FALSE(rep.ok);
  CHECK(rep.max_residual == doctest::Approx(0.5));
  CHECK_THROWS_AS(make_scheme(off.signals, std::vector<double>{0.5, 0.5}), InvalidScheme);
}

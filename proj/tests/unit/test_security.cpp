#include "doctest.h"

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "signalkit/errors.hpp"
#include "signalkit/security.hpp"
#include "signalkit/signaling.hpp"

using namespace signalkit;

namespace {

std::vector<double> uniform_on(std::size_t n, const std::vector<std::size_t>& set) {
  std::vector<double> p(n, 0.0);
  for (auto v : set) p[v] = 1.0 / static_cast<double>(set.size());
  return p;
}

}  // namespace

TEST_CASE("security: compact and dense values agree") {
  std::mt19937_64 gen(51);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  for (int trial = 0; trial < 40; ++trial) {
    const auto esg = fixtures::random_esg(gen, dim(gen), dim(gen), dim(gen));
    const auto dense = expand(esg);
    CHECK(esg.max_abs_payoff() <= 1.0 + 1e-12);
    for (int s = 0; s < 3; ++s) {
      const auto mu = fixtures::random_simplex(gen, esg.num_states());
      const auto eq = val_compact(esg, mu);
      CHECK(eq.value == doctest::Approx(val(dense, mu)).epsilon(1e-7));
      CHECK(strategy_value(esg, eq.row_strategy, mu) == doctest::Approx(eq.value).epsilon(1e-7));
    }
  }
}

TEST_CASE("security: network security game structure") {
  const Graph tri = fixtures::complete(3);
  const double rho = 0.25;
  const auto g = network_security_game(tri, rho);
  const auto dense = expand(g);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t d = 0; d < 3; ++d) {
        const double expected = (tri.has_edge(a, t) ? 1.0 : 0.0) - rho * ((a == d ? 1.0 : 0.0) + (t == d ? 1.0 : 0.0));
        CHECK(dense.payoffs[t](a, d) == doctest::Approx(expected));
      }
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(g.abar(i, j) == (i == j ? -rho : 0.0));
      CHECK(g.d(i, j) == (i == j ? -rho : 0.0));
    }
  const auto free = network_security_game(tri, 0.0);
  for (std::size_t t = 0; t < 3; ++t) {
    std::vector<double> e(3, 0.0);
    e[t] = 1.0;
    CHECK(val_compact(free, e).value == doctest::Approx(1.0));
  }
}

TEST_CASE("bcbs: parameter identities in exact arithmetic") {
  for (int n = 2; n <= 8; ++n) {
    for (int r = 1; r <= n / 2; ++r) {
      const auto p = bcbs_parameters(n, r);
      Rational n8 = 1;
      for (int i = 0; i < 8; ++i) n8 *= n;
      CHECK(p.eps == Rational(1) / (2 * n8));
      CHECK(p.eta == 1 - (2 * n + 1) * p.eps);
      CHECK(p.rho == 2 * r * n * p.eps);
      // 1 - rho/r = eta + eps.
      CHECK(1 - p.rho / r == p.eta + p.eps);
    }
  }
  const auto p4 = bcbs_parameters(4, 2);
  CHECK(p4.eps == Rational(1, 131072));
  CHECK(p4.eta == 1 - 9 * p4.eps);
}

TEST_CASE("bcbs: K22 completeness and extraction") {
  const Graph k22 = fixtures::complete_bipartite(2, 2);
  const auto gadget = bcbs_gadget(k22, 2);
  const auto p = bcbs_parameters(4, 2);
  const std::vector<Rational> side{Rational(1, 2), Rational(1, 2), 0, 0};
  CHECK(bcbs_value_at_least_exact(gadget, side, p.eta + p.eps));
  CHECK_FALSE(bcbs_value_at_least_exact(gadget, side, p.eta + p.eps + Rational(1, 1000)));

  const auto mu = uniform_on(4, {0, 1});
  const auto x = uniform_on(4, {2, 3});
  CHECK(strategy_value(gadget.game, x, mu) >= gadget.eta + gadget.eps - 1e-12);
  const auto ex = bcbs_extract(gadget, mu, x);
  CHECK(ex.precondition);
  CHECK(ex.biclique);
  CHECK(ex.large_enough);
  CHECK(ex.v_side == std::vector<std::size_t>{0, 1});
  CHECK(ex.w_side == std::vector<std::size_t>{2, 3});

  // Perturbations far below the 1/n^3 threshold do not move the sides.
  std::vector<double> mu2 = mu, x2 = x;
  const double tiny = 1.0 / 256.0;
  mu2[0] += tiny;
  mu2[1] -= tiny;
  x2[2] -= tiny;
  x2[3] += tiny;
  const auto ex2 = bcbs_extract(gadget, mu2, x2);
  CHECK(ex2.v_side == ex.v_side);
  CHECK(ex2.w_side == ex.w_side);

  const auto oracle = dual_oracle_grid(value_function(gadget.game), std::vector<double>(4, gadget.eta), gadget.eps, 0.5);
  CHECK(oracle.which == DualOracleAnswer::Case::kWitness);
  CHECK(oracle.slack >= gadget.eps - 1e-9);
}

TEST_CASE("bcbs: a star has no K22, so no posterior reaches the threshold") {
  const Graph star = fixtures::complete_bipartite(1, 3);
  const auto gadget = bcbs_gadget(star, 2);
  const auto f = value_function(gadget.game);
  const DualGridOracle oracle(f, 1.0 / 8);
  double best = -1e300;
  for (double v : oracle.values()) best = std::max(best, v);
  CHECK(best < gadget.eta - gadget.eps);
  CHECK_THROWS_AS(bcbs_gadget(fixtures::complete(3), 1), ContractViolation);
}

TEST_CASE("bimatrix: structure and the min-equality identity") {
  std::mt19937_64 gen(53);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double eps = 0.05;
  for (int inst = 0; inst < 5; ++inst) {
    const std::size_t m = 2 + inst % 2, n = 2 + inst % 3;
    Matrix R(m, n), C(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        R(i, j) = u(gen);
        C(i, j) = u(gen);
      }
    const auto g = bimatrix_gadget(R, C, eps);
    CHECK(g.rows() == m);
    CHECK(g.cols() == m * n);
    CHECK(g.num_states() == n);
    CHECK(g.max_abs_payoff() <= g.payoff_bound + 1e-12);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(g.b(i, j) == doctest::Approx((1.0 + 1.0 / eps) * (R(i, j) + C(i, j))));
        for (std::size_t ip = 0; ip < m; ++ip) CHECK(g.abar(i, ip * n + j) == doctest::Approx(-C(i, j) / eps));
        for (std::size_t jp = 0; jp < n; ++jp) CHECK(g.d(i * n + jp, j) == doctest::Approx(-R(i, j) / eps));
      }
    for (int s = 0; s < 200; ++s) {
      const auto x = fixtures::random_simplex(gen, m);
      const auto mu = fixtures::random_simplex(gen, n);
      const auto xa = left_multiply(x, g.abar);
      const auto dmu = right_multiply(g.d, mu);
      double lhs = 1e300;
      for (std::size_t k = 0; k < xa.size(); ++k) lhs = std::min(lhs, xa[k] + dmu[k]);
      const auto rmu = right_multiply(R, mu);
      const auto xc = left_multiply(x, C);
      const double rhs = -(*std::max_element(rmu.begin(), rmu.end()) + *std::max_element(xc.begin(), xc.end())) / eps;
      CHECK(std::fabs(lhs - rhs) <= 1e-9 * (1.0 + std::fabs(rhs)));
    }
  }
  const Matrix zero(2, 2, 0.0);
  CHECK(std::fabs(val_compact(bimatrix_gadget(zero, zero, eps), std::vector<double>{0.3, 0.7}).value) <= 1e-12);
  CHECK(bimatrix_extract(zero, zero, eps, std::vector<double>{0.3, 0.7}).nash_residual == doctest::Approx(0.0));
}

TEST_CASE("bimatrix: coordination extraction") {
  const Matrix id{{1.0, 0.0}, {0.0, 1.0}};
  const auto ex = bimatrix_extract(id, id, 0.05, std::vector<double>{1.0, 0.0});
  CHECK(ex.x[0] == doctest::Approx(1.0));
  CHECK(ex.welfare == doctest::Approx(2.0));
  CHECK(std::fabs(ex.nash_residual) <= 1e-9);

  std::mt19937_64 gen(59);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double eps = 0.05;
  for (int trial = 0; trial < 10; ++trial) {
    Matrix R(2, 2), C(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        R(i, j) = u(gen);
        C(i, j) = u(gen);
      }
    const auto search = bimatrix_welfare_search(R, C, eps, 1.0 / 16);
    REQUIRE(search.found);
    const auto& e = search.extraction;
    CHECK(e.nash_residual == doctest::Approx(oracles::nash_residual(R, C, e.x, e.mu)).epsilon(1e-9));
    if (e.welfare >= search.target - 2 * eps) CHECK(e.nash_residual <= 6 * eps);
  }
}

TEST_CASE("vertex cover gadget: payoffs") {
  const Graph c4 = fixtures::cycle(4);
  const auto g = vertex_cover_gadget(c4);
  const double high = 2.0;  // n / (n - 2)
  REQUIRE(g.game.cols() == 4 + 4 + 1);
  for (std::size_t theta = 0; theta < 4; ++theta) {
    const Matrix& a = g.game.payoffs[theta];
    for (std::size_t v1 = 0; v1 < 4; ++v1) {
      for (std::size_t v = 0; v < 4; ++v) CHECK(-a(v1, v) == (v != theta && v != v1 ? high : 0.0));
      for (std::size_t k = 0; k < g.edges.size(); ++k) {
        const bool hit = g.edges[k].first == theta || g.edges[k].second == theta;
        CHECK(-a(v1, 4 + k) == (hit ? 0.0 : high));
      }
      CHECK(-a(v1, 8) == 1.0);
      CHECK(g.objective.entries[theta](v1, 8) == 1.0);
    }
  }
  CHECK(g.game.prior == std::vector<double>(4, 0.25));
}

TEST_CASE("vertex cover gadget: principal value") {
  const auto g = vertex_cover_gadget(fixtures::cycle(4));
  const auto cover = uniform_on(4, {0, 2});
  const auto pv = vc_principal_value(g, cover);
  CHECK(pv.value == 1);
  CHECK(vc_principal_value(g, std::vector<double>{1.0, 0.0, 0.0, 0.0}).value == 0);

  const std::vector<std::size_t> c{0, 2};
  const auto scheme = vc_cover_scheme(g, c);
  CHECK(validate_scheme(g.game, scheme).ok);
  CHECK(scheme_value(vc_value_function(g), scheme) >= 0.5);

  const auto k4 = vertex_cover_gadget(fixtures::complete(4));
  const auto net = delta_net(4, 1.0 / 8);
  for (const auto& mu : net.points) CHECK(vc_principal_value(k4, mu).value == 0);
}

TEST_CASE("vertex cover gadget: LP verdict agrees with an x-grid") {
  const double high = 2.0;
  const auto xgrid = delta_net(4, 1.0 / 16);
  for (const Graph& graph : {fixtures::cycle(4), fixtures::complete(4), fixtures::complete_bipartite(1, 3)}) {
    const auto g = vertex_cover_gadget(graph);
    const auto edges = graph.edges();
    for (const auto& mu : delta_net(4, 1.0 / 8).points) {
      const auto pv = vc_principal_value(g, mu);
      bool edge_ok = true;
      for (const auto& [u, v] : edges) edge_ok = edge_ok && high * (1.0 - mu[u] - mu[v]) <= 1.0 + 1e-9;
      bool grid_ok = false;
      for (const auto& x : xgrid.points) {
        bool ok = edge_ok;
        for (std::size_t v = 0; v < 4 && ok; ++v) ok = high * (1.0 - x[v]) * (1.0 - mu[v]) <= 1.0 + 1e-9;
        if (ok) {
          grid_ok = true;
          break;
        }
      }
      if (grid_ok) CHECK(pv.value == 1);
      if (pv.value == 1) {
        CHECK(edge_ok);
        // Shrinking any (1 - x_v) factor keeps every constraint satisfied.
        for (double shrink : {1.0, 0.75, 0.5, 0.0})
          for (std::size_t v = 0; v < 4; ++v)
            CHECK(high * shrink * (1.0 - pv.x[v]) * (1.0 - mu[v]) <= 1.0 + 1e-7);
      }
    }
  }
}

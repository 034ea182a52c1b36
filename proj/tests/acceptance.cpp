// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "signalkit/cli.hpp"
#include "signalkit/io.hpp"
#include "signalkit/planted_clique.hpp"
#include "signalkit/rng.hpp"
#include "signalkit/routing.hpp"
#include "signalkit/security.hpp"
#include "signalkit/signaling.hpp"
#include "signalkit/zerosum.hpp"

using namespace signalkit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > limit_s) {
    out.pass = false;
    out.detail += "; over the " + fmt("%.0f", limit_s) + " s budget";
  }
  std::printf("%s criterion %d: %s (%s; %.1f s)\n", out.pass ? "PASS" : "FAIL", id, title.c_str(), out.detail.c_str(),
              secs);
  std::fflush(stdout);
  if (!out.pass) ++failures;
}

RationalMatrix eighths_to_rational(const Matrix& a) {
  RationalMatrix q(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) q(i, j) = Rational(static_cast<int>(std::lround(a(i, j) * 8))) / 8;
  return q;
}

// The random security-game corpus shared by criteria 3 and 4.
std::vector<ExtendedSecurityGame> esg_corpus() {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<std::size_t> dim(2, 5);
  std::vector<ExtendedSecurityGame> out;
  while (out.size() < 50) {
    auto g = fixtures::random_esg(gen, 3, dim(gen), dim(gen));
    if (lipschitz_bound(g) <= 2.0) out.push_back(std::move(g));
  }
  return out;
}

Outcome minimax() {
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<std::size_t> dim(1, 5);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix a = fixtures::random_eighths(gen, dim(gen), dim(gen));
    const auto exact = oracles::support_enumeration_value(eighths_to_rational(a));
    if (!exact) return {false, "support enumeration found no equilibrium"};
    worst = std::max(worst, std::fabs(game_value(a).value - exact->convert_to<double>()));
  }
  const double rps = game_value(Matrix{{0.0, -1.0, 1.0}, {1.0, 0.0, -1.0}, {-1.0, 1.0, 0.0}}).value;
  const double pennies = game_value(Matrix{{1.0, -1.0}, {-1.0, 1.0}}).value;
  const bool ok = worst <= 1e-7 && std::fabs(rps) <= 1e-12 && std::fabs(pennies) <= 1e-12;
  return {ok, "max error " + fmt("%.2e", worst) + ", RPS " + fmt("%.1e", rps) + ", pennies " + fmt("%.1e", pennies)};
}

Outcome concavification() {
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<std::size_t> dim(1, 5);
  const int K = 64, fine = 1024;
  const double bound = 2.0 / K;
  double worst_net = 0.0, worst_fine = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = fixtures::random_game(gen, 2, dim(gen), dim(gen));
    const double lp = optimal_signaling_dnet(g, 1.0 / K).value;
    std::vector<double> on_net, on_fine;
    for (int k = 0; k <= K; ++k) on_net.push_back(val(g, std::vector<double>{k / double(K), 1.0 - k / double(K)}));
    for (int k = 0; k <= fine; ++k)
      on_fine.push_back(val(g, std::vector<double>{k / double(fine), 1.0 - k / double(fine)}));
    worst_net = std::max(worst_net, std::fabs(lp - oracles::concave_envelope_2(on_net, g.prior[0])));
    worst_fine = std::max(worst_fine, std::fabs(lp - oracles::concave_envelope_2(on_fine, g.prior[0])));
  }
  return {worst_net <= bound && worst_fine <= bound,
          "max gap to the net envelope " + fmt("%.2e", worst_net) + ", to the 1/1024 envelope " +
              fmt("%.2e", worst_fine) + ", bound " + fmt("%.4f", bound)};
}

Outcome ellipsoid_pipeline(const std::vector<ExtendedSecurityGame>& corpus) {
  const double eps = 0.05;
  int ok = 0;
  double worst = 1e300;
  for (const auto& g : corpus) {
    const auto f = value_function(g);
    const DualGridOracle oracle(f, oracle_delta(lipschitz_bound(g), eps));
    const auto res = ellipsoid_signaling(f, eps, [&](std::span<const double> w, double e) { return oracle.query(w, e); });
    const double opt = optimal_signaling_dnet(f, eps / 3.0).value;
    worst = std::min(worst, res.value - opt);
    ok += res.value >= opt - 5 * eps;
  }
  return {ok == static_cast<int>(corpus.size()),
          std::to_string(ok) + "/" + std::to_string(corpus.size()) + " within 5 eps, worst margin " + fmt("%.4f", worst)};
}

Outcome dual_oracle(const std::vector<ExtendedSecurityGame>& corpus) {
  const double eps = 0.05;
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int witnesses = 0, false_negatives = 0;
  for (const auto& g : corpus) {
    const auto f = value_function(g);
    const double delta = oracle_delta(lipschitz_bound(g), eps);
    const DualGridOracle coarse(f, delta), refined(f, delta / 2);
    for (int q = 0; q < 10; ++q) {
      // A tilt, shifted so the refined net sees slack between eps and 2 eps.
      std::vector<double> w(3);
      for (auto& x : w) x = q < 5 ? 0.0 : 0.4 * (u(gen) - 0.5);
      const double s = refined.query(w, eps).slack;
      const double shift = s - eps - eps * u(gen);
      for (auto& x : w) x += shift;
      const auto fine = refined.query(w, eps);
      if (fine.slack < eps) continue;
      ++witnesses;
      false_negatives += coarse.query(w, eps).which == DualOracleAnswer::Case::kEmpty;
    }
  }
  return {false_negatives == 0 && witnesses > 0,
          std::to_string(false_negatives) + " false negatives over " + std::to_string(witnesses) +
              " queries with a refined witness"};
}

Outcome routing() {
  const std::vector<Commodity> unit{fixtures::unit_demand(0, 1)};
  const double poa = price_of_anarchy(fixtures::pigou(), unit);
  const std::vector<Commodity> st{fixtures::unit_demand(0, 3)};
  const double braess = nash_flow(fixtures::braess(), st).total_latency;
  const std::vector<std::size_t> shortcut{4};
  const double removed = nash_flow(remove_edges(fixtures::braess(), shortcut), st).total_latency;
  std::mt19937_64 gen(5);
  int ok = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = fixtures::random_routing(gen, 5, 2);
    const double full = full_revelation_routing(inst).value;
    const double best = best_routing_scheme_grid(inst, 1.0 / 32).value;
    worst = std::max(worst, full / best);
    ok += full <= 4.0 / 3.0 * best + 1e-2;
  }
  const bool pass = std::fabs(poa - 4.0 / 3.0) <= 1e-3 && std::fabs(braess - 2.0) <= 1e-4 &&
                    std::fabs(removed - 1.5) <= 1e-4 && ok == 20;
  return {pass, "Pigou PoA " + fmt("%.6f", poa) + ", Braess " + fmt("%.6f", braess) + " -> " + fmt("%.6f", removed) +
                    ", full revelation within 4/3 on " + std::to_string(ok) + "/20 (worst ratio " +
                    fmt("%.4f", worst) + ")"};
}

Outcome tolls_round_trip() {
  const std::vector<std::size_t> shortcut{4};
  const auto g = tolls_gadget(fixtures::braess(), fixtures::unit_demand(0, 3), shortcut);
  const auto scheme = scheme_from_tolls(g);
  const double value = routing_scheme_value(g.instance, scheme);
  const auto tolls = tolls_from_scheme(g, scheme);
  const double m = static_cast<double>(g.m);
  const double cap = tolls.scheme_latency / (1.0 - 4.0 / m) + 1e-4;
  return {std::fabs(value - 1.5) <= 1e-4 && tolls.nash_cost <= cap,
          "scheme value " + fmt("%.6f", value) + ", tolled Nash cost " + fmt("%.6f", tolls.nash_cost) + " <= " +
              fmt("%.4f", cap)};
}

Outcome bcbs() {
  bool identities = true;
  for (int n = 2; n <= 8; ++n)
    for (int r = 1; r <= n / 2; ++r) {
      const auto p = bcbs_parameters(n, r);
      Rational n8 = 1;
      for (int i = 0; i < 8; ++i) n8 *= n;
      identities = identities && p.eps == Rational(1) / (2 * n8) && p.eta == 1 - (2 * n + 1) * p.eps &&
                   p.rho == 2 * r * n * p.eps;
    }
  const auto gadget = bcbs_gadget(fixtures::complete_bipartite(2, 2), 2);
  const auto p = bcbs_parameters(4, 2);
  const bool exact = bcbs_value_at_least_exact(gadget, {Rational(1, 2), Rational(1, 2), 0, 0}, p.eta + p.eps);
  const std::vector<double> mu{0.5, 0.5, 0.0, 0.0};
  const auto eq = val_compact(gadget.game, mu);
  const auto ex = bcbs_extract(gadget, mu, eq.row_strategy);
  const bool sides = ex.biclique && ex.large_enough && ex.v_side == std::vector<std::size_t>{0, 1} &&
                     ex.w_side == std::vector<std::size_t>{2, 3};
  return {identities && exact && sides, std::string("identities ") + (identities ? "hold" : "broken") +
                                            ", exact val >= eta + eps " + (exact ? "yes" : "no") + ", sides " +
                                            (sides ? "recovered" : "not recovered")};
}

Outcome bimatrix() {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.0, 1.0);
  const double eps = 0.05;
  double worst_identity = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    Matrix R(3, 3), C(3, 3);
    for (auto& v : R.data()) v = u(gen);
    for (auto& v : C.data()) v = u(gen);
    const auto g = bimatrix_gadget(R, C, eps);
    for (int s = 0; s < 100; ++s) {
      const auto x = fixtures::random_simplex(gen, 3), mu = fixtures::random_simplex(gen, 3);
      const auto xa = left_multiply(x, g.abar);
      const auto dmu = right_multiply(g.d, mu);
      double lhs = 1e300;
      for (std::size_t k = 0; k < xa.size(); ++k) lhs = std::min(lhs, xa[k] + dmu[k]);
      const auto rmu = right_multiply(R, mu);
      const auto xc = left_multiply(x, C);
      const double rhs = -(*std::max_element(rmu.begin(), rmu.end()) + *std::max_element(xc.begin(), xc.end())) / eps;
      worst_identity = std::max(worst_identity, std::fabs(lhs - rhs));
    }
  }
  int met = 0, good = 0;
  double worst_residual = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    // Coordination: matching actions pay both players, mismatches do not.
    Matrix R(2, 2), C(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        R(i, j) = i == j ? pos(gen) : -pos(gen);
        C(i, j) = i == j ? pos(gen) : -pos(gen);
      }
    const auto search = bimatrix_welfare_search(R, C, eps, 1.0 / 16);
    if (!search.found) continue;
    const auto& e = search.extraction;
    if (e.welfare < search.target - 2 * eps) continue;
    ++met;
    const double residual = oracles::nash_residual(R, C, e.x, e.mu);
    worst_residual = std::max(worst_residual, residual);
    good += residual <= 6 * eps;
  }
  return {worst_identity <= 1e-9 && met > 0 && good == met,
          "identity error " + fmt("%.1e", worst_identity) + " over 1000 pairs, residual <= 6 eps in " +
              std::to_string(good) + "/" + std::to_string(met) + " games meeting the target (worst " +
              fmt("%.4f", worst_residual) + ")"};
}

Outcome vertex_cover() {
  const auto c4 = vertex_cover_gadget(fixtures::cycle(4));
  const std::vector<std::size_t> cover{0, 2};
  const double value = scheme_value(vc_value_function(c4), vc_cover_scheme(c4, cover));
  const auto k4 = vertex_cover_gadget(fixtures::complete(4));
  int positive = 0;
  const auto net = delta_net(4, 1.0 / 8);
  for (const auto& mu : net.points) positive += vc_principal_value(k4, mu).value > 0;
  return {value >= 0.5 && positive == 0, "C4 scheme value " + fmt("%.3f", value) + ", K4 positive posteriors " +
                                             std::to_string(positive) + "/" + std::to_string(net.size())};
}

Outcome planted_clique() {
  int recovered = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const std::uint64_t seed = derive_seed(1000, "recovery", trial);
    const auto pg = gen_pcover(300, 0.5, 50, 3, seed);
    recovered += recover_clique(pg.graph, pg.planted_sets[0], 50, 4.0, derive_seed(seed, "recover")).success;
  }
  int valuable = 0, covered = 0;
  double lowest = 1e300, highest = -1e300;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const std::uint64_t seed = derive_seed(2000, "completeness", trial);
    const auto pg = gen_pcover(400, 0.5, 40, 10, seed);
    HardnessGameParams params;
    params.Z = 20.0;
    params.N_scaled = 2000;
    params.seed = derive_seed(seed, "game");
    const auto game = build_hardness_game(pg, params);
    const auto scheme = clique_cover_scheme(pg);
    const double v = scheme_value(game.value_function(), scheme);
    lowest = std::min(lowest, v);
    highest = std::max(highest, v);
    valuable += v >= 0.9;
    const auto family = extract_clusters(game, scheme, 0.03);
    covered += check_cover_condition(family, pg.planted_sets, 0.25, 4.0, pg.n()) >= 0.5;
  }
  return {recovered >= 18 && valuable >= 18 && covered >= 15,
          "recovery " + std::to_string(recovered) + "/20, scheme value >= 0.9 in " + std::to_string(valuable) +
              "/20 (range " + fmt("%.3f", lowest) + " .. " + fmt("%.3f", highest) + "), cover fraction >= 0.5 in " +
              std::to_string(covered) + "/20"};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path dir = SIGNALKIT_GOLDEN_DIR;
  const auto cases = nlohmann::json::parse(slurp(dir / "cases.json"));
  const fs::path saved = fs::current_path();
  fs::current_path(dir);
  int same = 0, matching = 0;
  for (const auto& c : cases) {
    const auto args = c.at("args").get<std::vector<std::string>>();
    std::string first, second;
    for (std::string* dst : {&first, &second}) {
      std::ostringstream out, err;
      if (run_command(args, out, err) == 0) *dst = out.str();
    }
    same += !first.empty() && first == second;
    matching += !first.empty() && first == slurp(fs::path("expected") / (c.at("name").get<std::string>() + ".json"));
  }
  fs::current_path(saved);
  const int n = static_cast<int>(cases.size());
  return {same == n && matching == n, std::to_string(same) + "/" + std::to_string(n) +
                                          " reports identical across runs, " + std::to_string(matching) + "/" +
                                          std::to_string(n) + " identical to the golden files"};
}

}  // namespace

int main() {
  const auto corpus = esg_corpus();
  criterion(1, "minimax engine vs exact support enumeration", 10, minimax);
  criterion(2, "two-state net LP vs upper concave envelope", 30, concavification);
  criterion(3, "ellipsoid pipeline within 5 eps of the net LP", 120, [&] { return ellipsoid_pipeline(corpus); });
  criterion(4, "grid dual oracle has no false negatives", 120, [&] { return dual_oracle(corpus); });
  criterion(5, "routing anchors and full revelation bound", 60, routing);
  criterion(6, "tolls gadget round trip on Braess", 10, tolls_round_trip);
  criterion(7, "BCBS gadget parameters, completeness and extraction", 5, bcbs);
  criterion(8, "bimatrix gadget identity and extraction", 30, bimatrix);
  criterion(9, "vertex-cover gadget on C4 and K4", 30, vertex_cover);
  criterion(10, "planted clique lab at scaled parameters", 300, planted_clique);
  criterion(11, "CLI golden reports are deterministic", 120, determinism);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

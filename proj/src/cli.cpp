#include "signalkit/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "signalkit/io.hpp"
#include "signalkit/rng.hpp"
#include "signalkit/signaling.hpp"

namespace signalkit {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string out_path;
  double tol = 1e-9;
  std::string format = "json";

  std::optional<std::uint64_t> seed_if_given() const {
    return seed_opt && seed_opt->count() ? std::optional(seed) : std::nullopt;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractViolation("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

InstanceEnvelope load(const std::string& path) {
  try {
    return parse_instance(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(e.pointer(), e.detail(), path);
  }
}

// The document's body if it has the wanted kind, or the artifact embedded in a
// report under the kind's name.
Json body_of(const std::string& path, DocumentKind kind) {
  const InstanceEnvelope env = load(path);
  const std::string name(to_string(kind));
  if (env.kind == kind) return env.body;
  if (env.kind == DocumentKind::kReport && env.body.contains(name)) return env.body[name];
  throw ContractViolation(path + ": expected a " + name + " document, found " + std::string(to_string(env.kind)));
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(what + ": cannot parse '" + item + "' as a number");
    }
    if (!std::isfinite(out.back())) throw UsageError(what + ": numbers must be finite");
  }
  if (out.empty()) throw UsageError(what + ": empty list");
  return out;
}

std::vector<std::size_t> parse_indices(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  if (text.empty()) return out;
  for (double v : parse_list(text, what)) {
    if (v < 0 || v != std::floor(v)) throw UsageError(what + ": expected nonnegative integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

Matrix parse_matrix(const std::string& text, const std::string& what) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) {
    rows.push_back(parse_list(row, what));
    if (rows.back().size() != rows.front().size()) throw UsageError(what + ": ragged matrix");
  }
  if (rows.empty()) throw UsageError(what + ": empty matrix");
  return Matrix::from_rows(rows);
}

Json equilibrium_json(const Equilibrium& eq) {
  return {{"value", eq.value}, {"row_strategy", eq.row_strategy}, {"col_strategy", eq.col_strategy}};
}

// A dense or compact game with a value function bound to owned storage.
struct ValueSource {
  std::optional<BayesianGame> game;
  std::optional<ExtendedSecurityGame> esg;
  ValueFunction f;
  double lipschitz = 0.0;

  Equilibrium equilibrium(std::span<const double> mu) const {
    if (game) {
      check_posterior(mu, game->num_states());
      return game_value(mix_payoffs(*game, mu));
    }
    return val_compact(*esg, mu);
  }
};

std::unique_ptr<ValueSource> load_source(const std::string& path) {
  const InstanceEnvelope env = load(path);
  auto src = std::make_unique<ValueSource>();
  Json body = env.body;
  DocumentKind kind = env.kind;
  if (kind == DocumentKind::kReport) {
    if (body.contains("game")) {
      body = Json(body["game"]);
      kind = DocumentKind::kGame;
    } else if (body.contains("esg")) {
      body = Json(body["esg"]);
      kind = DocumentKind::kEsg;
    }
  }
  if (kind == DocumentKind::kGame) {
    src->game = game_from_json(body);
    src->f = value_function(*src->game);
    src->lipschitz = src->game->payoff_bound;
  } else if (kind == DocumentKind::kEsg) {
    src->esg = esg_from_json(body);
    src->f = value_function(*src->esg);
    src->lipschitz = lipschitz_bound(*src->esg);
  } else {
    throw ContractViolation(path + ": expected a game or esg document");
  }
  return src;
}

class Runner {
 public:
  Runner(Globals& g, std::ostream& out, std::ostream& err) : g_(g), out_(out), err_(err) {}

  void emit(const std::string& command, DocumentKind kind, Json body, const std::string& summary,
            std::optional<std::uint64_t> seed = std::nullopt) {
    if (kind == DocumentKind::kReport) body["command"] = command;
    if (!seed) seed = g_.seed_if_given();
    const std::string text = serialize(make_envelope(kind, std::move(body), seed, "signalkit " + command));
    if (g_.out_path.empty()) {
      out_ << text;
    } else {
      std::ofstream file(g_.out_path, std::ios::binary);
      if (!file) throw ContractViolation("cannot write '" + g_.out_path + "'");
      file << text;
    }
    err_ << command << ": " << summary << "\n";
  }

  std::uint64_t seed() const { return g_.seed; }
  double tol() const { return g_.tol; }

 private:
  Globals& g_;
  std::ostream& out_;
  std::ostream& err_;
};

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(10);
  ss << v;
  return ss.str();
}

// ---- subcommand groups --------------------------------------------------

void add_game_commands(CLI::App& app, Runner& run) {
  struct Args {
    std::string game, posterior;
  };
  auto a = std::make_shared<Args>();

  auto* value = app.add_subcommand("value", "Value and equilibrium of the game at a posterior");
  value->add_option("--game", a->game, "game or esg document")->required();
  value->add_option("--posterior", a->posterior, "comma-separated posterior")->required();
  value->callback([a, &run] {
    const auto src = load_source(a->game);
    const auto eq = src->equilibrium(parse_list(a->posterior, "--posterior"));
    run.emit("value", DocumentKind::kReport, {{"equilibrium", equilibrium_json(eq)}, {"value", eq.value}},
             "val = " + fmt(eq.value));
  });

  auto* mix = app.add_subcommand("mix", "Posterior-mixed payoff matrix");
  mix->add_option("--game", a->game, "game document")->required();
  mix->add_option("--posterior", a->posterior, "comma-separated posterior")->required();
  mix->callback([a, &run] {
    const BayesianGame game = game_from_json(body_of(a->game, DocumentKind::kGame));
    const auto mu = parse_list(a->posterior, "--posterior");
    check_posterior(mu, game.num_states());
    const Matrix m = mix_payoffs(game, mu);
    run.emit("mix", DocumentKind::kReport, {{"matrix", to_json(m)}},
             std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " matrix");
  });
}

void add_signal_commands(CLI::App& app, Runner& run) {
  auto* signal = app.add_subcommand("signal", "Signaling schemes");
  signal->require_subcommand(1);
  struct Args {
    std::string game, scheme, w;
    double delta = 0.0, eps = 0.05, oracle_delta = 0.0;
  };
  auto a = std::make_shared<Args>();

  auto* dnet = signal->add_subcommand("dnet", "Concavification LP over the delta-net");
  dnet->add_option("--game", a->game)->required();
  dnet->add_option("--delta", a->delta)->required();
  dnet->callback([a, &run] {
    const auto src = load_source(a->game);
    const auto res = optimal_signaling_dnet(src->f, a->delta);
    run.emit("signal dnet", DocumentKind::kReport,
             {{"scheme", to_json(res.scheme)}, {"value", res.value}, {"dual", res.dual}, {"delta", a->delta}},
             "value " + fmt(res.value) + " with " + std::to_string(res.scheme.signals.size()) + " signals");
  });

  auto* ell = signal->add_subcommand("ellipsoid", "Ellipsoid pipeline driven by the grid dual oracle");
  ell->add_option("--game", a->game)->required();
  ell->add_option("--eps", a->eps)->check(CLI::PositiveNumber);
  ell->add_option("--oracle-delta", a->oracle_delta, "net resolution of the oracle (default from the Lipschitz bound)");
  ell->callback([a, &run] {
    const auto src = load_source(a->game);
    const double od = a->oracle_delta > 0.0 ? a->oracle_delta : oracle_delta(src->lipschitz, a->eps);
    const DualGridOracle oracle(src->f, od);
    const auto res = ellipsoid_signaling(src->f, a->eps,
                                         [&](std::span<const double> w, double e) { return oracle.query(w, e); });
    run.emit("signal ellipsoid", DocumentKind::kReport,
             {{"scheme", to_json(res.scheme)},
              {"value", res.value},
              {"eps", a->eps},
              {"oracle_delta", od},
              {"rounding_delta", res.delta},
              {"nu_star", res.nu_star},
              {"cuts", res.cuts.size()},
              {"support_size", res.support_size},
              {"ellipsoid_runs", res.ellipsoid_runs}},
             "value " + fmt(res.value) + " after " + std::to_string(res.ellipsoid_runs) + " ellipsoid runs");
  });

  auto* dual = signal->add_subcommand("dual-oracle", "Threshold query max over the net of val(mu) - w.mu");
  dual->add_option("--game", a->game)->required();
  dual->add_option("--w", a->w, "comma-separated threshold vector")->required();
  dual->add_option("--eps", a->eps)->check(CLI::NonNegativeNumber);
  dual->add_option("--delta", a->delta)->required();
  dual->callback([a, &run] {
    const auto src = load_source(a->game);
    const auto w = parse_list(a->w, "--w");
    const auto ans = dual_oracle_grid(src->f, w, a->eps, a->delta);
    const bool witness = ans.which == DualOracleAnswer::Case::kWitness;
    Json body{{"case", witness ? "witness" : "empty"}, {"slack", ans.slack}, {"eps", a->eps}, {"delta", a->delta}};
    if (witness) body["witness"] = ans.witness;
    run.emit("signal dual-oracle", DocumentKind::kReport, body,
             std::string(witness ? "witness" : "empty") + ", slack " + fmt(ans.slack));
  });

  auto* maxp = signal->add_subcommand("max-prior", "Posterior of maximum value on the delta-net");
  maxp->add_option("--game", a->game)->required();
  maxp->add_option("--delta", a->delta)->required();
  maxp->callback([a, &run] {
    const auto src = load_source(a->game);
    const auto res = max_prior_grid(src->f, a->delta);
    run.emit("signal max-prior", DocumentKind::kReport, {{"prior", res.prior}, {"value", res.value}},
             "max value " + fmt(res.value));
  });

  for (auto [name, mode] : {std::pair{"full", BaselineMode::kFull}, std::pair{"none", BaselineMode::kNone}}) {
    auto* base = signal->add_subcommand(name, mode == BaselineMode::kFull ? "Full revelation" : "No revelation");
    base->add_option("--game", a->game)->required();
    base->callback([a, &run, name = std::string(name), mode = mode] {
      const auto src = load_source(a->game);
      const auto scheme = baseline_scheme(src->f.prior, mode);
      const double v = scheme_value(src->f, scheme);
      run.emit("signal " + name, DocumentKind::kReport, {{"scheme", to_json(scheme)}, {"value", v}},
               "value " + fmt(v));
    });
  }

  auto* validate = signal->add_subcommand("validate", "Check a scheme against the game's prior");
  validate->add_option("--game", a->game)->required();
  validate->add_option("--scheme", a->scheme, "scheme document or report holding one")->required();
  validate->callback([a, &run] {
    const auto src = load_source(a->game);
    const auto scheme = scheme_from_json(body_of(a->scheme, DocumentKind::kScheme));
    const auto rep = validate_scheme(src->f.prior, scheme, run.tol() < 1e-8 ? 1e-8 : run.tol());
    Json body{{"ok", rep.ok}, {"max_residual", rep.max_residual}, {"weight_sum", rep.weight_sum},
              {"message", rep.message}};
    if (rep.ok) body["value"] = scheme_value(src->f, scheme);
    run.emit("signal validate", DocumentKind::kReport, body, rep.ok ? "ok" : "invalid: " + rep.message);
    if (!rep.ok) throw InvalidScheme(rep.message);
  });
}

void add_esg_commands(CLI::App& app, Runner& run) {
  auto* esg = app.add_subcommand("esg", "Extended security games");
  esg->require_subcommand(1);
  struct Args {
    std::string esg, posterior;
  };
  auto a = std::make_shared<Args>();
  auto* expand_cmd = esg->add_subcommand("expand", "Dense Bayesian game of a compact game");
  expand_cmd->add_option("--esg", a->esg)->required();
  expand_cmd->callback([a, &run] {
    const auto game = expand(esg_from_json(body_of(a->esg, DocumentKind::kEsg)));
    run.emit("esg expand", DocumentKind::kGame, to_json(game),
             std::to_string(game.num_states()) + " states, " + std::to_string(game.rows()) + "x" +
                 std::to_string(game.cols()));
  });
  auto* val_cmd = esg->add_subcommand("val", "Compact-LP value at a posterior");
  val_cmd->add_option("--esg", a->esg)->required();
  val_cmd->add_option("--posterior", a->posterior)->required();
  val_cmd->callback([a, &run] {
    const auto g = esg_from_json(body_of(a->esg, DocumentKind::kEsg));
    const auto eq = val_compact(g, parse_list(a->posterior, "--posterior"));
    run.emit("esg val", DocumentKind::kReport, {{"equilibrium", equilibrium_json(eq)}, {"value", eq.value}},
             "val = " + fmt(eq.value));
  });
}

Json extraction_json(const BcbsExtraction& ex) {
  return {{"v_side", ex.v_side},           {"w_side", ex.w_side},   {"value", ex.value},
          {"precondition", ex.precondition}, {"biclique", ex.biclique}, {"large_enough", ex.large_enough}};
}

Json extraction_json(const BimatrixExtraction& ex) {
  return {{"x", ex.x},
          {"mu", ex.mu},
          {"value", ex.value},
          {"welfare", ex.welfare},
          {"nash_residual", ex.nash_residual}};
}

void add_gadget_commands(CLI::App& app, Runner& run) {
  auto* gadget = app.add_subcommand("gadget", "Hardness gadgets");
  gadget->require_subcommand(1);
  struct Args {
    std::string graph, posterior, side, cover, R, C;
    int r = 2;
    double eps = 0.05, delta = 0.125;
  };
  auto a = std::make_shared<Args>();

  auto* bcbs = gadget->add_subcommand("bcbs", "Balanced complete bipartite subgraph gadget");
  bcbs->require_subcommand(1);
  auto load_bcbs = [a] { return bcbs_gadget(graph_from_json(body_of(a->graph, DocumentKind::kGraph)).graph, a->r); };
  auto* bb = bcbs->add_subcommand("build");
  bb->add_option("--graph", a->graph)->required();
  bb->add_option("--r", a->r)->required();
  bb->callback([a, load_bcbs, &run] {
    const auto g = load_bcbs();
    const auto p = bcbs_parameters(g.n, g.r);
    run.emit("gadget bcbs build", DocumentKind::kReport,
             {{"esg", to_json(g.game)},
              {"n", g.n},
              {"r", g.r},
              {"eps", g.eps},
              {"eta", g.eta},
              {"rho", g.rho},
              {"exact", {{"eps", p.eps.str()}, {"eta", p.eta.str()}, {"rho", p.rho.str()}}}},
             "n = " + std::to_string(g.n) + ", eps = " + p.eps.str());
  });
  auto* bx = bcbs->add_subcommand("extract");
  bx->add_option("--graph", a->graph)->required();
  bx->add_option("--r", a->r)->required();
  bx->add_option("--posterior", a->posterior)->required();
  bx->callback([a, load_bcbs, &run] {
    const auto g = load_bcbs();
    const auto mu = parse_list(a->posterior, "--posterior");
    const auto eq = val_compact(g.game, mu);
    const auto ex = bcbs_extract(g, mu, eq.row_strategy);
    run.emit("gadget bcbs extract", DocumentKind::kReport, extraction_json(ex),
             ex.biclique && ex.large_enough ? "biclique recovered" : "no biclique");
  });
  auto* bv = bcbs->add_subcommand("verify");
  bv->add_option("--graph", a->graph)->required();
  bv->add_option("--r", a->r)->required();
  bv->add_option("--side", a->side, "vertices carrying the uniform posterior")->required();
  bv->callback([a, load_bcbs, &run] {
    const auto g = load_bcbs();
    const auto side = parse_indices(a->side, "--side");
    if (side.empty()) throw UsageError("--side: need at least one vertex");
    std::vector<Rational> mu(static_cast<std::size_t>(g.n), Rational(0));
    for (auto v : side) {
      if (v >= mu.size()) throw UsageError("--side: vertex out of range");
      mu[v] = Rational(1, static_cast<int>(side.size()));
    }
    const auto p = bcbs_parameters(g.n, g.r);
    const Rational target = p.eta + p.eps;
    const bool holds = bcbs_value_at_least_exact(g, mu, target);
    run.emit("gadget bcbs verify", DocumentKind::kReport,
             {{"side", side}, {"target", target.str()}, {"value_at_least_target", holds}},
             holds ? "val >= eta + eps" : "val < eta + eps");
  });

  auto* bim = gadget->add_subcommand("bimatrix", "Bimatrix-to-security gadget");
  bim->require_subcommand(1);
  auto* mb = bim->add_subcommand("build");
  auto* mx = bim->add_subcommand("extract");
  auto* mv = bim->add_subcommand("verify");
  for (auto* cmd : {mb, mx, mv}) {
    cmd->add_option("--R", a->R, "row payoffs, rows separated by ';'")->required();
    cmd->add_option("--C", a->C, "column payoffs, rows separated by ';'")->required();
    cmd->add_option("--eps", a->eps)->check(CLI::PositiveNumber);
  }
  mb->callback([a, &run] {
    const auto g = bimatrix_gadget(parse_matrix(a->R, "--R"), parse_matrix(a->C, "--C"), a->eps);
    run.emit("gadget bimatrix build", DocumentKind::kReport, {{"esg", to_json(g)}, {"eps", a->eps}},
             "payoff bound " + fmt(g.payoff_bound));
  });
  mx->add_option("--posterior", a->posterior)->required();
  mx->callback([a, &run] {
    const auto ex = bimatrix_extract(parse_matrix(a->R, "--R"), parse_matrix(a->C, "--C"), a->eps,
                                     parse_list(a->posterior, "--posterior"));
    run.emit("gadget bimatrix extract", DocumentKind::kReport, extraction_json(ex),
             "welfare " + fmt(ex.welfare) + ", nash residual " + fmt(ex.nash_residual));
  });
  mv->add_option("--delta", a->delta);
  mv->callback([a, &run] {
    const auto ws = bimatrix_welfare_search(parse_matrix(a->R, "--R"), parse_matrix(a->C, "--C"), a->eps, a->delta);
    Json body{{"target", ws.target}, {"found", ws.found}, {"eps", a->eps}, {"delta", a->delta}};
    if (ws.found) body["extraction"] = extraction_json(ws.extraction);
    run.emit("gadget bimatrix verify", DocumentKind::kReport, body,
             ws.found ? "welfare target " + fmt(ws.target) : "no witness");
  });

  auto* vc = gadget->add_subcommand("vc", "Vertex-cover gadget with a general objective");
  vc->require_subcommand(1);
  auto load_vc = [a] { return vertex_cover_gadget(graph_from_json(body_of(a->graph, DocumentKind::kGraph)).graph); };
  auto* vb = vc->add_subcommand("build");
  auto* vx = vc->add_subcommand("extract");
  auto* vv = vc->add_subcommand("verify");
  for (auto* cmd : {vb, vx, vv}) cmd->add_option("--graph", a->graph)->required();
  vb->callback([load_vc, &run] {
    const auto g = load_vc();
    Json objective = Json::array();
    for (const auto& f : g.objective.entries) objective.push_back(to_json(f));
    run.emit("gadget vc build", DocumentKind::kReport,
             {{"game", to_json(g.game)}, {"objective", objective}, {"edges", g.edges}},
             std::to_string(g.game.cols()) + " column strategies");
  });
  vx->add_option("--posterior", a->posterior)->required();
  vx->callback([a, load_vc, &run] {
    const auto g = load_vc();
    const auto pv = vc_principal_value(g, parse_list(a->posterior, "--posterior"));
    Json body{{"principal_value", pv.value}};
    if (pv.value == 1) body["x"] = pv.x;
    run.emit("gadget vc extract", DocumentKind::kReport, body, "principal value " + std::to_string(pv.value));
  });
  vv->add_option("--cover", a->cover, "comma-separated vertex cover")->required();
  vv->callback([a, load_vc, &run] {
    const auto g = load_vc();
    const auto cover = parse_indices(a->cover, "--cover");
    const auto scheme = vc_cover_scheme(g, cover);
    const double v = scheme_value(vc_value_function(g), scheme);
    run.emit("gadget vc verify", DocumentKind::kReport, {{"scheme", to_json(scheme)}, {"value", v}},
             "scheme value " + fmt(v));
  });
}

void add_pclique_commands(CLI::App& app, Runner& run) {
  auto* pc = app.add_subcommand("pclique", "Planted clique cover lab");
  pc->require_subcommand(1);
  struct Args {
    std::size_t n = 300, k = 50, r = 3, N = 2000, set = 0;
    double p = 0.5, Z = 20.0, eps = 0.03, cover_eps = 0.25, c3 = 4.0;
    int c2 = 8;
    std::string graph;
    bool evaluate = false;
  };
  auto a = std::make_shared<Args>();
  auto game_params = [a, &run] {
    HardnessGameParams hp;
    hp.Z = a->Z;
    hp.N_scaled = a->N;
    hp.c2_scaled = a->c2;
    hp.seed = derive_seed(run.seed(), "game");
    return hp;
  };
  auto add_game_opts = [a](CLI::App* cmd) {
    cmd->add_option("--Z", a->Z);
    cmd->add_option("--N", a->N, "number of B (and D) columns");
    cmd->add_option("--c2", a->c2);
  };

  auto* gen = pc->add_subcommand("gen", "Sample a planted clique cover graph");
  gen->add_option("--n", a->n);
  gen->add_option("--p", a->p);
  gen->add_option("--k", a->k);
  gen->add_option("--r", a->r);
  gen->callback([a, &run] {
    const auto pg = gen_pcover(a->n, a->p, a->k, a->r, run.seed());
    run.emit("pclique gen", DocumentKind::kGraph, to_json(pg),
             std::to_string(pg.graph.num_edges()) + " edges, " + std::to_string(pg.planted_sets.size()) +
                 " planted sets",
             run.seed());
  });

  auto* build = pc->add_subcommand("build-game", "Summarize the hardness game built on a graph");
  build->add_option("--graph", a->graph)->required();
  add_game_opts(build);
  build->callback([a, game_params, &run] {
    const auto pg = graph_from_json(body_of(a->graph, DocumentKind::kGraph));
    const auto g = build_hardness_game(pg, game_params());
    auto low_fraction = [&](const Matrix& m) {
      std::size_t low = 0;
      for (double v : m.data()) low += v < 2.0;
      return static_cast<double>(low) / static_cast<double>(m.data().size());
    };
    run.emit("pclique build-game", DocumentKind::kReport,
             {{"n", g.n()},
              {"num_columns", g.num_columns()},
              {"Z", g.Z},
              {"N", a->N},
              {"b_low_fraction", low_fraction(g.b)},
              {"d_low_fraction", low_fraction(g.d)}},
             std::to_string(g.n()) + " x " + std::to_string(g.num_columns()) + " game", run.seed());
  });

  auto* scheme = pc->add_subcommand("scheme", "Clique-cover signaling scheme");
  scheme->add_option("--graph", a->graph)->required();
  scheme->add_flag("--evaluate", a->evaluate, "also evaluate the scheme on the hardness game");
  add_game_opts(scheme);
  scheme->callback([a, game_params, &run] {
    const auto pg = graph_from_json(body_of(a->graph, DocumentKind::kGraph));
    const auto s = clique_cover_scheme(pg);
    Json body{{"scheme", to_json(s)}, {"signals", s.signals.size()}};
    std::string summary = std::to_string(s.signals.size()) + " signals";
    if (a->evaluate) {
      const auto g = build_hardness_game(pg, game_params());
      const double v = scheme_value(g.value_function(), s);
      body["value"] = v;
      summary += ", value " + fmt(v);
    }
    run.emit("pclique scheme", DocumentKind::kReport, body, summary, run.seed());
  });

  auto* extract = pc->add_subcommand("extract", "Cluster extraction from the clique-cover scheme");
  extract->add_option("--graph", a->graph)->required();
  extract->add_option("--eps", a->eps);
  extract->add_option("--cover-eps", a->cover_eps, "eps of the cover condition");
  extract->add_option("--c3", a->c3);
  add_game_opts(extract);
  extract->callback([a, game_params, &run] {
    const auto pg = graph_from_json(body_of(a->graph, DocumentKind::kGraph));
    const auto g = build_hardness_game(pg, game_params());
    const auto s = clique_cover_scheme(pg);
    const auto clusters = extract_clusters(g, s, a->eps);
    const double cover = check_cover_condition(clusters, pg.planted_sets, a->cover_eps, a->c3, pg.n());
    Json cl = Json::array();
    for (const auto& c : clusters) cl.push_back(c);
    run.emit("pclique extract", DocumentKind::kReport, {{"clusters", cl}, {"cover_fraction", cover}},
             std::to_string(clusters.size()) + " clusters, cover fraction " + fmt(cover), run.seed());
  });

  auto* recover = pc->add_subcommand("recover", "Recover a planted clique from a planted set");
  recover->add_option("--graph", a->graph)->required();
  recover->add_option("--set", a->set, "index of the planted set used as T");
  recover->add_option("--c3", a->c3);
  recover->callback([a, &run] {
    const auto pg = graph_from_json(body_of(a->graph, DocumentKind::kGraph));
    if (a->set >= pg.planted_sets.size()) throw ContractViolation("graph has no planted set " + std::to_string(a->set));
    const auto& t = pg.planted_sets[a->set];
    const auto res = recover_clique(pg.graph, t, pg.k, a->c3, derive_seed(run.seed(), "recover"));
    const bool exact = res.success && res.clique == t;
    run.emit("pclique recover", DocumentKind::kReport,
             {{"success", res.success},
              {"clique", res.clique},
              {"matches_planted", exact},
              {"subsets_tried", res.subsets_tried},
              {"subset_size", res.subset_size}},
             res.success ? "recovered a clique of size " + std::to_string(res.clique.size()) : "no clique found",
             run.seed());
  });
}

void add_routing_commands(CLI::App& app, Runner& run) {
  auto* routing = app.add_subcommand("routing", "Bayesian selfish routing");
  routing->require_subcommand(1);
  struct Args {
    std::string instance, posterior, removed, scheme;
  };
  auto a = std::make_shared<Args>();
  auto load_inst = [a] { return routing_from_json(body_of(a->instance, DocumentKind::kRouting)); };
  auto network_at = [a](const RoutingInstance& inst) {
    const auto mu = a->posterior.empty() ? inst.prior : parse_list(a->posterior, "--posterior");
    return mix_latencies(inst, mu);
  };
  auto flow_json = [](const Flow& f) {
    return Json{{"edge_flows", f.edge},
                {"total_latency", f.total_latency},
                {"wardrop_residual", f.wardrop_residual},
                {"iterations", f.iterations}};
  };

  for (const char* kind : {"nash", "opt"}) {
    auto* cmd = routing->add_subcommand(kind, std::string(kind) == "nash" ? "Wardrop flow" : "Optimal flow");
    cmd->add_option("--instance", a->instance)->required();
    cmd->add_option("--posterior", a->posterior, "defaults to the prior");
    cmd->callback([a, load_inst, network_at, flow_json, &run, name = std::string(kind)] {
      const auto inst = load_inst();
      FlowOptions opts;
      opts.tol = run.tol();
      const auto net = network_at(inst);
      const Flow f = name == "nash" ? nash_flow(net, inst.commodities, opts) : optimal_flow(net, inst.commodities, opts);
      run.emit("routing " + name, DocumentKind::kReport, flow_json(f), "total latency " + fmt(f.total_latency));
    });
  }

  auto* poa = routing->add_subcommand("poa", "Price of anarchy");
  poa->add_option("--instance", a->instance)->required();
  poa->add_option("--posterior", a->posterior, "defaults to the prior");
  poa->callback([a, load_inst, network_at, &run] {
    const auto inst = load_inst();
    const auto net = network_at(inst);
    FlowOptions opts;
    opts.tol = run.tol();
    const double nash = nash_flow(net, inst.commodities, opts).total_latency;
    const double opt = optimal_flow(net, inst.commodities, opts).total_latency;
    if (!(opt > 0.0)) throw ContractViolation("price of anarchy undefined: optimal latency is zero");
    run.emit("routing poa", DocumentKind::kReport,
             {{"price_of_anarchy", nash / opt}, {"nash_latency", nash}, {"optimal_latency", opt}},
             "price of anarchy " + fmt(nash / opt));
  });

  auto* reveal = routing->add_subcommand("reveal", "Full-revelation scheme");
  reveal->add_option("--instance", a->instance)->required();
  reveal->callback([load_inst, &run] {
    const auto res = full_revelation_routing(load_inst(), run.tol());
    run.emit("routing reveal", DocumentKind::kReport, {{"scheme", to_json(res.scheme)}, {"value", res.value}},
             "expected latency " + fmt(res.value));
  });

  auto base_of = [](const RoutingInstance& inst) {
    if (inst.num_states() != 1 || inst.commodities.size() != 1)
      throw ContractViolation("the tolls gadget needs a single-state, single-commodity instance");
    return std::pair{inst.state_network(0), inst.commodities[0]};
  };

  auto* gad = routing->add_subcommand("gadget", "Bayesian routing game encoding edge removals");
  gad->add_option("--instance", a->instance, "single-state base instance")->required();
  gad->add_option("--removed", a->removed, "comma-separated edges with infinite toll");
  gad->callback([a, load_inst, base_of, &run] {
    const auto [net, commodity] = base_of(load_inst());
    const auto g = tolls_gadget(net, commodity, parse_indices(a->removed, "--removed"));
    run.emit("routing gadget", DocumentKind::kReport,
             {{"routing", to_json(g.instance)},
              {"removed", g.removed},
              {"nash_latency", g.nash_latency},
              {"tolled_latency", g.tolled_latency},
              {"demand_scale", g.demand_scale},
              {"m", g.m}},
             "L = " + fmt(g.nash_latency) + ", L* = " + fmt(g.tolled_latency));
  });

  auto* tolls = routing->add_subcommand("tolls", "Scheme <-> tolls round trip through the gadget");
  tolls->add_option("--instance", a->instance, "single-state base instance")->required();
  tolls->add_option("--removed", a->removed, "comma-separated edges with infinite toll");
  tolls->add_option("--scheme", a->scheme, "scheme on the gadget (default: the one built from --removed)");
  tolls->callback([a, load_inst, base_of, &run] {
    const auto [net, commodity] = base_of(load_inst());
    const auto g = tolls_gadget(net, commodity, parse_indices(a->removed, "--removed"));
    const auto scheme =
        a->scheme.empty() ? scheme_from_tolls(g) : scheme_from_json(body_of(a->scheme, DocumentKind::kScheme));
    const auto res = tolls_from_scheme(g, scheme, run.tol());
    const double bound = res.scheme_latency / (1.0 - 4.0 / static_cast<double>(g.m));
    run.emit("routing tolls", DocumentKind::kReport,
             {{"scheme", to_json(scheme)},
              {"scheme_latency", res.scheme_latency},
              {"tolls", res.tolls},
              {"copy", res.copy},
              {"nash_cost", res.nash_cost},
              {"bound", bound},
              {"within_bound", res.nash_cost <= bound + 1e-4}},
             "scheme latency " + fmt(res.scheme_latency) + ", tolled Nash cost " + fmt(res.nash_cost));
  });
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Signaling schemes for Bayesian zero-sum and routing games", "signalkit"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "master seed");
  app.add_option("--out", g.out_path, "write the JSON report here instead of stdout");
  app.add_option("--tol", g.tol, "solver tolerance")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"json"}));

  Runner run(g, out, err);
  add_game_commands(app, run);
  add_signal_commands(app, run);
  add_esg_commands(app, run);
  add_gadget_commands(app, run);
  add_pclique_commands(app, run);
  add_routing_commands(app, run);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "invalid document: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace signalkit

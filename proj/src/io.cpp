#include "signalkit/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>

namespace signalkit {

namespace {

std::string child(const std::string& at, std::string_view key) {
  std::string out = at + "/";
  for (char ch : key) {
    if (ch == '~')
      out += "~0";
    else if (ch == '/')
      out += "~1";
    else
      out += ch;
  }
  return out;
}

std::string child(const std::string& at, std::size_t index) { return at + "/" + std::to_string(index); }

void expect_object(const Json& j, const std::string& at, std::initializer_list<std::string_view> required,
                   std::initializer_list<std::string_view> optional = {}) {
  if (!j.is_object()) throw ParseError(at, "expected an object");
  for (auto key : required)
    if (!j.contains(std::string(key))) throw ParseError(child(at, key), "missing required field");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                       std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) throw ParseError(child(at, key), "unknown field");
  }
}

const Json& expect_array(const Json& j, const std::string& at) {
  if (!j.is_array()) throw ParseError(at, "expected an array");
  return j;
}

double number(const Json& j, const std::string& at) {
  if (!j.is_number()) throw ParseError(at, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(at, "number is not finite");
  return v;
}

std::size_t index(const Json& j, const std::string& at) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::size_t>(j.get<std::int64_t>());
  throw ParseError(at, "expected a nonnegative integer");
}

std::vector<double> vector_of(const Json& j, const std::string& at) {
  expect_array(j, at);
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], child(at, i)));
  return out;
}

std::vector<std::size_t> indices_of(const Json& j, const std::string& at) {
  expect_array(j, at);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(index(j[i], child(at, i)));
  return out;
}

std::vector<Edge> edges_of(const Json& j, const std::string& at) {
  expect_array(j, at);
  std::vector<Edge> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto pair = indices_of(j[i], child(at, i));
    if (pair.size() != 2) throw ParseError(child(at, i), "an edge has exactly two endpoints");
    out.emplace_back(pair[0], pair[1]);
  }
  return out;
}

Json edges_to_json(const std::vector<Edge>& edges) {
  Json out = Json::array();
  for (const auto& [u, v] : edges) out.push_back({u, v});
  return out;
}

// Runs a library validator and re-raises its complaint at `at`.
template <class F>
void validated(const std::string& at, F&& check) {
  try {
    check();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(at, e.what());
  }
}

void write_number(std::string& out, const Json& j) {
  if (j.is_number_unsigned()) {
    out += std::to_string(j.get<std::uint64_t>());
  } else if (j.is_number_integer()) {
    out += std::to_string(j.get<std::int64_t>());
  } else {
    double v = j.get<double>();
    if (!std::isfinite(v)) throw ContractViolation("cannot serialize a non-finite number");
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  }
}

bool is_scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

void write(std::string& out, const Json& j, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth + 1), ' ');
  const std::string close(2 * static_cast<std::size_t>(depth), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad + Json(key).dump() + ": ";
      write(out, value, depth + 1);
    }
    out += "\n" + close + "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    if (std::all_of(j.begin(), j.end(), is_scalar)) {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ", ";
        write(out, j[i], depth + 1);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out += ",\n";
      out += pad;
      write(out, j[i], depth + 1);
    }
    out += "\n" + close + "]";
  } else if (j.is_number()) {
    write_number(out, j);
  } else {
    out += j.dump();
  }
}

DocumentKind kind_from(const Json& j, const std::string& at) {
  if (!j.is_string()) throw ParseError(at, "expected a string");
  const auto s = j.get<std::string>();
  for (auto k : {DocumentKind::kGame, DocumentKind::kEsg, DocumentKind::kRouting, DocumentKind::kGraph,
                 DocumentKind::kScheme, DocumentKind::kReport})
    if (s == to_string(k)) return k;
  throw ParseError(at, "unknown document kind '" + s + "'");
}

}  // namespace

std::string_view to_string(DocumentKind kind) {
  switch (kind) {
    case DocumentKind::kGame: return "game";
    case DocumentKind::kEsg: return "esg";
    case DocumentKind::kRouting: return "routing";
    case DocumentKind::kGraph: return "graph";
    case DocumentKind::kScheme: return "scheme";
    case DocumentKind::kReport: return "report";
  }
  return "report";
}

InstanceEnvelope parse_instance(std::string_view bytes) {
  Json doc;
  try {
    doc = Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  } catch (const Json::out_of_range& e) {
    throw ParseError("", std::string("number is not finite: ") + e.what());
  }
  expect_object(doc, "", {"format_version", "kind", "body"}, {"seed", "provenance"});
  InstanceEnvelope env;
  if (!doc["format_version"].is_string()) throw ParseError("/format_version", "expected a string");
  env.format_version = doc["format_version"].get<std::string>();
  if (env.format_version != kFormatVersion)
    throw ParseError("/format_version", "unsupported version '" + env.format_version + "' (expected " +
                                            std::string(kFormatVersion) + ")");
  env.kind = kind_from(doc["kind"], "/kind");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() >= 0))
      throw ParseError("/seed", "expected an unsigned 64-bit integer");
    env.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("provenance")) {
    if (!doc["provenance"].is_string()) throw ParseError("/provenance", "expected a string");
    env.provenance = doc["provenance"].get<std::string>();
  }
  env.body = doc["body"];
  switch (env.kind) {
    case DocumentKind::kGame: game_from_json(env.body); break;
    case DocumentKind::kEsg: esg_from_json(env.body); break;
    case DocumentKind::kRouting: routing_from_json(env.body); break;
    case DocumentKind::kGraph: graph_from_json(env.body); break;
    case DocumentKind::kScheme: scheme_from_json(env.body); break;
    case DocumentKind::kReport:
      if (!env.body.is_object()) throw ParseError("/body", "expected an object");
      break;
  }
  return env;
}

std::string canonical_json(const Json& value) {
  std::string out;
  write(out, value, 0);
  out += "\n";
  return out;
}

std::string serialize(const InstanceEnvelope& env) {
  Json doc = Json::object();
  doc["format_version"] = env.format_version;
  doc["kind"] = std::string(to_string(env.kind));
  doc["body"] = env.body;
  if (env.seed) doc["seed"] = *env.seed;
  if (!env.provenance.empty()) doc["provenance"] = env.provenance;
  return canonical_json(doc);
}

InstanceEnvelope make_envelope(DocumentKind kind, Json body, std::optional<std::uint64_t> seed, std::string provenance) {
  InstanceEnvelope env;
  env.kind = kind;
  env.body = std::move(body);
  env.seed = seed;
  env.provenance = std::move(provenance);
  return env;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Matrix matrix_from_json(const Json& value, const std::string& at) {
  expect_array(value, at);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < value.size(); ++i) {
    rows.push_back(vector_of(value[i], child(at, i)));
    if (rows.back().size() != rows.front().size()) throw ParseError(child(at, i), "ragged matrix row");
  }
  if (rows.empty() || rows.front().empty()) throw ParseError(at, "matrix must be non-empty");
  return Matrix::from_rows(rows);
}

Json to_json(const BayesianGame& game) {
  Json payoffs = Json::array();
  for (const auto& a : game.payoffs) payoffs.push_back(to_json(a));
  return {{"payoffs", payoffs}, {"prior", game.prior}, {"payoff_bound", game.payoff_bound}};
}

BayesianGame game_from_json(const Json& body, const std::string& at) {
  expect_object(body, at, {"payoffs", "prior"}, {"payoff_bound"});
  BayesianGame game;
  const auto& p = expect_array(body["payoffs"], child(at, "payoffs"));
  for (std::size_t t = 0; t < p.size(); ++t) game.payoffs.push_back(matrix_from_json(p[t], child(child(at, "payoffs"), t)));
  game.prior = vector_of(body["prior"], child(at, "prior"));
  if (body.contains("payoff_bound")) {
    game.payoff_bound = number(body["payoff_bound"], child(at, "payoff_bound"));
  } else {
    game.payoff_bound = 0.0;
    for (const auto& a : game.payoffs) game.payoff_bound = std::max(game.payoff_bound, max_abs_entry(a));
  }
  validated(at, [&] { game.validate(); });
  return game;
}

Json to_json(const ExtendedSecurityGame& esg) {
  return {{"abar", to_json(esg.abar)},
          {"b", to_json(esg.b)},
          {"d", to_json(esg.d)},
          {"prior", esg.prior},
          {"payoff_bound", esg.payoff_bound}};
}

ExtendedSecurityGame esg_from_json(const Json& body, const std::string& at) {
  expect_object(body, at, {"abar", "b", "d", "prior"}, {"payoff_bound"});
  ExtendedSecurityGame esg;
  esg.abar = matrix_from_json(body["abar"], child(at, "abar"));
  esg.b = matrix_from_json(body["b"], child(at, "b"));
  esg.d = matrix_from_json(body["d"], child(at, "d"));
  esg.prior = vector_of(body["prior"], child(at, "prior"));
  validated(at, [&] {
    esg.payoff_bound = body.contains("payoff_bound") ? number(body["payoff_bound"], child(at, "payoff_bound"))
                                                     : esg.max_abs_payoff();
    esg.validate();
  });
  return esg;
}

Json to_json(const RoutingInstance& inst) {
  Json edges = Json::array();
  for (std::size_t e = 0; e < inst.num_edges(); ++e) {
    Json lat = Json::array();
    for (std::size_t t = 0; t < inst.num_states(); ++t) lat.push_back({inst.latency[t][e].a, inst.latency[t][e].b});
    edges.push_back({{"from", inst.arcs[e].from}, {"to", inst.arcs[e].to}, {"latency", lat}});
  }
  Json commodities = Json::array();
  for (const auto& c : inst.commodities)
    commodities.push_back({{"source", c.source}, {"sink", c.sink}, {"demand", c.demand}});
  return {{"nodes", inst.num_nodes}, {"edges", edges}, {"commodities", commodities}, {"prior", inst.prior}};
}

RoutingInstance routing_from_json(const Json& body, const std::string& at) {
  expect_object(body, at, {"nodes", "edges", "commodities", "prior"});
  RoutingInstance inst;
  inst.num_nodes = index(body["nodes"], child(at, "nodes"));
  inst.prior = vector_of(body["prior"], child(at, "prior"));
  inst.latency.assign(inst.prior.size(), {});
  const std::string eat = child(at, "edges");
  const auto& edges = expect_array(body["edges"], eat);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::string here = child(eat, e);
    expect_object(edges[e], here, {"from", "to", "latency"});
    inst.arcs.push_back({index(edges[e]["from"], child(here, "from")), index(edges[e]["to"], child(here, "to"))});
    const std::string lat_at = child(here, "latency");
    const auto& lat = expect_array(edges[e]["latency"], lat_at);
    if (lat.size() != inst.prior.size()) throw ParseError(lat_at, "need one (a, b) pair per state");
    for (std::size_t t = 0; t < lat.size(); ++t) {
      const auto ab = vector_of(lat[t], child(lat_at, t));
      if (ab.size() != 2) throw ParseError(child(lat_at, t), "latency is a pair [a, b]");
      inst.latency[t].push_back({ab[0], ab[1]});
    }
  }
  const std::string cat = child(at, "commodities");
  const auto& cs = expect_array(body["commodities"], cat);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string here = child(cat, i);
    expect_object(cs[i], here, {"source", "sink", "demand"});
    inst.commodities.push_back({index(cs[i]["source"], child(here, "source")),
                                index(cs[i]["sink"], child(here, "sink")),
                                number(cs[i]["demand"], child(here, "demand"))});
  }
  validated(at, [&] { inst.validate(); });
  return inst;
}

Json to_json(const Graph& graph) {
  return {{"num_vertices", graph.num_vertices()}, {"edges", edges_to_json(graph.edges())}};
}

Json to_json(const PlantedGraph& pg) {
  Json out = to_json(pg.graph);
  Json sets = Json::array();
  for (const auto& s : pg.planted_sets) sets.push_back(s);
  std::vector<Edge> clique = pg.clique_edges;
  std::sort(clique.begin(), clique.end());
  out["planted"] = {{"sets", sets}, {"clique_edges", edges_to_json(clique)}, {"p", pg.p}, {"k", pg.k},
                    {"seed", pg.seed}};
  return out;
}

PlantedGraph graph_from_json(const Json& body, const std::string& at) {
  expect_object(body, at, {"num_vertices", "edges"}, {"planted"});
  PlantedGraph pg;
  const std::size_t n = index(body["num_vertices"], child(at, "num_vertices"));
  const auto edges = edges_of(body["edges"], child(at, "edges"));
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i - 1] < edges[i])) throw ParseError(child(child(at, "edges"), i), "edge list must be sorted and distinct");
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].first >= edges[i].second || edges[i].second >= n)
      throw ParseError(child(child(at, "edges"), i), "edges are (u, v) with u < v < num_vertices");
  pg.graph = Graph::from_edges(n, edges);
  if (body.contains("planted")) {
    const std::string pat = child(at, "planted");
    const Json& p = body["planted"];
    expect_object(p, pat, {"sets", "clique_edges", "p", "k"}, {"seed"});
    const auto& sets = expect_array(p["sets"], child(pat, "sets"));
    for (std::size_t i = 0; i < sets.size(); ++i) {
      auto s = indices_of(sets[i], child(child(pat, "sets"), i));
      for (auto v : s)
        if (v >= n) throw ParseError(child(child(pat, "sets"), i), "vertex out of range");
      std::sort(s.begin(), s.end());
      pg.planted_sets.push_back(std::move(s));
    }
    pg.clique_edges = edges_of(p["clique_edges"], child(pat, "clique_edges"));
    for (std::size_t i = 0; i < pg.clique_edges.size(); ++i) {
      const auto& [u, v] = pg.clique_edges[i];
      if (u >= n || v >= n || !pg.graph.has_edge(u, v))
        throw ParseError(child(child(pat, "clique_edges"), i), "clique edge is not an edge of the graph");
    }
    pg.p = number(p["p"], child(pat, "p"));
    pg.k = index(p["k"], child(pat, "k"));
    if (p.contains("seed")) pg.seed = index(p["seed"], child(pat, "seed"));
  }
  std::vector<Edge> clique = pg.clique_edges;
  std::sort(clique.begin(), clique.end());
  for (const auto& e : edges)
    if (!std::binary_search(clique.begin(), clique.end(), e)) pg.background_edges.push_back(e);
  return pg;
}

Json to_json(const SignalingScheme& scheme) {
  Json signals = Json::array();
  for (const auto& s : scheme.signals) signals.push_back({{"weight", s.weight}, {"posterior", s.posterior}});
  return {{"signals", signals}};
}

SignalingScheme scheme_from_json(const Json& body, const std::string& at) {
  expect_object(body, at, {"signals"});
  SignalingScheme scheme;
  const std::string sat = child(at, "signals");
  const auto& signals = expect_array(body["signals"], sat);
  for (std::size_t i = 0; i < signals.size(); ++i) {
    const std::string here = child(sat, i);
    expect_object(signals[i], here, {"weight", "posterior"});
    Signal s;
    s.weight = number(signals[i]["weight"], child(here, "weight"));
    s.posterior = vector_of(signals[i]["posterior"], child(here, "posterior"));
    if (s.weight < 0.0) throw ParseError(child(here, "weight"), "weight must be nonnegative");
    if (!scheme.signals.empty() && s.posterior.size() != scheme.signals.front().posterior.size())
      throw ParseError(child(here, "posterior"), "posterior length differs from the first signal");
    scheme.signals.push_back(std::move(s));
  }
  return scheme;
}

}  // namespace signalkit

#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "signalkit/cli.hpp"
#include "signalkit/io.hpp"

using namespace signalkit;

namespace {

std::string pointer_of(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const ParseError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

int run(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = run_command(args, o, e);
  if (out) *out = o.str();
  return code;
}

}  // namespace

TEST_CASE("io: game round trip is bit exact") {
  std::mt19937_64 gen(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BayesianGame g;
  for (int t = 0; t < 2; ++t) {
    Matrix a(2, 3);
    for (auto& v : a.data()) v = u(gen);
    g.payoffs.push_back(a);
  }
  g.prior = {1.0 / 3.0, 2.0 / 3.0};
  g.payoff_bound = 1.0;
  const auto text = serialize(make_envelope(DocumentKind::kGame, to_json(g), 42, "random"));
  const auto env = parse_instance(text);
  CHECK(env.kind == DocumentKind::kGame);
  CHECK(env.seed == 42u);
  const auto back = game_from_json(env.body);
  CHECK(back.payoffs == g.payoffs);
  CHECK(back.prior == g.prior);
  CHECK(serialize(env) == text);
}

TEST_CASE("io: other kinds round trip") {
  std::mt19937_64 gen(67);
  const auto esg = fixtures::random_esg(gen, 3, 2, 4);
  const auto e2 = esg_from_json(parse_instance(serialize(make_envelope(DocumentKind::kEsg, to_json(esg)))).body);
  CHECK(e2.abar == esg.abar);
  CHECK(e2.b == esg.b);
  CHECK(e2.d == esg.d);
  CHECK(e2.prior == esg.prior);

  const auto inst = fixtures::random_routing(gen, 5, 2);
  const auto r2 = routing_from_json(parse_instance(serialize(make_envelope(DocumentKind::kRouting, to_json(inst)))).body);
  CHECK(r2.arcs.size() == inst.arcs.size());
  CHECK(r2.latency == inst.latency);
  CHECK(r2.prior == inst.prior);

  const auto pg = gen_pcover(30, 0.5, 6, 2, 4);
  const auto p2 = graph_from_json(parse_instance(serialize(make_envelope(DocumentKind::kGraph, to_json(pg)))).body);
  CHECK(p2.graph == pg.graph);
  CHECK(p2.planted_sets == pg.planted_sets);

  const SignalingScheme s{{{0.25, {1.0, 0.0}}, {0.75, {1.0 / 3.0, 2.0 / 3.0}}}};
  const auto s2 = scheme_from_json(parse_instance(serialize(make_envelope(DocumentKind::kScheme, to_json(s)))).body);
  REQUIRE(s2.signals.size() == 2);
  CHECK(s2.signals[1].posterior == s.signals[1].posterior);
  CHECK(s2.signals[1].weight == s.signals[1].weight);
}

TEST_CASE("io: canonical form") {
  const Json j = {{"b", {1, 2}}, {"a", -0.0}, {"c", 0.1}};
  CHECK(canonical_json(j) == "{\n  \"a\": 0,\n  \"b\": [1, 2],\n  \"c\": 0.10000000000000001\n}\n");
}

TEST_CASE("io: rejections carry a JSON pointer") {
  const std::string head = R"({"format_version": "1.0", "kind": "game", "body": )";
  const std::string good_body = R"({"payoffs": [[[1, 0]], [[0, 1]]], "prior": [0.5, 0.5]})";
  CHECK_NOTHROW(parse_instance(head + good_body + "}"));
  CHECK(pointer_of(head + R"({"payoffs": [[[1, 0]], [[0, 1]]], "prior": [0.5, 0.5], "foo": 1}})") == "/body/foo");
  CHECK(pointer_of(head + good_body + R"(, "foo": 1})") == "/foo");
  CHECK(pointer_of(head + R"({"payoffs": [[[1, 0]], [[0, 1]]]}})") == "/body/prior");
  CHECK(pointer_of(head + R"({"payoffs": [[[1, 0]], [[0, "x"]]], "prior": [0.5, 0.5]}})") == "/body/payoffs/1/0/1");
  // The JSON reader itself refuses overflowing literals, before any pointer exists.
  CHECK_THROWS_WITH_AS(parse_instance(head + R"({"payoffs": [[[1, 0]], [[0, 1e999]]], "prior": [0.5, 0.5]}})"),
                       doctest::Contains("not finite"), ParseError);
  CHECK(pointer_of(R"({"format_version": "2.0", "kind": "game", "body": )" + good_body + "}") == "/format_version");
  CHECK(pointer_of(R"({"format_version": "1.0", "kind": "pony", "body": {}})") == "/kind");
  CHECK(pointer_of("{not json") == "");
}

TEST_CASE("cli: exit codes") {
  CHECK(run({}) == 2);
  CHECK(run({"value"}) == 2);
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({"value", "--game", "/nonexistent/game.json", "--posterior", "1"}) == 1);
  CHECK(run({"--help"}) == 0);
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "signalkit/cli.hpp"
#include "signalkit/errors.hpp"
#include "signalkit/io.hpp"
#include "signalkit/routing.hpp"
#include "signalkit/signaling.hpp"
#include "signalkit/zerosum.hpp"

namespace py = pybind11;
using namespace signalkit;

namespace {

using Rows = std::vector<std::vector<double>>;

BayesianGame make_game(const std::vector<Rows>& payoffs, std::vector<double> prior, double bound) {
  BayesianGame g;
  for (const auto& a : payoffs) g.payoffs.push_back(Matrix::from_rows(a));
  g.prior = std::move(prior);
  g.payoff_bound = bound;
  g.validate();
  return g;
}

py::dict equilibrium_dict(const Equilibrium& eq) {
  py::dict d;
  d["value"] = eq.value;
  d["row_strategy"] = eq.row_strategy;
  d["col_strategy"] = eq.col_strategy;
  return d;
}

py::list scheme_list(const SignalingScheme& s) {
  py::list out;
  for (const auto& sig : s.signals) out.append(py::make_tuple(sig.weight, sig.posterior));
  return out;
}

LatencyNetwork make_network(std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& arcs,
                            const std::vector<std::pair<double, double>>& latency) {
  LatencyNetwork net;
  net.num_nodes = nodes;
  for (auto [u, v] : arcs) net.arcs.push_back({u, v});
  for (auto [a, b] : latency) net.latency.push_back({a, b});
  net.validate();
  return net;
}

py::dict flow_dict(const Flow& f) {
  py::dict d;
  d["edge"] = f.edge;
  d["total_latency"] = f.total_latency;
  d["wardrop_residual"] = f.wardrop_residual;
  d["iterations"] = f.iterations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the signalkit C++ library";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<DimensionError>(m, "DimensionError", error);
  py::register_exception<ContractViolation>(m, "ContractViolation", error);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", error);
  py::register_exception<InvalidScheme>(m, "InvalidScheme", error);
  py::register_exception<CapExceeded>(m, "CapExceeded", error);
  py::register_exception<ParseError>(m, "ParseError", error);

  m.def(
      "game_value", [](const Rows& a) { return equilibrium_dict(game_value(Matrix::from_rows(a))); }, py::arg("matrix"),
      "Value and optimal strategies of a zero-sum matrix game (row player maximizes).");

  m.def(
      "val",
      [](const std::vector<Rows>& payoffs, const std::vector<double>& posterior) {
        std::vector<double> prior(payoffs.size(), payoffs.empty() ? 0.0 : 1.0 / payoffs.size());
        return val(make_game(payoffs, prior, 1.0), posterior);
      },
      py::arg("payoffs"), py::arg("posterior"));

  m.def(
      "optimal_signaling",
      [](const std::vector<Rows>& payoffs, const std::vector<double>& prior, double delta, double payoff_bound) {
        const auto res = optimal_signaling_dnet(make_game(payoffs, prior, payoff_bound), delta);
        return py::make_tuple(res.value, scheme_list(res.scheme));
      },
      py::arg("payoffs"), py::arg("prior"), py::arg("delta"), py::arg("payoff_bound") = 1.0,
      "Best scheme supported on the delta-net; returns (value, [(weight, posterior), ...]).");

  m.def(
      "nash_flow",
      [](std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& arcs,
         const std::vector<std::pair<double, double>>& latency, std::size_t source, std::size_t sink, double demand) {
        const std::vector<Commodity> c{{source, sink, demand}};
        return flow_dict(nash_flow(make_network(nodes, arcs, latency), c));
      },
      py::arg("nodes"), py::arg("arcs"), py::arg("latency"), py::arg("source"), py::arg("sink"),
      py::arg("demand") = 1.0);

  m.def(
      "optimal_flow",
      [](std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& arcs,
         const std::vector<std::pair<double, double>>& latency, std::size_t source, std::size_t sink, double demand) {
        const std::vector<Commodity> c{{source, sink, demand}};
        return flow_dict(optimal_flow(make_network(nodes, arcs, latency), c));
      },
      py::arg("nodes"), py::arg("arcs"), py::arg("latency"), py::arg("source"), py::arg("sink"),
      py::arg("demand") = 1.0);

  m.def(
      "canonicalize", [](const std::string& text) { return serialize(parse_instance(text)); }, py::arg("text"),
      "Parse an instance document and return its canonical serialization.");

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_command(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a CLI command in process; returns (exit_code, stdout, stderr).");
}

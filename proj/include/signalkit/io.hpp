#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "signalkit/errors.hpp"
#include "signalkit/graph.hpp"
#include "signalkit/planted_clique.hpp"
#include "signalkit/routing.hpp"
#include "signalkit/security.hpp"
#include "signalkit/zerosum.hpp"

namespace signalkit {

using Json = nlohmann::json;

inline constexpr std::string_view kFormatVersion = "1.0";

// Schema violation; `pointer` is the JSON pointer of the offending value.
class ParseError : public Error {
 public:
  ParseError(std::string pointer, std::string detail, const std::string& context = {})
      : Error((context.empty() ? "" : context + ": ") + (pointer.empty() ? detail : pointer + ": " + detail)),
        pointer_(std::move(pointer)),
        detail_(std::move(detail)) {}
  const std::string& pointer() const { return pointer_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string pointer_;
  std::string detail_;
};

enum class DocumentKind { kGame, kEsg, kRouting, kGraph, kScheme, kReport };

std::string_view to_string(DocumentKind kind);

struct InstanceEnvelope {
  std::string format_version{kFormatVersion};
  DocumentKind kind = DocumentKind::kReport;
  Json body = Json::object();
  std::optional<std::uint64_t> seed;
  std::string provenance;
};

// Parses and validates the envelope and the body schema of its kind.
InstanceEnvelope parse_instance(std::string_view bytes);

// Canonical form: sorted keys, two-space indent, 17 significant digits, trailing newline.
std::string serialize(const InstanceEnvelope& envelope);
std::string canonical_json(const Json& value);

// Body codecs. from_* functions throw ParseError with pointers relative to `at`.
Json to_json(const BayesianGame& game);
Json to_json(const ExtendedSecurityGame& esg);
Json to_json(const RoutingInstance& inst);
Json to_json(const PlantedGraph& graph);
Json to_json(const Graph& graph);
Json to_json(const SignalingScheme& scheme);
Json to_json(const Matrix& m);

BayesianGame game_from_json(const Json& body, const std::string& at = "/body");
ExtendedSecurityGame esg_from_json(const Json& body, const std::string& at = "/body");
RoutingInstance routing_from_json(const Json& body, const std::string& at = "/body");
PlantedGraph graph_from_json(const Json& body, const std::string& at = "/body");
SignalingScheme scheme_from_json(const Json& body, const std::string& at = "/body");
Matrix matrix_from_json(const Json& value, const std::string& at);

InstanceEnvelope make_envelope(DocumentKind kind, Json body, std::optional<std::uint64_t> seed = std::nullopt,
                               std::string provenance = {});

}  // namespace signalkit

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "speedscale/instance.hpp"

namespace speedscale {

using Json = nlohmann::ordered_json;
using AnyInstance = std::variant<Instance, HeterogeneousInstance>;

/// Integers become JSON numbers, other values "p/q" strings.
Json rational_to_json(const Rational& value);
/// Accepts numbers (decimal doubles are recovered exactly when they have a short rational form) and "p/q" strings.
Rational rational_from_json(const Json& value, const std::string& path);

/// Parses the instance document. A document is heterogeneous when `processors`
/// is an array or any job carries `work_per_processor`.
AnyInstance parse_instance(std::string_view text);
Instance parse_identical_instance(std::string_view text);

Json instance_to_json(const Instance& instance);
Json instance_to_json(const HeterogeneousInstance& instance);
Json instance_to_json(const AnyInstance& instance);
std::string serialize_instance(const AnyInstance& instance);

/// Schedule document; `energy` is omitted when not given.
Json schedule_to_json(const Schedule& schedule, std::optional<double> energy = std::nullopt);
Schedule schedule_from_json(const Json& doc);
Schedule parse_schedule(std::string_view text);

/// Parses text as JSON, mapping syntax errors to ParseError.
Json parse_json(std::string_view text);

}  // namespace speedscale

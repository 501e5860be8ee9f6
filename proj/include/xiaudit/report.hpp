#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace xiaudit {

enum class Verdict {
  pass,
  fail,
  consistent_up_to_constant,
  coincide,
  distinct,
  inconclusive,
  not_applicable,
};

std::string_view to_string(Verdict verdict);
/// Throws std::invalid_argument for unknown names.
Verdict verdict_from_string(std::string_view name);

/// FAIL and DISTINCT make a run exit non-zero; everything else does not.
bool is_failure(Verdict verdict);

using ParamValue = std::variant<bool, std::int64_t, double, std::string>;

/// One named check: its inputs, what was measured, what it was compared
/// against, and the verdict of the comparing module's rule.
struct AuditReport {
  std::string name;
  std::map<std::string, ParamValue> params;
  std::vector<double> measured;
  std::vector<double> reference;
  double ratio_or_residual = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::string provenance;

  friend bool operator==(const AuditReport&, const AuditReport&) = default;
};

nlohmann::json to_json(const AuditReport& report);
/// Throws nlohmann::json::exception or std::invalid_argument on malformed input.
AuditReport report_from_json(const nlohmann::json& j);

/// Pretty-printed JSON with sorted keys and a trailing newline.
std::string serialize(const nlohmann::json& j);

}  // namespace xiaudit

#include "xiaudit/report.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace xiaudit {
namespace {

constexpr std::array<std::pair<Verdict, std::string_view>, 7> kVerdictNames = {{
    {Verdict::pass, "PASS"},
    {Verdict::fail, "FAIL"},
    {Verdict::consistent_up_to_constant, "CONSISTENT_UP_TO_CONSTANT"},
    {Verdict::coincide, "COINCIDE"},
    {Verdict::distinct, "DISTINCT"},
    {Verdict::inconclusive, "INCONCLUSIVE"},
    {Verdict::not_applicable, "NOT_APPLICABLE"},
}};

// JSON has no NaN/Inf; they travel as strings so reports stay lossless.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double read_number(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw std::invalid_argument("report: expected a number, got '" + s + "'");
}

nlohmann::json numbers(const std::vector<double>& values) {
  auto arr = nlohmann::json::array();
  for (double v : values) arr.push_back(number(v));
  return arr;
}

std::vector<double> read_numbers(const nlohmann::json& j) {
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(read_number(v));
  return out;
}

}  // namespace

std::string_view to_string(Verdict verdict) {
  for (const auto& [v, name] : kVerdictNames) {
    if (v == verdict) return name;
  }
  return "INCONCLUSIVE";
}

Verdict verdict_from_string(std::string_view name) {
  for (const auto& [v, n] : kVerdictNames) {
    if (n == name) return v;
  }
  throw std::invalid_argument("unknown verdict '" + std::string(name) + "'");
}

bool is_failure(Verdict verdict) { return verdict == Verdict::fail || verdict == Verdict::distinct; }

nlohmann::json to_json(const AuditReport& report) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [key, value] : report.params) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            params[key] = number(v);
          } else {
            params[key] = v;
          }
        },
        value);
  }
  return nlohmann::json{
      {"name", report.name},
      {"params", params},
      {"measured", numbers(report.measured)},
      {"reference", numbers(report.reference)},
      {"ratio_or_residual", number(report.ratio_or_residual)},
      {"tolerance", number(report.tolerance)},
      {"verdict", std::string(to_string(report.verdict))},
      {"provenance", report.provenance},
  };
}

AuditReport report_from_json(const nlohmann::json& j) {
  static const std::array<std::string_view, 8> kKeys = {
      "name", "params", "measured", "reference", "ratio_or_residual", "tolerance", "verdict",
      "provenance"};
  if (!j.is_object() || j.size() != kKeys.size()) {
    throw std::invalid_argument("report: expected an object with exactly the AuditReport fields");
  }
  for (auto key : kKeys) {
    if (!j.contains(std::string(key))) {
      throw std::invalid_argument("report: missing field '" + std::string(key) + "'");
    }
  }
  AuditReport r;
  r.name = j.at("name").get<std::string>();
  for (const auto& [key, value] : j.at("params").items()) {
    if (value.is_boolean()) {
      r.params[key] = value.get<bool>();
    } else if (value.is_number_integer()) {
      r.params[key] = value.get<std::int64_t>();
    } else if (value.is_number_float()) {
      r.params[key] = value.get<double>();
    } else if (value.is_string()) {
      r.params[key] = value.get<std::string>();
    } else {
      throw std::invalid_argument("report: unsupported parameter type for '" + key + "'");
    }
  }
  r.measured = read_numbers(j.at("measured"));
  r.reference = read_numbers(j.at("reference"));
  r.ratio_or_residual = read_number(j.at("ratio_or_residual"));
  r.tolerance = read_number(j.at("tolerance"));
  r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  r.provenance = j.at("provenance").get<std::string>();
  return r;
}

std::string serialize(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace xiaudit

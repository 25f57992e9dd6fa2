#include "crycheck/report.hpp"

#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace crycheck {

namespace {

using json = nlohmann::json;

constexpr std::string_view kReportSchema = "report/1";
constexpr std::string_view kAggregateSchema = "aggregate/1";

std::string dump(const json& j) { return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n"; }

[[noreturn]] void malformed(const std::string& what) {
  throw ReportError(ReportError::Kind::Malformed, "malformed report: " + what);
}

const std::vector<std::string>& rule_summaries() {
  static const std::vector<std::string> summaries = [] {
    std::vector<std::string> out;
    const auto rs = default_ruleset();
    for (const auto& spec : rs.rules()) out.push_back(spec.summary);
    return out;
  }();
  return summaries;
}

}  // namespace

std::string display_value(const ParamValue& value) {
  switch (value.type()) {
    case ParamValue::Type::Text:
      return value.as_text();
    case ParamValue::Type::Bytes: {
      const auto& b = value.as_bytes();
      const std::size_t shown = std::min(b.size(), kMaxHexChars / 2);
      auto hex = to_hex(std::span(b).first(shown));
      if (shown < b.size()) hex += "…+" + std::to_string(b.size() - shown);
      return hex;
    }
    case ParamValue::Type::UInt:
      return std::to_string(value.as_uint());
    case ParamValue::Type::Bool:
      return value.as_bool() ? "true" : "false";
  }
  return {};
}

std::string render_text(const Report& report) {
  std::ostringstream out;
  out << "app " << report.app_id << "\n";
  for (const auto& r : report.rules) {
    out << to_string(r.rule) << "  ";
    if (!r.enabled)
      out << "disabled";
    else if (r.violated)
      out << "VIOLATED(" << r.count << ")";
    else
      out << "ok";
    out << "\n";
  }
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";

  for (const auto& r : report.rules) {
    if (!r.violated) continue;
    out << "\n" << to_string(r.rule) << "  " << rule_summaries()[index_of(r.rule)];
    if (r.violations.size() < r.count) out << "  (first " << r.violations.size() << " of " << r.count << ")";
    out << "\n";
    for (const auto& v : r.violations) {
      out << "  - " << v.message << "\n";
      for (const auto& ref : v.evidence) out << "      at " << ref.execution_id << " seq " << ref.seq << "\n";
      for (const auto& value : v.offending_values) out << "      value " << display_value(value) << "\n";
    }
  }
  return out.str();
}

std::string render_json(const Report& report) {
  json rules = json::array();
  for (const auto& r : report.rules) {
    json violations = json::array();
    for (const auto& v : r.violations) {
      json evidence = json::array();
      for (const auto& ref : v.evidence) evidence.push_back({{"execution_id", ref.execution_id}, {"seq", ref.seq}});
      json values = json::array();
      for (const auto& value : v.offending_values) values.push_back(display_value(value));
      violations.push_back({{"message", v.message}, {"evidence", evidence}, {"values", values}});
    }
    rules.push_back({{"id", to_string(r.rule)},
                     {"enabled", r.enabled},
                     {"violated", r.violated},
                     {"count", r.count},
                     {"violations", violations}});
  }
  json doc = {{"schema", kReportSchema}, {"app_id", report.app_id}, {"rules", rules}, {"warnings", report.warnings}};
  return dump(doc);
}

Report parse_report(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
  try {
    if (!doc.is_object() || doc.value("schema", "") != kReportSchema) malformed("missing or unsupported schema");
    Report report = empty_report(doc.at("app_id").get<std::string>());
    report.warnings = doc.at("warnings").get<std::vector<std::string>>();
    std::set<RuleId> seen;
    for (const auto& r : doc.at("rules")) {
      auto id = parse_rule_id(r.at("id").get<std::string>());
      if (!id) malformed("unknown rule " + r.at("id").dump());
      if (!seen.insert(*id).second) malformed("rule listed twice: " + to_string(*id));
      auto& entry = report.rules[index_of(*id)];
      entry.enabled = r.at("enabled").get<bool>();
      entry.violated = r.at("violated").get<bool>();
      entry.count = r.at("count").get<std::size_t>();
      for (const auto& v : r.at("violations")) {
        Violation violation;
        violation.rule = *id;
        violation.message = v.at("message").get<std::string>();
        for (const auto& ref : v.at("evidence"))
          violation.evidence.push_back({ref.at("execution_id").get<std::string>(), ref.at("seq").get<std::uint64_t>()});
        for (const auto& value : v.at("values")) violation.offending_values.push_back(ParamValue::text(value.get<std::string>()));
        entry.violations.push_back(std::move(violation));
      }
    }
    if (seen.size() != kRuleCount) malformed("expected all 26 rules");
    return report;
  } catch (const json::exception& e) {
    malformed(e.what());
  }
}

AggregateStats aggregate(std::span<const Report> reports, std::string generated_at) {
  AggregateStats stats;
  stats.generated_at = std::move(generated_at);
  stats.total_apps = reports.size();
  for (std::size_t i = 0; i < kRuleCount; ++i) stats.per_rule.push_back({rule_at(i), 0, 0.0});

  std::set<std::string> apps;
  for (const auto& report : reports) {
    if (!apps.insert(report.app_id).second)
      throw ReportError(ReportError::Kind::DuplicateAppId, "duplicate app id " + report.app_id);
    for (const auto& r : report.rules)
      if (r.violated) ++stats.per_rule[index_of(r.rule)].violating_apps;
  }
  for (auto& s : stats.per_rule)
    s.fraction = stats.total_apps == 0 ? 0.0
                                       : static_cast<double>(s.violating_apps) / static_cast<double>(stats.total_apps);
  return stats;
}

std::string render_aggregate_json(const AggregateStats& stats) {
  json rules = json::array();
  for (const auto& s : stats.per_rule)
    rules.push_back({{"id", to_string(s.rule)}, {"violating_apps", s.violating_apps}, {"fraction", s.fraction}});
  json doc = {{"schema", kAggregateSchema},
              {"generated_at", stats.generated_at},
              {"total_apps", stats.total_apps},
              {"rules", rules}};
  return dump(doc);
}

}  // namespace crycheck

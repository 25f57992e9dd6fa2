#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crycheck/checkers.hpp"

namespace crycheck {

class ReportError : public std::runtime_error {
 public:
  enum class Kind { Malformed, DuplicateAppId };

  ReportError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::size_t kMaxHexChars = 64;

/// Report form of a value: text as is, bytes as lowercase hex cut to 64 hex
/// digits plus "…+N" for the N bytes left out, integers in decimal, booleans
/// as true/false.
std::string display_value(const ParamValue& value);

/// One `R-NN  VIOLATED(k)|ok|disabled` line per rule, then evidence blocks.
std::string render_text(const Report& report);

/// Canonical JSON: sorted keys, two-space indent, trailing newline.
std::string render_json(const Report& report);

/// Inverse of render_json. Values come back as text in their display form.
Report parse_report(std::string_view json);

struct RuleStat {
  RuleId rule = RuleId::R01;
  std::size_t violating_apps = 0;
  double fraction = 0.0;

  friend bool operator==(const RuleStat&, const RuleStat&) = default;
};

struct AggregateStats {
  std::size_t total_apps = 0;
  /// One entry per rule, in rule order.
  std::vector<RuleStat> per_rule;
  std::string generated_at;

  friend bool operator==(const AggregateStats&, const AggregateStats&) = default;
};

/// Per-rule count and share of apps with the rule violated. Throws
/// ReportError(DuplicateAppId) when two reports name the same app.
AggregateStats aggregate(std::span<const Report> reports, std::string generated_at = {});

std::string render_aggregate_json(const AggregateStats& stats);

}  // namespace crycheck

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crycheck/logmodel.hpp"

namespace crycheck {

enum class RuleId {
  R01, R02, R03, R04, R05, R06, R07, R08, R09, R10, R11, R12, R13,
  R14, R15, R16, R17, R18, R19, R20, R21, R22, R23, R24, R25, R26,
};

inline constexpr std::size_t kRuleCount = 26;

inline constexpr std::size_t index_of(RuleId id) { return static_cast<std::size_t>(id); }
inline constexpr RuleId rule_at(std::size_t index) { return static_cast<RuleId>(index); }

/// "R-01" .. "R-26".
std::string to_string(RuleId id);
/// Accepts "R13", "R-13" and "r13".
std::optional<RuleId> parse_rule_id(std::string_view text);

enum class ProcedureKind { Unacceptable, Constant, BadlyDerived, Reused };

std::string_view to_string(ProcedureKind kind);

/// Fixed rule to checking-procedure assignment.
ProcedureKind procedure_of(RuleId id);

struct ClassBinding {
  CryptoClass cls;
  std::vector<ParamKey> keys;
};

struct RuleSpec {
  RuleId id = RuleId::R01;
  ProcedureKind kind = ProcedureKind::Unacceptable;
  bool enabled = true;
  ClassBinding binding{CryptoClass::MessageDigest, {}};
  std::string summary;
  std::map<std::string, std::int64_t> thresholds;
  std::map<std::string, std::set<std::string>> string_sets;

  std::int64_t threshold(const std::string& name) const { return thresholds.at(name); }
  const std::set<std::string>& string_set(const std::string& name) const { return string_sets.at(name); }
};

/// Knobs shared by the checking procedures.
struct Tunables {
  double nist_alpha = 0.01;
  /// Shortest contiguous overlap accepted when tracing a value back to an RNG output.
  std::size_t min_match_bytes = 8;
  /// Values shorter than this are ignored by the constant-value procedure.
  std::size_t min_constant_bytes = 4;
  /// Violations kept per rule in a report; the total count is always kept.
  std::size_t evidence_cap = 20;
};

class Ruleset {
 public:
  Ruleset(std::vector<RuleSpec> rules, Tunables tunables);

  const RuleSpec& spec(RuleId id) const { return rules_[index_of(id)]; }
  RuleSpec& spec(RuleId id) { return rules_[index_of(id)]; }

  const std::vector<RuleSpec>& rules() const { return rules_; }
  const Tunables& tunables() const { return tunables_; }
  Tunables& tunables() { return tunables_; }

 private:
  std::vector<RuleSpec> rules_;
  Tunables tunables_;
};

class RulesetError : public std::runtime_error {
 public:
  enum class Kind { ConfigParse, UnknownRuleId, UnknownThreshold, UnknownSet, Unreadable };

  RulesetError(Kind kind, std::size_t line, const std::string& what)
      : std::runtime_error(what), kind_(kind), line_(line) {}

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

/// Upper-cases an algorithm name and drops '-', '_' and spaces ("SHA-1" -> "SHA1").
std::string normalize_alg_name(std::string_view name);

/// All 26 rules enabled with their stock thresholds and algorithm sets.
Ruleset default_ruleset();

/// Applies `rule.R13.min_iterations=2000` style overrides to `ruleset`.
void apply_config(Ruleset& ruleset, std::string_view config_text);

/// default_ruleset() overlaid with the overrides in the file at `path`.
Ruleset load_ruleset(const std::filesystem::path& path);

}  // namespace crycheck

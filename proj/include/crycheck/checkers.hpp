#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crycheck/logmodel.hpp"
#include "crycheck/randomness.hpp"
#include "crycheck/ruleset.hpp"

namespace crycheck {

/// Points at one event of one execution.
struct EventRef {
  std::string execution_id;
  std::uint64_t seq = 0;

  friend bool operator==(const EventRef&, const EventRef&) = default;
  friend auto operator<=>(const EventRef&, const EventRef&) = default;
};

struct Violation {
  RuleId rule = RuleId::R01;
  std::string message;
  std::vector<EventRef> evidence;
  std::vector<ParamValue> offending_values;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct RuleEntry {
  RuleId rule = RuleId::R01;
  bool enabled = true;
  bool violated = false;
  /// Total number of violations found; `violations` may hold fewer (see Tunables::evidence_cap).
  std::size_t count = 0;
  std::vector<Violation> violations;

  friend bool operator==(const RuleEntry&, const RuleEntry&) = default;
};

struct Report {
  std::string app_id;
  /// One entry per rule, in rule order.
  std::vector<RuleEntry> rules;
  std::vector<std::string> warnings;

  const RuleEntry& entry(RuleId id) const { return rules.at(index_of(id)); }
  bool any_violation() const;

  friend bool operator==(const Report&, const Report&) = default;
};

/// Empty report for `app_id` with every rule enabled and clean.
Report empty_report(std::string app_id);

enum class ValueOrigin { SecureRng, InsecureRng, Unknown };

std::string_view to_string(ValueOrigin origin);

inline constexpr std::uint64_t kNoSeqLimit = std::numeric_limits<std::uint64_t>::max();

/// Where `value` came from, judged against RandomGenerator `out` values logged
/// before `before_seq`. Equal values always match; otherwise one must contain
/// the other with an overlap of at least `min_match_bytes`. A match against a
/// generator logged as Secure wins over any insecure match.
ValueOrigin classify_origin(std::span<const std::uint8_t> value, const ExecutionLog& log,
                            std::uint64_t before_seq = kNoSeqLimit, std::size_t min_match_bytes = 8);

/// External judgements used by the checks; swappable for testing.
struct Dependencies {
  std::function<BatteryResult(std::span<const std::uint8_t>, double)> battery;
  std::function<int(std::string_view)> password_score;
  std::function<bool(std::string_view)> is_blacklisted;

  /// The real randomness battery, strength estimator and bundled blacklist.
  static Dependencies defaults();
};

class CheckError : public std::runtime_error {
 public:
  enum class Kind { MissingSecondLog, SameExecutionId, AppMismatch, WrongProcedure };

  CheckError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Whether a measured quantity (salt bits, iterations, password score, RSA
/// bits) is under the rule's `min_*` threshold. Throws WrongProcedure for
/// rules without one.
bool below_threshold(const RuleSpec& spec, std::uint64_t measured);

/// One violation per event whose parameters break the rule.
std::vector<Violation> check_unacceptable(const ExecutionLog& log, const RuleSpec& spec,
                                          const Dependencies& deps = Dependencies::defaults());

/// One violation per distinct value of the bound parameter seen in both logs.
/// Values shorter than `tunables.min_constant_bytes` are ignored.
std::vector<Violation> check_constant(const ExecutionLog& a, const ExecutionLog& b, const RuleSpec& spec,
                                      const Tunables& tunables = {});

/// One violation per key or IV that comes from an insecure generator, or of
/// unknown origin and failing at least one randomness test.
std::vector<Violation> check_badly_derived(const ExecutionLog& log, const RuleSpec& spec,
                                           const Tunables& tunables = {},
                                           const Dependencies& deps = Dependencies::defaults());

/// One violation per value (or key/IV pair) occurring more than once across
/// all `logs`, with every occurrence as evidence.
std::vector<Violation> check_reused(std::span<const ExecutionLog* const> logs, const RuleSpec& spec);

/// Runs every enabled rule. Unacceptable and badly-derived rules look at each
/// log, reused rules at both together, constant rules compare the two.
Report run_all(const ExecutionLog& a, const ExecutionLog* b, const Ruleset& ruleset,
               const Dependencies& deps = Dependencies::defaults());

}  // namespace crycheck

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
#include <utility>
#include <vector>

#include "crycheck/checkers.hpp"
#include "crycheck/logmodel.hpp"
#include "crycheck/ruleset.hpp"

namespace crycheck {

enum class Category {
  Basic,
  Miscellaneous,
  Interprocedural,
  PathSensitive,
  FieldSensitive,
  MultipleClasses,
  ArgumentSensitive,
};

inline constexpr std::array<Category, 7> kAllCategories = {
    Category::Basic,         Category::Miscellaneous,  Category::Interprocedural, Category::PathSensitive,
    Category::FieldSensitive, Category::MultipleClasses, Category::ArgumentSensitive,
};

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view name);

struct Misuse {
  RuleId rule = RuleId::R01;
  /// false: the code path is present but not exercised with the bad input.
  bool trigger = true;

  friend bool operator==(const Misuse&, const Misuse&) = default;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<Misuse> misuses;
  std::size_t benign_events = 0;
  Category category = Category::Basic;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

class ScenarioError : public std::runtime_error {
 public:
  enum class Kind { Parse, UnknownRuleId, ConflictingMisuses, Unreadable };

  ScenarioError(Kind kind, std::size_t line, const std::string& what)
      : std::runtime_error(what), kind_(kind), line_(line) {}
  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

/// `name=`, `seed=`, `category=`, `misuse=R05:on|off`, `benign=` lines; `#` comments.
Scenario parse_scenario(std::string_view text);
std::string serialize_scenario(const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);

/// Two executions of the same synthetic app. Fresh values differ between the
/// two; hard-coded (constant-rule) values are identical in both.
std::pair<ExecutionLog, ExecutionLog> generate(const Scenario& scenario);

/// Whether the scenario's code contains the misuse at all, triggered or not.
bool misuse_present(const Scenario& scenario, RuleId rule);

/// Rules a correct checker flags on the generated pair: the triggered rules
/// plus the ones they entail (a constant salt is also a salt reused across
/// executions; a blacklisted password is also a weak one).
std::set<RuleId> expected_flags(const Scenario& scenario);

struct CorpusEntry {
  Scenario scenario;
  std::set<RuleId> expected;

  friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

struct Corpus {
  std::vector<CorpusEntry> entries;
};

/// The 198-scenario benchmark corpus.
Corpus builtin_corpus();

/// Writes one `<name>.scn` file per scenario plus `manifest.txt` listing each
/// file with its expected rule ids. Returns the manifest path.
std::filesystem::path write_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus load_corpus(const std::filesystem::path& manifest);

struct Confusion {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;

  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    tn += o.tn;
    fn += o.fn;
    fp += o.fp;
    return *this;
  }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct ScenarioOutcome {
  std::string name;
  RuleId rule = RuleId::R01;
  std::set<RuleId> flagged;
  std::set<RuleId> expected;
  char verdict = '?';  // 'P' true positive, 'N' true negative, 'F' false negative, 'X' false positive
};

struct BenchResult {
  /// Keyed by the rule each scenario exercises (its first listed misuse).
  std::map<RuleId, Confusion> per_rule;
  Confusion total;
  std::vector<ScenarioOutcome> outcomes;
};

/// The table a sound checker produces: triggered scenarios are true
/// positives, untriggered argument-sensitive ones false negatives, the rest
/// true negatives.
BenchResult expected_table(const Corpus& corpus, std::optional<Category> only = std::nullopt);

/// Generates and checks every scenario (optionally one category only).
BenchResult run_bench(const Corpus& corpus, const Ruleset& ruleset, std::optional<Category> only = std::nullopt,
                      const Dependencies& deps = Dependencies::defaults());

}  // namespace crycheck

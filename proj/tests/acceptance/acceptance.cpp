// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "crycheck/checkers.hpp"
#include "crycheck/report.hpp"
#include "crycheck/tracegen.hpp"
#include "oracles.hpp"
#include "sp800_fixture.hpp"

using namespace crycheck;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s  %-28s %s\n", o.ok ? "PASS" : "FAIL", name, o.detail.c_str());
  if (!o.ok) ++failures;
}

Outcome benchmark_table() {
  auto start = std::chrono::steady_clock::now();
  auto result = run_bench(builtin_corpus(), default_ruleset());
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto& t = result.total;
  char buf[128];
  std::snprintf(buf, sizeof buf, "TP=%zu TN=%zu FN=%zu FP=%zu in %.2fs (want 138/41/19/0, < 60s)", t.tp, t.tn, t.fn,
                t.fp, secs);
  return {t == Confusion{138, 41, 19, 0} && secs < 60.0, buf};
}

Outcome threshold_boundaries() {
  const auto rs = default_ruleset();
  const std::string header = "#crylog v1\n#app t t-1\n#platform test\n";
  auto fires = [&](RuleId id, const std::string& line, const Dependencies& deps = Dependencies::defaults()) {
    return !check_unacceptable(parse_log(header + line + "\n"), rs.spec(id), deps).empty();
  };
  int fixed_score = 0;
  auto deps = Dependencies::defaults();
  deps.password_score = [&fixed_score](std::string_view) { return fixed_score; };
  auto score_fires = [&](int score) {
    fixed_score = score;
    return fires(RuleId::R14, "0\tKeyDerivation\tPBEKeySpec.<init>\tpass=t:x", deps);
  };

  std::vector<std::pair<std::string, bool>> checks = {
      {"iter 999 violates R-13", fires(RuleId::R13, "0\tKeyDerivation\tPBEKeySpec.<init>\titer=u:999")},
      {"iter 1000 ok", !fires(RuleId::R13, "0\tKeyDerivation\tPBEKeySpec.<init>\titer=u:1000")},
      {"63-bit salt violates R-11", below_threshold(rs.spec(RuleId::R11), 63)},
      {"64-bit salt ok", !below_threshold(rs.spec(RuleId::R11), 64)},
      {"7-byte salt violates R-11", fires(RuleId::R11, "0\tKeyDerivation\tPBEKeySpec.<init>\tsalt=b:00112233445566")},
      {"8-byte salt ok", !fires(RuleId::R11, "0\tKeyDerivation\tPBEKeySpec.<init>\tsalt=b:0011223344556677")},
      {"RSA 2047 violates R-19", fires(RuleId::R19, "0\tAsymmEncryption\tCipher.init\talg=t:RSA;key=u:2047")},
      {"RSA 2048 ok", !fires(RuleId::R19, "0\tAsymmEncryption\tCipher.init\talg=t:RSA;key=u:2048")},
      {"score 2 violates R-14", score_fires(2)},
      {"score 3 ok", !score_fires(3)},
  };
  std::string bad;
  for (const auto& [what, ok] : checks)
    if (!ok) bad += (bad.empty() ? "" : "; ") + what;
  return {bad.empty(), bad.empty() ? "10/10 boundary cases" : "wrong: " + bad};
}

Outcome battery_oracle() {
  auto rows = load_sp800_reference();
  double worst = 0.0;
  std::size_t compared = 0, mismatched_skips = 0;
  for (const auto& r : rows) {
    auto bits = BitSequence::from_string(r.bits);
    std::array<RandTestOutcome, 5> got = {monobit(bits), block_frequency(bits), runs(bits), longest_run_of_ones(bits),
                                          cumulative_sums(bits)};
    for (std::size_t t = 0; t < 5; ++t) {
      if (got[t].is_skipped() != !r.p[t].has_value()) {
        ++mismatched_skips;
        continue;
      }
      if (!r.p[t]) continue;
      worst = std::max(worst, std::fabs(got[t].p_value() - *r.p[t]));
      ++compared;
    }
  }
  bool identical_fail = run_battery(std::vector<std::uint8_t>(16, 0x00)).any_fail &&
                        run_battery(std::vector<std::uint8_t>(16, 0xff)).any_fail;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu sequences, %zu p-values, max |dp| = %.2e, skip mismatches %zu; 128 identical bits fail: %s",
                rows.size(), compared, worst, mismatched_skips, identical_fail ? "yes" : "no");
  return {rows.size() >= 20 && worst <= 1e-6 && mismatched_skips == 0 && identical_fail, buf};
}

Outcome constant_properties() {
  const auto rs = default_ruleset();
  const std::array<RuleId, 5> constant_rules = {RuleId::R05, RuleId::R07, RuleId::R10, RuleId::R17, RuleId::R23};
  std::mt19937_64 rng(20240601);
  std::size_t false_alarms = 0, injected_wrong = 0;
  for (int i = 0; i < 1000; ++i) {
    auto [a, b] = crycheck::testing::disjoint_pair(rng, "pair" + std::to_string(i));
    for (auto id : constant_rules) false_alarms += check_constant(a, b, rs.spec(id)).size();

    auto existing = values_of(a, CryptoClass::SymmEncryption, ParamKey::Key);
    auto more = values_of(b, CryptoClass::SymmEncryption, ParamKey::Key);
    existing.insert(existing.end(), more.begin(), more.end());
    Bytes key;
    do key = crycheck::testing::random_bytes(rng, 16);
    while (std::find(existing.begin(), existing.end(), ParamValue::bytes(key)) != existing.end());
    crycheck::testing::append_key_use(a, key);
    crycheck::testing::append_key_use(b, key);
    auto vs = check_constant(a, b, rs.spec(RuleId::R05));
    if (vs.size() != 1 || vs[0].offending_values != std::vector{ParamValue::bytes(key)}) ++injected_wrong;
    for (auto id : constant_rules)
      if (id != RuleId::R05 && !check_constant(a, b, rs.spec(id)).empty()) ++injected_wrong;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "1000 pairs: %zu violations on disjoint values, %zu bad injections", false_alarms,
                injected_wrong);
  return {false_alarms == 0 && injected_wrong == 0, buf};
}

Outcome reused_oracle() {
  const auto rs = default_ruleset();
  std::mt19937_64 rng(8080);
  std::size_t disagreements = 0, duplicates = 0, max_events = 0;
  for (int i = 0; i < 500; ++i) {
    auto log = crycheck::testing::random_reuse_log(rng, 1000, "log" + std::to_string(i));
    max_events = std::max(max_events, log.events.size());
    std::vector<const ExecutionLog*> logs{&log};
    for (auto id : {RuleId::R09, RuleId::R12, RuleId::R16}) {
      auto oracle = crycheck::testing::brute_force_duplicates(logs, rs.spec(id));
      duplicates += oracle.size();
      if (crycheck::testing::as_occurrences(check_reused(logs, rs.spec(id))) != oracle) ++disagreements;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "500 logs (max %zu events), %zu duplicate groups, %zu disagreements", max_events,
                duplicates, disagreements);
  return {disagreements == 0 && max_events <= 1000 && duplicates > 0, buf};
}

Outcome determinism_round_trip() {
  std::size_t logs = 0, bad_round_trip = 0, bad_reports = 0;
  const auto rs = default_ruleset();
  auto check_log = [&](const std::string& text) {
    ++logs;
    if (serialize_log(parse_log(text)) != text) ++bad_round_trip;
  };
  for (const auto& entry : std::filesystem::directory_iterator(std::filesystem::path(CRYCHECK_FIXTURES) / "logs")) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    check_log(s.str());
  }
  for (const auto& e : builtin_corpus().entries) {
    auto [a, b] = generate(e.scenario);
    check_log(serialize_log(a));
    check_log(serialize_log(b));
    if (render_json(run_all(a, &b, rs)) != render_json(run_all(a, &b, rs))) ++bad_reports;
    auto again = generate(e.scenario);
    if (render_json(run_all(again.first, &again.second, rs)) != render_json(run_all(a, &b, rs))) ++bad_reports;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu logs, %zu round-trip diffs, %zu report diffs", logs, bad_round_trip,
                bad_reports);
  return {bad_round_trip == 0 && bad_reports == 0, buf};
}

Outcome aggregation() {
  std::vector<Report> reports;
  for (int i = 0; i < 1000; ++i) {
    auto r = empty_report("app-" + std::to_string(i));
    if (i < 991) {
      r.rules[index_of(RuleId::R01)].violated = true;
      r.rules[index_of(RuleId::R01)].count = 1;
    }
    reports.push_back(std::move(r));
  }
  auto stats = aggregate(reports);
  double fraction = stats.per_rule[index_of(RuleId::R01)].fraction;
  char buf[96];
  std::snprintf(buf, sizeof buf, "R-01 fraction %.3f over %zu apps (want 0.991)", fraction, stats.total_apps);
  return {std::round(fraction * 1000.0) == 991.0, buf};
}

}  // namespace

int main() {
  criterion("benchmark-confusion-matrix", benchmark_table);
  criterion("threshold-boundaries", threshold_boundaries);
  criterion("randomness-oracle", battery_oracle);
  criterion("constant-procedure", constant_properties);
  criterion("reused-procedure-oracle", reused_oracle);
  criterion("determinism-round-trip", determinism_round_trip);
  criterion("aggregation-headline", aggregation);
  return failures == 0 ? 0 : 1;
}

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "crycheck/checkers.hpp"
#include "crycheck/logmodel.hpp"
#include "crycheck/report.hpp"
#include "crycheck/ruleset.hpp"
#include "crycheck/tracegen.hpp"

namespace crycheck::cli {

namespace {

namespace fs = std::filesystem;

struct RulesetFlags {
  std::string path;
  std::optional<double> nist_alpha;
  std::optional<std::size_t> min_match_bytes;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--ruleset", path, "Ruleset config file")->envname("CRYCHECK_RULESET");
    cmd.add_option("--nist-alpha", nist_alpha, "Significance level of the randomness tests, in (0, 1)")
        ->check(CLI::Validator(
            [](std::string& v) {
              char* end = nullptr;
              double a = std::strtod(v.c_str(), &end);
              bool ok = !v.empty() && *end == '\0' && a > 0.0 && a < 1.0;
              return ok ? std::string() : std::string("must be a number strictly between 0 and 1");
            },
            "(0, 1)"));
    cmd.add_option("--min-match-bytes", min_match_bytes, "Shortest overlap that links a value to an RNG output")
        ->check(CLI::PositiveNumber);
  }

  Ruleset load() const {
    Ruleset rs = path.empty() ? default_ruleset() : load_ruleset(path);
    if (nist_alpha) rs.tunables().nist_alpha = *nist_alpha;
    if (min_match_bytes) rs.tunables().min_match_bytes = *min_match_bytes;
    return rs;
  }
};

std::string utc_now() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw std::runtime_error("cannot write " + path.string());
}

int check(const std::string& first, const std::string& second, const RulesetFlags& flags, const std::string& format,
          std::ostream& out) {
  Ruleset rs = flags.load();
  auto a = read_log_file(first);
  std::optional<ExecutionLog> b;
  if (!second.empty()) b = read_log_file(second);

  std::vector<std::string> skipped;
  if (!b) {
    for (std::size_t i = 0; i < kRuleCount; ++i) {
      auto& spec = rs.spec(rule_at(i));
      if (spec.enabled && spec.kind == ProcedureKind::Constant) {
        spec.enabled = false;
        skipped.push_back(to_string(spec.id));
      }
    }
  }

  Report report = run_all(a, b ? &*b : nullptr, rs);
  if (!skipped.empty()) {
    std::string ids;
    for (const auto& id : skipped) ids += (ids.empty() ? "" : ", ") + id;
    report.warnings.push_back("only one execution given; constant-value rules not checked: " + ids);
  }
  out << (format == "json" ? render_json(report) : render_text(report));
  return report.any_violation() ? kViolations : kClean;
}

int gen(const std::string& scenario_path, bool corpus, const fs::path& out_dir, std::ostream& out) {
  if (corpus) {
    auto manifest = write_corpus(builtin_corpus(), out_dir);
    out << manifest.string() << "\n";
    return kClean;
  }
  auto scenario = load_scenario(scenario_path);
  auto [a, b] = generate(scenario);
  fs::create_directories(out_dir);
  for (const auto* log : {&a, &b}) {
    auto path = out_dir / (log->execution_id + ".log");
    write_file(path, serialize_log(*log));
    out << path.string() << "\n";
  }
  return kClean;
}

std::string table_row(const std::string& label, const Confusion& c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-6s%5zu%5zu%5zu%5zu", label.c_str(), c.tp, c.tn, c.fn, c.fp);
  return buf;
}

std::string bench_text(const BenchResult& got, const BenchResult& want) {
  std::ostringstream out;
  out << "rule     TP   TN   FN   FP\n";
  auto row = [&](const std::string& label, const Confusion& c, const Confusion& expected) {
    out << table_row(label, c);
    if (!(c == expected))
      out << "   expected " << expected.tp << " " << expected.tn << " " << expected.fn << " " << expected.fp;
    out << "\n";
  };
  for (const auto& [rule, c] : want.per_rule) {
    auto it = got.per_rule.find(rule);
    row(to_string(rule), it == got.per_rule.end() ? Confusion{} : it->second, c);
  }
  row("total", got.total, want.total);

  auto outcomes = got.outcomes;
  std::sort(outcomes.begin(), outcomes.end(), [](const auto& x, const auto& y) { return x.name < y.name; });
  for (const auto& o : outcomes) {
    if (o.verdict != 'X') continue;
    std::string flagged;
    for (auto id : o.flagged) flagged += " " + to_string(id);
    out << "false positive: " << o.name << " flagged" << flagged << "\n";
  }
  return out.str();
}

std::string bench_json(const BenchResult& got, const BenchResult& want) {
  using nlohmann::json;
  auto counts = [](const Confusion& c) { return json{{"tp", c.tp}, {"tn", c.tn}, {"fn", c.fn}, {"fp", c.fp}}; };
  json rules = json::array();
  for (const auto& [rule, c] : want.per_rule) {
    auto it = got.per_rule.find(rule);
    rules.push_back({{"id", to_string(rule)},
                     {"counts", counts(it == got.per_rule.end() ? Confusion{} : it->second)},
                     {"expected", counts(c)}});
  }
  json doc = {{"schema", "bench/1"},
              {"rules", rules},
              {"total", counts(got.total)},
              {"expected_total", counts(want.total)},
              {"match", got.per_rule == want.per_rule && got.total == want.total}};
  return doc.dump(2) + "\n";
}

int bench(const std::string& manifest, const std::string& category_name, const RulesetFlags& flags,
          const std::string& format, std::ostream& out) {
  std::optional<Category> category;
  if (!category_name.empty()) {
    category = parse_category(category_name);
    if (!category) throw std::invalid_argument("unknown category '" + category_name + "'");
  }
  Ruleset rs = flags.load();
  Corpus corpus = manifest.empty() ? builtin_corpus() : load_corpus(manifest);
  auto want = expected_table(corpus, category);
  auto got = run_bench(corpus, rs, category);
  out << (format == "json" ? bench_json(got, want) : bench_text(got, want));
  return got.per_rule == want.per_rule && got.total == want.total ? kClean : kViolations;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int aggregate_dir(const fs::path& dir, const std::string& generated_at, std::ostream& out) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::vector<Report> reports;
  for (const auto& f : files) {
    try {
      reports.push_back(parse_report(read_file(f)));
    } catch (const ReportError& e) {
      throw ReportError(e.kind(), f.string() + ": " + e.what());
    }
  }
  out << render_aggregate_json(aggregate(reports, generated_at.empty() ? utc_now() : generated_at));
  return kClean;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic checker for cryptographic API misuse in execution logs", "crycheck"};
  app.require_subcommand(1);

  std::string format = "text";
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  };

  RulesetFlags check_flags;
  std::string first_log;
  std::string second_log;
  auto* check_cmd = app.add_subcommand("check", "Check one log, or two executions of the same app");
  check_cmd->add_option("log", first_log, "Execution log")->required();
  check_cmd->add_option("second", second_log, "Log of a second execution of the same app");
  check_flags.add_to(*check_cmd);
  add_format(check_cmd);

  auto* compare_cmd = app.add_subcommand("compare", "Check two executions of the same app");
  compare_cmd->add_option("log", first_log, "First execution log")->required();
  compare_cmd->add_option("second", second_log, "Second execution log")->required();
  check_flags.add_to(*compare_cmd);
  add_format(compare_cmd);

  std::string scenario;
  std::string out_dir = ".";
  bool corpus = false;
  auto* gen_cmd = app.add_subcommand("gen", "Generate the two logs of a scenario, or export the benchmark corpus");
  auto* scenario_opt = gen_cmd->add_option("scenario", scenario, "Scenario file");
  auto* corpus_opt = gen_cmd->add_flag("--corpus", corpus, "Write the bundled corpus as scenario files and a manifest");
  scenario_opt->excludes(corpus_opt);
  gen_cmd->add_option("--out-dir", out_dir, "Output directory");

  RulesetFlags bench_flags;
  std::string manifest;
  std::string category;
  auto* bench_cmd = app.add_subcommand("bench", "Run the benchmark corpus and print the confusion table");
  bench_cmd->add_option("--manifest", manifest, "Corpus manifest (default: the bundled corpus)");
  bench_cmd->add_option("--category", category, "Only scenarios of this category");
  bench_flags.add_to(*bench_cmd);
  add_format(bench_cmd);

  std::string report_dir;
  std::string generated_at;
  auto* aggregate_cmd = app.add_subcommand("aggregate", "Per-rule violation counts over a directory of JSON reports");
  aggregate_cmd->add_option("dir", report_dir, "Directory of report JSON files")->required();
  aggregate_cmd->add_option("--generated-at", generated_at, "Timestamp to record (default: now, UTC)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kClean : kError;
  }

  try {
    if (*check_cmd || *compare_cmd) return check(first_log, second_log, check_flags, format, out);
    if (*gen_cmd) {
      if (scenario.empty() && !corpus) throw std::invalid_argument("gen needs a scenario file or --corpus");
      return gen(scenario, corpus, out_dir, out);
    }
    if (*bench_cmd) return bench(manifest, category, bench_flags, format, out);
    if (*aggregate_cmd) return aggregate_dir(report_dir, generated_at, out);
  } catch (const std::exception& e) {
    err << "crycheck: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

}  // namespace crycheck::cli

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include <json.hpp>

#include "crycheck/report.hpp"

using namespace crycheck;

namespace {

std::size_t count_lines(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    if (text.compare(pos, nl - pos, needle) == 0 ||
        text.substr(pos, nl - pos).find(needle) != std::string::npos)
      ++n;
    pos = nl + 1;
  }
  return n;
}

Report one_violation(RuleId id, const std::string& app = "app") {
  auto r = empty_report(app);
  auto& e = r.rules[index_of(id)];
  e.violated = true;
  e.count = 1;
  e.violations.push_back({id, "broken hash 'SHA1'", {{"app.1", 42}}, {ParamValue::text("SHA1")}});
  return r;
}

}  // namespace

TEST(ReportText, CleanReportHasTwentySixOkLines) {
  auto text = render_text(empty_report("clean"));
  EXPECT_EQ(text.rfind("app clean\n", 0), 0u);
  EXPECT_EQ(count_lines(text, "  ok"), 26u);
  EXPECT_EQ(count_lines(text, "VIOLATED"), 0u);
}

TEST(ReportText, SingleViolation) {
  auto text = render_text(one_violation(RuleId::R01));
  EXPECT_EQ(count_lines(text, "VIOLATED"), 1u);
  EXPECT_NE(text.find("R-01  VIOLATED(1)"), std::string::npos);
  EXPECT_NE(text.find("at app.1 seq 42"), std::string::npos);
  EXPECT_EQ(count_lines(text, "  ok"), 25u);
}

TEST(ReportText, DisabledIsNeverOk) {
  auto r = empty_report("x");
  r.rules[index_of(RuleId::R04)].enabled = false;
  auto text = render_text(r);
  EXPECT_NE(text.find("R-04  disabled\n"), std::string::npos);
  EXPECT_EQ(text.find("R-04  ok"), std::string::npos);
}

TEST(ReportJson, EmptyReportRoundTrips) {
  auto r = empty_report("empty");
  EXPECT_EQ(parse_report(render_json(r)), r);
}

TEST(ReportJson, ViolationsRoundTrip) {
  auto r = one_violation(RuleId::R22);
  r.warnings.push_back("note");
  r.rules[index_of(RuleId::R05)].enabled = false;
  EXPECT_EQ(parse_report(render_json(r)), r);
}

TEST(ReportJson, CanonicalAndSorted) {
  auto a = render_json(one_violation(RuleId::R09));
  auto b = render_json(one_violation(RuleId::R09));
  EXPECT_EQ(a, b);
  auto doc = nlohmann::json::parse(a);
  EXPECT_EQ(doc["schema"], "report/1");
  const auto& ev = doc["rules"][8]["violations"][0]["evidence"][0];
  EXPECT_TRUE(ev["seq"].is_number_unsigned());
  EXPECT_EQ(ev["seq"].get<int>(), 42);
  // Keys are emitted in sorted order.
  EXPECT_LT(a.find("\"app_id\""), a.find("\"rules\""));
  EXPECT_LT(a.find("\"rules\""), a.find("\"schema\""));
  EXPECT_LT(a.find("\"schema\""), a.find("\"warnings\""));
}

TEST(ReportJson, LongBytesAreTruncated) {
  Bytes big(40, 0xab);
  auto shown = display_value(ParamValue::bytes(big));
  std::string hex;
  for (int i = 0; i < 32; ++i) hex += "ab";
  EXPECT_EQ(shown, hex + "…+8");
  EXPECT_EQ(display_value(ParamValue::bytes(Bytes(32, 0x01))).size(), 64u);
  EXPECT_EQ(display_value(ParamValue::uint(7)), "7");
  EXPECT_EQ(display_value(ParamValue::boolean(true)), "true");
}

TEST(ReportJson, MalformedInputIsRejected) {
  auto expect_malformed = [](std::string_view text) {
    try {
      parse_report(text);
      ADD_FAILURE() << text;
    } catch (const ReportError& e) {
      EXPECT_EQ(e.kind(), ReportError::Kind::Malformed);
    }
  };
  expect_malformed("not json");
  expect_malformed("{}");
  expect_malformed(R"({"schema":"report/1","app_id":"a","rules":[],"warnings":[]})");
  auto doc = nlohmann::json::parse(render_json(empty_report("a")));
  doc["rules"][1]["id"] = "R-01";
  expect_malformed(doc.dump());
}

TEST(Aggregate, HeadlineFraction) {
  std::vector<Report> reports;
  for (int i = 0; i < 1000; ++i)
    reports.push_back(i < 991 ? one_violation(RuleId::R01, "app" + std::to_string(i))
                              : empty_report("app" + std::to_string(i)));
  auto stats = aggregate(reports, "2024-01-01T00:00:00Z");
  EXPECT_EQ(stats.total_apps, 1000u);
  EXPECT_EQ(stats.per_rule[0].violating_apps, 991u);
  EXPECT_DOUBLE_EQ(stats.per_rule[0].fraction, 0.991);
}

TEST(Aggregate, EmptyInput) {
  auto stats = aggregate({});
  EXPECT_EQ(stats.total_apps, 0u);
  ASSERT_EQ(stats.per_rule.size(), 26u);
  for (const auto& s : stats.per_rule) {
    EXPECT_EQ(s.violating_apps, 0u);
    EXPECT_EQ(s.fraction, 0.0);
  }
}

TEST(Aggregate, SingleRule) {
  std::vector<Report> reports{one_violation(RuleId::R09)};
  auto stats = aggregate(reports);
  for (const auto& s : stats.per_rule) EXPECT_EQ(s.violating_apps, s.rule == RuleId::R09 ? 1u : 0u);
}

TEST(Aggregate, DuplicateAppIdsAreRejected) {
  std::vector<Report> reports{empty_report("same"), one_violation(RuleId::R02, "same")};
  try {
    aggregate(reports);
    FAIL();
  } catch (const ReportError& e) {
    EXPECT_EQ(e.kind(), ReportError::Kind::DuplicateAppId);
  }
}

TEST(Aggregate, PermutationInvariantAndCountsCoverApps) {
  std::mt19937_64 rng(17);
  std::vector<Report> reports;
  for (int i = 0; i < 60; ++i) {
    auto r = empty_report("a" + std::to_string(i));
    for (auto& e : r.rules) e.violated = rng() % 5 == 0;
    reports.push_back(r);
  }
  auto base = aggregate(reports, "t");
  std::size_t with_any = 0;
  for (const auto& r : reports) with_any += r.any_violation();
  std::size_t total = 0;
  for (const auto& s : base.per_rule) total += s.violating_apps;
  EXPECT_GE(total, with_any);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(reports.begin(), reports.end(), rng);
    EXPECT_EQ(aggregate(reports, "t"), base);
  }
  auto doc = nlohmann::json::parse(render_aggregate_json(base));
  EXPECT_EQ(doc["schema"], "aggregate/1");
  EXPECT_EQ(doc["total_apps"], 60);
}

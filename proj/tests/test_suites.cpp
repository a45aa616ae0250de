#include <gtest/gtest.h>

#include "orbitgeo/suites.hpp"
#include "test_util.hpp"

using namespace orbitgeo;
using namespace orbitgeo::suites;
using testutil::thrown_kind;

namespace {
SuiteConfig small(Suite s, std::uint64_t seed = 17) {
  SuiteConfig cfg;
  cfg.suite = s;
  cfg.n = 3;
  cfg.trials = s == Suite::geodesics ? 2 : 5;
  cfg.seed = seed;
  return cfg;
}
}  // namespace

TEST(Suites, NamesRoundTrip) {
  for (Suite s : all_suites()) EXPECT_EQ(parse_suite(to_string(s)), s);
  EXPECT_EQ(all_suites().size(), 6u);
  EXPECT_EQ(thrown_kind([] { parse_suite("nope"); }), ErrorKind::config);
}

TEST(Suites, ConfigValidation) {
  SuiteConfig cfg;
  cfg.n = 1;
  EXPECT_EQ(thrown_kind([&] { cfg.validate(); }), ErrorKind::config);
  cfg.n = 3;
  cfg.trials = 0;
  EXPECT_EQ(thrown_kind([&] { cfg.validate(); }), ErrorKind::config);
  cfg.trials = 2;
  cfg.only_trial = 2;
  EXPECT_EQ(thrown_kind([&] { cfg.validate(); }), ErrorKind::config);
}

TEST(Suites, AllPassOnSmallRuns) {
  for (Suite s : all_suites()) {
    const SuiteReport r = run_suite(small(s));
    EXPECT_TRUE(r.all_pass()) << to_string(s) << "\n" << report_summary(r);
    EXPECT_FALSE(r.properties.empty());
  }
}

TEST(Suites, ReportsAreDeterministic) {
  SuiteConfig cfg = small(Suite::minlift);
  cfg.workers = 1;
  const std::string a = report_jsonl(run_suite(cfg));
  cfg.workers = 2;
  EXPECT_EQ(report_jsonl(run_suite(cfg)), a);
  EXPECT_NE(report_jsonl(run_suite(small(Suite::minlift, 18))), a);
}

TEST(Suites, FailuresAreRecordedAndReplayed) {
  SuiteConfig cfg = small(Suite::exp_log);
  cfg.tolerances["log_exp_roundtrip"] = 1e-300;  // below rounding, so every nonzero residual fails
  const SuiteReport r = run_suite(cfg);
  EXPECT_FALSE(r.all_pass());
  const std::string jsonl = report_jsonl(r);
  EXPECT_NE(jsonl.find("\"digest\""), std::string::npos);
  const std::vector<ReplayOutcome> out = replay_report(jsonl);
  ASSERT_FALSE(out.empty());
  for (const ReplayOutcome& o : out) {
    EXPECT_EQ(o.property, "log_exp_roundtrip");
    EXPECT_TRUE(o.reproduced) << o.trial;
  }
}

TEST(Suites, ReplayRejectsGarbage) {
  EXPECT_EQ(thrown_kind([] { replay_report("not json\n"); }), ErrorKind::format);
  EXPECT_TRUE(replay_report("").empty());
}

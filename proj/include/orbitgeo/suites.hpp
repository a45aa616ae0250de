#pragma once

// Randomised property suites over the library, with reproducible per-trial
// seeds, JSON-lines reports and replay of individual failures.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orbitgeo::suites {

enum class Suite { exp_log, bch, minlift, groups, geodesics, props_final };

std::string_view to_string(Suite s);
/// Throws config for an unknown name.
Suite parse_suite(std::string_view s);
const std::vector<Suite>& all_suites();

struct SuiteConfig {
  Suite suite = Suite::exp_log;
  int n = 4;
  int trials = 10;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;  // per-property overrides
  int workers = 0;                           // 0: ORBITGEO_WORKERS or hardware
  std::optional<int> only_trial;             // replay a single trial

  /// Throws config when n < 2, trials < 1 or only_trial is out of range.
  void validate() const;
};

struct Failure {
  int trial = 0;
  std::uint64_t trial_seed = 0;
  double residual = 0.0;
  std::string error;          // set when the check threw instead of measuring
  std::string instance_json;  // {"name": matrix JSON, ...}
  std::string digest;         // FNV-1a of instance_json, hex
};

struct PropertyResult {
  std::string name;
  double tolerance = 0.0;
  int checked = 0;
  int failed = 0;
  double worst = 0.0;
  std::vector<Failure> failures;

  bool pass() const { return failed == 0; }
};

struct SuiteReport {
  SuiteConfig config;
  std::vector<PropertyResult> properties;  // in first-seen order
  double wall_seconds = 0.0;

  bool all_pass() const;
};

SuiteReport run_suite(const SuiteConfig& cfg);

/// One JSON object per property. Contains no timing, so identical configs
/// give byte-identical output.
std::string report_jsonl(const SuiteReport& report);
/// Human-readable summary including wall time.
std::string report_summary(const SuiteReport& report);

struct ReplayOutcome {
  std::string property;
  int trial = 0;
  double recorded = 0.0;
  double replayed = 0.0;
  bool reproduced = false;  // same residual bit for bit and still failing
};

/// Re-executes every failure listed in a report produced by report_jsonl.
std::vector<ReplayOutcome> replay_report(std::string_view jsonl);

}  // namespace orbitgeo::suites

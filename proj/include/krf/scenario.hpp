#pragma once

#include <optional>
#include <string>
#include <vector>

#include "krf/estimate_validators.hpp"
#include "krf/flow_engine.hpp"
#include "krf/ke_oracle.hpp"

namespace krf {

// All parse/validation violations at once, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

struct ScenarioConfig {
  std::string name = "scenario";
  FlowMode mode = FlowMode::Normalized;
  int n = 2;

  int m = 801;
  double y_max = 12.0;
  double R2 = 1.0;

  std::string defining = "ball(1)";       // domain modes
  std::string initial = "euclidean(0.5)";
  std::string omega_m = "hyperbolic-bg";  // general modes

  SolverConfig solver;
  std::vector<double> eps_ladder = {0.1, 0.05, 0.025, 0.0125};
  std::vector<double> output_times;  // empty: 10 uniform times up to T
  std::string output_dir;            // empty: out/<name>
  bool checks_enabled = true;

  std::vector<double> resolved_output_times() const;
  std::string resolved_output_dir() const;
};

ScenarioConfig parse_scenario(const std::string& text);
std::string serialize_scenario(const ScenarioConfig& cfg);
// FNV-1a 64 hash of the canonical serialization, lowercase hex.
std::string scenario_fingerprint(const ScenarioConfig& cfg);

struct PresetInfo {
  std::string signature;
  std::string kind;  // "defining" or "metric"
  std::string description;
};
const std::vector<PresetInfo>& preset_registry();
std::string list_presets();

DefiningFunction make_defining(const std::string& preset, const GridPtr& grid);
// Metric preset with exact eigenvalue fields.
RadialMetric make_metric(const std::string& preset, const GridPtr& grid);

// Assemble the background family of a given mode from the scenario presets.
BackgroundFamily build_family(const ScenarioConfig& cfg, FlowMode mode,
                              const GridPtr& grid);

// Defining preset describing the same domain through a different function;
// used by the independence check.
std::string counterpart_defining(const std::string& preset);

struct ScenarioRun {
  ScenarioConfig config;
  std::string fingerprint;
  GridPtr grid;
  std::optional<DefiningFunction> df;
  BackgroundFamily bf_primary;

  ContinuationResult primary;
  std::optional<BackgroundFamily> bf_unnorm;
  std::optional<BackgroundFamily> bf_norm;
  std::optional<ContinuationResult> unnorm_ladder;
  std::optional<ContinuationResult> norm_ladder;
  std::optional<Trajectory> unnorm_long;
  std::vector<double> rescale_times;
  std::optional<KESolution> oracle;
  std::optional<KESolution> oracle_alt;
  std::optional<BackgroundFamily> bf_alt;

  EstimateReport report;
};

// Solve, cross-run, oracle, validate. Throws SolverFailure / ConfigError.
ScenarioRun execute_scenario(const ScenarioConfig& cfg);

// execute + write all files; returns the exit code of the contract
// (0 pass, 2 check failure, 3 solver failure, 4 I/O failure).
int run_scenario(const ScenarioConfig& cfg, bool quiet = false);

}  // namespace krf

#pragma once

#include <map>
#include <string>
#include <vector>

#include "krf/flow_engine.hpp"
#include "krf/ke_oracle.hpp"

namespace krf {

enum class CheckStatus { Pass, Fail, NotApplicable };

const char* status_name(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::NotApplicable;
  double margin = 0.0;
  double slack = 0.0;   // discretization allowance, reported separately
  std::string detail;
};

struct EstimateReport {
  std::vector<CheckResult> checks;
  std::string fingerprint;
  std::map<std::string, double> constants;

  bool all_passed() const;
  const CheckResult* find(const std::string& name) const;
};

// Frozen list of check names; coverage is unit-tested against it.
const std::vector<std::string>& check_manifest();

// Everything the validators read. Null members mark data a scenario did not
// produce; the corresponding checks report not-applicable.
struct ValidatorContext {
  const BackgroundFamily* bf_unnorm = nullptr;
  const BackgroundFamily* bf_norm = nullptr;
  const ContinuationResult* unnorm_ladder = nullptr;
  const Trajectory* unnorm_long = nullptr;  // horizon covering the rescale map
  const ContinuationResult* norm_ladder = nullptr;
  const KESolution* oracle = nullptr;
  const KESolution* oracle_alt = nullptr;   // counterpart defining preset
  const BackgroundFamily* bf_alt = nullptr;
  const DefiningFunction* df = nullptr;     // domain modes only
  SolverConfig cfg;
  std::vector<double> rescale_times;
  double t0 = 0.5;        // start of the uniform-in-t windows
  double schwarz_tol = 1e-2;
};

void check_apriori_unnormalized(const ValidatorContext& ctx, EstimateReport& report);
void check_apriori_normalized(const ValidatorContext& ctx, EstimateReport& report);
void check_structural(const ValidatorContext& ctx, EstimateReport& report);
void check_geometry(const ValidatorContext& ctx, EstimateReport& report);

EstimateReport run_checks(const ValidatorContext& ctx);

// Fitted slope of the geodesic length profile against y over the last half of
// the grid; positive slope indicates completeness.
double completeness_slope(const MetricEigenvalues& eig);

}  // namespace krf

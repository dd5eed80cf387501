#pragma once

#include <string>

#include "krf/estimate_validators.hpp"
#include "krf/flow_engine.hpp"

namespace krf {

inline constexpr const char* kToolVersion = "krfflow 1.0.0";

// CSV with a leading comment line (fingerprint + version), header
// y,rho,u@t...,udot@t..., one row per node, %.17g values.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const RadialGrid& grid, const std::string& fingerprint);
// JSON sidecar: mode, eps, step count, snapshot times, fingerprint.
void write_trajectory_json(const std::string& path, const Trajectory& traj,
                           const std::string& fingerprint);

Trajectory read_trajectory_csv(const std::string& path, const std::string& json_path);

void write_oracle_csv(const std::string& path, const RadialGrid& grid, const Field& u_inf,
                      const std::string& fingerprint);

void write_report_json(const std::string& path, const EstimateReport& report);
void write_report_text(const std::string& path, const EstimateReport& report);
std::string format_report(const EstimateReport& report);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace krf

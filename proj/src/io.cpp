#include "krf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace krf {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double clamp_json(double v) {
  if (std::isnan(v)) return 0.0;
  if (std::isinf(v)) return v > 0 ? 1e308 : -1e308;
  return v;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const RadialGrid& grid, const std::string& fingerprint) {
  std::ostringstream os;
  os << "# fingerprint=" << fingerprint << " version=" << kToolVersion
     << " mode=" << mode_name(traj.mode) << " eps=" << num(traj.eps)
     << " steps=" << traj.steps << " t10=" << num(traj.t_after_10_steps) << "\n";
  os << "y,rho";
  for (const Snapshot& s : traj.snapshots) os << ",u@" << num(s.t) << ",udot@" << num(s.t);
  os << "\n";
  for (int i = 0; i < grid.m; ++i) {
    os << num(grid.y[i]) << "," << num(grid.rho[i]);
    for (const Snapshot& s : traj.snapshots) os << "," << num(s.u[i]) << "," << num(s.udot[i]);
    os << "\n";
  }
  write_text_file(path, os.str());
}

void write_trajectory_json(const std::string& path, const Trajectory& traj,
                           const std::string& fingerprint) {
  nlohmann::ordered_json j;
  j["fingerprint"] = fingerprint;
  j["version"] = kToolVersion;
  j["mode"] = mode_name(traj.mode);
  j["eps"] = traj.eps;
  j["steps"] = traj.steps;
  j["t_after_10_steps"] = traj.t_after_10_steps;
  std::vector<double> times;
  for (const Snapshot& s : traj.snapshots) times.push_back(s.t);
  j["times"] = times;
  write_text_file(path, j.dump(2) + "\n");
}

Trajectory read_trajectory_csv(const std::string& path, const std::string& json_path) {
  const nlohmann::json meta = nlohmann::json::parse(read_text_file(json_path));
  Trajectory traj;
  traj.mode = mode_from_name(meta.at("mode").get<std::string>());
  traj.eps = meta.at("eps").get<double>();
  traj.steps = meta.at("steps").get<std::size_t>();
  traj.t_after_10_steps = meta.at("t_after_10_steps").get<double>();
  traj.fingerprint = meta.at("fingerprint").get<std::string>();
  for (double t : meta.at("times").get<std::vector<double>>())
    traj.snapshots.push_back({t, {}, {}});

  std::istringstream in(read_text_file(path));
  std::string line;
  std::getline(in, line);  // comment
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != 2 + 2 * traj.snapshots.size())
      throw IoError("malformed trajectory row in " + path);
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      traj.snapshots[k].u.push_back(vals[2 + 2 * k]);
      traj.snapshots[k].udot.push_back(vals[3 + 2 * k]);
    }
  }
  return traj;
}

void write_oracle_csv(const std::string& path, const RadialGrid& grid, const Field& u_inf,
                      const std::string& fingerprint) {
  std::ostringstream os;
  os << "# fingerprint=" << fingerprint << " version=" << kToolVersion << "\n";
  os << "y,rho,u_inf\n";
  for (int i = 0; i < grid.m; ++i)
    os << num(grid.y[i]) << "," << num(grid.rho[i]) << "," << num(u_inf[i]) << "\n";
  write_text_file(path, os.str());
}

void write_report_json(const std::string& path, const EstimateReport& report) {
  nlohmann::ordered_json j;
  j["fingerprint"] = report.fingerprint;
  j["version"] = kToolVersion;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const CheckResult& c : report.checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["status"] = status_name(c.status);
    jc["margin"] = clamp_json(c.margin);
    jc["slack"] = clamp_json(c.slack);
    jc["detail"] = c.detail;
    checks.push_back(jc);
  }
  j["checks"] = checks;
  nlohmann::ordered_json consts;
  for (const auto& [k, v] : report.constants) consts[k] = clamp_json(v);
  j["constants"] = consts;
  write_text_file(path, j.dump(2) + "\n");
}

std::string format_report(const EstimateReport& report) {
  std::ostringstream os;
  os << "estimate report (fingerprint " << report.fingerprint << ")\n";
  for (const CheckResult& c : report.checks) {
    os << "  " << std::left << std::setw(32) << c.name << std::setw(16)
       << status_name(c.status);
    os << "margin=" << std::setw(13) << num(clamp_json(c.margin))
       << " slack=" << std::setw(11) << num(c.slack) << " " << c.detail << "\n";
  }
  if (!report.constants.empty()) {
    os << "constants:\n";
    for (const auto& [k, v] : report.constants)
      os << "  " << std::left << std::setw(34) << k << num(v) << "\n";
  }
  return os.str();
}

void write_report_text(const std::string& path, const EstimateReport& report) {
  write_text_file(path, format_report(report));
}

}  // namespace krf

#include "krf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "krf/io.hpp"

namespace krf {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& s, const std::string& what,
                               std::vector<std::string>& issues) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      issues.push_back(what + ": not a number: '" + item + "'");
    }
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += num(v[i]);
  }
  return s;
}

struct Preset {
  std::string name;
  std::vector<double> args;
};

Preset parse_preset(const std::string& text) {
  const std::string s = trim(text);
  const std::size_t p = s.find('(');
  if (p == std::string::npos) return {s, {}};
  if (s.back() != ')') throw Error("malformed preset '" + s + "'");
  Preset pr{trim(s.substr(0, p)), {}};
  std::vector<std::string> issues;
  pr.args = parse_list(s.substr(p + 1, s.size() - p - 2), "preset " + pr.name, issues);
  if (!issues.empty()) throw Error(issues.front());
  return pr;
}

void validate_config(const ScenarioConfig& cfg, std::vector<std::string>& issues) {
  if (cfg.n < 1 || cfg.n > 4)
    issues.push_back("scenario.n: dimension out of range [1,4]: " + std::to_string(cfg.n));
  if (cfg.m < 51 || cfg.m > 20001)
    issues.push_back("grid.m: out of range [51,20001]: " + std::to_string(cfg.m));
  if (cfg.y_max < 4.0 || cfg.y_max > 40.0)
    issues.push_back("grid.y_max: out of range [4,40]: " + num(cfg.y_max));
  if (!(cfg.R2 > 0.0)) issues.push_back("grid.R2: must be positive");
  if (!(cfg.solver.dt_max > 0.0)) issues.push_back("solver.dt_max: must be positive");
  if (!(cfg.solver.kappa > 0.0)) issues.push_back("solver.kappa: must be positive");
  if (!(cfg.solver.newton_tol > 0.0)) issues.push_back("solver.newton_tol: must be positive");
  if (cfg.solver.newton_max_iter < 1) issues.push_back("solver.newton_max_iter: must be >= 1");
  if (cfg.solver.horizon < 0.0) issues.push_back("solver.T: must be nonnegative");
  if (cfg.eps_ladder.empty()) issues.push_back("eps.ladder: must not be empty");
  for (std::size_t k = 0; k < cfg.eps_ladder.size(); ++k) {
    if (!(cfg.eps_ladder[k] > 0.0)) {
      issues.push_back("eps.ladder: entries must be positive");
      break;
    }
    if (k && !(cfg.eps_ladder[k] < cfg.eps_ladder[k - 1])) {
      issues.push_back("eps.ladder: must be strictly decreasing");
      break;
    }
  }
  for (double t : cfg.output_times)
    if (t < 0.0) {
      issues.push_back("output.times: must be nonnegative");
      break;
    }
  try {
    const Preset ini = parse_preset(cfg.initial);
    if (ini.name != "euclidean" && ini.name != "quadratic" && ini.name != "hyperbolic-bg")
      issues.push_back("initial.metric: unknown preset '" + ini.name + "'");
  } catch (const Error& e) {
    issues.push_back(e.what());
  }
  if (!is_general(cfg.mode)) {
    try {
      const Preset df = parse_preset(cfg.defining);
      if (df.name != "ball" && df.name != "perturbed-ball")
        issues.push_back("domain.defining: unknown preset '" + df.name + "'");
    } catch (const Error& e) {
      issues.push_back(e.what());
    }
  } else {
    try {
      const Preset om = parse_preset(cfg.omega_m);
      if (om.name != "euclidean" && om.name != "quadratic" && om.name != "hyperbolic-bg")
        issues.push_back("omega_m.metric: unknown preset '" + om.name + "'");
    } catch (const Error& e) {
      issues.push_back(e.what());
    }
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error([&] {
        std::string m = "invalid scenario configuration:";
        for (const auto& s : issues) m += "\n  - " + s;
        return m;
      }()),
      issues_(std::move(issues)) {}

std::vector<double> ScenarioConfig::resolved_output_times() const {
  std::vector<double> times = output_times;
  if (times.empty() && solver.horizon > 0.0)
    for (int j = 1; j <= 10; ++j) times.push_back(solver.horizon * j / 10.0);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              times.end());
  while (!times.empty() && times.back() > solver.horizon + 1e-12) times.pop_back();
  return times;
}

std::string ScenarioConfig::resolved_output_dir() const {
  return output_dir.empty() ? "out/" + name : output_dir;
}

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig cfg;
  std::vector<std::string> issues;
  std::map<std::string, std::string> kv;
  std::string section;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back("line " + std::to_string(lineno) + ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = section + "." + trim(line.substr(0, eq));
    if (kv.count(key)) issues.push_back("duplicate key " + key);
    kv[key] = trim(line.substr(eq + 1));
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_num = [&](const std::string& key, double& dst) {
    if (auto v = take(key)) {
      try {
        std::size_t pos = 0;
        dst = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument(*v);
      } catch (const std::exception&) {
        issues.push_back(key + ": not a number: '" + *v + "'");
      }
    }
  };
  auto take_int = [&](const std::string& key, int& dst) {
    double d = dst;
    take_num(key, d);
    if (d != std::floor(d))
      issues.push_back(key + ": must be an integer");
    else
      dst = static_cast<int>(d);
  };

  if (auto v = take("scenario.name")) cfg.name = *v;
  if (auto v = take("scenario.mode")) {
    try {
      cfg.mode = mode_from_name(*v);
    } catch (const Error&) {
      issues.push_back("scenario.mode: unknown mode '" + *v + "'");
    }
  } else {
    issues.push_back("scenario.mode: required key missing");
  }
  take_int("scenario.n", cfg.n);
  take_int("grid.m", cfg.m);
  take_num("grid.y_max", cfg.y_max);
  take_num("grid.R2", cfg.R2);
  if (auto v = take("domain.defining")) cfg.defining = *v;
  if (auto v = take("initial.metric")) cfg.initial = *v;
  if (auto v = take("omega_m.metric")) cfg.omega_m = *v;
  take_num("solver.dt_max", cfg.solver.dt_max);
  take_num("solver.kappa", cfg.solver.kappa);
  take_num("solver.newton_tol", cfg.solver.newton_tol);
  take_int("solver.newton_max_iter", cfg.solver.newton_max_iter);
  take_num("solver.T", cfg.solver.horizon);
  if (auto v = take("eps.ladder")) cfg.eps_ladder = parse_list(*v, "eps.ladder", issues);
  if (auto v = take("output.times")) cfg.output_times = parse_list(*v, "output.times", issues);
  if (auto v = take("output.dir")) cfg.output_dir = *v;
  if (auto v = take("checks.enabled")) {
    if (*v == "true")
      cfg.checks_enabled = true;
    else if (*v == "false")
      cfg.checks_enabled = false;
    else
      issues.push_back("checks.enabled: expected true or false, got '" + *v + "'");
  }
  for (const auto& [key, _] : kv) issues.push_back("unknown key " + key);

  validate_config(cfg, issues);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "[scenario]\n"
     << "name = " << cfg.name << "\n"
     << "mode = " << mode_name(cfg.mode) << "\n"
     << "n = " << cfg.n << "\n\n"
     << "[grid]\n"
     << "m = " << cfg.m << "\n"
     << "y_max = " << num(cfg.y_max) << "\n"
     << "R2 = " << num(cfg.R2) << "\n\n";
  if (!is_general(cfg.mode))
    os << "[domain]\ndefining = " << cfg.defining << "\n\n";
  os << "[initial]\nmetric = " << cfg.initial << "\n\n";
  if (is_general(cfg.mode)) os << "[omega_m]\nmetric = " << cfg.omega_m << "\n\n";
  os << "[solver]\n"
     << "dt_max = " << num(cfg.solver.dt_max) << "\n"
     << "kappa = " << num(cfg.solver.kappa) << "\n"
     << "newton_tol = " << num(cfg.solver.newton_tol) << "\n"
     << "newton_max_iter = " << cfg.solver.newton_max_iter << "\n"
     << "T = " << num(cfg.solver.horizon) << "\n\n"
     << "[eps]\nladder = " << join(cfg.eps_ladder) << "\n\n"
     << "[output]\n";
  if (!cfg.output_times.empty()) os << "times = " << join(cfg.output_times) << "\n";
  if (!cfg.output_dir.empty()) os << "dir = " << cfg.output_dir << "\n";
  os << "\n[checks]\nenabled = " << (cfg.checks_enabled ? "true" : "false") << "\n";
  return os.str();
}

std::string scenario_fingerprint(const ScenarioConfig& cfg) {
  const std::string s = serialize_scenario(cfg);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const std::vector<PresetInfo>& preset_registry() {
  static const std::vector<PresetInfo> reg = {
      {"ball(R)", "defining", "phi = rho - R^2 on the ball of radius R in (0, 6]"},
      {"perturbed-ball(a, R)", "defining",
       "phi = rho + a rho^2 - (R^2 + a R^4), same ball, a in (-0.25, 2]"},
      {"euclidean(c)", "metric", "Phi = c rho, c > 0; incomplete flat metric"},
      {"quadratic(a, b)", "metric", "Phi = a rho + b rho^2/2, positive where a + b rho > 0"},
      {"hyperbolic-bg", "metric",
       "Phi = -log((R2 - rho)/R2); complete, constant negative curvature"},
  };
  return reg;
}

std::string list_presets() {
  std::ostringstream os;
  for (const auto& p : preset_registry())
    os << p.kind << "  " << p.signature << "\n    " << p.description << "\n";
  return os.str();
}

DefiningFunction make_defining(const std::string& preset, const GridPtr& grid) {
  const Preset p = parse_preset(preset);
  const RadialGrid& g = *grid;
  DefiningFunction df;
  df.grid = grid;
  df.phi.resize(g.m);
  df.phi_prime.resize(g.m);
  df.phi_second.resize(g.m);
  if (p.name == "ball") {
    const double R = p.args.empty() ? 1.0 : p.args[0];
    if (!(R > 0.0 && R <= 6.0)) throw Error("ball(R): R out of range (0, 6]");
    if (std::abs(R * R - g.R2) > 1e-12 * g.R2)
      throw Error("ball(R): R^2 = " + num(R * R) + " disagrees with grid R2 = " + num(g.R2));
    for (int i = 0; i < g.m; ++i) {
      df.phi[i] = g.rho[i] - g.R2;
      df.phi_prime[i] = 1.0;
      df.phi_second[i] = 0.0;
    }
  } else if (p.name == "perturbed-ball") {
    const double a = p.args.empty() ? 0.5 : p.args[0];
    const double R = p.args.size() > 1 ? p.args[1] : 1.0;
    if (!(a > -0.25 && a <= 2.0)) throw Error("perturbed-ball(a,R): a out of range (-0.25, 2]");
    if (!(R > 0.0 && R <= 6.0)) throw Error("perturbed-ball(a,R): R out of range (0, 6]");
    if (std::abs(R * R - g.R2) > 1e-12 * g.R2)
      throw Error("perturbed-ball(a,R): R^2 disagrees with grid R2 = " + num(g.R2));
    const double c = g.R2 + a * g.R2 * g.R2;
    for (int i = 0; i < g.m; ++i) {
      df.phi[i] = g.rho[i] + a * g.rho[i] * g.rho[i] - c;
      df.phi_prime[i] = 1.0 + 2.0 * a * g.rho[i];
      df.phi_second[i] = 2.0 * a;
    }
  } else {
    throw Error("unknown defining preset '" + p.name + "'");
  }
  validate_defining_function(df);
  return df;
}

RadialMetric make_metric(const std::string& preset, const GridPtr& grid) {
  const Preset p = parse_preset(preset);
  const RadialGrid& g = *grid;
  RadialMetric out;
  out.potential.grid = grid;
  out.potential.values.resize(g.m);
  out.eig.grid = grid;
  out.eig.A.resize(g.m);
  out.eig.B.resize(g.m);
  if (p.name == "euclidean") {
    const double c = p.args.empty() ? 1.0 : p.args[0];
    if (!(c > 0.0)) throw Error("euclidean(c): c must be positive");
    for (int i = 0; i < g.m; ++i) {
      out.potential.values[i] = c * g.rho[i];
      out.eig.A[i] = c;
      out.eig.B[i] = c;
    }
  } else if (p.name == "quadratic") {
    const double a = p.args.empty() ? 1.0 : p.args[0];
    const double b = p.args.size() > 1 ? p.args[1] : 0.0;
    for (int i = 0; i < g.m; ++i) {
      out.potential.values[i] = a * g.rho[i] + 0.5 * b * g.rho[i] * g.rho[i];
      out.eig.A[i] = a + b * g.rho[i];
      out.eig.B[i] = a + 2.0 * b * g.rho[i];
    }
  } else if (p.name == "hyperbolic-bg") {
    // Phi = -log((R2 - rho)/R2) = y exactly in the compactified chart.
    for (int i = 0; i < g.m; ++i) {
      out.potential.values[i] = g.y[i];
      out.eig.A[i] = 1.0 / (g.R2 - g.rho[i]);
      out.eig.B[i] = g.R2 / ((g.R2 - g.rho[i]) * (g.R2 - g.rho[i]));
    }
  } else {
    throw Error("unknown metric preset '" + p.name + "'");
  }
  require_positive(out.eig, "metric preset");
  return out;
}

BackgroundFamily build_family(const ScenarioConfig& cfg, FlowMode mode,
                              const GridPtr& grid) {
  BackgroundFamily bf;
  bf.mode = mode;
  bf.n = cfg.n;
  bf.lambda = is_general(mode) ? 1.0 : cfg.n + 1.0;
  bf.omega0 = make_metric(cfg.initial, grid);
  if (!is_general(mode)) {
    const DefiningFunction df = make_defining(cfg.defining, grid);
    bf.base = background_metric(df);
    bf.reference = bf.base;
    bf.fmap = cheng_yau_f(df, cfg.n);
  } else {
    RadialMetric om = make_metric(cfg.omega_m, grid);
    bf.reference = om;
    bf.fmap.assign(grid->m, 0.0);
    if (parse_preset(cfg.omega_m).name == "hyperbolic-bg") {
      // Ric(omega_M) = -(n+1) omega_M exactly for this preset.
      bf.base.potential.grid = grid;
      bf.base.potential.values.resize(grid->m);
      bf.base.eig.grid = grid;
      bf.base.eig.A.resize(grid->m);
      bf.base.eig.B.resize(grid->m);
      for (int i = 0; i < grid->m; ++i) {
        bf.base.potential.values[i] = (cfg.n + 1.0) * om.potential.values[i];
        bf.base.eig.A[i] = (cfg.n + 1.0) * om.eig.A[i];
        bf.base.eig.B[i] = (cfg.n + 1.0) * om.eig.B[i];
      }
    } else {
      const Field rp = ricci_potential_from_eigenvalues(om.eig, cfg.n);
      bf.base.potential.grid = grid;
      bf.base.potential.values.resize(grid->m);
      for (int i = 0; i < grid->m; ++i) bf.base.potential.values[i] = -rp[i];
      bf.base.eig = metric_eigenvalues(bf.base.potential);
      require_positive(bf.base.eig, "-Ric(omega_M)");
    }
  }
  return bf;
}

std::string counterpart_defining(const std::string& preset) {
  const Preset p = parse_preset(preset);
  if (p.name == "ball") {
    const double R = p.args.empty() ? 1.0 : p.args[0];
    return "perturbed-ball(0.5, " + num(R) + ")";
  }
  const double R = p.args.size() > 1 ? p.args[1] : 1.0;
  return "ball(" + num(R) + ")";
}

ScenarioRun execute_scenario(const ScenarioConfig& cfg) {
  {
    std::vector<std::string> issues;
    validate_config(cfg, issues);
    if (!issues.empty()) throw ConfigError(std::move(issues));
  }
  ScenarioRun run;
  run.config = cfg;
  run.fingerprint = scenario_fingerprint(cfg);
  run.grid = make_grid(cfg.n, cfg.R2, cfg.y_max, cfg.m);
  if (!is_general(cfg.mode)) run.df = make_defining(cfg.defining, run.grid);
  run.bf_primary = build_family(cfg, cfg.mode, run.grid);

  const std::vector<double> times = cfg.resolved_output_times();
  std::vector<double> norm_times = times;
  const double T = cfg.solver.horizon;
  const bool primary_normalized = is_normalized(cfg.mode);
  if (cfg.checks_enabled) {
    for (double t : {0.2, 0.5, 1.0, 2.0})
      if (t <= T + 1e-12) run.rescale_times.push_back(t);
    if (primary_normalized) {
      norm_times.insert(norm_times.end(), run.rescale_times.begin(),
                        run.rescale_times.end());
      std::sort(norm_times.begin(), norm_times.end());
      norm_times.erase(std::unique(norm_times.begin(), norm_times.end(),
                                   [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                       norm_times.end());
    }
  }

  run.primary = epsilon_continuation(run.bf_primary, cfg.solver, cfg.eps_ladder,
                                     primary_normalized ? norm_times : times);

  if (!cfg.checks_enabled) {
    run.report.fingerprint = run.fingerprint;
    return run;
  }

  const FlowMode unnorm_mode =
      is_general(cfg.mode) ? FlowMode::GeneralUnnormalized : FlowMode::Unnormalized;
  const FlowMode norm_mode =
      is_general(cfg.mode) ? FlowMode::GeneralNormalized : FlowMode::Normalized;

  if (primary_normalized) {
    run.bf_norm = run.bf_primary;
    run.norm_ladder = run.primary;
    run.bf_unnorm = build_family(cfg, unnorm_mode, run.grid);
    SolverConfig ucfg = cfg.solver;
    ucfg.horizon = std::min(1.0, T);
    std::vector<double> utimes;
    if (ucfg.horizon > 0.0)
      for (int j = 1; j <= 10; ++j) utimes.push_back(ucfg.horizon * j / 10.0);
    run.unnorm_ladder = epsilon_continuation(*run.bf_unnorm, ucfg, cfg.eps_ladder, utimes);
  } else {
    run.bf_unnorm = run.bf_primary;
    run.unnorm_ladder = run.primary;
    run.bf_norm = build_family(cfg, norm_mode, run.grid);
    if (T > 0.0) {
      ContinuationResult nl;
      nl.trajectories.push_back(
          run_flow(*run.bf_norm, cfg.solver, cfg.eps_ladder.back(), norm_times));
      run.norm_ladder = std::move(nl);
    }
  }

  // Long unnormalized run covering the image of the rescale times.
  if (!run.rescale_times.empty()) {
    const double lam = run.bf_unnorm->lambda;
    std::vector<double> stimes;
    for (double t : run.rescale_times) stimes.push_back(unnormalized_time(t, lam));
    SolverConfig lcfg = cfg.solver;
    lcfg.horizon = stimes.back();
    run.unnorm_long = run_flow(*run.bf_unnorm, lcfg, cfg.eps_ladder.back(), stimes);
  }

  const double oracle_tol = std::max(1e-11, cfg.solver.newton_tol);
  run.oracle = solve_limit(*run.bf_norm, oracle_tol);
  if (!is_general(cfg.mode)) {
    ScenarioConfig alt = cfg;
    alt.defining = counterpart_defining(cfg.defining);
    run.bf_alt = build_family(alt, norm_mode, run.grid);
    run.oracle_alt = solve_limit(*run.bf_alt, oracle_tol);
  }

  ValidatorContext ctx;
  ctx.bf_unnorm = run.bf_unnorm ? &*run.bf_unnorm : nullptr;
  ctx.bf_norm = run.bf_norm ? &*run.bf_norm : nullptr;
  ctx.unnorm_ladder = run.unnorm_ladder ? &*run.unnorm_ladder : nullptr;
  ctx.norm_ladder = run.norm_ladder ? &*run.norm_ladder : nullptr;
  ctx.unnorm_long = run.unnorm_long ? &*run.unnorm_long : nullptr;
  ctx.oracle = run.oracle ? &*run.oracle : nullptr;
  ctx.oracle_alt = run.oracle_alt ? &*run.oracle_alt : nullptr;
  ctx.bf_alt = run.bf_alt ? &*run.bf_alt : nullptr;
  ctx.df = run.df ? &*run.df : nullptr;
  ctx.cfg = cfg.solver;
  ctx.rescale_times = run.rescale_times;
  run.report = run_checks(ctx);
  run.report.fingerprint = run.fingerprint;
  return run;
}

int run_scenario(const ScenarioConfig& cfg, bool quiet) {
  ScenarioRun run;
  try {
    run = execute_scenario(cfg);
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  }
  try {
    namespace fs = std::filesystem;
    const std::string dir = cfg.resolved_output_dir();
    fs::create_directories(dir);
    write_text_file(dir + "/scenario.cfg", serialize_scenario(cfg));
    for (std::size_t k = 0; k < run.primary.trajectories.size(); ++k) {
      const std::string stem = dir + "/trajectory-" + std::to_string(k);
      write_trajectory_csv(stem + ".csv", run.primary.trajectories[k], *run.grid,
                           run.fingerprint);
      write_trajectory_json(stem + ".json", run.primary.trajectories[k], run.fingerprint);
    }
    if (run.oracle)
      write_oracle_csv(dir + "/oracle.csv", *run.grid, run.oracle->u_inf, run.fingerprint);
    if (cfg.checks_enabled) {
      write_report_json(dir + "/report.json", run.report);
      write_report_text(dir + "/report.txt", run.report);
    }
    if (!quiet) std::cout << format_report(run.report);
  } catch (const std::exception& e) {
    std::cerr << "i/o failure: " << e.what() << "\n";
    return 4;
  }
  if (!cfg.checks_enabled) return 0;
  return run.report.all_passed() ? 0 : 2;
}

}  // namespace krf

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "krf/io.hpp"
#include "krf/scenario.hpp"

namespace fs = std::filesystem;
using namespace krf;

namespace {

ScenarioConfig load_config(const std::string& path) {
  return parse_scenario(read_text_file(path));
}

std::vector<double> parse_ladder_flag(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

int cmd_run(const std::string& file, int refine, const std::string& ladder,
            const std::string& out, bool quiet) {
  ScenarioConfig cfg = load_config(file);
  if (!ladder.empty()) cfg.eps_ladder = parse_ladder_flag(ladder);
  if (!out.empty()) cfg.output_dir = out;
  int worst = 0;
  for (int level = 0; level <= refine; ++level) {
    ScenarioConfig level_cfg = cfg;
    if (level > 0) {
      level_cfg.m = (level_cfg.m - 1) * (1 << level) + 1;
      level_cfg.name = cfg.name + "-r" + std::to_string(level);
      level_cfg.output_dir = cfg.resolved_output_dir() + "-r" + std::to_string(level);
    }
    if (!quiet && refine > 0)
      std::cout << "== " << level_cfg.name << " (m = " << level_cfg.m << ") ==\n";
    worst = std::max(worst, run_scenario(level_cfg, quiet));
  }
  return worst;
}

int cmd_oracle(const std::string& file, const std::string& out, bool quiet) {
  ScenarioConfig cfg = load_config(file);
  const GridPtr grid = make_grid(cfg.n, cfg.R2, cfg.y_max, cfg.m);
  const FlowMode norm_mode =
      is_general(cfg.mode) ? FlowMode::GeneralNormalized : FlowMode::Normalized;
  const BackgroundFamily bf = build_family(cfg, norm_mode, grid);
  KESolution sol;
  try {
    sol = solve_limit(bf, std::max(1e-11, cfg.solver.newton_tol));
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  }
  const std::string dir = out.empty() ? cfg.resolved_output_dir() : out;
  fs::create_directories(dir);
  write_oracle_csv(dir + "/oracle.csv", *grid, sol.u_inf, scenario_fingerprint(cfg));
  if (!quiet)
    std::cout << "limit equation solved in " << sol.newton_iterations
              << " Newton iterations, residual " << sol.residual_norm << "\n"
              << "wrote " << dir << "/oracle.csv\n";
  return 0;
}

int cmd_check(const std::string& dir, bool quiet) {
  const ScenarioConfig cfg = load_config(dir + "/scenario.cfg");
  const GridPtr grid = make_grid(cfg.n, cfg.R2, cfg.y_max, cfg.m);
  const BackgroundFamily bf = build_family(cfg, cfg.mode, grid);
  std::optional<DefiningFunction> df;
  if (!is_general(cfg.mode)) df = make_defining(cfg.defining, grid);

  ContinuationResult ladder;
  for (std::size_t k = 0;; ++k) {
    const std::string stem = dir + "/trajectory-" + std::to_string(k);
    if (!fs::exists(stem + ".csv")) break;
    ladder.trajectories.push_back(read_trajectory_csv(stem + ".csv", stem + ".json"));
  }
  if (ladder.trajectories.empty()) {
    std::cerr << "no trajectory files in " << dir << "\n";
    return 4;
  }
  for (std::size_t k = 0; k + 1 < ladder.trajectories.size(); ++k) {
    const Trajectory& a = ladder.trajectories[k];
    const Trajectory& b = ladder.trajectories[k + 1];
    double d = 0.0;
    for (std::size_t s = 0; s < std::min(a.snapshots.size(), b.snapshots.size()); ++s)
      for (std::size_t i = 0; i < a.snapshots[s].u.size(); ++i)
        d = std::max(d, std::abs(a.snapshots[s].u[i] - b.snapshots[s].u[i]));
    ladder.deltas.push_back(d);
  }

  std::optional<KESolution> oracle;
  if (fs::exists(dir + "/oracle.csv")) {
    KESolution sol;
    std::istringstream in(read_text_file(dir + "/oracle.csv"));
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const std::size_t c2 = line.rfind(',');
      sol.u_inf.push_back(std::stod(line.substr(c2 + 1)));
    }
    oracle = std::move(sol);
  }

  ValidatorContext ctx;
  ctx.cfg = cfg.solver;
  ctx.df = df ? &*df : nullptr;
  if (is_normalized(cfg.mode)) {
    ctx.bf_norm = &bf;
    ctx.norm_ladder = &ladder;
    ctx.oracle = oracle ? &*oracle : nullptr;
  } else {
    ctx.bf_unnorm = &bf;
    ctx.unnorm_ladder = &ladder;
  }
  EstimateReport report = run_checks(ctx);
  report.fingerprint = scenario_fingerprint(cfg);
  if (!quiet) std::cout << format_report(report);
  return report.all_passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for radial Kähler-Ricci flow on "
               "pseudoconvex domains"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress report output");

  std::string run_file, run_ladder, run_out, oracle_file, oracle_out, check_dir;
  int refine = 0;

  CLI::App* run = app.add_subcommand("run", "solve a scenario and validate the estimates");
  run->add_option("scenario", run_file, "scenario file")->required();
  run->add_option("--grid-refine", refine, "rerun at doubled resolution this many times");
  run->add_option("--eps-ladder", run_ladder, "override the eps ladder, comma separated");
  run->add_option("--out", run_out, "output directory");

  CLI::App* oracle = app.add_subcommand("oracle", "solve only the elliptic limit equation");
  oracle->add_option("scenario", oracle_file, "scenario file")->required();
  oracle->add_option("--out", oracle_out, "output directory");

  CLI::App* check = app.add_subcommand("check", "re-validate stored trajectories");
  check->add_option("dir", check_dir, "directory with scenario.cfg and trajectories")
      ->required();

  app.add_subcommand("presets", "list the preset registry");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_file, refine, run_ladder, run_out, quiet);
    if (oracle->parsed()) return cmd_oracle(oracle_file, oracle_out, quiet);
    if (check->parsed()) return cmd_check(check_dir, quiet);
    std::cout << list_presets();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

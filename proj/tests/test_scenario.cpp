#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>

#include "doctest.h"
#include "krf/io.hpp"
#include "krf/scenario.hpp"

using namespace krf;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = "[scenario]\nmode = normalized\n";

std::vector<std::string> issues_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool any_issue_contains(const std::vector<std::string>& issues, const std::string& what) {
  for (const auto& s : issues)
    if (s.find(what) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("minimal config takes the documented defaults") {
  const ScenarioConfig cfg = parse_scenario(kMinimal);
  CHECK(cfg.mode == FlowMode::Normalized);
  CHECK(cfg.n == 2);
  CHECK(cfg.m == 801);
  CHECK(cfg.y_max == 12.0);
  CHECK(cfg.defining == "ball(1)");
  CHECK(cfg.initial == "euclidean(0.5)");
  CHECK(cfg.eps_ladder == std::vector<double>{0.1, 0.05, 0.025, 0.0125});
  CHECK(cfg.resolved_output_dir() == "out/scenario");
  const auto times = cfg.resolved_output_times();
  REQUIRE(times.size() == 10);
  CHECK(times.front() == doctest::Approx(0.1));
  CHECK(times.back() == doctest::Approx(1.0));
  // canonical fingerprint of the default configuration, frozen
  CHECK(scenario_fingerprint(ScenarioConfig{}) == "468236e8228cc5df");
}

TEST_CASE("all violations are reported together") {
  const auto issues = issues_of(
      "[scenario]\nmode = normalized\nn = 9\n"
      "[grid]\nm = 10\n"
      "[eps]\nladder = 0.1, 0.2\n"
      "[bogus]\nkey = 1\n");
  CHECK(issues.size() >= 4);
  CHECK(any_issue_contains(issues, "dimension out of range [1,4]"));
  CHECK(any_issue_contains(issues, "out of range [51,20001]"));
  CHECK(any_issue_contains(issues, "strictly decreasing"));
  CHECK(any_issue_contains(issues, "unknown key bogus.key"));
}

TEST_CASE("parser diagnostics") {
  CHECK(any_issue_contains(issues_of("[scenario]\nmode = sideways\n"), "unknown mode"));
  CHECK(any_issue_contains(issues_of("mode = normalized\nno equals here\n[scenario]\n"),
                           "expected key = value"));
  CHECK(any_issue_contains(
      issues_of("[scenario]\nmode = normalized\nmode = normalized\n"), "duplicate key"));
  CHECK(any_issue_contains(issues_of("[scenario\nmode = normalized\n"),
                           "malformed section header"));
  CHECK(any_issue_contains(issues_of("[scenario]\nname = x\n"), "required key missing"));
  CHECK(any_issue_contains(issues_of("[scenario]\nmode = normalized\nn = 2.5\n"),
                           "must be an integer"));
  CHECK(any_issue_contains(
      issues_of("[scenario]\nmode = normalized\n[solver]\ndt_max = fast\n"),
      "not a number"));
  CHECK(any_issue_contains(
      issues_of("[scenario]\nmode = normalized\n[checks]\nenabled = maybe\n"),
      "expected true or false"));
}

TEST_CASE("serialization round trip preserves the fingerprint") {
  ScenarioConfig cfg = parse_scenario(kMinimal);
  cfg.name = "round-trip";
  cfg.mode = FlowMode::GeneralNormalized;
  cfg.omega_m = "hyperbolic-bg";
  cfg.eps_ladder = {0.2, 0.1};
  cfg.output_times = {0.5, 1.0};
  cfg.solver.horizon = 1.0;
  const ScenarioConfig back = parse_scenario(serialize_scenario(cfg));
  CHECK(scenario_fingerprint(back) == scenario_fingerprint(cfg));
  CHECK(back.omega_m == cfg.omega_m);
  CHECK(back.eps_ladder == cfg.eps_ladder);
  // general modes drop the [domain] section from the canonical form
  CHECK(serialize_scenario(cfg).find("[domain]") == std::string::npos);
}

TEST_CASE("preset registry and counterpart defining functions") {
  const std::string listing = list_presets();
  CHECK(listing.find("ball(R)") != std::string::npos);
  CHECK(listing.find("perturbed-ball(a, R)") != std::string::npos);
  CHECK(listing.find("hyperbolic-bg") != std::string::npos);

  CHECK(counterpart_defining("ball(1)") == "perturbed-ball(0.5, 1)");
  CHECK(counterpart_defining("perturbed-ball(0.5, 1)") == "ball(1)");

  auto g = make_grid(2, 1.0, 8.0, 101);
  CHECK_THROWS_AS(make_defining("ball(2)", g), Error);  // R^2 != grid R2
  CHECK_THROWS_AS(make_defining("torus(1)", g), Error);
  CHECK_THROWS_AS(make_metric("euclidean(-1)", g), Error);
  const RadialMetric hyp = make_metric("hyperbolic-bg", g);
  for (int i = 0; i < g->m; i += 25)
    CHECK(hyp.eig.A[i] == doctest::Approx(1.0 / (1.0 - g->rho[i])).epsilon(1e-12));
}

TEST_CASE("scenario run writes its artifacts and reproduces bit-identically") {
  ScenarioConfig cfg = parse_scenario(kMinimal);
  cfg.name = "artifact-run";
  cfg.m = 101;
  cfg.y_max = 8.0;
  cfg.solver.horizon = 1.0;
  cfg.solver.dt_max = 0.02;
  cfg.eps_ladder = {0.1, 0.05, 0.025};
  cfg.output_times = {0.5, 1.0};
  cfg.output_dir = "test-scenario-out";
  fs::remove_all(cfg.output_dir);

  CHECK(run_scenario(cfg, true) == 0);
  for (const char* f : {"scenario.cfg", "trajectory-0.csv", "trajectory-0.json",
                        "trajectory-2.csv", "oracle.csv", "report.json", "report.txt"})
    CHECK(fs::exists(fs::path(cfg.output_dir) / f));

  const std::string csv = read_text_file(cfg.output_dir + "/trajectory-0.csv");
  CHECK(csv.find("fingerprint=" + scenario_fingerprint(cfg)) != std::string::npos);
  CHECK(csv.find(kToolVersion) != std::string::npos);

  CHECK(run_scenario(cfg, true) == 0);
  CHECK(read_text_file(cfg.output_dir + "/trajectory-0.csv") == csv);

  // the written trajectory reloads losslessly
  const Trajectory back = read_trajectory_csv(cfg.output_dir + "/trajectory-1.csv",
                                              cfg.output_dir + "/trajectory-1.json");
  CHECK(back.eps == 0.05);
  CHECK(back.mode == FlowMode::Normalized);
  REQUIRE(back.snapshots.size() >= 3);  // t = 0 plus requested and rescale times
  CHECK(back.snapshots[0].t == 0.0);
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("zero-horizon scenario is a no-op that still passes") {
  ScenarioConfig cfg = parse_scenario(kMinimal);
  cfg.name = "zero-horizon";
  cfg.m = 101;
  cfg.y_max = 8.0;
  cfg.solver.horizon = 0.0;
  cfg.output_dir = "test-scenario-zero";
  fs::remove_all(cfg.output_dir);
  CHECK(run_scenario(cfg, true) == 0);
  const std::string report = read_text_file(cfg.output_dir + "/report.txt");
  CHECK(report.find("not-applicable") != std::string::npos);
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("solver failure surfaces as exit code 3") {
  ScenarioConfig cfg = parse_scenario(kMinimal);
  cfg.name = "starved-newton";
  cfg.mode = FlowMode::Unnormalized;
  cfg.m = 101;
  cfg.y_max = 8.0;
  cfg.solver.horizon = 1.0;
  cfg.solver.dt_max = 1.0;
  cfg.solver.kappa = 1e9;
  cfg.solver.newton_tol = 1e-13;
  cfg.solver.newton_max_iter = 1;
  cfg.eps_ladder = {0.1};
  cfg.checks_enabled = false;
  cfg.output_dir = "test-scenario-fail";
  CHECK(run_scenario(cfg, true) == 3);
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("execute_scenario rejects an invalid config wholesale") {
  ScenarioConfig cfg;
  cfg.n = 9;
  cfg.m = 10;
  CHECK_THROWS_AS(execute_scenario(cfg), ConfigError);
}

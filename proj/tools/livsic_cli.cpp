// Command line front end: run, validate, list-experiments.
// Exit status: 0 pass, 2 failed scientific verdict, 1 operational error.

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "livsic/scenario.hpp"

using namespace livsic;

namespace {

void print_issues(const ConfigError& e) {
  for (const auto& i : e.issues()) std::cerr << "error: " << (i.path.empty() ? "(document)" : i.path) << ": " << i.reason << '\n';
}

int run(const std::string& path, std::optional<std::uint64_t> seed, std::optional<std::string> out, int jobs) {
  ScenarioConfig cfg = load_config(path);
  if (seed) cfg.seed = *seed;
  if (out) cfg.output_dir = *out;
  const Exec exec = jobs == 1 ? Exec::serial() : Exec::openmp(jobs);
  RunResult r = run_scenario(cfg, exec);
  emit_tables(r, cfg.output_dir);

  std::cout << "scenario " << r.scenario_hash << "  " << to_string(cfg.experiment) << "  seed " << cfg.seed << '\n';
  for (const auto& v : r.verdicts)
    std::cout << (v.pass ? "  pass  " : "  FAIL  ") << v.name << "  " << v.detail << '\n';
  if (!r.phase.empty()) std::cout << "phase: " << r.phase << '\n';
  if (r.error) std::cerr << "error [" << r.error->kind << "]: " << r.error->message << '\n';
  std::printf("wrote %zu files to %s (%.2f s)\n", r.manifest.size(), cfg.output_dir.c_str(), r.wall_clock);
  return r.exit_code();
}

int validate(const std::string& path) {
  const ScenarioConfig cfg = load_config(path);
  if (!(parse_config(emit_config(cfg)) == cfg)) {
    std::cerr << "error: configuration does not survive an emit/parse round trip\n";
    return 1;
  }
  std::cout << "ok " << scenario_hash(cfg) << "  " << to_string(cfg.experiment) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Livsic-type cocycle experiments over hyperbolic bases"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int jobs = 0;
  app.add_option("--seed", seed, "override the scenario seed");
  app.add_option("--out", out, "override the output directory");
  app.add_option("--jobs", jobs, "worker threads (1: serial reference, 0: all cores)")->check(CLI::NonNegativeNumber);

  std::string config;
  auto* run_cmd = app.add_subcommand("run", "run a scenario and write its tables");
  run_cmd->add_option("config", config, "scenario JSON")->required();
  auto* validate_cmd = app.add_subcommand("validate", "check a scenario without running it");
  validate_cmd->add_option("config", config, "scenario JSON")->required();
  auto* list_cmd = app.add_subcommand("list-experiments", "print the experiment kinds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list_cmd) {
      for (auto e : all_experiments()) std::printf("%-20s %s\n", to_string(e), describe(e));
      return 0;
    }
    if (*validate_cmd) return validate(config);
    return run(config, seed, out, jobs);
  } catch (const ConfigError& e) {
    print_issues(e);
    return 1;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

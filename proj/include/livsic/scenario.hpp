#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "livsic/io.hpp"

namespace livsic {

struct Verdict {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct ErrorRecord {
  std::string kind;
  std::string message;
};

struct RunResult {
  ScenarioConfig config;
  std::string scenario_hash;
  std::vector<Verdict> verdicts;
  // Scalar outputs in the order they were produced. Reproduced bit for bit
  // by any rerun with the same config and seed.
  std::vector<std::pair<std::string, double>> metrics;
  std::map<std::string, double> tolerances;
  std::vector<Table> tables;
  std::vector<std::pair<std::string, nlohmann::json>> documents;
  std::string phase;  // sections: coboundary-consistent | return-claim-violated
  std::vector<std::string> manifest;
  double wall_clock = 0;
  std::optional<ErrorRecord> error;

  bool pass() const;
  /// 0 on pass, 2 on a failed scientific verdict, 1 on an operational error.
  int exit_code() const;
  std::optional<double> metric(const std::string& name) const;
  const Verdict* verdict(const std::string& name) const;
};

/// Runs the configured experiment. Module errors are caught and recorded;
/// obstructions (POO, return claim) count as scientific failures.
RunResult run_scenario(const ScenarioConfig& cfg, const Exec& exec = default_exec());

/// Writes every table and document plus summary.json into dir and fills the
/// manifest. On an error record only the summary is written.
void emit_tables(RunResult& result, const std::filesystem::path& dir);

nlohmann::json summary_json(const RunResult& result);
/// Problems found when checking a summary document against its schema.
std::vector<std::string> validate_summary(const nlohmann::json& summary);

}  // namespace livsic

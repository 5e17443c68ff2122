#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "livsic/cocycle.hpp"
#include "livsic/error.hpp"

namespace livsic {

enum class Experiment { poo, lyapunov, domination, solve, closing_demo, sections, contracting_search, theorem31_suite };

const char* to_string(Experiment e);
std::optional<Experiment> parse_experiment(const std::string& s);
const std::vector<Experiment>& all_experiments();
const char* describe(Experiment e);

struct ConfigIssue {
  std::string path;  // dotted JSON path, e.g. "base.matrix"
  std::string reason;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

struct BaseConfig {
  BaseKind kind = BaseKind::cat_map;
  IntMatrix2 matrix{{{2, 1}, {1, 1}}};
  std::vector<std::vector<int>> transition{{1, 1}, {1, 1}};
  double theta = 0.5;
  bool operator==(const BaseConfig&) const = default;
};

/// Only the fields used by the family are read and emitted.
struct CocycleConfig {
  CocycleFamily family = CocycleFamily::rotation;
  FiberKind fiber = FiberKind::circle;
  double alpha = 1;
  BaseFunction tau;                 // rotation
  BumpField bump;                   // arnold_bump, locally_constant_sft, circle coboundary_generated
  LinearGenerator generator;        // linear_family, linear coboundary_generated
  double t = 1;                     // linear parameter
  int table_resolution = 0;         // grid_table
  std::vector<std::array<double, 3>> table;  // grid_table: bump (a, b, c) per cell
  bool operator==(const CocycleConfig&) const = default;
};

/// Experiment knobs. Zero means "the default for this base".
struct RunSettings {
  long period = 6;
  long orbits = 20;
  long length = 100000;
  int grid = 0;
  int fiber_grid = CircleDiffeo::default_grid;
  std::optional<double> beta;  // defaults to the cocycle's alpha
  long ell_max = 20;
  long steps = 1000000;
  long near_returns = 100;
  std::vector<int> resolutions;  // residual-vs-resolution curve
  std::vector<double> t_grid;    // parameter continuity sweep (linear_family)
  int anchors = 32;
  long leaves = 100;
  long horizon = 1000;
  int export_fiber_stride = 16;  // fiber-index stride of grid CSV rows
  bool operator==(const RunSettings&) const = default;
};

struct ScenarioConfig {
  BaseConfig base;
  CocycleConfig cocycle;
  Experiment experiment = Experiment::poo;
  RunSettings run;
  std::map<std::string, double> tolerances;  // overrides only
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  bool operator==(const ScenarioConfig&) const = default;
};

/// Documented defaults; every run echoes the effective values.
const std::map<std::string, double>& default_tolerances();
double tolerance(const ScenarioConfig& cfg, const std::string& name);
std::map<std::string, double> effective_tolerances(const ScenarioConfig& cfg);

/// Throws ConfigError listing every problem found.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json emit_config(const ScenarioConfig& cfg);

/// 64-bit FNV-1a of the canonical config text, in hex.
std::string scenario_hash(const ScenarioConfig& cfg);

std::shared_ptr<const HyperbolicBase> build_base(const BaseConfig& b);
SkewSystem build_system(const ScenarioConfig& cfg, std::shared_ptr<const HyperbolicBase> base);

using TableCell = std::variant<long, double, std::string>;

struct Table {
  std::string name;                   // file name inside the output directory
  std::vector<std::string> preamble;  // written as "# ..." lines before the header
  std::vector<std::string> columns;
  std::vector<std::vector<TableCell>> rows;
};

/// Shortest text that reads back to the same double.
std::string format_number(double v);
void write_csv(const Table& table, const std::filesystem::path& dir);

/// Parses a CSV written by write_csv: preamble lines, header, rows as text.
struct CsvContent {
  std::vector<std::string> preamble;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};
CsvContent read_csv(const std::filesystem::path& path);

/// Column sets of the documented CSV files.
extern const std::vector<std::string> sweep_columns;
extern const std::vector<std::string> domination_columns;
extern const std::vector<std::string> long_columns;
extern const std::vector<std::string> grid_columns;

}  // namespace livsic

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "semiheat/evolution.hpp"
#include "semiheat/model.hpp"

namespace semiheat {

using Json = nlohmann::json;

/// Invalid configuration; field() is the dotted path, e.g. "params.p".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// A module failure during an experiment run.
class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { solve, morrey, smoothing, energy, picard, threshold, dependence, hypotheses };

std::string to_string(ExperimentKind kind);
/// Throws ConfigError("kind") for unknown names.
ExperimentKind experiment_kind_from_string(const std::string& name);
const std::vector<ExperimentKind>& all_experiment_kinds();

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::solve;
  ModelParams params;
  double r_max = 0.0;
  int intervals = 0;
  BoundaryTag boundary = BoundaryTag::dirichlet_at_rmax;
  SolverConfig solver;
  Profile data;
  Json options = Json::object();
  std::string output_dir;
  std::uint64_t seed = 0;
  Json document;  ///< the parsed document, hashed into the manifest

  /// Validates every block, including the kind-specific options.
  static ExperimentConfig parse(const Json& doc);
  RadialGrid grid() const { return RadialGrid(params.n, r_max, intervals); }
};

/// Ready-to-run document for each kind (n = 5, p = 3).
Json default_config(ExperimentKind kind);

using Cell = std::variant<double, std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

/// `.` decimal separator, 17 significant digits, LF line endings.
std::string format_csv(const CsvTable& table);

struct Artifact {
  std::string name;
  std::variant<CsvTable, Json> content;
};

struct InvariantRecord {
  std::string name;
  bool passed = false;
  double value = 0.0;
  bool asserted = true;  ///< report-only records never affect the exit code
};

struct PlotPoint {
  std::string series;
  double x;
  double y;
};

struct Bundle {
  ExperimentKind kind = ExperimentKind::solve;
  std::vector<Artifact> artifacts;
  std::vector<InvariantRecord> invariants;
  std::vector<PlotPoint> plot;

  bool passed() const;
};

/// Dispatches to the module pipeline. Module exceptions surface as PipelineError.
Bundle run_experiment(const ExperimentConfig& config);

/// Long-format `series,x,y` table of the bundle's plot points.
CsvTable emit_plot_data(const Bundle& bundle);

/// 64-bit FNV-1a of the compact dump of `doc`.
std::uint64_t config_hash(const Json& doc);

Json make_manifest(const Bundle& bundle, const ExperimentConfig& config, double wall_time);

/// Writes every artifact, plot_data.csv and finally manifest.json into `dir`.
Json write_bundle(const Bundle& bundle, const ExperimentConfig& config, const std::string& dir, double wall_time);

}  // namespace semiheat

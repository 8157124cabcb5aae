#pragma once

#include <string>
#include <vector>

#include "semiheat/experiment.hpp"
#include "semiheat/model.hpp"
#include "semiheat/morrey.hpp"

namespace semiheat::detail {

/// Typed access to a JSON object with ConfigError paths.
class Reader {
 public:
  Reader(const Json& node, std::string path);

  bool has(const std::string& key) const;
  Reader child(const std::string& key) const;
  const Json& raw(const std::string& key) const;

  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;

  std::string path(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  const Json& node_;
  std::string path_;
};

struct SolveOptions {
  bool checkpoint_fields = true;
};

struct MorreyRunOptions {
  double q = 2.0;
  double lambda = 0.0;
  bool polish = false;
  int random_probes = 64;
};

struct SmoothingRunOptions {
  Exponent from_q{2.0};
  Exponent to_q = Exponent::infinity();
  double lambda = 0.0;
  double t_first = 1e-2;
  double t_last = 1e2;
  int t_count = 20;
};

struct EnergyRunOptions {
  std::vector<double> T{2.0, 5.0, 10.0};
  double ds = 0.01;
  double s_span = 2.302585092994046;  // log 10
  std::vector<double> chain_times{1.0, 2.0, 5.0, 10.0};
};

struct PicardRunOptions {
  int K = 50;
  double dt = 0.025;
  std::vector<double> sample_times{0.1, 0.5, 1.0};
  double q = 2.0;
  double r_aux = 0.0;
  bool compare_solver = true;
  double agreement_tol = 0.01;
};

struct ThresholdRunOptions {
  double rel_tol = 1e-3;
  double initial_lo = 0.25;
  double initial_hi = 4.0;
  std::vector<double> deltas{0.1, 0.01, 0.001, -0.001};
  double terminal_factor = 1e-2;
};

struct DependenceRunOptions {
  std::vector<double> perturbations{1e-2, 1e-3, 1e-4};
  double T0 = 5.0;
  double q = 2.0;
  double max_variation = 0.25;
};

struct HypothesesRunOptions {
  HypothesisOptions checks;
};

SolveOptions solve_options(const Reader& r);
MorreyRunOptions morrey_options(const Reader& r, const ModelParams& params);
SmoothingRunOptions smoothing_options(const Reader& r, const ModelParams& params);
EnergyRunOptions energy_options(const Reader& r, double t_end);
PicardRunOptions picard_options(const Reader& r, double t_end);
ThresholdRunOptions threshold_options(const Reader& r);
DependenceRunOptions dependence_options(const Reader& r, double t_end);
HypothesesRunOptions hypotheses_options(const Reader& r);

/// Validates the options block of `kind`; throws ConfigError.
void validate_options(ExperimentKind kind, const Json& options, const ModelParams& params, double t_end);

}  // namespace semiheat::detail

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semiheat/evolution.hpp"
#include "semiheat/model.hpp"

namespace semiheat {

enum class RunVerdict { decaying, blowup, undecided };
std::string to_string(RunVerdict v);

struct ClassifyOptions {
  double terminal_factor = 1e-2;  ///< Decaying needs ‖u(t_end)‖_∞ < factor ‖u0‖_∞
};

struct Classification {
  RunVerdict verdict = RunVerdict::undecided;
  double T_est = 0.0;  ///< meaningful for blowup only
  std::string status;  ///< solver status name
  double horizon = 0.0;
  bool tail_monotone = false;
  double terminal_ratio = 0.0;  ///< ‖u(t_end)‖_∞ / ‖u0‖_∞
};

/// Zero data is Decaying. Otherwise Decaying iff the run reached its horizon with
/// t^{1/(p-1)}‖u‖_∞ nonincreasing over the final decade and the terminal ratio below
/// the factor; Blowup from the solver status; Undecided for everything else.
Classification classify(const Trajectory& traj, const RadialField& u0, const ClassifyOptions& opts = {});
Classification classify(const RadialField& u0, const ModelParams& params, const SolverConfig& cfg,
                        const ClassifyOptions& opts = {});

/// Amplitude -> initial datum. Must be monotone in the amplitude.
using DataFamily = std::function<RadialField(double)>;

struct Trial {
  double lambda;
  Classification result;
};

using TimeSeries = std::vector<std::pair<double, double>>;

struct ThresholdResult {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double rel_width = 0.0;
  bool stalled = false;     ///< an Undecided verdict stopped the bisection
  bool consistent = true;   ///< no Blowup below a Decaying amplitude
  bool t_est_monotone = true;  ///< T_est nonincreasing in λ over the Blowup trials
  std::vector<Trial> trials;
  TimeSeries morrey_series_lo;  ///< ‖u(t)‖_{M^{2,4/(p-1)}} at the checkpoints
  TimeSeries morrey_series_hi;
  std::optional<Trajectory> run_lo;
  std::optional<Trajectory> run_hi;
};

struct BisectionOptions {
  double rel_tol = 1e-3;
  double initial_lo = 0.25;
  double initial_hi = 4.0;
  int max_expansions = 12;  ///< halvings of lo / doublings of hi
  int max_trials = 200;
  double t_est_slack = 1e-2;  ///< relative fit error allowed in the T_est ordering
  ClassifyOptions classify;
};

/// Bisection on the amplitude until (hi - lo)/lo < rel_tol. An Undecided trial
/// stops the search with the best bracket and sets `stalled`; an initial bracket
/// that cannot be established throws std::runtime_error.
ThresholdResult bisect_family(const DataFamily& family, const ModelParams& params, const SolverConfig& cfg,
                              const BisectionOptions& opts = {});

/// Ray u0 = λ φ.
ThresholdResult bisect_lambda(const RadialField& phi, const ModelParams& params, const SolverConfig& cfg,
                              double rel_tol, BisectionOptions opts = {});

/// ‖u(t)‖_{M^{2,4/(p-1)}} at every checkpoint of the run.
TimeSeries morrey_series(const Trajectory& traj, const ModelParams& params);

/// First time after which t^{1/(p-1)}‖u(t)‖_∞ is nonincreasing up to the end of the run.
double final_decrease_onset(const Trajectory& traj, const ModelParams& params);

struct ProbeReport {
  double delta = 0.0;
  double lambda = 0.0;
  Classification result;
  double t0 = 0.0;
  double morrey_at_1 = 0.0;     ///< at the checkpoint t = 1 (0 when absent)
  double morrey_final = 0.0;    ///< at the last checkpoint
  bool morrey_decreased = false;
};

/// Runs λ = lambda_lo (1 - δ) for each δ, concurrently. Needs rel_width < 1e-2.
std::vector<ProbeReport> borderline_probe(const ThresholdResult& result, const DataFamily& family,
                                          const ModelParams& params, const SolverConfig& cfg,
                                          const std::vector<double>& deltas, const ClassifyOptions& opts = {});

}  // namespace semiheat

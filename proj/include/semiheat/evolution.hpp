#pragma once

#include <string>
#include <variant>
#include <vector>

#include "semiheat/model.hpp"

namespace semiheat {

struct SolverConfig {
  double dt_init = 1e-4;
  double dt_min = 1e-14;
  double safety = 0.9;           ///< dt <= safety h²/(2n)
  double nonlinear_cap = 0.05;   ///< dt <= nonlinear_cap ‖u‖_∞^{1-p}
  double blowup_threshold = 1e8;
  double t_end = 1.0;
  std::vector<double> checkpoints;  ///< strictly increasing, within [0, t_end]
  double contamination_tol = 1e-6;  ///< zero-tail mode: |u(R_max - h)| <= tol ‖u‖_∞
  bool nonlinear = true;            ///< false integrates the heat equation only

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// `per_decade` log-spaced times from t_first to t_last, both included.
std::vector<double> log_spaced_times(double t_first, double t_last, int per_decade);

struct Checkpoint {
  double t;
  RadialField u;
};

struct SeriesSample {
  double t;
  double sup_norm;
  double weighted_sup;  ///< max r^{2/(p-1)} |u|
  double dt;            ///< step that produced this sample
};

struct ReachedHorizon {
  double t_end;
};
struct Blowup {
  double T_est;
  double fit_quality;  ///< R² of the blowup-rate fit
  bool fit_ok;
};
struct Aborted {
  std::string reason;  ///< "nonfinite" or "boundary_contamination"
  double t;
};
using TrajectoryStatus = std::variant<ReachedHorizon, Blowup, Aborted>;

struct Trajectory {
  ModelParams params;
  std::vector<Checkpoint> checkpoints;
  std::vector<SeriesSample> series;
  RadialField final_state;
  double final_time = 0.0;
  TrajectoryStatus status;

  bool reached_horizon() const { return std::holds_alternative<ReachedHorizon>(status); }
  bool blew_up() const { return std::holds_alternative<Blowup>(status); }
  bool aborted() const { return std::holds_alternative<Aborted>(status); }
  /// Checkpoint whose time equals t within 1e-9 (relative); throws if absent.
  const Checkpoint& at(double t) const;
};

std::string status_name(const TrajectoryStatus& s);

/// Method of lines with explicit RK4 on the radial grid of u0. The last node is
/// held at its initial value (0 for dirichlet fields).
Trajectory solve(const RadialField& u0, const ModelParams& params, const SolverConfig& cfg);

struct BlowupEstimate {
  bool ok = false;
  double T_est = 0.0;
  double fit_quality = 0.0;
  int samples = 0;
  std::string reason;  ///< why the fit was refused
};

/// Least squares of ‖u‖_∞^{1-p} against t over the last decade of growth;
/// T_est is the t-intercept. The decade ends at the last sample whose step
/// exceeds 1e-10 t, so that T - t stays resolvable in double precision.
BlowupEstimate estimate_blowup_time(const Trajectory& traj, const ModelParams& params);
BlowupEstimate estimate_blowup_time(const std::vector<SeriesSample>& series, const ModelParams& params,
                                    bool blowup_status);

struct DecayDiagnostics {
  bool slope_defined = false;
  double slope = 0.0;  ///< d log‖u‖_∞ / d log t over [t_end/10, t_end]
  double sup_t_beta_norm = 0.0;
  bool tail_monotone = false;  ///< t^{1/(p-1)} ‖u‖_∞ nonincreasing over the final decade
};

DecayDiagnostics decay_diagnostics(const Trajectory& traj, const ModelParams& params);

struct DominationResult {
  double measured_C = 0.0;
  double t = 0.0;  ///< where the maximum occurs
  double r = 0.0;
};

/// max over checkpoints t > 0 and nodes of |u| / (G_t * |u0|), skipping nodes
/// where the denominator is below floor_abs + floor_rel · max(G_t * |u0|).
DominationResult linear_domination(const Trajectory& traj, const RadialField& u0,
                                   double floor_abs = 1e-14, double floor_rel = 0.0);

struct MajorantCheck {
  bool holds = true;
  double margin = 0.0;  ///< min over nodes and checkpoints of (2 G_t*|∇u0| - |∂_r u|) / max G_t*|∇u0|
  int checkpoints = 0;
};

/// |∂_r u(t)| <= 2 G_t * |∇u0| at every node for checkpoints in (0, t_small].
MajorantCheck gradient_majorant_check(const Trajectory& traj, const RadialField& u0,
                                      const RadialField& grad_u0, double t_small);

/// max over the family of sup_{t >= t0} ‖u(t)‖_∞, from the recorded series.
double delayed_sup_bound(const std::vector<Trajectory>& family, double t0);

}  // namespace semiheat

#pragma once

#include <string>
#include <vector>

#include "semiheat/evolution.hpp"
#include "semiheat/model.hpp"
#include "semiheat/morrey.hpp"
#include "semiheat/threshold.hpp"

namespace semiheat {

struct PicardOptions {
  double dt = 0.025;   ///< uniform step of the Duhamel time grid
  double q = 2.0;      ///< data exponent; λ = 2q/(p-1)
  double r_aux = 0.0;  ///< 0 picks sqrt(max(p,q) · pq)
  double divergence_sup = 1e6;
};

struct PicardBudget {
  double t;
  double budget_r;    ///< t^β |u(t)|_{M^{r,λ}}
  double budget_inf;  ///< t^{1/(p-1)} ‖u(t)‖_∞
  double cauchy_diff; ///< ‖u^{(K)}(t) - u^{(K-1)}(t)‖_∞
};

struct PicardRun {
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
  std::string reason;
  double r_aux = 0.0;
  double beta_aux = 0.0;  ///< (λ/2)(1/q - 1/r)
  double convergence_ratio = 0.0;  ///< last ratio of successive Cauchy differences
  std::vector<double> cauchy;  ///< per iterate, max over the time grid
  std::vector<std::vector<double>> cauchy_at_samples;  ///< per iterate, per sample time
  std::vector<Checkpoint> samples;
  std::vector<SeriesSample> series;
  std::vector<PicardBudget> budget;
};

/// u^{(k+1)}(t) = G_t * u0 + ∫₀ᵗ G_{t-s} * |u^{(k)}|^{p-1}u^{(k)}(s) ds on the grid t_j = j dt,
/// trapezoid rule in s, whole-space heat kernel matrices cached per lag. Stops at
/// ‖u^{(k+1)} - u^{(k)}‖_∞ < 1e-8 (1 + ‖u‖_∞), after K iterates, or on divergence
/// (sup above divergence_sup or two successive growing differences).
/// Sample times must lie on the time grid.
PicardRun picard_solve(const RadialField& u0, const ModelParams& params, double t_end, int K,
                       const std::vector<double>& sample_times, const PicardOptions& opts = {});

struct SmallnessProbe {
  double epsilon_star = 0.0;  ///< ‖u0‖_{M^{2,4/(p-1)}} at the largest decaying amplitude
  double C0_measured = 0.0;   ///< max_t t^{1/(p-1)}‖u(t)‖_∞ / ε_star on that run
  double amplitude_lo = 0.0;
  double amplitude_hi = 0.0;
  bool undecided = false;
  ThresholdResult bracket;
};

SmallnessProbe smallness_threshold_probe(const DataFamily& family, const ModelParams& params,
                                         const SolverConfig& cfg, const BisectionOptions& opts = {});

struct DependenceResult {
  TimeSeries ratios;  ///< (t, ‖u(t) - v(t)‖ / ‖u0 - v0‖)
  double max_ratio = 0.0;
  bool degenerate = false;  ///< u0 = v0; every ratio is 1 by convention
  bool failed = false;      ///< a run ended before T0
  std::string reason;
};

/// Ratio series of Morrey distances on the checkpoints of cfg within [0, T0].
DependenceResult continuous_dependence(const RadialField& u0, const RadialField& v0, double T0,
                                       const ModelParams& params, const MorreySpec& spec,
                                       const SolverConfig& cfg);

struct GronwallCheck {
  bool holds = true;
  double margin = 0.0;  ///< min of 1 - |u(t)| / (e^{Mt} S_t|u0|) where S_t|u0| > 1e-6 max S_t|u0|
  double M = 0.0;       ///< sup ‖u‖_∞^{p-1} over the window
  int checkpoints = 0;
};

/// |u(t)| <= e^{Mt} S_t|u0| at every node for checkpoints in (0, window · final_time],
/// where S_t is the linear flow of the same discretization; holds allows a 1e-10 max S_t|u0| slack.
GronwallCheck gronwall_domination(const Trajectory& traj, const RadialField& u0, const SolverConfig& cfg,
                                  double window = 0.05);

}  // namespace semiheat

#pragma once

#include <vector>

#include "semiheat/evolution.hpp"
#include "semiheat/model.hpp"

namespace semiheat {

/// w(y) = (T-t)^{1/(p-1)} u(y √(T-t), t) on the radial grid y_j = j h_y, y <= Y_max.
struct RescaledField {
  int n = 0;
  double h_y = 0.01;
  double y_max = 10.0;
  std::vector<double> w;
  double T = 0.0;
  double t = 0.0;
  double s = 0.0;  ///< -log(T - t)
  bool truncated = false;  ///< Y_max √(T-t) > R_max
};

RescaledField to_similarity(const RadialField& u, double t, double T, const ModelParams& params,
                            double y_max = 10.0, double h_y = 0.01);

struct EnergyValue {
  double E = 0.0;
  double m = 0.0;          ///< ∫ w² ρ
  double potential = 0.0;  ///< ∫ |w|^{p+1} ρ
};

/// Weighted energy with ρ = e^{-|y|²/4}, trapezoid in y, w' by centered differences.
EnergyValue energy(const RescaledField& w, const ModelParams& params);

struct EnergySample {
  double s;
  double E;
  double m;
  double potential;
  double dm_ds;
  double residual;      ///< |½ dm/ds + 2E - (p-1)/(p+1) ∫|w|^{p+1}ρ|
  double residual_rel;  ///< residual / max(|½ dm/ds|, |2E - (p-1)/(p+1) ∫|w|^{p+1}ρ|)
};

struct EnergySeries {
  double T = 0.0;
  double a = 0.0;
  std::vector<EnergySample> samples;
  int monotonicity_violations = 0;  ///< steps with E_{j+1} > E_j + 1e-6 (1 + |E_j|)
  double min_E = 0.0;
  double max_residual_rel = 0.0;
  double mass_constant = 0.0;  ///< max_s m(s) / E(s_0)^{2/(p+1)}; 0 when E(s_0) <= 0
  bool truncated = false;
};

/// t_j = T - e^{-s_j} for s_j = s_first + j ds up to s_last; pass these as solver checkpoints.
std::vector<double> similarity_times(double T, double s_first, double s_last, double ds);
std::vector<double> similarity_s_grid(double s_first, double s_last, double ds);

/// Energy along the trajectory at each s; every T - e^{-s} must be a checkpoint.
/// dm/ds by five-point differences (centered in the interior, shifted at the ends).
EnergySeries energy_series(const Trajectory& traj, double T, const ModelParams& params,
                           const std::vector<double>& s_grid);

/// T^{(p+1)/(p-1)} (G_T * |∇u0|²)(a) + T^{2/(p-1)} (G_T * |u0|²)(a).
double functional_A(const RadialField& u0, const RadialField& grad_u0, double T, double a,
                    const ModelParams& params);

/// max over t in t_grid (t >= t0) and over `centers` of the functional_A integrand.
double functional_N(const RadialField& u0, const RadialField& grad_u0, double t0,
                    const std::vector<double>& t_grid, const ModelParams& params,
                    const std::vector<double>& centers);

}  // namespace semiheat

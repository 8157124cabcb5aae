#include "semiheat/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "semiheat/kernels.hpp"
#include "semiheat/quadrature.hpp"

namespace semiheat {

void SolverConfig::validate() const {
  if (!(dt_min > 0.0) || !(dt_min < dt_init)) throw std::invalid_argument("SolverConfig: need 0 < dt_min < dt_init");
  if (!(safety > 0.0) || safety > 1.0) throw std::invalid_argument("SolverConfig: safety must lie in (0, 1]");
  if (!(nonlinear_cap > 0.0)) throw std::invalid_argument("SolverConfig: nonlinear_cap must be positive");
  if (!(blowup_threshold >= 1e6)) throw std::invalid_argument("SolverConfig: blowup_threshold must be >= 1e6");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("SolverConfig: t_end must be positive");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 0.0 || checkpoints[i] > t_end)
      throw std::invalid_argument("SolverConfig: checkpoint outside [0, t_end]");
    if (i > 0 && !(checkpoints[i] > checkpoints[i - 1]))
      throw std::invalid_argument("SolverConfig: checkpoints must be strictly increasing");
  }
}

std::vector<double> log_spaced_times(double t_first, double t_last, int per_decade) {
  if (!(t_first > 0.0) || !(t_last >= t_first) || per_decade < 1)
    throw std::invalid_argument("log_spaced_times: need 0 < t_first <= t_last, per_decade >= 1");
  const int count = std::max(1, static_cast<int>(std::ceil(std::log10(t_last / t_first) * per_decade - 1e-9))) + 1;
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = t_first * std::pow(t_last / t_first, static_cast<double>(i) / (count - 1));
  t.front() = t_first;
  t.back() = t_last;
  if (count == 2 && t_first == t_last) t.pop_back();
  return t;
}

const Checkpoint& Trajectory::at(double t) const {
  for (const auto& c : checkpoints)
    if (std::abs(c.t - t) <= 1e-9 * std::max(1.0, std::abs(t))) return c;
  throw std::out_of_range("Trajectory: no checkpoint at t = " + std::to_string(t));
}

std::string status_name(const TrajectoryStatus& s) {
  if (std::holds_alternative<ReachedHorizon>(s)) return "ReachedHorizon";
  if (std::holds_alternative<Blowup>(s)) return "Blowup";
  return "Aborted(" + std::get<Aborted>(s).reason + ")";
}

namespace {

double sup_of(const std::vector<double>& u) {
  double m = 0.0;
  for (double v : u) {
    const double a = std::abs(v);
    if (!(a <= std::numeric_limits<double>::max())) return std::numeric_limits<double>::infinity();
    m = std::max(m, a);
  }
  return m;
}

}  // namespace

Trajectory solve(const RadialField& u0, const ModelParams& params, const SolverConfig& cfg) {
  cfg.validate();
  const RadialGrid& grid = u0.grid();
  if (grid.dim() != params.n) throw std::invalid_argument("solve: grid dimension differs from params.n");
  const std::size_t m = u0.size();
  const kernels::RadialLaplacian lap(params.n, grid.h(), m);
  const double p = params.p;
  const double k_weight = params.tail_exponent();
  const double dt_diffusive = cfg.safety * grid.h() * grid.h() / (2.0 * params.n);
  const bool zero_tail = u0.boundary() == BoundaryTag::even_at_origin_only;

  Trajectory traj{params, {}, {}, u0, 0.0, ReachedHorizon{cfg.t_end}};
  std::vector<double> u(u0.data());
  std::vector<double> k1(m), k2(m), k3(m), k4(m), tmp(m);
  auto rhs = [&](const std::vector<double>& x, std::vector<double>& out) {
    kernels::radial_rhs_omp(lap, p, cfg.nonlinear, x, out);
  };
  auto as_field = [&](const std::vector<double>& v) { return RadialField(grid, v, u0.boundary()); };

  double t = 0.0;
  double dt_prev = cfg.dt_init;
  std::size_t next_cp = 0;
  double last_t = 0.0, last_sup = sup_of(u);
  auto record = [&](double sup, double dt) {
    traj.series.push_back({t, sup, weighted_sup_norm(as_field(u), k_weight), dt});
    last_t = t;
    last_sup = sup;
  };
  record(last_sup, 0.0);
  while (next_cp < cfg.checkpoints.size() && cfg.checkpoints[next_cp] <= 0.0) {
    traj.checkpoints.push_back({0.0, u0});
    ++next_cp;
  }

  while (t < cfg.t_end) {
    const double sup = sup_of(u);
    if (sup >= cfg.blowup_threshold) {
      traj.status = Blowup{};
      break;
    }
    double cap = dt_diffusive;
    if (cfg.nonlinear && sup > 0.0) cap = std::min(cap, cfg.nonlinear_cap * std::pow(sup, 1.0 - p));
    if (cap < cfg.dt_min) {
      traj.status = Blowup{};
      break;
    }
    double dt = std::min(cap, 2.0 * dt_prev);
    const double target = next_cp < cfg.checkpoints.size() ? cfg.checkpoints[next_cp] : cfg.t_end;
    bool hit = false;
    if (t + dt >= target * (1.0 - 1e-13)) {
      dt = target - t;
      hit = true;
    }

    rhs(u, k1);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
    rhs(tmp, k3);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = u[i] + dt * k3[i];
    rhs(tmp, k4);
    for (std::size_t i = 0; i < m; ++i) u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t = hit ? target : t + dt;
    if (!hit) dt_prev = dt;

    const double s = sup_of(u);
    if (!std::isfinite(s)) {
      traj.status = Aborted{"nonfinite", t};
      break;
    }
    if (zero_tail && s > 0.0 && std::abs(u[m - 2]) > cfg.contamination_tol * s) {
      traj.status = Aborted{"boundary_contamination", t};
      record(s, dt);
      break;
    }
    if (hit && next_cp < cfg.checkpoints.size() && target == cfg.checkpoints[next_cp]) {
      traj.checkpoints.push_back({t, as_field(u)});
      ++next_cp;
    }
    const bool done = t >= cfg.t_end;
    if (done || t >= last_t * (1.0 + 1e-3) || std::abs(s - last_sup) > 5e-3 * last_sup) record(s, dt);
  }
  traj.final_time = t;
  traj.final_state = as_field(u);
  if (traj.series.back().t != t) record(sup_of(u), traj.series.back().dt);

  if (traj.blew_up()) {
    const BlowupEstimate est = estimate_blowup_time(traj.series, params, true);
    const double floor = std::nextafter(t, std::numeric_limits<double>::infinity());
    traj.status = Blowup{est.ok ? std::max(est.T_est, floor) : floor, est.fit_quality, est.ok};
  }
  return traj;
}

BlowupEstimate estimate_blowup_time(const std::vector<SeriesSample>& series, const ModelParams& params,
                                    bool blowup_status) {
  BlowupEstimate est;
  if (series.empty()) {
    est.reason = "empty series";
    return est;
  }
  const double s_final = series.back().sup_norm;
  const double s_first = series.front().sup_norm;
  if (!blowup_status && !(s_final >= 1e3 * s_first && s_final > 0.0)) {
    est.reason = "no blowup status and growth below 1e3";
    return est;
  }
  const double p = params.p;
  // The window ends at the last sample whose step is still resolvable in t;
  // beyond it T - t approaches the spacing of doubles near T.
  std::size_t last = series.size() - 1;
  while (last > 0 && !(series[last].dt >= 1e-10 * series[last].t)) --last;
  const double s_top = series[last].sup_norm;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i <= last; ++i) {
    const auto& s = series[i];
    if (!(s.sup_norm >= 0.1 * s_top) || s.sup_norm <= 0.0) continue;
    xs.push_back(s.t);
    ys.push_back(std::pow(s.sup_norm, 1.0 - p));
  }
  const int k = static_cast<int>(xs.size());
  est.samples = k;
  if (k < 8) {
    est.reason = "fewer than 8 samples in the fit window";
    return est;
  }
  double mx = 0, my = 0;
  for (int i = 0; i < k; ++i) { mx += xs[i]; my += ys[i]; }
  mx /= k;
  my /= k;
  double cxx = 0, cxy = 0, cyy = 0;
  for (int i = 0; i < k; ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    cxx += dx * dx; cxy += dx * dy; cyy += dy * dy;
  }
  if (!(cxx > 0.0) || !(cxy < 0.0)) {
    est.reason = "degenerate fit window";
    return est;
  }
  const double slope = cxy / cxx;
  est.T_est = mx - my / slope;
  est.fit_quality = cyy > 0.0 ? (cxy * cxy) / (cxx * cyy) : 1.0;
  est.ok = true;
  return est;
}

BlowupEstimate estimate_blowup_time(const Trajectory& traj, const ModelParams& params) {
  return estimate_blowup_time(traj.series, params, traj.blew_up());
}

DecayDiagnostics decay_diagnostics(const Trajectory& traj, const ModelParams& params) {
  DecayDiagnostics d;
  const double beta = params.beta;
  for (const auto& s : traj.series) d.sup_t_beta_norm = std::max(d.sup_t_beta_norm, std::pow(s.t, beta) * s.sup_norm);
  const double t_end = traj.final_time;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  bool monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& s : traj.series) {
    if (s.t < 0.1 * t_end || !(s.t > 0.0)) continue;
    const double w = std::pow(s.t, beta) * s.sup_norm;
    if (w > prev * (1.0 + 1e-9)) monotone = false;
    prev = w;
    if (!(s.sup_norm > 0.0)) continue;
    const double x = std::log(s.t), y = std::log(s.sup_norm);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++k;
  }
  d.tail_monotone = monotone;
  if (k >= 2) {
    const double den = k * sxx - sx * sx;
    if (den > 0.0) {
      d.slope = (k * sxy - sx * sy) / den;
      d.slope_defined = true;
    }
  }
  return d;
}

DominationResult linear_domination(const Trajectory& traj, const RadialField& u0, double floor_abs,
                                   double floor_rel) {
  DominationResult res;
  const RadialField a0(u0.grid(), u0.abs_pow(1.0).data(), BoundaryTag::even_at_origin_only);
  for (const auto& cp : traj.checkpoints) {
    if (!(cp.t > 0.0)) continue;
    const RadialField g = heat_apply(a0, cp.t);
    const double floor = floor_abs + floor_rel * sup_norm(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(g[i] >= floor) || g[i] <= 0.0) continue;
      const double r = std::abs(cp.u[i]) / g[i];
      if (r > res.measured_C) {
        res.measured_C = r;
        res.t = cp.t;
        res.r = g.grid().node(i);
      }
    }
  }
  return res;
}

MajorantCheck gradient_majorant_check(const Trajectory& traj, const RadialField& u0,
                                      const RadialField& grad_u0, double t_small) {
  if (!(t_small > 0.0) || t_small > 0.05 * traj.final_time * (1.0 + 1e-12))
    throw std::invalid_argument("gradient_majorant_check: t_small must lie in the first 5% of the run");
  if (!(u0.grid() == grad_u0.grid())) throw std::invalid_argument("gradient_majorant_check: grids differ");
  MajorantCheck res;
  res.margin = std::numeric_limits<double>::infinity();
  const RadialField ag(grad_u0.grid(), grad_u0.abs_pow(1.0).data(), BoundaryTag::even_at_origin_only);
  for (const auto& cp : traj.checkpoints) {
    if (!(cp.t > 0.0) || cp.t > t_small * (1.0 + 1e-12)) continue;
    ++res.checkpoints;
    const RadialField g = heat_apply(ag, cp.t);
    const RadialField d = finite_difference_gradient(cp.u);
    const double scale = sup_norm(g);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < g.size(); ++i) worst = std::min(worst, 2.0 * g[i] - std::abs(d[i]));
    if (scale > 0.0) {
      res.margin = std::min(res.margin, worst / scale);
    } else if (worst < 0.0) {
      res.margin = -std::numeric_limits<double>::infinity();
    }
  }
  res.holds = res.margin >= -1e-10;
  return res;
}

double delayed_sup_bound(const std::vector<Trajectory>& family, double t0) {
  double m = 0.0;
  for (const auto& tr : family)
    for (const auto& s : tr.series)
      if (s.t >= t0) m = std::max(m, s.sup_norm);
  return m;
}

}  // namespace semiheat

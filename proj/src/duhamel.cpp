#include "semiheat/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "semiheat/quadrature.hpp"

namespace semiheat {

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) {
    const double a = std::abs(x);
    if (!(a <= std::numeric_limits<double>::max())) return std::numeric_limits<double>::infinity();
    m = std::max(m, a);
  }
  return m;
}

std::vector<double> power_map(const std::vector<double>& u, double p) {
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::pow(std::abs(u[i]), p - 1.0) * u[i];
  return out;
}

}  // namespace

PicardRun picard_solve(const RadialField& u0, const ModelParams& params, double t_end, int K,
                       const std::vector<double>& sample_times, const PicardOptions& opts) {
  if (!(t_end > 0.0)) throw std::invalid_argument("picard_solve: t_end must be positive");
  if (K < 2) throw std::invalid_argument("picard_solve: K must be at least 2");
  if (!(opts.dt > 0.0)) throw std::invalid_argument("picard_solve: dt must be positive");
  if (u0.dim() != params.n) throw std::invalid_argument("picard_solve: grid dimension differs from params.n");
  const double p = params.p;
  const double q = opts.q;
  const double lambda = params.critical_lambda(q);
  const double r = opts.r_aux > 0.0 ? opts.r_aux : std::sqrt(std::max(p, q) * p * q);
  if (!(r > 1.0)) throw std::invalid_argument("picard_solve: auxiliary exponent must exceed 1");
  const MorreySpec aux{r, lambda};
  aux.validate(params.n);

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / opts.dt - 1e-9));
  const double dt = t_end / static_cast<double>(steps);
  std::vector<std::size_t> sample_index;
  for (double t : sample_times) {
    const double x = t / dt;
    const double k = std::round(x);
    if (t < 0.0 || t > t_end * (1.0 + 1e-12) || std::abs(x - k) > 1e-6)
      throw std::invalid_argument("picard_solve: sample time off the time grid");
    sample_index.push_back(static_cast<std::size_t>(k));
  }

  const RadialGrid& grid = u0.grid();
  std::vector<HeatMatrix> kernel;
  kernel.reserve(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) kernel.emplace_back(grid, static_cast<double>(j) * dt);

  const std::size_t m = u0.size();
  std::vector<std::vector<double>> free(steps + 1), U(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) free[j] = kernel[j].apply(u0.data());
  U = free;

  PicardRun run;
  run.r_aux = r;
  run.beta_aux = 0.5 * lambda * (1.0 / q - 1.0 / r);
  int growing = 0;
  for (int k = 0; k < K; ++k) {
    std::vector<std::vector<double>> F(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j) F[j] = power_map(U[j], p);
    std::vector<std::vector<double>> next(steps + 1);
    next[0] = free[0];
    const auto last = static_cast<long>(steps);
#pragma omp parallel for schedule(dynamic, 1)
    for (long jj = 1; jj <= last; ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      std::vector<double> acc(free[j]), tmp(m);
      for (std::size_t i = 0; i <= j; ++i) {
        const double w = (i == 0 || i == j) ? 0.5 * dt : dt;
        kernel[j - i].apply(F[i], tmp);
        for (std::size_t l = 0; l < m; ++l) acc[l] += w * tmp[l];
      }
      next[j] = std::move(acc);
    }

    double diff = 0.0, sup = 0.0;
    std::vector<double> at_samples;
    std::vector<double> d(steps + 1, 0.0);
    for (std::size_t j = 0; j <= steps; ++j) {
      for (std::size_t l = 0; l < m; ++l) d[j] = std::max(d[j], std::abs(next[j][l] - U[j][l]));
      diff = std::max(diff, d[j]);
      sup = std::max(sup, max_abs(next[j]));
    }
    for (std::size_t idx : sample_index) at_samples.push_back(d[idx]);
    U = std::move(next);
    run.iterations = k + 1;
    if (!run.cauchy.empty()) {
      const double prev = run.cauchy.back();
      run.convergence_ratio = prev > 0.0 ? diff / prev : 0.0;
      growing = diff > prev ? growing + 1 : 0;
    }
    run.cauchy.push_back(diff);
    run.cauchy_at_samples.push_back(std::move(at_samples));
    if (!std::isfinite(sup) || !std::isfinite(diff) || sup > opts.divergence_sup) {
      run.diverged = true;
      run.reason = "sup norm exceeded the divergence bound";
      break;
    }
    if (growing >= 2) {
      run.diverged = true;
      run.reason = "Cauchy differences grew";
      break;
    }
    if (diff < 1e-8 * (1.0 + sup)) {
      run.converged = true;
      break;
    }
  }
  if (!run.converged && !run.diverged) run.reason = "iteration limit reached";

  const double k_weight = params.tail_exponent();
  const std::vector<double>& last_diff = run.cauchy_at_samples.back();
  for (std::size_t s = 0; s < sample_index.size(); ++s) {
    const std::size_t j = sample_index[s];
    const double t = static_cast<double>(j) * dt;
    RadialField u(grid, U[j], BoundaryTag::even_at_origin_only);
    const double sup = sup_norm(u);
    run.series.push_back({t, sup, weighted_sup_norm(u, k_weight), dt});
    const double br = run.diverged ? std::numeric_limits<double>::quiet_NaN()
                                   : std::pow(t, run.beta_aux) * morrey_norm(u, aux);
    run.budget.push_back({t, br, std::pow(t, params.beta) * sup, last_diff[s]});
    run.samples.push_back({t, std::move(u)});
  }
  return run;
}

SmallnessProbe smallness_threshold_probe(const DataFamily& family, const ModelParams& params,
                                         const SolverConfig& cfg, const BisectionOptions& opts) {
  SmallnessProbe probe;
  try {
    probe.bracket = bisect_family(family, params, cfg, opts);
  } catch (const std::runtime_error&) {
    probe.undecided = true;
    return probe;
  }
  probe.undecided = probe.bracket.stalled;
  probe.amplitude_lo = probe.bracket.lambda_lo;
  probe.amplitude_hi = probe.bracket.lambda_hi;
  probe.epsilon_star = morrey_norm(family(probe.amplitude_lo), MorreySpec::critical(2.0, params));
  if (probe.epsilon_star > 0.0)
    probe.C0_measured = decay_diagnostics(*probe.bracket.run_lo, params).sup_t_beta_norm / probe.epsilon_star;
  return probe;
}

DependenceResult continuous_dependence(const RadialField& u0, const RadialField& v0, double T0,
                                       const ModelParams& params, const MorreySpec& spec,
                                       const SolverConfig& cfg) {
  if (!(T0 > 0.0)) throw std::invalid_argument("continuous_dependence: T0 must be positive");
  if (!(u0.grid() == v0.grid())) throw std::invalid_argument("continuous_dependence: data on different grids");
  SolverConfig c = cfg;
  c.t_end = T0;
  c.checkpoints.clear();
  c.checkpoints.push_back(0.0);
  for (double t : cfg.checkpoints)
    if (t > 0.0 && t < T0 * (1.0 - 1e-12)) c.checkpoints.push_back(t);
  c.checkpoints.push_back(T0);

  DependenceResult res;
  const Trajectory tu = solve(u0, params, c);
  const Trajectory tv = solve(v0, params, c);
  if (!tu.reached_horizon() || !tv.reached_horizon()) {
    res.failed = true;
    res.reason = !tu.reached_horizon() ? "u run ended before T0: " + status_name(tu.status)
                                       : "v run ended before T0: " + status_name(tv.status);
    return res;
  }
  const double d0 = morrey_norm(u0 - v0, spec);
  res.degenerate = d0 == 0.0;
  for (std::size_t i = 0; i < tu.checkpoints.size(); ++i) {
    const double t = tu.checkpoints[i].t;
    const double ratio = res.degenerate ? 1.0 : morrey_norm(tu.checkpoints[i].u - tv.checkpoints[i].u, spec) / d0;
    res.ratios.emplace_back(t, ratio);
    res.max_ratio = std::max(res.max_ratio, ratio);
  }
  return res;
}

GronwallCheck gronwall_domination(const Trajectory& traj, const RadialField& u0, const SolverConfig& cfg,
                                  double window) {
  if (!(window > 0.0 && window <= 1.0)) throw std::invalid_argument("gronwall_domination: window must lie in (0, 1]");
  GronwallCheck chk;
  const double t_cut = window * traj.final_time;
  SolverConfig lin = cfg;
  lin.nonlinear = false;
  lin.checkpoints.clear();
  std::vector<const Checkpoint*> used;
  for (const auto& cp : traj.checkpoints)
    if (cp.t > 0.0 && cp.t <= t_cut * (1.0 + 1e-12)) {
      lin.checkpoints.push_back(cp.t);
      used.push_back(&cp);
    }
  if (used.empty()) return chk;
  lin.t_end = lin.checkpoints.back();
  const double p = traj.params.p;
  double sup = sup_norm(u0);
  for (const auto& s : traj.series)
    if (s.t <= lin.t_end) sup = std::max(sup, s.sup_norm);
  for (const Checkpoint* cp : used) sup = std::max(sup, sup_norm(cp->u));
  chk.M = std::pow(sup, p - 1.0);

  const RadialField a0(u0.grid(), u0.abs_pow(1.0).data(), u0.boundary());
  const Trajectory linear = solve(a0, traj.params, lin);
  chk.margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < used.size(); ++k) {
    const Checkpoint& cp = *used[k];
    const RadialField& s = linear.at(cp.t).u;
    const double scale = std::max(sup_norm(s), std::numeric_limits<double>::min());
    const double grow = std::exp(chk.M * cp.t);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double gap = grow * s[i] - std::abs(cp.u[i]);
      if (gap < -1e-10 * scale) chk.holds = false;
      if (s[i] > 1e-6 * scale) chk.margin = std::min(chk.margin, gap / (grow * s[i]));
    }
    ++chk.checkpoints;
  }
  return chk;
}

}  // namespace semiheat

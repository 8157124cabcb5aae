#include "semiheat/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include "semiheat/morrey.hpp"

namespace semiheat {

std::string to_string(RunVerdict v) {
  switch (v) {
    case RunVerdict::decaying: return "Decaying";
    case RunVerdict::blowup: return "Blowup";
    case RunVerdict::undecided: return "Undecided";
  }
  return "Undecided";
}

Classification classify(const Trajectory& traj, const RadialField& u0, const ClassifyOptions& opts) {
  Classification c;
  c.status = status_name(traj.status);
  c.horizon = traj.final_time;
  const double s0 = sup_norm(u0);
  if (traj.blew_up()) {
    c.verdict = RunVerdict::blowup;
    c.T_est = std::get<Blowup>(traj.status).T_est;
    return c;
  }
  if (s0 == 0.0) {
    c.verdict = traj.reached_horizon() ? RunVerdict::decaying : RunVerdict::undecided;
    c.tail_monotone = true;
    return c;
  }
  c.terminal_ratio = sup_norm(traj.final_state) / s0;
  c.tail_monotone = decay_diagnostics(traj, traj.params).tail_monotone;
  if (traj.reached_horizon() && c.tail_monotone && c.terminal_ratio < opts.terminal_factor)
    c.verdict = RunVerdict::decaying;
  return c;
}

Classification classify(const RadialField& u0, const ModelParams& params, const SolverConfig& cfg,
                        const ClassifyOptions& opts) {
  return classify(solve(u0, params, cfg), u0, opts);
}

TimeSeries morrey_series(const Trajectory& traj, const ModelParams& params) {
  const MorreySpec spec = MorreySpec::critical(2.0, params);
  TimeSeries out;
  out.reserve(traj.checkpoints.size());
  for (const auto& cp : traj.checkpoints) out.emplace_back(cp.t, morrey_norm(cp.u, spec));
  return out;
}

double final_decrease_onset(const Trajectory& traj, const ModelParams& params) {
  const auto& s = traj.series;
  if (s.empty()) return 0.0;
  std::size_t k = s.size() - 1;
  double next = std::pow(s[k].t, params.beta) * s[k].sup_norm;
  while (k > 0) {
    const double w = std::pow(s[k - 1].t, params.beta) * s[k - 1].sup_norm;
    if (w < next * (1.0 - 1e-9)) break;
    next = w;
    --k;
  }
  return s[k].t;
}

namespace {

struct Run {
  Trajectory traj;
  Classification c;
};

Run run_member(const DataFamily& family, double lambda, const ModelParams& params, const SolverConfig& cfg,
               const ClassifyOptions& opts) {
  const RadialField u0 = family(lambda);
  Trajectory traj = solve(u0, params, cfg);
  Classification c = classify(traj, u0, opts);
  return {std::move(traj), std::move(c)};
}

template <class F>
void run_concurrently(int count, F&& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void audit(ThresholdResult& res, double slack) {
  std::vector<Trial> sorted(res.trials);
  std::sort(sorted.begin(), sorted.end(), [](const Trial& a, const Trial& b) { return a.lambda < b.lambda; });
  double lowest_blowup = INFINITY;
  double prev_T = INFINITY;
  for (const auto& tr : sorted) {
    if (tr.result.verdict == RunVerdict::blowup) {
      lowest_blowup = std::min(lowest_blowup, tr.lambda);
      if (tr.result.T_est > prev_T * (1.0 + slack)) res.t_est_monotone = false;
      prev_T = tr.result.T_est;
    } else if (tr.result.verdict == RunVerdict::decaying && tr.lambda > lowest_blowup) {
      res.consistent = false;
    }
  }
}

}  // namespace

ThresholdResult bisect_family(const DataFamily& family, const ModelParams& params, const SolverConfig& cfg,
                              const BisectionOptions& opts) {
  if (!(opts.rel_tol > 0.0)) throw std::invalid_argument("bisect: rel_tol must be positive");
  if (!(opts.initial_lo > 0.0) || !(opts.initial_hi > opts.initial_lo))
    throw std::invalid_argument("bisect: need 0 < initial_lo < initial_hi");
  ThresholdResult res;
  auto trial = [&](double lambda) {
    Run r = run_member(family, lambda, params, cfg, opts.classify);
    res.trials.push_back({lambda, r.c});
    return r;
  };

  double lo = opts.initial_lo, hi = opts.initial_hi;
  Run run_lo = trial(lo);
  for (int k = 0; run_lo.c.verdict != RunVerdict::decaying; ++k) {
    if (k == opts.max_expansions) throw std::runtime_error("bisect: no Decaying amplitude found below the bracket");
    if (run_lo.c.verdict == RunVerdict::blowup) hi = std::min(hi, lo);
    lo *= 0.5;
    run_lo = trial(lo);
  }
  Run run_hi = trial(hi);
  for (int k = 0; run_hi.c.verdict != RunVerdict::blowup; ++k) {
    if (k == opts.max_expansions) throw std::runtime_error("bisect: no Blowup amplitude found above the bracket");
    if (run_hi.c.verdict == RunVerdict::decaying) {
      lo = hi;
      run_lo = std::move(run_hi);
    }
    hi *= 2.0;
    run_hi = trial(hi);
  }

  while ((hi - lo) / lo >= opts.rel_tol && static_cast<int>(res.trials.size()) < opts.max_trials) {
    const double mid = 0.5 * (lo + hi);
    Run r = trial(mid);
    if (r.c.verdict == RunVerdict::decaying) {
      lo = mid;
      run_lo = std::move(r);
    } else if (r.c.verdict == RunVerdict::blowup) {
      hi = mid;
      run_hi = std::move(r);
    } else {
      res.stalled = true;
      break;
    }
  }

  res.lambda_lo = lo;
  res.lambda_hi = hi;
  res.rel_width = (hi - lo) / lo;
  audit(res, opts.t_est_slack);
  run_concurrently(2, [&](int i) {
    if (i == 0) res.morrey_series_lo = morrey_series(run_lo.traj, params);
    else res.morrey_series_hi = morrey_series(run_hi.traj, params);
  });
  res.run_lo = std::move(run_lo.traj);
  res.run_hi = std::move(run_hi.traj);
  return res;
}

ThresholdResult bisect_lambda(const RadialField& phi, const ModelParams& params, const SolverConfig& cfg,
                              double rel_tol, BisectionOptions opts) {
  if (sup_norm(phi) == 0.0) throw std::invalid_argument("bisect_lambda: phi must be nontrivial");
  opts.rel_tol = rel_tol;
  return bisect_family([&](double lambda) { return phi.scaled(lambda); }, params, cfg, opts);
}

std::vector<ProbeReport> borderline_probe(const ThresholdResult& result, const DataFamily& family,
                                          const ModelParams& params, const SolverConfig& cfg,
                                          const std::vector<double>& deltas, const ClassifyOptions& opts) {
  if (!(result.rel_width < 1e-2)) throw std::invalid_argument("borderline_probe: bracket width must be below 1e-2");
  std::vector<ProbeReport> out(deltas.size());
  run_concurrently(static_cast<int>(deltas.size()), [&](int i) {
    ProbeReport& rep = out[static_cast<std::size_t>(i)];
    rep.delta = deltas[static_cast<std::size_t>(i)];
    rep.lambda = result.lambda_lo * (1.0 - rep.delta);
    Run r = run_member(family, rep.lambda, params, cfg, opts);
    rep.result = r.c;
    rep.t0 = final_decrease_onset(r.traj, params);
    if (r.c.verdict != RunVerdict::decaying) return;
    const TimeSeries ms = morrey_series(r.traj, params);
    for (const auto& [t, v] : ms)
      if (std::abs(t - 1.0) < 1e-9) rep.morrey_at_1 = v;
    rep.morrey_final = ms.back().second;
    rep.morrey_decreased = rep.morrey_final < rep.morrey_at_1;
  });
  return out;
}

}  // namespace semiheat

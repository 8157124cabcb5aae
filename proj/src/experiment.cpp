#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "experiment_detail.hpp"
#include "semiheat/duhamel.hpp"
#include "semiheat/experiment.hpp"
#include "semiheat/morrey.hpp"
#include "semiheat/quadrature.hpp"
#include "semiheat/similarity.hpp"
#include "semiheat/threshold.hpp"

namespace semiheat {

namespace {

using detail::Reader;

std::string label(const std::string& name, const std::string& key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return name + "[" + key + "=" + buf + "]";
}

CsvTable field_csv(const RadialField& u) {
  CsvTable t{{"r", "u"}, {}};
  for (std::size_t i = 0; i < u.size(); ++i) t.rows.push_back({u.grid().node(i), u[i]});
  return t;
}

CsvTable series_csv(const std::vector<SeriesSample>& s) {
  CsvTable t{{"t", "sup_norm", "weighted_sup", "dt"}, {}};
  for (const auto& x : s) t.rows.push_back({x.t, x.sup_norm, x.weighted_sup, x.dt});
  return t;
}

CsvTable time_series_csv(const TimeSeries& s) {
  CsvTable t{{"t", "value"}, {}};
  for (const auto& [x, y] : s) t.rows.push_back({x, y});
  return t;
}

Json time_series_json(const TimeSeries& s) {
  Json a = Json::array();
  for (const auto& [x, y] : s) a.push_back({x, y});
  return a;
}

std::vector<double> merged(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  std::vector<double> out;
  for (double t : a)
    if (out.empty() || t > out.back() * (1.0 + 1e-12) + 1e-300) out.push_back(t);
  return out;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  v.back() = hi;
  return v;
}

class Pipeline {
 public:
  explicit Pipeline(const ExperimentConfig& cfg)
      : cfg_(cfg), P_(cfg.params), grid_(cfg.grid()), u0_(cfg.data.sample(grid_, P_, cfg.boundary)),
        options_(cfg.options, "options") {
    bundle_.kind = cfg.kind;
  }

  Bundle run() {
    switch (cfg_.kind) {
      case ExperimentKind::solve: solve_kind(); break;
      case ExperimentKind::morrey: morrey_kind(); break;
      case ExperimentKind::smoothing: smoothing_kind(); break;
      case ExperimentKind::energy: energy_kind(); break;
      case ExperimentKind::picard: picard_kind(); break;
      case ExperimentKind::threshold: threshold_kind(); break;
      case ExperimentKind::dependence: dependence_kind(); break;
      case ExperimentKind::hypotheses: hypotheses_kind(); break;
    }
    return std::move(bundle_);
  }

 private:
  void check(const std::string& name, bool passed, double value, bool asserted = true) {
    bundle_.invariants.push_back({name, passed, value, asserted});
  }
  void csv(const std::string& name, CsvTable t) { bundle_.artifacts.push_back({name, std::move(t)}); }
  void json(const std::string& name, Json j) { bundle_.artifacts.push_back({name, std::move(j)}); }
  void plot(const std::string& series, double x, double y) { bundle_.plot.push_back({series, x, y}); }

  void solve_kind() {
    const auto opts = detail::solve_options(options_);
    const Trajectory traj = solve(u0_, P_, cfg_.solver);
    csv("series.csv", series_csv(traj.series));
    csv("final_profile.csv", field_csv(traj.final_state));
    Json cps = Json::array();
    for (std::size_t i = 0; i < traj.checkpoints.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "checkpoint_%03zu.csv", i);
      cps.push_back({{"index", i}, {"t", traj.checkpoints[i].t}, {"file", opts.checkpoint_fields ? name : ""}});
      if (opts.checkpoint_fields) csv(name, field_csv(traj.checkpoints[i].u));
    }
    const DecayDiagnostics d = decay_diagnostics(traj, P_);
    Json summary = {{"status", status_name(traj.status)},
                    {"final_time", traj.final_time},
                    {"decay",
                     {{"slope_defined", d.slope_defined},
                      {"slope", d.slope},
                      {"sup_t_beta_norm", d.sup_t_beta_norm},
                      {"tail_monotone", d.tail_monotone}}},
                    {"checkpoints", cps}};
    bool finite = true;
    for (const auto& s : traj.series) finite = finite && std::isfinite(s.sup_norm) && std::isfinite(s.weighted_sup);
    check("series_finite", finite, static_cast<double>(traj.series.size()));
    check("run_not_aborted", !traj.aborted(), traj.final_time);
    check("tail_monotone", d.tail_monotone, d.sup_t_beta_norm, false);
    check("decay_slope", d.slope_defined, d.slope, false);
    if (traj.blew_up()) {
      const auto& b = std::get<Blowup>(traj.status);
      summary["T_est"] = b.T_est;
      summary["fit_quality"] = b.fit_quality;
      check("blowup_fit", b.fit_ok && b.fit_quality > 0.999, b.fit_quality, false);
    }
    json("summary.json", summary);
    for (const auto& s : traj.series) plot("sup_norm", s.t, s.sup_norm);
    for (const auto& s : traj.series) plot("t_beta_sup_norm", s.t, std::pow(s.t, P_.beta) * s.sup_norm);
  }

  void morrey_kind() {
    const auto o = detail::morrey_options(options_, P_);
    const MorreySpec spec{o.q, o.lambda};
    const MorreyLattice lattice = MorreyLattice::default_for(grid_);
    MorreyOptions mo;
    mo.polish = o.polish;
    const MorreyResult res = morrey_norm_detail(u0_, spec, lattice, mo);
    const double refined = morrey_norm(u0_, spec, lattice.refined(), mo);
    const std::vector<MorreyCell> cells = morrey_cells(u0_, spec, lattice);
    CsvTable t{{"a", "R", "value"}, {}};
    for (const auto& c : cells) t.rows.push_back({c.a, c.R, c.value});
    csv("morrey_cells.csv", std::move(t));

    const RadialField fq(grid_, u0_.abs_pow(o.q).data(), BoundaryTag::even_at_origin_only);
    const double q1 = morrey_norm(fq, MorreySpec{1.0, o.lambda}, lattice);
    const double lhs = std::pow(morrey_norm(u0_, spec, lattice), o.q);
    const double gap = lhs > 0.0 ? std::abs(q1 - lhs) / lhs : std::abs(q1 - lhs);
    check("power_identity", gap <= 1e-12, gap);
    const double drift = res.value > 0.0 ? std::abs(refined / res.value - 1.0) : 0.0;
    check("lattice_refinement_drift", drift < 0.02, drift, false);

    double excess = 0.0;
    if (o.random_probes > 0 && res.value > 0.0) {
      std::mt19937_64 rng(cfg_.seed);
      std::uniform_real_distribution<double> ua(0.0, grid_.r_max());
      std::uniform_real_distribution<double> ur(std::log(grid_.h()), std::log(2.0 * grid_.r_max()));
      const double top = std::pow(res.value, o.q);
      for (int i = 0; i < o.random_probes; ++i) {
        const double a = ua(rng), R = std::exp(ur(rng));
        const double v = std::pow(R, o.lambda - P_.n) * ball_integral(u0_, o.q, a, R).value;
        excess = std::max(excess, v / top - 1.0);
      }
      check("random_probe_excess", excess <= 0.02, excess, false);
    }
    json("summary.json", {{"value", res.value}, {"a", res.a}, {"R", res.R}, {"truncated", res.truncated},
                          {"refined_value", refined}, {"q", o.q}, {"lambda", o.lambda}, {"polish", o.polish}});
    for (double R : lattice.radii) {
      double best = 0.0;
      for (const auto& c : cells)
        if (c.R == R) best = std::max(best, c.value);
      plot("sup_over_a", R, best);
    }
  }

  void smoothing_kind() {
    const auto o = detail::smoothing_options(options_, P_);
    const auto pts = smoothing_profile(u0_, o.from_q, o.to_q, o.lambda, log_grid(o.t_first, o.t_last, o.t_count),
                                       MorreyLattice::default_for(grid_));
    CsvTable t{{"t", "smoothed", "bound", "ratio", "contraction"}, {}};
    double worst = 0.0, ratio = 0.0;
    for (const auto& p : pts) {
      t.rows.push_back({p.t, p.smoothed, p.bound, p.ratio, p.contraction});
      worst = std::max(worst, p.contraction);
      ratio = std::max(ratio, p.ratio);
    }
    for (const auto& p : pts) plot("ratio", p.t, p.ratio);
    for (const auto& p : pts) plot("contraction", p.t, p.contraction);
    csv("smoothing.csv", std::move(t));
    check("contraction", worst <= 1.0 + 1e-6, worst);
    check("smoothing_ratio_max", std::isfinite(ratio), ratio, false);
  }

  void energy_kind() {
    const auto o = detail::energy_options(options_, cfg_.solver.t_end);
    SolverConfig sc = cfg_.solver;
    std::vector<std::vector<double>> grids;
    for (double T : o.T) {
      grids.push_back(similarity_s_grid(-std::log(T), -std::log(T) + o.s_span, o.ds));
      sc.checkpoints = merged(sc.checkpoints, similarity_times(T, -std::log(T), -std::log(T) + o.s_span, o.ds));
    }
    sc.checkpoints = merged(sc.checkpoints, o.chain_times);
    const Trajectory traj = solve(u0_, P_, sc);
    check("run_reached_horizon", traj.reached_horizon(), traj.final_time);
    if (!traj.reached_horizon()) return;

    Json summary = Json::array();
    for (std::size_t k = 0; k < o.T.size(); ++k) {
      const double T = o.T[k];
      const EnergySeries es = energy_series(traj, T, P_, grids[k]);
      CsvTable t{{"s", "E", "m", "residual_4_16"}, {}};
      for (const auto& s : es.samples) {
        t.rows.push_back({s.s, s.E, s.m, s.residual_rel});
        plot(label("E", "T", T), s.s, s.E);
      }
      char name[48];
      std::snprintf(name, sizeof name, "energy_T%g.csv", T);
      csv(name, std::move(t));
      check(label("energy_nonincreasing", "T", T), es.monotonicity_violations == 0, es.monotonicity_violations);
      check(label("energy_lower_bound", "T", T), es.min_E >= -1e-6, es.min_E);
      check(label("energy_identity", "T", T), es.max_residual_rel < 1e-3, es.max_residual_rel);
      check(label("window_inside_grid", "T", T), !es.truncated, es.truncated ? 1.0 : 0.0, false);
      summary.push_back({{"T", T}, {"min_E", es.min_E}, {"violations", es.monotonicity_violations},
                         {"max_residual_rel", es.max_residual_rel}, {"mass_constant", es.mass_constant}});
    }

    const RadialField grad = cfg_.data.sample_gradient(grid_, P_);
    const MorreySpec spec = MorreySpec::critical(2.0, P_);
    const std::vector<double> centers = MorreyLattice::default_for(grid_).centers;
    CsvTable chain{{"t0", "morrey", "N", "ratio"}, {}};
    double c_fit = 0.0;
    for (double t0 : o.chain_times) {
      const double m = morrey_norm(traj.at(t0).u, spec);
      const double N = functional_N(u0_, grad, t0, log_spaced_times(t0, 1e4, 4), P_, centers);
      const double ratio = N > 0.0 ? m / std::pow(N, 1.0 / (P_.p + 1.0)) : 0.0;
      chain.rows.push_back({t0, m, N, ratio});
      c_fit = std::max(c_fit, ratio);
      plot("chain_ratio", t0, ratio);
    }
    csv("chain.csv", std::move(chain));
    check("chain_constant", std::isfinite(c_fit), c_fit, false);
    json("energy.json", {{"series", summary}, {"chain_constant", c_fit}});
  }

  void picard_kind() {
    const auto o = detail::picard_options(options_, cfg_.solver.t_end);
    PicardOptions po;
    po.dt = o.dt;
    po.q = o.q;
    po.r_aux = o.r_aux;
    const PicardRun run = picard_solve(u0_, P_, cfg_.solver.t_end, o.K, o.sample_times, po);
    CsvTable b{{"t", "budget_r", "budget_inf", "cauchy_diff"}, {}};
    for (const auto& x : run.budget) {
      b.rows.push_back({x.t, x.budget_r, x.budget_inf, x.cauchy_diff});
    }
    for (const auto& x : run.budget) plot("budget_r", x.t, x.budget_r);
    for (const auto& x : run.budget) plot("budget_inf", x.t, x.budget_inf);
    csv("budget.csv", std::move(b));
    CsvTable c{{"iterate", "cauchy_diff"}, {}};
    for (std::size_t k = 0; k < run.cauchy.size(); ++k) {
      c.rows.push_back({static_cast<double>(k + 1), run.cauchy[k]});
      plot("cauchy_diff", static_cast<double>(k + 1), run.cauchy[k]);
    }
    csv("cauchy.csv", std::move(c));
    csv("picard_series.csv", series_csv(run.series));
    check("picard_not_diverged", !run.diverged, run.cauchy.back());
    check("picard_converged", run.converged, run.iterations, false);

    Json summary = {{"iterations", run.iterations}, {"converged", run.converged}, {"diverged", run.diverged},
                    {"reason", run.reason},         {"r_aux", run.r_aux},         {"beta_aux", run.beta_aux},
                    {"convergence_ratio", run.convergence_ratio}};
    const double data_norm = morrey_norm(u0_, MorreySpec::critical(o.q, P_));
    if (data_norm > 0.0 && !run.diverged) {
      const PicardRun half = picard_solve(u0_.scaled(0.5), P_, cfg_.solver.t_end, o.K, o.sample_times, po);
      double m1 = 0.0, m2 = 0.0;
      for (const auto& x : run.budget) m1 = std::max(m1, x.budget_r);
      for (const auto& x : half.budget) m2 = std::max(m2, x.budget_r);
      const double drift = std::abs((m1 / data_norm) / (m2 / (0.5 * data_norm)) - 1.0);
      check("budget_multiple_halving", drift < 0.25, drift, false);
      summary["budget_multiple"] = m1 / data_norm;
    }
    if (o.compare_solver) {
      SolverConfig sc = cfg_.solver;
      sc.checkpoints = merged(sc.checkpoints, o.sample_times);
      const Trajectory traj = solve(u0_, P_, sc);
      double worst = 0.0;
      if (traj.reached_horizon()) {
        for (const auto& cp : run.samples) {
          if (cp.t < 0.1) continue;
          const RadialField& v = traj.at(cp.t).u;
          const double scale = sup_norm(v);
          worst = std::max(worst, scale > 0.0 ? sup_norm(cp.u - v) / scale : sup_norm(cp.u));
        }
      } else {
        worst = INFINITY;
      }
      check("mild_classical_agreement", worst < o.agreement_tol, worst);
      if (traj.reached_horizon()) {
        const GronwallCheck g = gronwall_domination(traj, u0_, sc);
        check("gronwall_domination", g.holds, g.margin);
      }
    }
    json("picard.json", summary);
  }

  void threshold_kind() {
    const auto o = detail::threshold_options(options_);
    BisectionOptions bo;
    bo.initial_lo = o.initial_lo;
    bo.initial_hi = o.initial_hi;
    bo.classify.terminal_factor = o.terminal_factor;
    const ThresholdResult res = bisect_lambda(u0_, P_, cfg_.solver, o.rel_tol, bo);
    Json trials = Json::array();
    for (const auto& tr : res.trials) {
      Json j = {{"lambda", tr.lambda}, {"verdict", to_string(tr.result.verdict)}, {"horizon", tr.result.horizon}};
      if (tr.result.verdict == RunVerdict::blowup) j["T_est"] = tr.result.T_est;
      trials.push_back(j);
    }
    check("bracket_width", res.rel_width < o.rel_tol, res.rel_width);
    check("bracket_not_stalled", !res.stalled, res.stalled ? 1.0 : 0.0);
    check("bracket_consistent", res.consistent, static_cast<double>(res.trials.size()));
    check("t_est_monotone", res.t_est_monotone, 0.0);
    double at1 = NAN;
    for (const auto& [t, v] : res.morrey_series_lo)
      if (std::abs(t - 1.0) < 1e-9) at1 = v;
    const double last = res.morrey_series_lo.empty() ? NAN : res.morrey_series_lo.back().second;
    check("morrey_decay_below_threshold", last < at1, last / at1);
    for (const auto& [t, v] : res.morrey_series_lo) plot("morrey_lo", t, v);
    for (const auto& [t, v] : res.morrey_series_hi) plot("morrey_hi", t, v);

    std::vector<ProbeReport> probes;
    Json pj = Json::array();
    if (!o.deltas.empty() && res.rel_width < 1e-2) {
      ClassifyOptions co;
      co.terminal_factor = o.terminal_factor;
      probes = borderline_probe(res, [&](double l) { return u0_.scaled(l); }, P_, cfg_.solver, o.deltas, co);
      CsvTable t{{"delta", "lambda", "verdict", "T_est", "t0", "morrey_at_1", "morrey_final"}, {}};
      bool sub_ok = true, super_ok = true, have_super = false;
      std::vector<std::pair<double, double>> t0s;
      for (const auto& p : probes) {
        t.rows.push_back({p.delta, p.lambda, to_string(p.result.verdict), p.result.T_est, p.t0, p.morrey_at_1,
                          p.morrey_final});
        pj.push_back({{"delta", p.delta}, {"lambda", p.lambda}, {"verdict", to_string(p.result.verdict)},
                      {"t0", p.t0}, {"morrey_decreased", p.morrey_decreased}});
        if (p.delta > 0.0) {
          sub_ok = sub_ok && p.result.verdict == RunVerdict::decaying && p.morrey_decreased;
          t0s.emplace_back(p.delta, p.t0);
          plot("t0", p.delta, p.t0);
        } else {
          have_super = true;
          super_ok = super_ok && p.result.verdict == RunVerdict::blowup;
        }
      }
      std::sort(t0s.begin(), t0s.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      bool t0_mono = true;
      for (std::size_t i = 1; i < t0s.size(); ++i) t0_mono = t0_mono && t0s[i].second >= t0s[i - 1].second;
      csv("probes.csv", std::move(t));
      check("probes_subthreshold_decaying", sub_ok, static_cast<double>(t0s.size()));
      check("probe_t0_nondecreasing", t0_mono, t0s.empty() ? 0.0 : t0s.back().second);
      if (have_super) check("probes_superthreshold_blowup", super_ok, 0.0);
    }
    json("threshold.json", {{"lambda_lo", res.lambda_lo},
                            {"lambda_hi", res.lambda_hi},
                            {"rel_width", res.rel_width},
                            {"stalled", res.stalled},
                            {"consistent", res.consistent},
                            {"trials", trials},
                            {"morrey_series_lo", time_series_json(res.morrey_series_lo)},
                            {"morrey_series_hi", time_series_json(res.morrey_series_hi)},
                            {"probes", pj}});
    csv("morrey_series_lo.csv", time_series_csv(res.morrey_series_lo));
    csv("morrey_series_hi.csv", time_series_csv(res.morrey_series_hi));
  }

  void dependence_kind() {
    const auto o = detail::dependence_options(options_, cfg_.solver.t_end);
    const MorreySpec spec = MorreySpec::critical(o.q, P_);
    CsvTable t{{"perturbation", "t", "ratio"}, {}};
    double lo = INFINITY, hi = 0.0, initial = INFINITY;
    bool complete = true;
    Json summary = Json::array();
    for (double eps : o.perturbations) {
      const DependenceResult r = continuous_dependence(u0_, u0_.scaled(1.0 + eps), o.T0, P_, spec, cfg_.solver);
      complete = complete && !r.failed;
      summary.push_back({{"perturbation", eps}, {"max_ratio", r.max_ratio}, {"degenerate", r.degenerate},
                         {"failed", r.failed}, {"reason", r.reason}});
      if (r.failed) continue;
      for (const auto& [time, ratio] : r.ratios) {
        t.rows.push_back({eps, time, ratio});
        plot(label("ratio", "eps", eps), time, ratio);
      }
      initial = std::min(initial, r.ratios.front().second);
      lo = std::min(lo, r.max_ratio);
      hi = std::max(hi, r.max_ratio);
    }
    csv("dependence.csv", std::move(t));
    json("dependence.json", summary);
    check("dependence_runs_complete", complete, static_cast<double>(o.perturbations.size()));
    if (hi > 0.0) {
      check("ratio_initial", initial >= 1.0 - 1e-9, initial);
      const double variation = hi / lo - 1.0;
      check("lipschitz_stability", variation < o.max_variation, variation);
    }
  }

  void hypotheses_kind() {
    const auto o = detail::hypotheses_options(options_);
    const RadialField grad = cfg_.data.sample_gradient(grid_, P_);
    const HypothesisReport rep = check_hypotheses(u0_, grad, P_, o.checks);
    Json j = Json::object();
    auto add = [&](const std::string& name, const ConditionCheck& c) {
      j[name] = {{"verdict", to_string(c.verdict)}, {"evidence", c.evidence}, {"measure", c.measure}};
      check("hypothesis_" + name, c.satisfied(), c.evidence, false);
    };
    add("gradient_lq", rep.gradient_lq);
    add("gradient_decay", rep.gradient_decay);
    add("kernel_limit", rep.kernel_limit);
    add("energy_density_lm", rep.energy_density_lm);
    add("profile_decay", rep.profile_decay);
    json("hypotheses.json", j);
  }

  const ExperimentConfig& cfg_;
  ModelParams P_;
  RadialGrid grid_;
  RadialField u0_;
  Reader options_;
  Bundle bundle_;
};

}  // namespace

Bundle run_experiment(const ExperimentConfig& config) {
  try {
    return Pipeline(config).run();
  } catch (const ConfigError&) {
    throw;
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(to_string(config.kind) + ": " + e.what());
  }
}

}  // namespace semiheat

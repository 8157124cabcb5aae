// Acceptance suite: one PASS/FAIL line per criterion, default regime n = 5, p = 3.
#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "semiheat/duhamel.hpp"
#include "semiheat/evolution.hpp"
#include "semiheat/kernels.hpp"
#include "semiheat/morrey.hpp"
#include "semiheat/quadrature.hpp"
#include "semiheat/similarity.hpp"
#include "semiheat/threshold.hpp"

using namespace semiheat;

namespace {

const ModelParams P = make_params(5, 3.0);

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Outcome::require(bool ok, const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  pass = pass && ok;
  if (!detail.empty()) detail += "; ";
  detail += buf;
  if (!ok) detail += " [x]";
}

std::vector<double> log_grid(double a, double b, int count) {
  std::vector<double> t(count);
  for (int k = 0; k < count; ++k) t[k] = a * std::pow(b / a, static_cast<double>(k) / (count - 1));
  return t;
}

std::vector<double> merged(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end(), [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, y); }),
          a.end());
  return a;
}

double variation(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo - 1.0;
}

// ---------------------------------------------------------------------------

Outcome kernel_semigroup() {
  Outcome o;
  const RadialGrid g(5, 40.0, 4000);
  const auto G1 = RadialField::sample(g, [](double r) { return heat_kernel(5, 1.0, r); });
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double a = 0.2 * k;
    worst = std::max(worst, std::abs(gauss_convolve(G1, 1.0, a) / heat_kernel(5, 2.0, a) - 1.0));
  }
  o.require(worst < 1e-6, "max rel err %.2e over 50 centers", worst);
  return o;
}

Outcome kernel_contraction() {
  Outcome o;
  const RadialGrid g(5, 40.0, 800);
  const auto L = MorreyLattice::default_for(g);
  const auto ts = log_grid(1e-2, 1e2, 20);
  for (const auto& [name, prof] : {std::pair{"indicator", Profile::indicator(1.0)}, std::pair{"gaussian", Profile::gaussian(1.0, 1.0)}}) {
    const auto f = prof.sample(g, P);
    double worst = 0.0;
    for (double lambda : {1.0, 2.0, 5.0})
      for (const auto& pt : smoothing_profile(f, Exponent(2.0), Exponent(2.0), lambda, ts, L))
        worst = std::max(worst, pt.contraction);
    o.require(worst <= 1.0 + 1e-6, "%s max ratio %.6f", name, worst);
  }
  return o;
}

Outcome morrey_oracle() {
  Outcome o;
  for (int n : {3, 5}) {
    const RadialGrid g(n, 40.0, 4000);
    const auto ind = RadialField::sample(g, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
    const double exact = std::sqrt(unit_ball_volume(n));
    auto L = MorreyLattice::default_for(g);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
      worst = std::max(worst, std::abs(morrey_norm(ind, {2.0, 1.0}, L) / exact - 1.0));
      L = L.refined();
    }
    o.require(worst < 0.02, "indicator n=%d rel err %.2e over 3 lattices", n, worst);
  }
  const RadialGrid g(5, 40.0, 4000);
  const auto us = RadialField::sample(g, [&](double r) { return std::pow(std::max(r, g.h()), -P.tail_exponent()); });
  const double exact = std::sqrt(5.0 * unit_ball_volume(5) / 3.0);
  const auto r = morrey_norm_detail(us, MorreySpec::critical(2.0, P), MorreyLattice::default_for(g));
  const double err = std::abs(r.value / exact - 1.0);
  o.require(err < 0.03, "singular profile %.5f vs %.5f (a=%.3g)", r.value, exact, r.a);
  return o;
}

Outcome scaling_invariance() {
  Outcome o;
  const RadialGrid g(5, 40.0, 4000);
  const auto spec = MorreySpec::critical(2.0, P);
  for (const auto& [name, prof] : {std::pair{"gaussian", Profile::gaussian(1.0, 1.0)}, std::pair{"power_tail", Profile::power_tail(1.0, 2.0, 1.0)}}) {
    const auto f = prof.sample(g, P);
    const double base = morrey_norm(f, spec);
    double worst = 0.0;
    for (double lam : {0.5, 2.0}) worst = std::max(worst, std::abs(morrey_norm(rescale_field(f, lam, P), spec) / base - 1.0));
    o.require(worst < 0.01, "%s rel change %.2e", name, worst);
  }
  return o;
}

Outcome power_identity() {
  Outcome o;
  const RadialGrid g(5, 20.0, 1000);
  const auto L = MorreyLattice::default_for(g);
  double worst = 0.0;
  for (const auto& prof : {Profile::gaussian(1.0, 2.0), Profile::indicator(1.0), Profile::power_tail(1.0, 2.0, 1.0)}) {
    const auto f = prof.sample(g, P);
    const auto f2 = f.abs_pow(2.0);
    for (double lambda : {1.0, 2.0, 5.0}) {
      const double a = morrey_norm(f2, {1.0, lambda}, L);
      const double b = std::pow(morrey_norm(f, {2.0, lambda}, L), 2);
      worst = std::max(worst, std::abs(a - b) / std::max(a, b));
    }
  }
  o.require(worst <= 1e-12, "max rel diff %.2e over 9 cases", worst);
  return o;
}

Outcome ode_blowup() {
  Outcome o;
  const RadialGrid g(5, 40.0, 800);
  for (double A : {1.0, 2.0}) {
    SolverConfig c;
    c.t_end = 2.0;
    const auto tr = solve(Profile::plateau(A, 15.0, 2.0).sample(g, P), P, c);
    if (!tr.blew_up()) {
      o.require(false, "A=%g status %s", A, status_name(tr.status).c_str());
      continue;
    }
    const auto& b = std::get<Blowup>(tr.status);
    const double exact = 1.0 / ((P.p - 1.0) * std::pow(A, P.p - 1.0));
    o.require(std::abs(b.T_est / exact - 1.0) < 0.02 && b.fit_quality > 0.999, "A=%g T_est %.6f vs %.6f, R2 %.8f", A, b.T_est,
              exact, b.fit_quality);
  }
  return o;
}

Outcome singular_steady_state() {
  Outcome o;
  std::vector<double> res;
  for (int M : {2000, 4000, 8000}) {
    const RadialGrid g(5, 40.0, M);
    const auto U = Profile::singular_steady_state().sample(g, P, BoundaryTag::even_at_origin_only);
    const kernels::RadialLaplacian lap(5, g.h(), g.size());
    std::vector<double> out(g.size());
    kernels::radial_rhs_serial(lap, P.p, true, U.values(), out);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = g.node(i);
      if (r < 0.5 || r > 20.0) continue;
      worst = std::max(worst, std::abs(out[i]) / std::pow(U[i], P.p));
    }
    res.push_back(worst);
  }
  o.require(res[1] < 1e-3, "residual at M=4000 %.2e", res[1]);
  const double order = std::log2(res[1] / res[2]);
  o.require(order >= 1.8, "observed order %.2f (M=2000/4000/8000: %.2e %.2e %.2e)", order, res[0], res[1], res[2]);
  return o;
}

// Shared decaying run for the energy laws and the chain bound.
struct DecayingRun {
  Profile prof = Profile::gaussian(0.1, 3.0);
  std::vector<double> T{2.0, 5.0, 10.0};
  std::vector<double> chain{1.0, 2.0, 5.0, 10.0};
  double ds = 0.01;

  std::vector<double> s_grid(double T_) const { return similarity_s_grid(-std::log(T_), -std::log(T_) + std::log(10.0), ds); }

  Trajectory run(int M, bool with_energy) const {
    const RadialGrid g(5, 40.0, M);
    SolverConfig c;
    c.t_end = 10.0;
    c.checkpoints = merged({0.0, 10.0}, chain);
    if (with_energy)
      for (double T_ : T) c.checkpoints = merged(c.checkpoints, similarity_times(T_, -std::log(T_), -std::log(T_) + std::log(10.0), ds));
    return solve(prof.sample(g, P), P, c);
  }

  std::vector<double> chain_ratios(const Trajectory& tr) const {
    const RadialGrid& g = tr.final_state.grid();
    const auto u0 = prof.sample(g, P);
    const auto du0 = prof.sample_gradient(g, P);
    const auto centers = MorreyLattice::default_for(g).centers;
    std::vector<double> out;
    for (double t0 : chain) {
      const double m = morrey_norm(tr.at(t0).u, MorreySpec::critical(2.0, P));
      const double N = functional_N(u0, du0, t0, log_spaced_times(t0, 1e4, 4), P, centers);
      out.push_back(m / std::pow(N, 1.0 / (P.p + 1.0)));
    }
    return out;
  }
};

const DecayingRun decaying;
const Trajectory& decaying_run() {
  static const Trajectory tr = decaying.run(2000, true);
  return tr;
}

Outcome energy_laws() {
  Outcome o;
  const Trajectory& tr = decaying_run();
  if (!tr.reached_horizon()) {
    o.require(false, "decaying run ended: %s", status_name(tr.status).c_str());
    return o;
  }
  int violations = 0;
  double min_E = INFINITY, max_res = 0.0;
  for (double T : decaying.T) {
    const auto es = energy_series(tr, T, P, decaying.s_grid(T));
    violations += es.monotonicity_violations;
    min_E = std::min(min_E, es.min_E);
    max_res = std::max(max_res, es.max_residual_rel);
  }
  o.require(violations == 0, "monotonicity violations %d", violations);
  o.require(min_E >= -1e-6, "min E %.3e", min_E);
  o.require(max_res < 1e-3, "identity residual %.2e", max_res);

  // flat data at its exact blowup time: w stays at β^β
  const double A = 1.0;
  const double T = 1.0 / ((P.p - 1.0) * std::pow(A, P.p - 1.0));
  const RadialGrid g(5, 40.0, 1000);
  const auto s_grid = similarity_s_grid(-std::log(T), -std::log(T) + 2.0, decaying.ds);
  SolverConfig c;
  c.t_end = T - std::exp(-s_grid.back());
  c.checkpoints = similarity_times(T, s_grid.front(), s_grid.back(), decaying.ds);
  const auto flat = RadialField::sample(g, [A](double) { return A; });
  const auto run = solve(flat, P, c);
  const double kappa = std::pow(P.beta, P.beta);
  const double E_exact = kappa * kappa * P.beta * (P.p - 1.0) / (2.0 * (P.p + 1.0)) * std::pow(4.0 * M_PI, 2.5);
  const auto es = energy_series(run, T, P, s_grid);
  double dev = 0.0, slope = 0.0;
  for (std::size_t j = 0; j < es.samples.size(); ++j) {
    dev = std::max(dev, std::abs(es.samples[j].E - E_exact) / E_exact);
    if (j > 0) slope = std::max(slope, std::abs(es.samples[j].E - es.samples[j - 1].E) / decaying.ds);
  }
  o.require(run.reached_horizon() && dev < 1e-4, "stationary E rel dev %.2e", dev);
  o.require(slope < 1e-6, "stationary |dE/ds| %.2e", slope);
  return o;
}

Outcome chain_bound() {
  Outcome o;
  const Trajectory& fine = decaying_run();
  const Trajectory coarse = decaying.run(1000, false);
  if (!fine.reached_horizon() || !coarse.reached_horizon()) {
    o.require(false, "decaying run did not reach the horizon");
    return o;
  }
  const auto rf = decaying.chain_ratios(fine);
  const auto rc = decaying.chain_ratios(coarse);
  const double C = *std::max_element(rf.begin(), rf.end());
  const double C_coarse = *std::max_element(rc.begin(), rc.end());
  o.require(true, "C %.4f (ratios %.3f %.3f %.3f %.3f)", C, rf[0], rf[1], rf[2], rf[3]);
  o.require(variation(rf) < 0.2, "variation across t0 %.2f", variation(rf));
  const double drift = std::abs(C / C_coarse - 1.0);
  o.require(drift < 0.2, "refinement drift %.2e", drift);
  return o;
}

Outcome decay_rates() {
  Outcome o;
  {
    const RadialGrid g(5, 80.0, 800);
    SolverConfig c;
    c.t_end = 100.0;
    const auto tr = solve(Profile::power_tail(0.05, 2.0, 1.0).sample(g, P), P, c);
    const auto d = decay_diagnostics(tr, P);
    o.require(tr.reached_horizon() && d.slope_defined && std::abs(d.slope + 1.0) <= 0.1, "power tail slope %.4f", d.slope);
    o.require(d.tail_monotone, "power tail t^beta sup nonincreasing: %s", d.tail_monotone ? "yes" : "no");
  }
  const Trajectory& tr = decaying_run();
  const auto d = decay_diagnostics(tr, P);
  o.require(tr.reached_horizon() && d.tail_monotone, "small gaussian t^beta sup nonincreasing: %s", d.tail_monotone ? "yes" : "no");
  {
    const RadialGrid g(5, 20.0, 400);
    SolverConfig c;
    c.t_end = 50.0;
    const auto run = solve(Profile::gaussian(0.5, 2.0).sample(g, P), P, c);
    const auto dd = decay_diagnostics(run, P);
    o.require(run.reached_horizon() && dd.tail_monotone, "gaussian(0.5) t^beta sup nonincreasing: %s", dd.tail_monotone ? "yes" : "no");
  }
  return o;
}

Outcome mild_classical() {
  Outcome o;
  const RadialGrid g(5, 20.0, 400);
  const auto u0 = Profile::gaussian(0.5, 2.0).sample(g, P);
  const std::vector<double> ts{0.1, 0.5, 1.0};
  const auto run = picard_solve(u0, P, 1.0, 50, ts);
  SolverConfig c;
  c.t_end = 1.0;
  c.checkpoints = ts;
  const auto tr = solve(u0, P, c);
  o.require(run.converged, "picard converged in %d iterates", run.iterations);
  for (const auto& s : run.samples) {
    const auto& ref = tr.at(s.t).u;
    const double rel = sup_norm(s.u - ref) / sup_norm(ref);
    o.require(rel < 0.01, "t=%g rel %.2e", s.t, rel);
  }
  return o;
}

Outcome threshold_bisection() {
  Outcome o;
  const RadialGrid g(5, 40.0, 400);
  const auto phi = Profile::gaussian(1.0, 2.0).sample(g, P);
  SolverConfig c;
  c.t_end = 200.0;
  c.checkpoints = merged(merged({0.0}, log_spaced_times(0.1, 200.0, 4)), {1.0});
  const auto res = bisect_lambda(phi, P, c, 1e-3);
  o.require(res.rel_width < 1e-3 && !res.stalled, "bracket [%.6f, %.6f] width %.2e", res.lambda_lo, res.lambda_hi, res.rel_width);
  o.require(res.consistent, "bracket verdicts consistent: %s", res.consistent ? "yes" : "no");

  bool decreasing = true;
  double prev = INFINITY, first = 0.0, last = 0.0;
  for (const auto& [t, v] : res.morrey_series_lo) {
    if (t < 1.0 - 1e-12) continue;
    if (prev == INFINITY) first = v;
    decreasing = decreasing && v <= prev;
    prev = last = v;
  }
  o.require(decreasing && first > 0.0, "Morrey series at lambda_lo %.3g -> %.3g", first, last);

  const DataFamily family = [&](double lam) { return phi.scaled(lam); };
  const auto probes = borderline_probe(res, family, P, c, {1e-1, 1e-2, 1e-3});
  bool all_decay = true, nondecreasing = true;
  double prev_t0 = -INFINITY;
  std::string t0s;
  for (const auto& pr : probes) {
    all_decay = all_decay && pr.result.verdict == RunVerdict::decaying;
    nondecreasing = nondecreasing && pr.t0 >= prev_t0;
    prev_t0 = pr.t0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.3g", t0s.empty() ? "" : " ", pr.t0);
    t0s += buf;
  }
  o.require(all_decay, "probes decaying: %s", all_decay ? "yes" : "no");
  o.require(nondecreasing, "t0 for delta 1e-1,1e-2,1e-3: %s", t0s.c_str());
  return o;
}

Outcome continuous_dependence_check() {
  Outcome o;
  const RadialGrid g(5, 20.0, 400);
  const auto u0 = Profile::gaussian(0.5, 2.0).sample(g, P);
  SolverConfig c;
  c.t_end = 5.0;
  c.checkpoints = merged(merged({0.0}, log_spaced_times(0.01, 5.0, 4)), {5.0});
  std::vector<double> maxima, late;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const auto r = continuous_dependence(u0, u0.scaled(1.0 + eps), 5.0, P, MorreySpec::critical(2.0, P), c);
    if (r.failed) {
      o.require(false, "eps %g run failed: %s", eps, r.reason.c_str());
      return o;
    }
    maxima.push_back(r.max_ratio);
    double m = 0.0;
    for (const auto& [t, v] : r.ratios)
      if (t > 0.0) m = std::max(m, v);
    late.push_back(m);
  }
  o.require(variation(maxima) < 0.25, "max ratios %.4f %.4f %.4f, variation %.2e", maxima[0], maxima[1], maxima[2], variation(maxima));
  o.require(true, "max over t>0: %.4f %.4f %.4f", late[0], late[1], late[2]);
  return o;
}

Outcome gradient_majorant() {
  Outcome o;
  const RadialGrid g(5, 20.0, 400);
  const auto prof = Profile::gaussian(1.0, 2.0);
  const auto u0 = prof.sample(g, P);
  SolverConfig c;
  c.t_end = 2.0;
  c.checkpoints = merged({0.0}, log_spaced_times(1e-3, 2.0, 8));
  const auto tr = solve(u0, P, c);
  const double t_small = 0.05 * c.t_end;
  const auto m = gradient_majorant_check(tr, u0, prof.sample_gradient(g, P), t_small);
  o.require(m.holds && m.checkpoints > 0, "%d checkpoints in (0, %g], margin %.4f", m.checkpoints, t_small, m.margin);
  double change = 0.0;
  for (const auto& cp : tr.checkpoints)
    if (cp.t <= t_small) change = std::max(change, std::abs(sup_norm(cp.u) / sup_norm(u0) - 1.0));
  o.require(true, "sup-norm change over the window %.2e", change);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"kernel_semigroup", kernel_semigroup},
      {"kernel_contraction", kernel_contraction},
      {"morrey_oracle", morrey_oracle},
      {"scaling_invariance", scaling_invariance},
      {"power_identity", power_identity},
      {"ode_blowup_oracle", ode_blowup},
      {"singular_steady_state", singular_steady_state},
      {"energy_laws", energy_laws},
      {"morrey_energy_chain", chain_bound},
      {"decay_rates", decay_rates},
      {"mild_classical_agreement", mild_classical},
      {"threshold_bisection", threshold_bisection},
      {"continuous_dependence", continuous_dependence_check},
      {"gradient_majorant", gradient_majorant},
  };
  int failed = 0;
  int k = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !out.pass;
    std::printf("[%2d/%zu] %s %-26s %s (%.1fs)\n", ++k, criteria.size(), out.pass ? "PASS" : "FAIL", name,
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}

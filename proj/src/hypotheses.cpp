#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "semiheat/model.hpp"
#include "semiheat/quadrature.hpp"

namespace semiheat {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::satisfied: return "satisfied";
    case Verdict::violated: return "violated";
    case Verdict::undecidable: return "undecidable";
  }
  return "undecidable";
}

TailFit fit_tail_exponent(const RadialField& f) {
  const auto& g = f.grid();
  const std::size_t start = (3 * (f.size() - 1)) / 4;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (std::size_t i = std::max<std::size_t>(start, 1); i < f.size(); ++i) {
    const double v = std::abs(f[i]);
    if (!(v > 1e-12)) continue;
    const double x = std::log(g.node(i));
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  TailFit fit;
  fit.points = k;
  if (k == 0) {
    fit.kind = TailFit::Kind::negligible;
    fit.exponent = std::numeric_limits<double>::infinity();
    return fit;
  }
  if (k < 8) return fit;
  const double denom = k * sxx - sx * sx;
  if (!(denom > 0.0)) return fit;
  fit.kind = TailFit::Kind::fitted;
  fit.exponent = -(k * sxy - sx * sy) / denom;
  return fit;
}

namespace {

// max over the outer quarter of r^k |f|.
double tail_weighted_sup(const RadialField& f, double k) {
  const auto& g = f.grid();
  double m = 0.0;
  for (std::size_t i = (3 * (f.size() - 1)) / 4; i < f.size(); ++i)
    m = std::max(m, std::pow(g.node(i), k) * std::abs(f[i]));
  return m;
}

Verdict decay_verdict(const TailFit& fit, double target, double margin) {
  switch (fit.kind) {
    case TailFit::Kind::negligible: return Verdict::satisfied;
    case TailFit::Kind::undecidable: return Verdict::undecidable;
    case TailFit::Kind::fitted: return fit.exponent >= target + margin ? Verdict::satisfied : Verdict::violated;
  }
  return Verdict::undecidable;
}

void require_consistent_gradient(const RadialField& f, const RadialField& grad) {
  if (!(f.grid() == grad.grid())) throw std::invalid_argument("check_hypotheses: grids differ");
  const RadialField fd = finite_difference_gradient(f);
  const double peak = sup_norm(grad);
  for (std::size_t i = 10; i + 2 < f.size(); ++i) {
    const double tol = 0.05 * std::abs(grad[i]) + 0.02 * peak + 1e-12;
    if (std::abs(fd[i] - grad[i]) > tol)
      throw std::invalid_argument("check_hypotheses: gradient is inconsistent with the field at r = " +
                                  std::to_string(f.grid().node(i)));
  }
}

RadialField combine(const RadialField& a, double pa, const RadialField& b, double pb,
                    const std::function<double(double, double, double)>& fn) {
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = fn(std::pow(std::abs(a[i]), pa), std::pow(std::abs(b[i]), pb), a.grid().node(i));
  return RadialField(a.grid(), std::move(v), BoundaryTag::even_at_origin_only);
}

double sup_convolution(const RadialField& f, double t, const std::vector<double>& centers) {
  double m = 0.0;
  for (double a : centers) m = std::max(m, std::abs(gauss_convolve(f, t, a)));
  return m;
}

}  // namespace

HypothesisReport check_hypotheses(const RadialField& f, const RadialField& grad_f,
                                  const ModelParams& params, const HypothesisOptions& opts) {
  require_consistent_gradient(f, grad_f);
  const double n = params.n;
  const double p = params.p;
  const double k = params.tail_exponent();
  HypothesisReport rep;

  const TailFit grad_fit = fit_tail_exponent(grad_f);

  // ∇u0 ∈ L^q for some q in [2, n(p-1)/(p+1)).
  {
    const double q_hi = n * (p - 1.0) / (p + 1.0);
    auto& c = rep.gradient_lq;
    c.measure = "L^2 norm of |grad u0|";
    c.evidence = std::sqrt(BallIntegrator(grad_f, 2.0).total());
    if (!(q_hi > 2.0)) {
      c.verdict = Verdict::violated;
    } else {
      c.verdict = decay_verdict(grad_fit, n / q_hi, opts.tail_margin);
    }
  }

  // |∇u0| = o(r^{-k-1}).
  {
    auto& c = rep.gradient_decay;
    c.measure = "max over outer quarter of r^(2/(p-1)+1) |grad u0|";
    c.evidence = tail_weighted_sup(grad_f, k + 1.0);
    c.verdict = decay_verdict(grad_fit, k + 1.0, opts.tail_margin);
  }

  // |u0|^{p+1} + |∇u0|² ∈ L^m for some m in [1, (n/2)(p-1)/(p+1)).
  const RadialField density =
      combine(f, p + 1.0, grad_f, 2.0, [](double a, double b, double) { return a + b; });
  {
    const double m_hi = 0.5 * n * (p - 1.0) / (p + 1.0);
    auto& c = rep.energy_density_lm;
    c.measure = "L^1 norm of |u0|^(p+1) + |grad u0|^2";
    c.evidence = BallIntegrator(density, 1.0).total();
    c.verdict = m_hi > 1.0 ? decay_verdict(fit_tail_exponent(density), n / m_hi, opts.tail_margin)
                           : Verdict::violated;
  }

  // |u0| + r|∇u0| = o(r^{-k}).
  {
    const RadialField h =
        combine(f, 1.0, grad_f, 1.0, [](double a, double b, double r) { return a + r * b; });
    auto& c = rep.profile_decay;
    c.measure = "max over outer quarter of r^(2/(p-1)) (|u0| + r |grad u0|)";
    c.evidence = tail_weighted_sup(h, k);
    c.verdict = decay_verdict(fit_tail_exponent(h), k, opts.tail_margin);
  }

  // t^{(p+1)/(p-1)} |G_t * |∇u0|²|_∞ + t^{2/(p-1)} |G_t * |u0|²|_∞ -> 0.
  {
    auto& c = rep.kernel_limit;
    c.measure = "kernel quantity at t_max; trend slope judged over the last two decades";
    const RadialField g2 = grad_f.abs_pow(2.0);
    const RadialField u2 = RadialField(f.grid(), f.data(), BoundaryTag::even_at_origin_only).abs_pow(2.0);
    std::vector<double> centers{0.0};
    const auto& grid = f.grid();
    for (int i = 0; i < 24; ++i)
      centers.push_back(grid.h() * std::pow(grid.r_max() / grid.h(), i / 23.0));
    const int decades = static_cast<int>(std::lround(std::log10(opts.t_max / opts.t_min)));
    const int count = decades * opts.t_per_decade + 1;
    std::vector<double> ts, ks;
    for (int i = 0; i < count; ++i) {
      const double t = opts.t_min * std::pow(opts.t_max / opts.t_min, static_cast<double>(i) / (count - 1));
      const double val = std::pow(t, (p + 1.0) / (p - 1.0)) * sup_convolution(g2, t, centers) +
                         std::pow(t, k) * sup_convolution(u2, t, centers);
      ts.push_back(t);
      ks.push_back(val);
    }
    c.evidence = ks.back();
    if (*std::max_element(ks.begin(), ks.end()) == 0.0) {
      c.verdict = Verdict::satisfied;
    } else {
      const double t_fit = opts.t_max / 100.0;
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int m = 0;
      bool positive = true;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < t_fit * (1.0 - 1e-12)) continue;
        if (!(ks[i] > 0.0)) { positive = false; break; }
        const double x = std::log(ts[i]), y = std::log(ks[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
      }
      if (!positive || m < 3) {
        c.verdict = Verdict::undecidable;
      } else {
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        c.verdict = slope < opts.trend_threshold ? Verdict::satisfied : Verdict::violated;
      }
    }
  }
  return rep;
}

}  // namespace semiheat

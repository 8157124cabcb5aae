#include "semiheat/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <math.h>  // pchip.hpp calls unqualified isnan
#include <boost/math/interpolators/pchip.hpp>

#include "semiheat/quadrature.hpp"

namespace semiheat {

RescaledField to_similarity(const RadialField& u, double t, double T, const ModelParams& params,
                            double y_max, double h_y) {
  if (!(T > t)) throw std::invalid_argument("to_similarity: need T > t");
  if (!(y_max >= 8.0)) throw std::invalid_argument("to_similarity: Y_max must be >= 8");
  if (!(h_y > 0.0)) throw std::invalid_argument("to_similarity: h_y must be positive");
  const auto& g = u.grid();
  RescaledField out;
  out.n = g.dim();
  out.h_y = h_y;
  out.y_max = y_max;
  out.T = T;
  out.t = t;
  const double tau = T - t;
  out.s = -std::log(tau);
  const double root = std::sqrt(tau);
  out.truncated = y_max * root > g.r_max();
  const double amp = std::pow(tau, params.beta);
  const auto count = static_cast<std::size_t>(std::llround(y_max / h_y)) + 1;
  out.w.resize(count);
  using boost::math::interpolators::pchip;
  pchip<std::vector<double>> interp(g.nodes(), std::vector<double>(u.data()));
  for (std::size_t j = 0; j < count; ++j) {
    const double x = static_cast<double>(j) * h_y * root;
    out.w[j] = x <= g.r_max() ? amp * interp(x) : 0.0;
  }
  return out;
}

EnergyValue energy(const RescaledField& w, const ModelParams& params) {
  const std::size_t m = w.w.size();
  if (m < 3) throw std::invalid_argument("energy: rescaled field too short");
  const double h = w.h_y;
  const double p = params.p;
  const int n = params.n;
  EnergyValue ev;
  double e = 0.0, mass = 0.0, pot = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double y = static_cast<double>(j) * h;
    double dw;
    if (j == 0) {
      dw = 0.0;
    } else if (j + 1 == m) {
      dw = (3.0 * w.w[j] - 4.0 * w.w[j - 1] + w.w[j - 2]) / (2.0 * h);
    } else {
      dw = (w.w[j + 1] - w.w[j - 1]) / (2.0 * h);
    }
    const double weight = (j == 0 || j + 1 == m ? 0.5 : 1.0) * h * std::exp(-0.25 * y * y) * std::pow(y, n - 1);
    const double a = std::abs(w.w[j]);
    const double ap = std::pow(a, p + 1.0);
    e += weight * (0.5 * dw * dw + 0.5 * params.beta * a * a - ap / (p + 1.0));
    mass += weight * a * a;
    pot += weight * ap;
  }
  const double area = unit_sphere_area(n);
  ev.E = area * e;
  ev.m = area * mass;
  ev.potential = area * pot;
  return ev;
}

std::vector<double> similarity_s_grid(double s_first, double s_last, double ds) {
  if (!(ds > 0.0) || !(s_last >= s_first)) throw std::invalid_argument("similarity_s_grid: bad range");
  const auto count = static_cast<std::size_t>(std::floor((s_last - s_first) / ds + 1e-9)) + 1;
  std::vector<double> s(count);
  for (std::size_t j = 0; j < count; ++j) s[j] = s_first + static_cast<double>(j) * ds;
  return s;
}

std::vector<double> similarity_times(double T, double s_first, double s_last, double ds) {
  std::vector<double> t;
  for (double s : similarity_s_grid(s_first, s_last, ds)) {
    const double v = T - std::exp(-s);
    t.push_back(v < 1e-12 * T ? 0.0 : v);
  }
  return t;
}

namespace {
// Derivative at x[i] of the interpolating polynomial through the five nearest
// samples (centered in the interior), Fornberg's weights.
double five_point_derivative(const std::vector<double>& x, const std::vector<double>& y, std::size_t i) {
  const std::size_t m = x.size();
  const std::size_t width = std::min<std::size_t>(5, m);
  std::size_t a = i >= width / 2 ? i - width / 2 : 0;
  if (a + width > m) a = m - width;
  const double z = x[i];
  double c[5][2] = {};
  double c1 = 1.0, c4 = x[a] - z;
  c[0][0] = 1.0;
  for (std::size_t k = 1; k < width; ++k) {
    const std::size_t mn = std::min<std::size_t>(k, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[a + k] - z;
    for (std::size_t j = 0; j < k; ++j) {
      const double c3 = x[a + k] - x[a + j];
      c2 *= c3;
      if (j == k - 1) {
        for (std::size_t d = mn; d >= 1; --d) c[k][d] = c1 * (d * c[k - 1][d - 1] - c5 * c[k - 1][d]) / c2;
        c[k][0] = -c1 * c5 * c[k - 1][0] / c2;
      }
      for (std::size_t d = mn; d >= 1; --d) c[j][d] = (c4 * c[j][d] - d * c[j][d - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < width; ++k) acc += c[k][1] * y[a + k];
  return acc;
}
}  // namespace

EnergySeries energy_series(const Trajectory& traj, double T, const ModelParams& params,
                           const std::vector<double>& s_grid) {
  if (s_grid.size() < 5) throw std::invalid_argument("energy_series: need at least 5 values of s");
  EnergySeries es;
  es.T = T;
  std::vector<double> ms;
  for (double s : s_grid) {
    double t = T - std::exp(-s);
    if (t < 1e-12 * T) t = 0.0;
    const Checkpoint& cp = traj.at(t);
    const RescaledField w = to_similarity(cp.u, cp.t, T, params);
    es.truncated = es.truncated || w.truncated;
    const EnergyValue ev = energy(w, params);
    es.samples.push_back({s, ev.E, ev.m, ev.potential, 0.0, 0.0, 0.0});
    ms.push_back(ev.m);
  }
  const double c = (params.p - 1.0) / (params.p + 1.0);
  es.min_E = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < es.samples.size(); ++j) {
    auto& smp = es.samples[j];
    smp.dm_ds = five_point_derivative(s_grid, ms, j);
    const double lhs = 0.5 * smp.dm_ds;
    const double rhs = -2.0 * smp.E + c * smp.potential;
    smp.residual = std::abs(lhs - rhs);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    smp.residual_rel = scale > 0.0 ? smp.residual / scale : 0.0;
    es.max_residual_rel = std::max(es.max_residual_rel, smp.residual_rel);
    es.min_E = std::min(es.min_E, smp.E);
    if (j > 0) {
      const double prev = es.samples[j - 1].E;
      if (smp.E > prev + 1e-6 * (1.0 + std::abs(prev))) ++es.monotonicity_violations;
    }
  }
  const double e0 = es.samples.front().E;
  if (e0 > 0.0) {
    double mmax = 0.0;
    for (double m : ms) mmax = std::max(mmax, m);
    es.mass_constant = mmax / std::pow(e0, 2.0 / (params.p + 1.0));
  }
  return es;
}

namespace {
double a_integrand(const RadialField& u2, const RadialField& g2, double t, double a, const ModelParams& params) {
  const double p = params.p;
  return std::pow(t, (p + 1.0) / (p - 1.0)) * gauss_convolve(g2, t, a) +
         std::pow(t, params.tail_exponent()) * gauss_convolve(u2, t, a);
}

RadialField squared(const RadialField& f) {
  return RadialField(f.grid(), f.abs_pow(2.0).data(), BoundaryTag::even_at_origin_only);
}
}  // namespace

double functional_A(const RadialField& u0, const RadialField& grad_u0, double T, double a,
                    const ModelParams& params) {
  if (!(T > 0.0)) throw std::invalid_argument("functional_A: T must be positive");
  return a_integrand(squared(u0), squared(grad_u0), T, a, params);
}

double functional_N(const RadialField& u0, const RadialField& grad_u0, double t0,
                    const std::vector<double>& t_grid, const ModelParams& params,
                    const std::vector<double>& centers) {
  if (t_grid.empty() || centers.empty()) throw std::invalid_argument("functional_N: empty grid");
  const RadialField u2 = squared(u0), g2 = squared(grad_u0);
  double best = 0.0;
  for (double t : t_grid) {
    if (t < t0 * (1.0 - 1e-12)) throw std::invalid_argument("functional_N: times must be >= t0");
    for (double a : centers) best = std::max(best, a_integrand(u2, g2, t, a, params));
  }
  return best;
}

}  // namespace semiheat

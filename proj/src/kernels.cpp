#include "semiheat/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace semiheat::kernels {

namespace {

inline double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

inline double laplacian_at(const RadialLaplacian& lap, std::span<const double> u, std::size_t i) {
  if (i == 0) return 2.0 * lap.n * (u[1] - u[0]) * lap.inv_h2;
  return (lap.upper[i] * (u[i + 1] - u[i]) - lap.lower[i] * (u[i] - u[i - 1])) * lap.inv_h2;
}

// Reaction term with the exponent fixed at compile time where possible.
template <int P>
inline double reaction(double u, double p) {
  if constexpr (P == 0) {
    return signed_power(u, p);
  } else {
    const double a = std::abs(u);
    double r = u;
    for (int k = 1; k < P; ++k) r *= a;
    return r;
  }
}

template <int P, bool Parallel>
void rhs_loop(const RadialLaplacian& lap, double p, bool nonlinear, std::span<const double> u,
              std::span<double> out) {
  const std::size_t last = u.size() - 1;
  const double* up = lap.upper.data();
  const double* lo = lap.lower.data();
  const double s = lap.inv_h2;
  out[0] = laplacian_at(lap, u, 0) + (nonlinear ? reaction<P>(u[0], p) : 0.0);
  if (nonlinear) {
#pragma omp parallel for schedule(static) if (Parallel && last > 2048)
    for (std::size_t i = 1; i < last; ++i)
      out[i] = (up[i] * (u[i + 1] - u[i]) - lo[i] * (u[i] - u[i - 1])) * s + reaction<P>(u[i], p);
  } else {
#pragma omp parallel for schedule(static) if (Parallel && last > 2048)
    for (std::size_t i = 1; i < last; ++i) out[i] = (up[i] * (u[i + 1] - u[i]) - lo[i] * (u[i] - u[i - 1])) * s;
  }
  out[last] = 0.0;
}

template <bool Parallel>
void rhs_dispatch(const RadialLaplacian& lap, double p, bool nonlinear, std::span<const double> u,
                  std::span<double> out) {
  if (p == 2.0) return rhs_loop<2, Parallel>(lap, p, nonlinear, u, out);
  if (p == 3.0) return rhs_loop<3, Parallel>(lap, p, nonlinear, u, out);
  if (p == 5.0) return rhs_loop<5, Parallel>(lap, p, nonlinear, u, out);
  if (p == 7.0) return rhs_loop<7, Parallel>(lap, p, nonlinear, u, out);
  rhs_loop<0, Parallel>(lap, p, nonlinear, u, out);
}

inline double sweep_at(const BallIntegrator& ball, double lambda, double a, double R, bool& trunc) {
  const BallIntegral b = ball(a, R);
  trunc = b.truncated;
  return std::pow(R, lambda - ball.grid().dim()) * b.value;
}

}  // namespace

RadialLaplacian::RadialLaplacian(int dim, double h, std::size_t size)
    : n(dim), inv_h2(1.0 / (h * h)), lower(size, 0.0), upper(size, 0.0) {
  for (std::size_t i = 1; i < size; ++i) {
    const double x = static_cast<double>(i);
    const double volume = (ipow(x + 0.5, n) - ipow(x - 0.5, n)) / n;
    lower[i] = ipow(x - 0.5, n - 1) / volume;
    upper[i] = ipow(x + 0.5, n - 1) / volume;
  }
}

void radial_rhs_serial(const RadialLaplacian& lap, double p, bool nonlinear,
                       std::span<const double> u, std::span<double> out) {
  rhs_dispatch<false>(lap, p, nonlinear, u, out);
}

void radial_rhs_omp(const RadialLaplacian& lap, double p, bool nonlinear,
                    std::span<const double> u, std::span<double> out) {
  rhs_dispatch<true>(lap, p, nonlinear, u, out);
}

double heat_point(const RadialGrid& grid, const AngularKernel& angular, double t,
                  std::span<const double> f, double a) {
  const int n = grid.dim();
  const double h = grid.h();
  const double reach = std::sqrt(2800.0 * t);
  const double s_lo = std::max(0.0, a - reach);
  const double s_hi = std::min(grid.r_max(), a + reach);
  if (s_lo > s_hi) return 0.0;
  const std::size_t last = f.size() - 1;
  const std::size_t j0 = static_cast<std::size_t>(std::ceil(s_lo / h));
  const std::size_t j1 = std::min(last, static_cast<std::size_t>(std::floor(s_hi / h)));
  const double inv4t = 1.0 / (4.0 * t);
  double acc = 0.0;
  for (std::size_t j = j0; j <= j1; ++j) {
    if (f[j] == 0.0) continue;
    const double s = grid.node(j);
    const double d = s - a;
    const double e = d * d * inv4t;
    if (e > 700.0) continue;
    const double w = (j == 0 || j == last) ? 0.5 * h : h;
    acc += w * f[j] * ipow(s, n - 1) * std::exp(-e) * angular(a * s * 2.0 * inv4t);
  }
  return acc * std::pow(4.0 * M_PI * t, -0.5 * n) * unit_sphere_area(n - 1);
}

void heat_apply_serial(const RadialGrid& grid, const AngularKernel& angular, double t,
                       std::span<const double> f, std::span<double> out) {
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = heat_point(grid, angular, t, f, grid.node(i));
}

void heat_apply_omp(const RadialGrid& grid, const AngularKernel& angular, double t,
                    std::span<const double> f, std::span<double> out) {
  const std::size_t m = f.size();
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < m; ++i) out[i] = heat_point(grid, angular, t, f, grid.node(i));
}

bool morrey_sweep_serial(const BallIntegrator& ball, double lambda, std::span<const double> centers,
                         std::span<const double> radii, std::span<double> out) {
  bool any = false;
  for (std::size_t c = 0; c < centers.size(); ++c)
    for (std::size_t k = 0; k < radii.size(); ++k) {
      bool trunc = false;
      out[c * radii.size() + k] = sweep_at(ball, lambda, centers[c], radii[k], trunc);
      any = any || trunc;
    }
  return any;
}

bool morrey_sweep_omp(const BallIntegrator& ball, double lambda, std::span<const double> centers,
                      std::span<const double> radii, std::span<double> out) {
  const std::size_t nr = radii.size();
  const std::size_t total = centers.size() * nr;
  bool any = false;
#pragma omp parallel for schedule(dynamic, 8) reduction(|| : any)
  for (std::size_t idx = 0; idx < total; ++idx) {
    bool trunc = false;
    out[idx] = sweep_at(ball, lambda, centers[idx / nr], radii[idx % nr], trunc);
    any = any || trunc;
  }
  return any;
}

}  // namespace semiheat::kernels

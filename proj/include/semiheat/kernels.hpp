#pragma once

// Data-parallel inner loops. Each kernel has a serial reference and an
// OpenMP variant performing the same per-element arithmetic, so the two agree
// bit for bit; tests compare them and bench/ times them.

#include <cmath>
#include <span>
#include <vector>

#include "semiheat/quadrature.hpp"

namespace semiheat::kernels {

/// |u|^{p-1} u with a multiplication path for small integer p.
inline double signed_power(double u, double p) {
  const double a = std::abs(u);
  const int ip = static_cast<int>(p);
  if (static_cast<double>(ip) == p && ip >= 1 && ip <= 9) {
    double r = u;
    for (int k = 1; k < ip; ++k) r *= a;
    return r;
  }
  return std::copysign(std::pow(a, p), u);
}

/// Finite-volume radial Laplacian (r^{n-1} u')' / r^{n-1}: fluxes through the
/// spheres r_{i±1/2}, divided by the shell volume. Exact on r², and equal to
/// 2n(u_1 - u_0)/h² at the origin.
struct RadialLaplacian {
  RadialLaplacian(int n, double h, std::size_t size);
  int n;
  double inv_h2;
  std::vector<double> lower;  // coefficient of u_{i-1}
  std::vector<double> upper;  // coefficient of u_{i+1}
};

/// out_i = (L u)_i + [nonlinear] |u_i|^{p-1} u_i; the last node is held fixed (out = 0).
void radial_rhs_serial(const RadialLaplacian& lap, double p, bool nonlinear,
                       std::span<const double> u, std::span<double> out);
void radial_rhs_omp(const RadialLaplacian& lap, double p, bool nonlinear,
                    std::span<const double> u, std::span<double> out);

/// (G_t * f)(a) for one target point.
double heat_point(const RadialGrid& grid, const AngularKernel& angular, double t,
                  std::span<const double> f, double a);

/// (G_t * f) at every node.
void heat_apply_serial(const RadialGrid& grid, const AngularKernel& angular, double t,
                       std::span<const double> f, std::span<double> out);
void heat_apply_omp(const RadialGrid& grid, const AngularKernel& angular, double t,
                    std::span<const double> f, std::span<double> out);

/// out[c * radii.size() + k] = R_k^{λ-n} ∫_{B_{R_k}(a_c)} |f|^q. Returns true if
/// any ball was truncated by the grid.
bool morrey_sweep_serial(const BallIntegrator& ball, double lambda, std::span<const double> centers,
                         std::span<const double> radii, std::span<double> out);
bool morrey_sweep_omp(const BallIntegrator& ball, double lambda, std::span<const double> centers,
                      std::span<const double> radii, std::span<double> out);

}  // namespace semiheat::kernels

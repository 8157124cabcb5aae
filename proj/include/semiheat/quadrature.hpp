#pragma once

#include <memory>
#include <vector>

#include "semiheat/model.hpp"

namespace semiheat {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int points);

  /// ∫_a^b g using this rule mapped onto [a, b].
  template <class F>
  double integrate(F&& g, double a, double b) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) acc += weights[k] * g(mid + half * nodes[k]);
    return acc * half;
  }
};

/// Volume ω_n of the unit ball in R^n.
double unit_ball_volume(int n);
/// Surface area S_{n-1} = n ω_n of the unit sphere in R^n.
double unit_sphere_area(int n);

/// ∫_0^π e^{z(cos θ - 1)} sin^{n-2}θ dθ by 64-point Gauss-Legendre, doubled
/// until the relative change drops below `rel_tol`.
double angular_integral_direct(int n, double z, double rel_tol = 1e-12);

/// Normalised cap measure ∫_0^θ sin^{n-2} / ∫_0^π sin^{n-2} by Gauss-Legendre.
double cap_measure_direct(int n, double theta);

/// Tabulated cap measure F(θ) for one dimension (cubic Hermite, exact slopes).
class CapTable {
 public:
  explicit CapTable(int n);
  int dim() const { return n_; }
  double sphere_area() const { return sphere_area_; }
  double fraction_at_angle(double theta) const;
  /// Fraction at cos θ = c, c clamped to [-1, 1].
  double fraction_at_cosine(double c) const;

 private:
  int n_;
  double sphere_area_;
  double norm_;
  double step_;
  std::vector<double> value_;
  std::vector<double> slope_;
};

/// Tabulated e^{-z} Λ_n(z) = ∫_0^π e^{z(cos θ - 1)} sin^{n-2}θ dθ in the
/// variable x = log(1+z).
class AngularKernel {
 public:
  explicit AngularKernel(int n);
  int dim() const { return n_; }
  double operator()(double z) const;
  double z_max() const { return z_max_; }

 private:
  double decay(double one_plus_z) const;  // (1+z)^{-(n-1)/2}

  int n_;
  double step_;
  double z_max_;
  std::vector<double> value_;
  std::vector<double> slope_;
};

/// Shared per-dimension tables; thread-safe construction.
std::shared_ptr<const CapTable> cap_table(int n);
std::shared_ptr<const AngularKernel> angular_kernel(int n);

/// Fraction of the sphere {|x| = s} lying inside B_R(a e_1).
double cap_fraction(int n, double a, double s, double R);

struct BallIntegral {
  double value = 0.0;
  bool truncated = false;  ///< ball leaves the grid while the field tail is nonzero
};

/// Precomputed |f|^q with cumulative radial integrals, for repeated ball
/// integrals of one field. Between nodes |f|^q is interpolated (power law
/// where both ends are positive, linear otherwise, even quadratic on the first
/// cell) and integrated exactly against s^{n-1}; the off-center annulus uses
/// the trapezoid rule.
class BallIntegrator {
 public:
  BallIntegrator(const RadialField& f, double q);

  /// ∫_{B_R(a e_1)} |f|^q dx.
  BallIntegral operator()(double a, double R) const;
  /// ∫_{R^n} |f|^q dx over the zero-extended field.
  double total() const;
  const RadialGrid& grid() const { return grid_; }

 private:
  double prefix(double s) const;  // ∫_0^s of the interpolated density
  double density(double s) const;
  double cell_integral(std::size_t j, double x) const;

  RadialGrid grid_;
  std::shared_ptr<const CapTable> caps_;
  int n_;
  std::vector<double> power_;    // |f_i|^q
  std::vector<double> density_;  // |f_i|^q r_i^{n-1}
  std::vector<double> slope_;    // power-law exponent per cell
  std::vector<char> geometric_;
  std::vector<double> cumulative_;
  bool tail_nonzero_;
};

BallIntegral ball_integral(const RadialField& f, double q, double a, double R);

/// (G_t * f)(a e_1) for a radial field, zero-extended beyond R_max.
double gauss_convolve(const RadialField& f, double t, double a);

/// G_t * f evaluated at every grid node.
RadialField heat_apply(const RadialField& f, double t);

/// G_t(r) = (4πt)^{-n/2} e^{-r²/4t}.
double heat_kernel(int n, double t, double r);

/// Banded matrix of G_t * (·) on one grid, cached for repeated application.
/// For t below h²/2 the kernel is narrower than the grid and the identity is used.
class HeatMatrix {
 public:
  HeatMatrix(const RadialGrid& grid, double t);
  void apply(std::span<const double> in, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> in) const;
  double time() const { return t_; }
  bool identity() const { return identity_; }

 private:
  std::size_t size_;
  double t_;
  bool identity_;
  std::vector<std::size_t> lo_;
  std::vector<std::size_t> offset_;
  std::vector<double> weights_;
};

}  // namespace semiheat

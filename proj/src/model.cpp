#include "semiheat/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <math.h>  // pchip.hpp calls unqualified isnan
#include <boost/math/interpolators/pchip.hpp>

namespace semiheat {

ModelParams make_params(int n, double p) {
  if (n < 3) throw std::invalid_argument("make_params: dimension n must be >= 3");
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("make_params: exponent p must be > 1");
  ModelParams m;
  m.n = n;
  m.p = p;
  m.p_S = static_cast<double>(n + 2) / static_cast<double>(n - 2);
  m.beta = 1.0 / (p - 1.0);
  m.mu = 4.0 * m.beta;
  m.q_c = static_cast<double>(n) / (2.0 * m.beta);
  m.supercritical = p > m.p_S;
  return m;
}

RadialGrid::RadialGrid(int n, double r_max, int intervals)
    : n_(n), r_max_(r_max), intervals_(intervals), h_(r_max / intervals) {
  if (n < 1) throw std::invalid_argument("RadialGrid: dimension must be positive");
  if (!(r_max > 0.0)) throw std::invalid_argument("RadialGrid: R_max must be positive");
  if (intervals < 16) throw std::invalid_argument("RadialGrid: need at least 16 intervals");
}

std::vector<double> RadialGrid::nodes() const {
  std::vector<double> r(size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = node(i);
  return r;
}

std::string to_string(BoundaryTag tag) {
  return tag == BoundaryTag::dirichlet_at_rmax ? "dirichlet_at_Rmax" : "even_at_origin_only";
}

BoundaryTag boundary_from_string(const std::string& name) {
  if (name == "dirichlet_at_Rmax" || name == "dirichlet") return BoundaryTag::dirichlet_at_rmax;
  if (name == "even_at_origin_only" || name == "zero_tail") return BoundaryTag::even_at_origin_only;
  throw std::invalid_argument("unknown boundary tag: " + name);
}

RadialField::RadialField(RadialGrid grid, std::vector<double> values, BoundaryTag boundary)
    : grid_(grid), values_(std::move(values)), boundary_(boundary) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("RadialField: value count does not match the grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("RadialField: non-finite sample");
  if (boundary_ == BoundaryTag::dirichlet_at_rmax && values_.back() != 0.0)
    throw std::invalid_argument("RadialField: dirichlet field must vanish at R_max");
}

RadialField RadialField::zero(const RadialGrid& grid, BoundaryTag boundary) {
  return RadialField(grid, std::vector<double>(grid.size(), 0.0), boundary);
}

RadialField RadialField::sample(const RadialGrid& grid, const std::function<double(double)>& fn,
                                BoundaryTag boundary) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.node(i));
  if (boundary == BoundaryTag::dirichlet_at_rmax) v.back() = 0.0;
  return RadialField(grid, std::move(v), boundary);
}

RadialField RadialField::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return RadialField(grid_, std::move(v), boundary_);
}

RadialField RadialField::abs_pow(double q) const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(std::abs(values_[i]), q);
  return RadialField(grid_, std::move(v), boundary_);
}

RadialField RadialField::operator-(const RadialField& other) const {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("RadialField: grids differ");
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] - other.values_[i];
  return RadialField(grid_, std::move(v), boundary_);
}

RadialField RadialField::operator*(const RadialField& other) const {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("RadialField: grids differ");
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] * other.values_[i];
  return RadialField(grid_, std::move(v), boundary_);
}

double sup_norm(const RadialField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double weighted_sup_norm(const RadialField& f, double k) {
  if (k < 0.0) throw std::invalid_argument("weighted_sup_norm: weight exponent must be >= 0");
  if (k == 0.0) return sup_norm(f);
  double m = 0.0;
  const auto& g = f.grid();
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::pow(g.node(i), k) * std::abs(f[i]));
  return m;
}

std::size_t argmax_abs(const RadialField& f) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < f.size(); ++i)
    if (std::abs(f[i]) > std::abs(f[best])) best = i;
  return best;
}

RadialField rescale_field(const RadialField& f, double lambda, const ModelParams& params) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("rescale_field: lambda must be positive");
  if (lambda == 1.0) return f;
  const auto& g = f.grid();
  using boost::math::interpolators::pchip;
  pchip<std::vector<double>> interp(g.nodes(), std::vector<double>(f.data()));
  const double amp = std::pow(lambda, params.tail_exponent());
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = lambda * g.node(i);
    v[i] = x <= g.r_max() ? amp * interp(x) : 0.0;
  }
  if (f.boundary() == BoundaryTag::dirichlet_at_rmax) v.back() = 0.0;
  return RadialField(g, std::move(v), f.boundary());
}

RadialField finite_difference_gradient(const RadialField& f) {
  const auto& g = f.grid();
  const std::size_t m = f.size();
  std::vector<double> d(m, 0.0);
  const double h = g.h();
  for (std::size_t i = 1; i + 1 < m; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) / (2.0 * h);
  return RadialField(g, std::move(d), BoundaryTag::even_at_origin_only);
}

// ---- profiles ---------------------------------------------------------------

Profile Profile::gaussian(double amplitude, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian: width must be positive");
  Profile p;
  p.kind = Kind::gaussian;
  p.amplitude = amplitude;
  p.width = width;
  return p;
}

Profile Profile::plateau(double amplitude, double radius, double ramp) {
  if (!(radius >= 0.0) || !(ramp > 0.0)) throw std::invalid_argument("plateau: bad radius/ramp");
  Profile p;
  p.kind = Kind::plateau;
  p.amplitude = amplitude;
  p.radius = radius;
  p.ramp = ramp;
  return p;
}

Profile Profile::power_tail(double amplitude, double exponent, double core_radius) {
  if (!(exponent > 0.0) || !(core_radius > 0.0))
    throw std::invalid_argument("power_tail: exponent and core radius must be positive");
  Profile p;
  p.kind = Kind::power_tail;
  p.amplitude = amplitude;
  p.exponent = exponent;
  p.core_radius = core_radius;
  return p;
}

Profile Profile::indicator(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("indicator: radius must be positive");
  Profile p;
  p.kind = Kind::indicator;
  p.radius = radius;
  return p;
}

Profile Profile::singular_steady_state() {
  Profile p;
  p.kind = Kind::singular_steady_state;
  return p;
}

Profile Profile::scaled(double factor) const {
  Profile p = *this;
  p.amplitude *= factor;
  return p;
}

double singular_steady_state_constant(const ModelParams& params) {
  const double k = params.tail_exponent();
  const double bracket = k * (params.n - 2.0 - k);
  if (!(bracket > 0.0))
    throw std::invalid_argument("singular steady state needs p > n/(n-2)");
  return std::pow(bracket, params.beta);
}

double Profile::value(double r, const ModelParams& params, double r_cap) const {
  switch (kind) {
    case Kind::gaussian:
      return amplitude * std::exp(-(r * r) / (width * width));
    case Kind::plateau: {
      if (r <= radius) return amplitude;
      if (r >= radius + ramp) return 0.0;
      const double x = (r - radius) / ramp;
      return amplitude * 0.5 * (1.0 + std::cos(M_PI * x));
    }
    case Kind::power_tail: {
      const double x = r / core_radius;
      return amplitude * std::pow(1.0 + x * x, -0.5 * exponent);
    }
    case Kind::indicator:
      return r <= radius * (1.0 + 1e-12) ? amplitude : 0.0;
    case Kind::singular_steady_state: {
      const double L = singular_steady_state_constant(params);
      return amplitude * L * std::pow(std::max(r, r_cap), -params.tail_exponent());
    }
  }
  return 0.0;
}

double Profile::derivative(double r, const ModelParams& params, double r_cap) const {
  switch (kind) {
    case Kind::gaussian:
      return -2.0 * r / (width * width) * value(r, params, r_cap);
    case Kind::plateau: {
      if (r <= radius || r >= radius + ramp) return 0.0;
      const double x = (r - radius) / ramp;
      return -amplitude * 0.5 * M_PI / ramp * std::sin(M_PI * x);
    }
    case Kind::power_tail: {
      const double x = r / core_radius;
      return -amplitude * exponent * x / core_radius * std::pow(1.0 + x * x, -0.5 * exponent - 1.0);
    }
    case Kind::indicator:
      return 0.0;
    case Kind::singular_steady_state: {
      if (r <= r_cap) return 0.0;
      const double L = singular_steady_state_constant(params);
      const double k = params.tail_exponent();
      return -amplitude * k * L * std::pow(r, -k - 1.0);
    }
  }
  return 0.0;
}

RadialField Profile::sample(const RadialGrid& grid, const ModelParams& params,
                            BoundaryTag boundary) const {
  const double cap = grid.h();
  return RadialField::sample(grid, [&](double r) { return value(r, params, cap); }, boundary);
}

RadialField Profile::sample_gradient(const RadialGrid& grid, const ModelParams& params) const {
  const double cap = grid.h();
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = derivative(grid.node(i), params, cap);
  return RadialField(grid, std::move(v), BoundaryTag::even_at_origin_only);
}

std::string to_string(Profile::Kind kind) {
  switch (kind) {
    case Profile::Kind::gaussian: return "gaussian";
    case Profile::Kind::plateau: return "plateau";
    case Profile::Kind::power_tail: return "power_tail";
    case Profile::Kind::indicator: return "indicator";
    case Profile::Kind::singular_steady_state: return "singular_steady_state";
  }
  return "unknown";
}

Profile::Kind profile_kind_from_string(const std::string& name) {
  if (name == "gaussian") return Profile::Kind::gaussian;
  if (name == "plateau") return Profile::Kind::plateau;
  if (name == "power_tail") return Profile::Kind::power_tail;
  if (name == "indicator") return Profile::Kind::indicator;
  if (name == "singular_steady_state") return Profile::Kind::singular_steady_state;
  throw std::invalid_argument("unknown profile kind: " + name);
}

}  // namespace semiheat

#include "semiheat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "semiheat/kernels.hpp"

namespace semiheat {

namespace {

// Integer power for the s^{n-1} weights.
inline double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

inline double hermite(double y0, double y1, double d0, double d1, double step, double u) {
  const double u2 = u * u;
  const double u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * step * d0 + (-2 * u3 + 3 * u2) * y1 +
         (u3 - u2) * step * d1;
}

const GaussLegendre& rule(int points) {
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(points);
  if (it == cache.end()) it = cache.emplace(points, GaussLegendre(points)).first;
  return it->second;
}

struct AngularPair {
  double value;
  double slope;  // d/dz
};

// Value and z-derivative of ∫_0^π e^{z(cosθ-1)} sin^{n-2}θ dθ, GL doubled from 64.
AngularPair angular_pair(int n, double z, double rel_tol) {
  double theta_max = M_PI;
  if (2.0 * z > 745.0) theta_max = std::acos(std::max(-1.0, 1.0 - 745.0 / z));
  AngularPair prev{0.0, 0.0};
  for (int points = 64; points <= 4096; points *= 2) {
    const auto& gl = rule(points);
    const double half = 0.5 * theta_max;
    double v = 0.0, d = 0.0;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double th = half * (1.0 + gl.nodes[k]);
      const double cm1 = -2.0 * std::sin(0.5 * th) * std::sin(0.5 * th);  // cos θ - 1
      const double w = gl.weights[k] * std::exp(z * cm1) * ipow(std::sin(th), n - 2);
      v += w;
      d += w * cm1;
    }
    AngularPair cur{v * half, d * half};
    if (points > 64 && std::abs(cur.value - prev.value) <= rel_tol * std::abs(cur.value) &&
        std::abs(cur.slope - prev.slope) <= rel_tol * std::abs(cur.slope) + 1e-300)
      return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace

GaussLegendre::GaussLegendre(int points) : nodes(points), weights(points) {
  if (points < 1) throw std::invalid_argument("GaussLegendre: need at least one point");
  const int m = (points + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (points == 1) { p1 = x; p0 = 1.0; }
      dp = points * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (points == 1) { p1 = x; p0 = 1.0; }
      dp = points * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[points - 1 - i] = x;
    weights[i] = w;
    weights[points - 1 - i] = w;
  }
  if (points % 2 == 1) nodes[points / 2] = 0.0;
}

double unit_ball_volume(int n) { return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0); }

double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

double angular_integral_direct(int n, double z, double rel_tol) {
  if (z < 0.0) throw std::invalid_argument("angular_integral_direct: z must be >= 0");
  return angular_pair(n, z, rel_tol).value;
}

double cap_measure_direct(int n, double theta) {
  theta = std::clamp(theta, 0.0, M_PI);
  const auto& gl = rule(64);
  auto w = [n](double th) { return ipow(std::sin(th), n - 2); };
  return gl.integrate(w, 0.0, theta) / gl.integrate(w, 0.0, M_PI);
}

// ---- CapTable ---------------------------------------------------------------

CapTable::CapTable(int n) : n_(n), sphere_area_(unit_sphere_area(n)) {
  if (n < 2) throw std::invalid_argument("CapTable: dimension must be >= 2");
  constexpr int intervals = 4096;
  step_ = M_PI / intervals;
  value_.assign(intervals + 1, 0.0);
  slope_.assign(intervals + 1, 0.0);
  const auto& gl = rule(8);
  auto w = [n](double th) { return ipow(std::sin(th), n - 2); };
  for (int k = 0; k < intervals; ++k)
    value_[k + 1] = value_[k] + gl.integrate(w, k * step_, (k + 1) * step_);
  norm_ = value_.back();
  for (int k = 0; k <= intervals; ++k) {
    value_[k] /= norm_;
    slope_[k] = w(k * step_) / norm_;
  }
  value_.back() = 1.0;
}

double CapTable::fraction_at_angle(double theta) const {
  if (theta <= 0.0) return 0.0;
  if (theta >= M_PI) return 1.0;
  const double x = theta / step_;
  std::size_t k = static_cast<std::size_t>(x);
  if (k >= value_.size() - 1) k = value_.size() - 2;
  const double u = x - static_cast<double>(k);
  return hermite(value_[k], value_[k + 1], slope_[k], slope_[k + 1], step_, u);
}

double CapTable::fraction_at_cosine(double c) const {
  return fraction_at_angle(std::acos(std::clamp(c, -1.0, 1.0)));
}

// ---- AngularKernel ----------------------------------------------------------

AngularKernel::AngularKernel(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("AngularKernel: dimension must be >= 2");
  constexpr double x_max = 20.0;
  constexpr int intervals = 5120;
  step_ = x_max / intervals;
  z_max_ = std::expm1(x_max);
  value_.resize(intervals + 1);
  slope_.resize(intervals + 1);
  const double k = 0.5 * (n - 1);
  for (int i = 0; i <= intervals; ++i) {
    const double x = i * step_;
    const double z = std::expm1(x);
    const AngularPair a = angular_pair(n, z, 1e-13);
    const double g = std::pow(1.0 + z, k);
    value_[i] = a.value * g;
    slope_[i] = g * ((1.0 + z) * a.slope + k * a.value);
  }
}

double AngularKernel::decay(double one_plus_z) const {
  const int m = n_ - 1;
  double r = 1.0;
  for (int i = 0; i < m / 2; ++i) r *= one_plus_z;
  if (m % 2 == 1) r *= std::sqrt(one_plus_z);
  return 1.0 / r;
}

double AngularKernel::operator()(double z) const {
  if (z <= 0.0) return value_[0];
  const double x = std::log1p(z);
  const double pos = x / step_;
  if (pos >= static_cast<double>(value_.size() - 1)) return angular_pair(n_, z, 1e-13).value;
  const std::size_t i = static_cast<std::size_t>(pos);
  const double u = pos - static_cast<double>(i);
  return hermite(value_[i], value_[i + 1], slope_[i], slope_[i + 1], step_, u) * decay(1.0 + z);
}

namespace {
template <class T>
std::shared_ptr<const T> shared_table(int n) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const T>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const T>(n);
  return slot;
}
}  // namespace

std::shared_ptr<const CapTable> cap_table(int n) { return shared_table<CapTable>(n); }
std::shared_ptr<const AngularKernel> angular_kernel(int n) { return shared_table<AngularKernel>(n); }

double cap_fraction(int n, double a, double s, double R) {
  if (a + s <= R) return 1.0;
  if (std::abs(a - s) >= R) return 0.0;
  const double c = (s * s + a * a - R * R) / (2.0 * a * s);
  return cap_table(n)->fraction_at_cosine(c);
}

// ---- ball integrals ---------------------------------------------------------

BallIntegrator::BallIntegrator(const RadialField& f, double q)
    : grid_(f.grid()), caps_(cap_table(f.dim())), n_(f.dim()) {
  if (!(q >= 1.0)) throw std::invalid_argument("BallIntegrator: q must be >= 1");
  const std::size_t m = f.size();
  power_.resize(m);
  density_.resize(m);
  slope_.assign(m, 0.0);
  geometric_.assign(m, 0);
  cumulative_.assign(m, 0.0);
  double peak = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    power_[i] = std::pow(std::abs(f[i]), q);
    density_[i] = power_[i] * ipow(grid_.node(i), n_ - 1);
    peak = std::max(peak, std::abs(f[i]));
  }
  for (std::size_t j = 1; j + 1 < m; ++j) {
    if (power_[j] > 0.0 && power_[j + 1] > 0.0) {
      geometric_[j] = 1;
      slope_[j] = std::log(power_[j + 1] / power_[j]) / std::log((j + 1.0) / j);
    }
  }
  for (std::size_t i = 1; i < m; ++i) cumulative_[i] = cumulative_[i - 1] + cell_integral(i - 1, grid_.node(i));
  tail_nonzero_ = std::abs(f[m - 1]) > 0.0 || std::abs(f[m - 2]) > 1e-12 * peak;
}

// ∫_{r_j}^{x} of the interpolated |f|^q times s^{n-1}, x in [r_j, r_{j+1}].
// First cell: even quadratic in s. Cells with two positive values: power law
// (exact for |f|^q ∝ s^γ). Otherwise linear.
double BallIntegrator::cell_integral(std::size_t j, double x) const {
  const double h = grid_.h();
  const int n = n_;
  if (j == 0) {
    const double g0 = power_[0], g1 = power_[1];
    return g0 * ipow(x, n) / n + (g1 - g0) * ipow(x, n + 2) / ((n + 2) * h * h);
  }
  const double sj = grid_.node(j);
  if (geometric_[j]) {
    const double e = slope_[j] + n;
    const double lr = std::log(x / sj);
    const double base = power_[j] * ipow(sj, n);
    if (std::abs(e * lr) < 1e-12) return base * lr;
    return base * std::expm1(e * lr) / e;
  }
  const double d = x - sj;
  const double m = (power_[j + 1] - power_[j]) / h;
  double acc = 0.0;
  double binom = 1.0;
  double dk = d;  // d^{k+1}
  for (int k = 0; k < n; ++k) {
    const double sp = ipow(sj, n - 1 - k);
    acc += binom * sp * (power_[j] * dk / (k + 1) + m * dk * d / (k + 2));
    binom = binom * (n - 1 - k) / (k + 1);
    dk *= d;
  }
  return acc;
}

double BallIntegrator::density(double s) const {
  if (s < 0.0 || s > grid_.r_max()) return 0.0;
  const double h = grid_.h();
  std::size_t j = static_cast<std::size_t>(s / h);
  if (j >= power_.size() - 1) return density_.back();
  double g;
  if (j == 0) {
    g = power_[0] + (power_[1] - power_[0]) * (s / h) * (s / h);
  } else if (geometric_[j]) {
    g = power_[j] * std::pow(s / grid_.node(j), slope_[j]);
  } else {
    g = power_[j] + (power_[j + 1] - power_[j]) * (s - grid_.node(j)) / h;
  }
  return g * ipow(s, n_ - 1);
}

double BallIntegrator::prefix(double s) const {
  if (s <= 0.0) return 0.0;
  if (s >= grid_.r_max()) return cumulative_.back();
  std::size_t j = static_cast<std::size_t>(s / grid_.h());
  if (j >= power_.size() - 1) j = power_.size() - 2;
  return cumulative_[j] + cell_integral(j, s);
}

double BallIntegrator::total() const { return caps_->sphere_area() * cumulative_.back(); }

BallIntegral BallIntegrator::operator()(double a, double R) const {
  if (!(R > 0.0) || a < 0.0) throw std::invalid_argument("ball integral: need R > 0 and a >= 0");
  BallIntegral out;
  out.truncated = tail_nonzero_ && a + R > grid_.r_max();
  if (a == 0.0) {
    out.value = caps_->sphere_area() * prefix(R);
    return out;
  }
  double acc = prefix(R - a);
  const double s_lo = std::abs(R - a);
  const double s_hi = std::min(a + R, grid_.r_max());
  if (s_lo < s_hi) {
    const double h = grid_.h();
    auto integrand = [&](double s, double dens) {
      if (s <= 0.0) return 0.0;
      const double c = (s * s + a * a - R * R) / (2.0 * a * s);
      return dens * caps_->fraction_at_cosine(c);
    };
    std::size_t j = static_cast<std::size_t>(std::floor(s_lo / h)) + 1;
    double s_prev = s_lo;
    double g_prev = integrand(s_lo, density(s_lo));
    double ann = 0.0;
    for (; j < density_.size(); ++j) {
      const double s = grid_.node(j);
      if (s >= s_hi) break;
      const double g = integrand(s, density_[j]);
      ann += 0.5 * (s - s_prev) * (g + g_prev);
      s_prev = s;
      g_prev = g;
    }
    const double g_end = integrand(s_hi, density(s_hi));
    ann += 0.5 * (s_hi - s_prev) * (g_end + g_prev);
    acc += ann;
  }
  out.value = caps_->sphere_area() * acc;
  return out;
}

BallIntegral ball_integral(const RadialField& f, double q, double a, double R) {
  return BallIntegrator(f, q)(a, R);
}

// ---- heat kernel --------------------------------------------------------------

double heat_kernel(int n, double t, double r) {
  return std::pow(4.0 * M_PI * t, -0.5 * n) * std::exp(-r * r / (4.0 * t));
}

double gauss_convolve(const RadialField& f, double t, double a) {
  if (!(t > 0.0)) throw std::invalid_argument("gauss_convolve: t must be positive");
  if (a < 0.0) throw std::invalid_argument("gauss_convolve: center must be >= 0");
  return kernels::heat_point(f.grid(), *angular_kernel(f.dim()), t, f.values(), a);
}

RadialField heat_apply(const RadialField& f, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("heat_apply: t must be positive");
  std::vector<double> out(f.size());
  kernels::heat_apply_omp(f.grid(), *angular_kernel(f.dim()), t, f.values(), out);
  return RadialField(f.grid(), std::move(out), BoundaryTag::even_at_origin_only);
}

HeatMatrix::HeatMatrix(const RadialGrid& grid, double t)
    : size_(grid.size()), t_(t), identity_(t < 0.5 * grid.h() * grid.h()) {
  if (t < 0.0) throw std::invalid_argument("HeatMatrix: t must be >= 0");
  if (identity_) return;
  const int n = grid.dim();
  const auto angular = angular_kernel(n);
  const double h = grid.h();
  const double scale =
      std::pow(4.0 * M_PI * t, -0.5 * n) * unit_sphere_area(n - 1);
  const double reach = std::sqrt(160.0 * t);  // e^{-40} relative to the peak
  lo_.resize(size_);
  offset_.resize(size_ + 1);
  offset_[0] = 0;
  for (std::size_t i = 0; i < size_; ++i) {
    const double r = grid.node(i);
    const double s_lo = std::max(0.0, r - reach);
    const double s_hi = std::min(grid.r_max(), r + reach);
    const std::size_t j0 = static_cast<std::size_t>(std::ceil(s_lo / h - 1e-9));
    const std::size_t j1 = std::min(size_ - 1, static_cast<std::size_t>(std::floor(s_hi / h + 1e-9)));
    lo_[i] = j0;
    for (std::size_t j = j0; j <= j1; ++j) {
      const double s = grid.node(j);
      double w = (j == 0 || j == size_ - 1) ? 0.5 * h : h;
      const double d = s - r;
      w *= scale * ipow(s, n - 1) * std::exp(-d * d / (4.0 * t)) * (*angular)(r * s / (2.0 * t));
      weights_.push_back(w);
    }
    offset_[i + 1] = weights_.size();
  }
}

void HeatMatrix::apply(std::span<const double> in, std::span<double> out) const {
  if (identity_) {
    std::copy(in.begin(), in.end(), out.begin());
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < size_; ++i) {
    double acc = 0.0;
    const std::size_t len = offset_[i + 1] - offset_[i];
    const double* w = weights_.data() + offset_[i];
    const double* x = in.data() + lo_[i];
    for (std::size_t k = 0; k < len; ++k) acc += w[k] * x[k];
    out[i] = acc;
  }
}

std::vector<double> HeatMatrix::apply(std::span<const double> in) const {
  std::vector<double> out(in.size());
  apply(in, out);
  return out;
}

}  // namespace semiheat

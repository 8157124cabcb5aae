#include "semiheat/morrey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "semiheat/kernels.hpp"
#include "semiheat/quadrature.hpp"

namespace semiheat {

void MorreySpec::validate(int n) const {
  if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("MorreySpec: q must be >= 1");
  if (!(lambda >= 0.0) || lambda > n) throw std::invalid_argument("MorreySpec: lambda must lie in [0, n]");
}

MorreySpec MorreySpec::critical(double q, const ModelParams& params) {
  return MorreySpec{q, params.critical_lambda(q)};
}

namespace {
std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  v.back() = hi;
  return v;
}

std::vector<double> with_midpoints(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(2 * v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0 && v[i - 1] > 0.0) out.push_back(std::sqrt(v[i - 1] * v[i]));
    out.push_back(v[i]);
  }
  return out;
}
}  // namespace

MorreyLattice MorreyLattice::default_for(const RadialGrid& grid) {
  MorreyLattice l;
  l.centers.push_back(0.0);
  for (double a : log_spaced(grid.h(), grid.r_max(), 32)) l.centers.push_back(a);
  l.radii = log_spaced(grid.h(), 2.0 * grid.r_max(), 48);
  return l;
}

MorreyLattice MorreyLattice::refined() const {
  return MorreyLattice{with_midpoints(centers), with_midpoints(radii)};
}

MorreyResult morrey_norm_detail(const RadialField& f, const MorreySpec& spec,
                                const MorreyLattice& lattice, const MorreyOptions& opts) {
  spec.validate(f.dim());
  if (lattice.centers.empty() || lattice.radii.empty())
    throw std::invalid_argument("morrey_norm: empty lattice");
  const BallIntegrator ball(f, spec.q);
  MorreyResult res;
  if (spec.lambda == f.dim()) {
    res.value = std::pow(ball.total(), 1.0 / spec.q);
    return res;
  }
  std::vector<double> cells(lattice.centers.size() * lattice.radii.size());
  res.truncated = kernels::morrey_sweep_omp(ball, spec.lambda, lattice.centers, lattice.radii, cells);
  const std::size_t best = static_cast<std::size_t>(std::max_element(cells.begin(), cells.end()) - cells.begin());
  double top = cells[best];
  res.a = lattice.centers[best / lattice.radii.size()];
  res.R = lattice.radii[best % lattice.radii.size()];

  if (opts.polish && top > 0.0) {
    const int n = f.dim();
    auto eval = [&](double a, double R) { return std::pow(R, spec.lambda - n) * ball(a, R).value; };
    double step = 0.1;
    while (step > 1e-5) {
      bool moved = false;
      for (int dir = 0; dir < 4 && !moved; ++dir) {
        double a = res.a, R = res.R;
        const double factor = std::exp(dir % 2 == 0 ? step : -step);
        if (dir < 2) {
          R *= factor;
        } else {
          if (a == 0.0) continue;
          a *= factor;
        }
        const double v = eval(a, R);
        if (v > top) {
          top = v;
          res.a = a;
          res.R = R;
          moved = true;
        }
      }
      if (!moved) step *= 0.5;
    }
    res.truncated = res.truncated || ball(res.a, res.R).truncated;
  }
  res.value = std::pow(std::max(top, 0.0), 1.0 / spec.q);
  return res;
}

double morrey_norm(const RadialField& f, const MorreySpec& spec, const MorreyLattice& lattice,
                   const MorreyOptions& opts) {
  return morrey_norm_detail(f, spec, lattice, opts).value;
}

double morrey_norm(const RadialField& f, const MorreySpec& spec) {
  return morrey_norm(f, spec, MorreyLattice::default_for(f.grid()));
}

std::vector<MorreyCell> morrey_cells(const RadialField& f, const MorreySpec& spec,
                                     const MorreyLattice& lattice) {
  spec.validate(f.dim());
  const BallIntegrator ball(f, spec.q);
  std::vector<double> vals(lattice.centers.size() * lattice.radii.size());
  kernels::morrey_sweep_omp(ball, spec.lambda, lattice.centers, lattice.radii, vals);
  std::vector<MorreyCell> out;
  out.reserve(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    out.push_back({lattice.centers[i / lattice.radii.size()], lattice.radii[i % lattice.radii.size()], vals[i]});
  return out;
}

double small_scale_maximand(const RadialField& f, const MorreySpec& spec,
                            const MorreyLattice& lattice, int count) {
  spec.validate(f.dim());
  std::vector<double> radii(lattice.radii);
  std::sort(radii.begin(), radii.end());
  radii.resize(std::min<std::size_t>(radii.size(), static_cast<std::size_t>(std::max(count, 1))));
  const BallIntegrator ball(f, spec.q);
  std::vector<double> vals(lattice.centers.size() * radii.size());
  kernels::morrey_sweep_omp(ball, spec.lambda, lattice.centers, radii, vals);
  return *std::max_element(vals.begin(), vals.end());
}

double kernel_majorant(const RadialField& f, const MorreySpec& spec, const std::vector<double>& t_grid,
                       const MorreyLattice& lattice) {
  spec.validate(f.dim());
  if (t_grid.empty()) throw std::invalid_argument("kernel_majorant: empty time grid");
  const RadialField fq(f.grid(), f.abs_pow(spec.q).data(), BoundaryTag::even_at_origin_only);
  double best = 0.0;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("kernel_majorant: times must be positive");
    double sup = 0.0;
    for (double a : lattice.centers) sup = std::max(sup, gauss_convolve(fq, t, a));
    best = std::max(best, std::pow(t, 0.5 * spec.lambda) * sup);
  }
  return best;
}

Exponent::Exponent(double q) : q_(q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("Exponent: q must be a finite value >= 1");
}

Exponent Exponent::infinity() {
  Exponent e;
  e.infinite_ = true;
  return e;
}

double Exponent::value() const {
  if (infinite_) throw std::logic_error("Exponent: value() of infinite exponent");
  return q_;
}

double morrey_norm(const RadialField& f, Exponent q, double lambda, const MorreyLattice& lattice) {
  if (q.is_infinite()) return sup_norm(f);
  return morrey_norm(f, MorreySpec{q.value(), lambda}, lattice);
}

std::vector<SmoothingPoint> smoothing_profile(const RadialField& f, Exponent from_q, Exponent to_q,
                                              double lambda, const std::vector<double>& t_grid,
                                              const MorreyLattice& lattice) {
  if (from_q.reciprocal() < to_q.reciprocal())
    throw std::invalid_argument("smoothing_profile: need from_q <= to_q");
  const double base = morrey_norm(f, from_q, lambda, lattice);
  const double gap = from_q.reciprocal() - to_q.reciprocal();
  std::vector<SmoothingPoint> out;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("smoothing_profile: times must be positive");
    SmoothingPoint pt{};
    pt.t = t;
    double sup_centers = 0.0;
    if (to_q.is_infinite() || from_q.is_infinite())
      for (double a : lattice.centers) sup_centers = std::max(sup_centers, std::abs(gauss_convolve(f, t, a)));
    const bool need_field = !to_q.is_infinite() || !from_q.is_infinite();
    const RadialField g = need_field ? heat_apply(f, t) : f;
    pt.smoothed = to_q.is_infinite() ? sup_centers : morrey_norm(g, to_q, lambda, lattice);
    pt.bound = std::pow(t, -0.5 * lambda * gap) * base;
    const double flowed = from_q.is_infinite() ? sup_centers : morrey_norm(g, from_q, lambda, lattice);
    pt.ratio = pt.bound > 0.0 ? pt.smoothed / pt.bound : 0.0;
    pt.contraction = base > 0.0 ? flowed / base : 0.0;
    out.push_back(pt);
  }
  return out;
}

}  // namespace semiheat

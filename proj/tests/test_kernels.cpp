#include <cstring>

#include "doctest.h"
#include "semiheat/kernels.hpp"
#include "semiheat/morrey.hpp"

using namespace semiheat;

namespace {
bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}
}  // namespace

TEST_CASE("serial and parallel kernels agree bitwise") {
  const auto P = make_params(5, 3.0);
  const RadialGrid g(5, 20.0, 600);
  const auto u = Profile::gaussian(1.3, 2.0).sample(g, P);

  const kernels::RadialLaplacian lap(5, g.h(), g.size());
  std::vector<double> a(g.size()), b(g.size());
  for (bool nl : {false, true}) {
    kernels::radial_rhs_serial(lap, P.p, nl, u.values(), a);
    kernels::radial_rhs_omp(lap, P.p, nl, u.values(), b);
    CHECK(same_bits(a, b));
  }

  const auto ang = angular_kernel(5);
  kernels::heat_apply_serial(g, *ang, 0.7, u.values(), a);
  kernels::heat_apply_omp(g, *ang, 0.7, u.values(), b);
  CHECK(same_bits(a, b));

  const BallIntegrator ball(u, 2.0);
  const auto lat = MorreyLattice::default_for(g);
  std::vector<double> sa(lat.centers.size() * lat.radii.size()), sb(sa.size());
  const bool ta = kernels::morrey_sweep_serial(ball, P.mu, lat.centers, lat.radii, sa);
  const bool tb = kernels::morrey_sweep_omp(ball, P.mu, lat.centers, lat.radii, sb);
  CHECK(ta == tb);
  CHECK(same_bits(sa, sb));
}

TEST_CASE("radial laplacian") {
  const RadialGrid g(5, 4.0, 400);
  const kernels::RadialLaplacian lap(5, g.h(), g.size());
  const auto r2 = RadialField::sample(g, [](double r) { return r * r; }, BoundaryTag::even_at_origin_only);
  std::vector<double> out(g.size());
  kernels::radial_rhs_serial(lap, 3.0, false, r2.values(), out);
  for (std::size_t i = 0; i + 1 < out.size(); ++i) CHECK(out[i] == doctest::Approx(10.0).epsilon(1e-10));
  CHECK(out.back() == 0.0);
  CHECK(kernels::signed_power(-2.0, 3.0) == -8.0);
  CHECK(kernels::signed_power(-2.0, 2.5) == doctest::Approx(-std::pow(2.0, 2.5)));
}

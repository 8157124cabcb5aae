#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "semiheat/evolution.hpp"
#include "semiheat/morrey.hpp"
#include "semiheat/quadrature.hpp"

using namespace semiheat;

TEST_CASE("spec validation") {
  CHECK_THROWS(MorreySpec{0.5, 1.0}.validate(5));
  CHECK_THROWS(MorreySpec{2.0, 6.0}.validate(5));
  CHECK_NOTHROW(MorreySpec{2.0, 5.0}.validate(5));
  const auto P = make_params(5, 3.0);
  CHECK(MorreySpec::critical(2.0, P).lambda == doctest::Approx(2.0));
  CHECK(Exponent::infinity().reciprocal() == 0.0);
  CHECK_THROWS(Exponent::infinity().value());
  CHECK_THROWS(Exponent(0.5));
}

TEST_CASE("lattice refinement is a superset") {
  const RadialGrid g(5, 10.0, 500);
  const auto L = MorreyLattice::default_for(g);
  CHECK(L.centers.front() == 0.0);
  CHECK(L.centers.size() == 33);
  CHECK(L.radii.size() == 48);
  const auto F = L.refined();
  for (double c : L.centers) CHECK(std::find(F.centers.begin(), F.centers.end(), c) != F.centers.end());
  for (double r : L.radii) CHECK(std::find(F.radii.begin(), F.radii.end(), r) != F.radii.end());
}

TEST_CASE("indicator and singular profile oracles") {
  const auto P = make_params(5, 3.0);
  CHECK(morrey_norm(RadialField::zero(RadialGrid(5, 10.0, 100)), {2.0, 1.0}) == 0.0);

  const RadialGrid g3(3, 20.0, 2000);
  const auto ind = Profile::indicator(1.0).sample(g3, P);
  const auto L = MorreyLattice::default_for(g3).refined();
  const auto res = morrey_norm_detail(ind, {2.0, 1.0}, L, {true});
  CHECK(res.value == doctest::Approx(std::sqrt(4.0 * M_PI / 3.0)).epsilon(0.02));
  CHECK(res.a == doctest::Approx(0.0).scale(1.0).epsilon(0.05));
  CHECK(res.R == doctest::Approx(1.0).epsilon(0.05));

  const RadialGrid g5(5, 40.0, 4000);
  const auto us = RadialField::sample(g5, [&](double r) { return 1.0 / std::max(r, g5.h()); });
  const double exact = std::sqrt(5.0 * unit_ball_volume(5) / 3.0);
  CHECK(exact == doctest::Approx(2.962).epsilon(1e-3));
  CHECK(morrey_norm(us, {2.0, 2.0}) == doctest::Approx(exact).epsilon(0.03));
}

TEST_CASE("power identity and monotone refinement") {
  const auto P = make_params(5, 3.0);
  const RadialGrid g(5, 20.0, 1000);
  const auto L = MorreyLattice::default_for(g);
  for (const auto& prof : {Profile::gaussian(1.0, 2.0), Profile::indicator(1.0), Profile::power_tail(1.0, 2.0, 1.0)}) {
    const auto f = prof.sample(g, P);
    for (double lambda : {1.0, 2.0, 5.0}) {
      const double two = morrey_norm(f, {2.0, lambda}, L);
      const double one = morrey_norm(f.abs_pow(2.0), {1.0, lambda}, L);
      CHECK(std::abs(one - two * two) <= 1e-12 * one);
      CHECK(morrey_norm(f, {2.0, lambda}, L.refined()) >= two);
    }
  }
}

TEST_CASE("lambda = n gives the L^q norm") {
  const RadialGrid g(5, 10.0, 2000);
  const auto gs = RadialField::sample(g, [](double r) { return std::exp(-r * r); });
  const double l2 = std::sqrt(std::pow(M_PI / 2.0, 2.5));
  CHECK(morrey_norm(gs, {2.0, 5.0}) == doctest::Approx(l2).epsilon(1e-5));
}

TEST_CASE("scale invariance at the critical index") {
  const auto P = make_params(5, 3.0);
  const RadialGrid g(5, 40.0, 2000);
  const MorreySpec spec = MorreySpec::critical(2.0, P);
  const auto f = Profile::gaussian(1.0, 1.0).sample(g, P);
  const double base = morrey_norm(f, spec);
  for (double lam : {0.5, 2.0}) CHECK(morrey_norm(rescale_field(f, lam, P), spec) == doctest::Approx(base).epsilon(0.01));
}

TEST_CASE("kernel majorant") {
  const auto P = make_params(5, 3.0);
  const RadialGrid g(5, 4.0, 4000);
  const auto L = MorreyLattice::default_for(g);
  CHECK(kernel_majorant(RadialField::zero(g), {1.0, 5.0}, {1e2, 1e4}, L) == 0.0);
  const auto ind = Profile::indicator(1.0).sample(g, P);
  const double limit = unit_ball_volume(5) * std::pow(4.0 * M_PI, -2.5);
  const double late = kernel_majorant(ind, {1.0, 5.0}, {1e4}, L);
  CHECK(late == doctest::Approx(limit).epsilon(1e-2));
  CHECK(kernel_majorant(ind, {1.0, 5.0}, {1.0}, L) < late);
  CHECK(kernel_majorant(ind, {1.0, 5.0}, {1.0, 1e2, 1e4}, L) == doctest::Approx(late));
}

TEST_CASE("smoothing profile") {
  const auto P = make_params(5, 3.0);
  const RadialGrid g(5, 40.0, 800);
  const auto L = MorreyLattice::default_for(g);
  const auto ts = log_spaced_times(1e-2, 1e2, 5);
  for (const auto& prof : {Profile::indicator(1.0), Profile::gaussian(1.0, 2.0)}) {
    const auto f = prof.sample(g, P);
    for (double lambda : {0.0, 1.0, 2.0, 5.0}) {
      for (const auto& pt : smoothing_profile(f, Exponent(2.0), Exponent(2.0), lambda, ts, L))
        CHECK(pt.contraction <= 1.0 + 1e-6);
    }
    for (const auto& pt : smoothing_profile(f, Exponent(2.0), Exponent::infinity(), 0.0, ts, L))
      CHECK(pt.smoothed <= sup_norm(f) * (1.0 + 1e-9));
  }
  const auto ind = Profile::indicator(1.0).sample(g, P);
  double worst = 0.0;
  for (const auto& pt : smoothing_profile(ind, Exponent(1.0), Exponent::infinity(), 5.0, ts, L))
    worst = std::max(worst, pt.ratio);
  CHECK(worst <= std::pow(4.0 * M_PI, -2.5) * (1.0 + 1e-6));
}

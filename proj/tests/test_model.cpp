#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "semiheat/model.hpp"

using namespace semiheat;

TEST_CASE("make_params derived quantities") {
  const auto a = make_params(3, 7.0);
  CHECK(a.p_S == doctest::Approx(5.0));
  CHECK(a.supercritical);

  const auto b = make_params(5, 3.0);
  CHECK(b.beta == doctest::Approx(0.5));
  CHECK(b.mu == doctest::Approx(2.0));
  CHECK(b.q_c == doctest::Approx(5.0));
  CHECK(b.p_S == doctest::Approx(7.0 / 3.0));
  CHECK(b.supercritical);

  CHECK_FALSE(make_params(3, 5.0).supercritical);
  CHECK_THROWS_AS(make_params(2, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(make_params(5, 1.0), std::invalid_argument);
}

TEST_CASE("grid and field construction") {
  const RadialGrid g(5, 10.0, 100);
  CHECK(g.size() == 101);
  CHECK(g.h() == doctest::Approx(0.1));
  CHECK(g.node(100) == doctest::Approx(10.0));
  CHECK_THROWS(RadialField(g, std::vector<double>(50, 0.0)));

  const auto f = RadialField::sample(g, [](double) { return 1.0; });
  CHECK(f[100] == 0.0);
  const auto e = RadialField::sample(g, [](double) { return 1.0; }, BoundaryTag::even_at_origin_only);
  CHECK(e[100] == 1.0);

  CHECK(boundary_from_string(to_string(BoundaryTag::dirichlet_at_rmax)) == BoundaryTag::dirichlet_at_rmax);
  CHECK(boundary_from_string("even_at_origin_only") == BoundaryTag::even_at_origin_only);
  CHECK_THROWS(boundary_from_string("periodic"));
}

TEST_CASE("sup norms") {
  const auto P = make_params(5, 3.0);
  const RadialGrid g(5, 10.0, 1000);
  CHECK(sup_norm(RadialField::zero(g)) == 0.0);
  CHECK(weighted_sup_norm(RadialField::zero(g), 1.0) == 0.0);

  const auto ind = Profile::indicator(1.0).sample(g, P);
  CHECK(sup_norm(ind) == 1.0);
  CHECK(weighted_sup_norm(ind, 1.0) == doctest::Approx(1.0));

  const auto gs = RadialField::sample(g, [](double r) { return std::exp(-r * r); });
  CHECK(sup_norm(gs) == 1.0);
  CHECK(argmax_abs(gs) == 0);
  CHECK(weighted_sup_norm(gs, 0.0) == sup_norm(gs));

  // U_* = sqrt(2)/r at n = 5, p = 3
  CHECK(singular_steady_state_constant(P) == doctest::Approx(std::sqrt(2.0)));
  const auto U = Profile::singular_steady_state().sample(g, P, BoundaryTag::even_at_origin_only);
  CHECK(weighted_sup_norm(U, P.tail_exponent()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("rescale_field") {
  const auto P = make_params(5, 3.0);
  const RadialGrid g(5, 20.0, 2000);
  const auto f = Profile::gaussian(1.0, 2.0).sample(g, P);

  const auto same = rescale_field(f, 1.0, P);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(same[i] == doctest::Approx(f[i]).epsilon(1e-14));

  // λ^{2/(p-1)} f(λr) against the analytic profile
  const auto half = rescale_field(f, 0.5, P);
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = g.node(i);
    const double expect = r * 0.5 < 20.0 ? 0.5 * std::exp(-(0.5 * r) * (0.5 * r) / 4.0) : 0.0;
    err = std::max(err, std::abs(half[i] - expect));
  }
  CHECK(err < 1e-5);

  // composition λ then 1/λ returns the field away from the cut
  const auto back = rescale_field(rescale_field(f, 2.0, P), 0.5, P);
  for (std::size_t i = 0; i < 900; ++i) CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-4).scale(1.0));

  // U_* is invariant away from the cap
  const auto U = Profile::singular_steady_state().sample(g, P, BoundaryTag::even_at_origin_only);
  const auto Ur = rescale_field(U, 2.0, P);
  for (std::size_t i = 10; i < 1000; ++i) CHECK(Ur[i] == doctest::Approx(U[i]).epsilon(1e-9));

  CHECK_THROWS_AS(rescale_field(f, 0.0, P), std::invalid_argument);
}

TEST_CASE("profile derivatives match finite differences") {
  const auto P = make_params(5, 3.0);
  const RadialGrid g(5, 20.0, 4000);
  const std::pair<Profile, double> cases[] = {{Profile::gaussian(1.0, 2.0), 1e-4},
                                              {Profile::power_tail(1.0, 2.0, 1.0), 1e-4},
                                              {Profile::plateau(1.0, 2.0, 1.0), 1e-2}};
  for (const auto& [prof, tol] : cases) {
    const auto f = prof.sample(g, P, BoundaryTag::even_at_origin_only);
    const auto d = finite_difference_gradient(f);
    const auto exact = prof.sample_gradient(g, P);
    double err = 0.0;
    for (std::size_t i = 1; i + 1 < f.size(); ++i) err = std::max(err, std::abs(d[i] - exact[i]));
    CHECK(err < tol);
  }
}

TEST_CASE("hypotheses") {
  const auto P = make_params(5, 3.0);
  const RadialGrid g(5, 40.0, 2000);

  SUBCASE("gaussian satisfies all five") {
    const auto prof = Profile::gaussian(1.0, 1.0);
    const auto rep = check_hypotheses(prof.sample(g, P), prof.sample_gradient(g, P), P);
    CHECK(rep.gradient_lq.satisfied());
    CHECK(rep.gradient_decay.satisfied());
    CHECK(rep.kernel_limit.satisfied());
    CHECK(rep.energy_density_lm.satisfied());
    CHECK(rep.profile_decay.satisfied());
  }
  SUBCASE("zero data") {
    const auto z = RadialField::zero(g);
    const auto rep = check_hypotheses(z, RadialField::zero(g, BoundaryTag::even_at_origin_only), P);
    for (const auto* c : {&rep.gradient_lq, &rep.gradient_decay, &rep.kernel_limit, &rep.energy_density_lm,
                          &rep.profile_decay}) {
      CHECK(c->satisfied());
      CHECK(c->evidence == 0.0);
    }
  }
  SUBCASE("borderline tail violates profile decay") {
    const auto prof = Profile::power_tail(1.0, P.tail_exponent(), 1.0);
    const auto rep = check_hypotheses(prof.sample(g, P, BoundaryTag::even_at_origin_only), prof.sample_gradient(g, P), P);
    CHECK(rep.profile_decay.verdict == Verdict::violated);
    const auto fit = fit_tail_exponent(prof.sample(g, P, BoundaryTag::even_at_origin_only));
    REQUIRE(fit.kind == TailFit::Kind::fitted);
    CHECK(fit.exponent == doctest::Approx(1.0).epsilon(0.02));
  }
}

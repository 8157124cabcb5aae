#include <cmath>

#include "doctest.h"
#include "semiheat/duhamel.hpp"

using namespace semiheat;

namespace {
const ModelParams P = make_params(5, 3.0);
const RadialGrid G(5, 20.0, 400);
}  // namespace

TEST_CASE("zero data converges immediately") {
  const auto run = picard_solve(RadialField::zero(G), P, 1.0, 2, {0.5, 1.0});
  CHECK(run.converged);
  CHECK_FALSE(run.diverged);
  CHECK(run.iterations == 1);
  for (const auto& s : run.samples) CHECK(sup_norm(s.u) == 0.0);
  CHECK(run.r_aux == doctest::Approx(std::sqrt(3.0 * 6.0)));
  CHECK(run.beta_aux == doctest::Approx(1.0 * (0.5 - 1.0 / std::sqrt(18.0))));
}

TEST_CASE("sample times must lie on the time grid") {
  CHECK_THROWS(picard_solve(RadialField::zero(G), P, 1.0, 2, {0.33}));
  CHECK_THROWS(picard_solve(RadialField::zero(G), P, 1.0, 1, {0.5}));
}

TEST_CASE("first correction scales like the p-th power of the data") {
  double d[2];
  int k = 0;
  for (double a : {1e-2, 5e-3}) d[k++] = picard_solve(Profile::gaussian(a, 2.0).sample(G, P), P, 1.0, 2, {1.0}).cauchy[0];
  CHECK(std::log(d[0] / d[1]) / std::log(2.0) == doctest::Approx(P.p).epsilon(0.02));
}

TEST_CASE("mild and classical solutions agree") {
  const auto u0 = Profile::gaussian(0.5, 2.0).sample(G, P);
  const std::vector<double> ts{0.1, 0.5, 1.0};
  const auto run = picard_solve(u0, P, 1.0, 50, ts);
  REQUIRE(run.converged);
  CHECK(run.convergence_ratio < 1.0);
  SolverConfig c;
  c.t_end = 1.0;
  c.checkpoints = ts;
  const auto tr = solve(u0, P, c);
  for (const auto& s : run.samples) {
    const auto& ref = tr.at(s.t).u;
    CHECK(sup_norm(s.u - ref) < 0.01 * sup_norm(ref));
  }
  CHECK(run.budget.size() == ts.size());
  for (const auto& b : run.budget) CHECK(std::isfinite(b.budget_r));
}

TEST_CASE("large data diverges") {
  const auto run = picard_solve(Profile::plateau(5.0, 10.0, 2.0).sample(G, P), P, 1.0, 60, {1.0});
  CHECK(run.diverged);
  CHECK_FALSE(run.reason.empty());
}

TEST_CASE("continuous dependence") {
  const auto u0 = Profile::gaussian(0.5, 2.0).sample(G, P);
  SolverConfig c;
  c.t_end = 5.0;
  c.checkpoints = log_spaced_times(0.01, 5.0, 4);
  const auto spec = MorreySpec::critical(2.0, P);

  const auto same = continuous_dependence(u0, u0, 5.0, P, spec, c);
  CHECK(same.degenerate);
  CHECK(same.max_ratio == 1.0);

  const auto r = continuous_dependence(u0, u0.scaled(1.001), 5.0, P, spec, c);
  CHECK_FALSE(r.failed);
  CHECK(r.ratios.front().first == 0.0);
  CHECK(r.ratios.front().second == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.ratios.back().first == doctest::Approx(5.0));
  CHECK(r.max_ratio >= 1.0 - 1e-9);

  std::vector<double> big = u0.data();
  const auto bump = Profile::gaussian(5.0, 2.0).sample(G, P);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] += bump[i];
  const auto f = continuous_dependence(u0, RadialField(G, big), 5.0, P, spec, c);
  CHECK(f.failed);
}

TEST_CASE("gronwall domination") {
  const auto u0 = Profile::gaussian(1.5, 2.0).sample(G, P);
  SolverConfig c;
  c.t_end = 2.0;
  c.checkpoints = log_spaced_times(1e-3, 2.0, 8);
  const auto tr = solve(u0, P, c);
  REQUIRE(tr.reached_horizon());
  const auto gc = gronwall_domination(tr, u0, c);
  CHECK(gc.holds);
  CHECK(gc.margin >= 0.0);
  CHECK(gc.checkpoints > 0);
  CHECK(gc.M > 0.0);
}

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "semiheat/threshold.hpp"

using namespace semiheat;

namespace {
const ModelParams P = make_params(5, 3.0);
const RadialGrid G(5, 20.0, 200);

SolverConfig config(double t_end) {
  SolverConfig c;
  c.t_end = t_end;
  c.checkpoints = {0.0};
  for (double t : log_spaced_times(0.1, t_end, 4)) c.checkpoints.push_back(t);
  return c;
}
}  // namespace

TEST_CASE("classify") {
  const auto c = config(50.0);
  CHECK(classify(RadialField::zero(G), P, c).verdict == RunVerdict::decaying);

  const auto small = classify(Profile::gaussian(0.01, 2.0).sample(G, P), P, c);
  CHECK(small.verdict == RunVerdict::decaying);
  CHECK(small.tail_monotone);
  CHECK(small.terminal_ratio < 1e-2);

  const auto big = classify(Profile::plateau(2.0, 10.0, 2.0).sample(G, P), P, c);
  CHECK(big.verdict == RunVerdict::blowup);
  CHECK(big.T_est == doctest::Approx(0.125).epsilon(0.02));

  CHECK(to_string(RunVerdict::undecided) == "Undecided");
}

TEST_CASE("bisection along a ray is covariant under amplitude") {
  const auto c = config(50.0);
  const auto phi = Profile::gaussian(1.0, 2.0).sample(G, P);
  const auto a = bisect_lambda(phi, P, c, 1e-3);
  const auto b = bisect_lambda(phi.scaled(2.0), P, c, 1e-3);
  CHECK(a.rel_width < 1e-3);
  CHECK_FALSE(a.stalled);
  CHECK(a.consistent);
  CHECK(a.t_est_monotone);
  for (const auto& tr : a.trials) {
    if (tr.lambda <= a.lambda_lo) CHECK(tr.result.verdict == RunVerdict::decaying);
    if (tr.lambda >= a.lambda_hi) CHECK(tr.result.verdict == RunVerdict::blowup);
  }
  CHECK(2.0 * b.lambda_lo == doctest::Approx(a.lambda_lo).epsilon(2e-3));
  REQUIRE(a.run_lo.has_value());
  CHECK(a.run_lo->reached_horizon());
  CHECK(a.morrey_series_lo.size() == c.checkpoints.size());
}

TEST_CASE("no bracket throws") {
  BisectionOptions o;
  o.max_expansions = 1;
  const auto c = config(5.0);
  const DataFamily always_zero = [](double) { return RadialField::zero(G); };
  CHECK_THROWS_AS(bisect_family(always_zero, P, c, o), std::runtime_error);
}

TEST_CASE("final decrease onset") {
  const auto c = config(50.0);
  const auto u0 = Profile::gaussian(0.5, 2.0).sample(G, P);
  const auto tr = solve(u0, P, c);
  const double t0 = final_decrease_onset(tr, P);
  CHECK(t0 >= 0.0);
  CHECK(t0 < 50.0);
}

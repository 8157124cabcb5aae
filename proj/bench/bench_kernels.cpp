// Serial vs OpenMP timings of the three data-parallel kernels.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <vector>

#include <omp.h>

#include "semiheat/kernels.hpp"
#include "semiheat/model.hpp"
#include "semiheat/morrey.hpp"
#include "semiheat/quadrature.hpp"

using namespace semiheat;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = INFINITY;
  for (int k = 0; k < reps; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double omp, bool same) {
  std::printf("%-14s serial %9.3f ms   omp %9.3f ms   speedup %5.2f   %s\n", name, 1e3 * serial, 1e3 * omp,
              serial / omp, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int nodes = argc > 1 ? std::atoi(argv[1]) : 4000;
  const ModelParams P = make_params(5, 3.0);
  const RadialGrid grid(5, 40.0, nodes);
  const RadialField u = Profile::gaussian(1.0, 3.0).sample(grid, P);
  std::printf("threads %d, nodes %d\n", omp_get_max_threads(), nodes + 1);
  int failures = 0;

  {
    const kernels::RadialLaplacian lap(5, grid.h(), u.size());
    std::vector<double> a(u.size()), b(u.size());
    const double ts = best_of(20, [&] { for (int k = 0; k < 50; ++k) kernels::radial_rhs_serial(lap, P.p, true, u.values(), a); });
    const double to = best_of(20, [&] { for (int k = 0; k < 50; ++k) kernels::radial_rhs_omp(lap, P.p, true, u.values(), b); });
    const bool same = std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
    failures += !same;
    report("radial_rhs x50", ts, to, same);
  }
  {
    const RadialGrid coarse(5, 40.0, std::min(nodes, 800));
    const RadialField f = Profile::gaussian(1.0, 3.0).sample(coarse, P);
    const auto ang = angular_kernel(5);
    std::vector<double> a(f.size()), b(f.size());
    const double ts = best_of(3, [&] { kernels::heat_apply_serial(coarse, *ang, 2.0, f.values(), a); });
    const double to = best_of(3, [&] { kernels::heat_apply_omp(coarse, *ang, 2.0, f.values(), b); });
    const bool same = std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
    failures += !same;
    report("heat_apply", ts, to, same);
  }
  {
    const BallIntegrator ball(u, 2.0);
    const MorreyLattice lat = MorreyLattice::default_for(grid).refined();
    std::vector<double> a(lat.centers.size() * lat.radii.size()), b(a.size());
    const double ts = best_of(3, [&] { kernels::morrey_sweep_serial(ball, P.mu, lat.centers, lat.radii, a); });
    const double to = best_of(3, [&] { kernels::morrey_sweep_omp(ball, P.mu, lat.centers, lat.radii, b); });
    const bool same = std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
    failures += !same;
    report("morrey_sweep", ts, to, same);
  }
  return failures == 0 ? 0 : 1;
}

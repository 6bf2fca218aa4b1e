// Times the separable transform kernels against the dense serial reference
// and checks agreement. Build-only target; run by hand when touching the
// kernels:  specrel-bench [N] [dim] [repeats]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "specrel/transforms.hpp"

using namespace specrel;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

template <typename F>
double best_of(int repeats, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    auto t0 = clock_type::now();
    fn();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  int N = argc > 1 ? std::atoi(argv[1]) : 12;
  int dim = argc > 2 ? std::atoi(argv[2]) : 3;
  int repeats = argc > 3 ? std::atoi(argv[3]) : 5;

  Domain d(std::vector<double>(static_cast<std::size_t>(dim), std::numbers::pi));
  Spectrum s(d, N);
  Grid g(d, default_orders(N, dim));
  Transform t(s, g);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss;
  std::vector<double> coeffs(s.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] = gauss(rng) / (1.0 + s.eigenvalue(k));

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (no OpenMP)\n");
#endif
  std::printf("N = %d, dim = %d, modes = %zu, grid = %zu\n", N, dim, s.size(), g.total());

  std::vector<double> fast_vals, ref_vals;
  double t_fast = best_of(repeats, [&] { fast_vals = t.synthesize(coeffs); });
  double t_ref = best_of(repeats, [&] { ref_vals = reference::synthesize(s, g, coeffs); });
  std::printf("synthesize: separable %.4fs, reference %.4fs, speedup %.1fx, max diff %.3e\n",
              t_fast, t_ref, t_ref / t_fast, max_abs_diff(fast_vals, ref_vals));

  std::vector<double> fast_c, ref_c;
  double a_fast = best_of(repeats, [&] { fast_c = t.analyze(fast_vals); });
  double a_ref = best_of(repeats, [&] { ref_c = reference::analyze(s, g, fast_vals); });
  std::printf("analyze:    separable %.4fs, reference %.4fs, speedup %.1fx, max diff %.3e\n",
              a_fast, a_ref, a_ref / a_fast, max_abs_diff(fast_c, ref_c));

  double rt = max_abs_diff(fast_c, coeffs);
  std::printf("round-trip max coefficient error: %.3e\n", rt);
  return rt < 1e-10 ? 0 : 1;
}

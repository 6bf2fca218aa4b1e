#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "doctest.h"
#include "specrel/errors.hpp"
#include "specrel/transforms.hpp"
#include "specrel/util.hpp"

using namespace specrel;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> random_coeffs(const Spectrum& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> c(s.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = gauss(rng) / (1.0 + s.eigenvalue(k));
  return c;
}

double rel_l2_diff(std::span<const double> a, std::span<const double> b) {
  KahanSum num, den;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num.add((a[i] - b[i]) * (a[i] - b[i]));
    den.add(b[i] * b[i]);
  }
  return std::sqrt(num.value() / std::max(den.value(), 1e-300));
}

Transform make_transform(const Domain& d, int N, int margin = 12) {
  Spectrum s(d, N);
  Grid g(d, default_orders(N, d.dim(), margin));
  return Transform(s, g);
}
}  // namespace

TEST_SUITE("transforms") {

TEST_CASE("default orders give margin over the floor") {
  auto orders = default_orders(6, 3);
  REQUIRE(orders.size() == 3);
  for (int M : orders) CHECK(M == 2 * 6 + 13);
  CHECK_THROWS_AS(default_orders(0, 2), ConfigError);
}

TEST_CASE("grids below the oversampling floor are refused") {
  Domain d({kPi});
  Spectrum s(d, 4);
  Grid coarse(d, {8});  // floor is 2N+1 = 9
  CHECK_THROWS_AS(Transform(s, coarse), ResolutionError);
  Grid at_floor(d, {9});
  CHECK_NOTHROW(Transform(s, at_floor));
}

TEST_CASE("gram deviation is tiny at the default margin, not at the floor") {
  Domain d({kPi, 1.3});
  Spectrum s(d, 4);
  Grid fine(d, default_orders(4, 2));
  CHECK(Transform(s, fine).gram_deviation() < 1e-12);
  Grid floor_grid(d, {9, 9});
  // The floor keeps the transform usable but leaves visible Gram error; this
  // is why the default carries margin.
  CHECK(Transform(s, floor_grid).gram_deviation() > 1e-12);
}

TEST_CASE("analyze is a left inverse of synthesize") {
  for (auto sides : std::vector<std::vector<double>>{{kPi}, {kPi, 2 * kPi}, {1.0, 1.5, 0.8}}) {
    Domain d(sides);
    auto t = make_transform(d, 5);
    auto c = random_coeffs(t.spectrum(), 42);
    auto back = t.analyze(t.synthesize(c));
    CHECK(rel_l2_diff(back, c) < 1e-12);
  }
}

TEST_CASE("quadrature Parseval identity") {
  Domain d({kPi, 2.0});
  auto t = make_transform(d, 6);
  auto c = random_coeffs(t.spectrum(), 7);
  auto vals = t.synthesize(c);
  std::vector<double> sq(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) sq[i] = vals[i] * vals[i];
  KahanSum csq;
  for (double x : c) csq.add(x * x);
  CHECK(t.quad(sq) == doctest::Approx(csq.value()).epsilon(1e-10));
}

TEST_CASE("separable kernels match the dense reference") {
  Domain d({kPi, 1.7, 0.9});
  Spectrum s(d, 3);
  Grid g(d, default_orders(3, 3));
  Transform t(s, g);
  auto c = random_coeffs(s, 11);
  auto fast = t.synthesize(c);
  auto ref = reference::synthesize(s, g, c);
  CHECK(rel_l2_diff(fast, ref) < 1e-12);
  auto a_fast = t.analyze(fast);
  auto a_ref = reference::analyze(s, g, fast);
  CHECK(rel_l2_diff(a_fast, a_ref) < 1e-12);
}

TEST_CASE("synthesize_partial matches the analytic cosine derivative") {
  Domain d({kPi, 2 * kPi});
  auto t = make_transform(d, 4);
  const auto& s = t.spectrum();
  std::vector<double> c(s.size(), 0.0);
  std::size_t pick = 5;
  c[pick] = 1.0;
  auto mode = s.mode(pick);
  for (int axis = 0; axis < 2; ++axis) {
    auto got = t.synthesize_partial(c, axis);
    const auto& g = t.grid();
    std::size_t i = 0;
    for (double x0 : g.nodes(0)) {
      for (double x1 : g.nodes(1)) {
        double f0 = mode[0] * kPi / d.side(0), f1 = mode[1] * kPi / d.side(1);
        double a0 = std::sqrt(2.0 / d.side(0)), a1 = std::sqrt(2.0 / d.side(1));
        double expect = axis == 0 ? a0 * f0 * std::cos(f0 * x0) * a1 * std::sin(f1 * x1)
                                  : a0 * std::sin(f0 * x0) * a1 * f1 * std::cos(f1 * x1);
        CHECK(got[i] == doctest::Approx(expect).epsilon(1e-12));
        ++i;
      }
    }
  }
  CHECK_THROWS_AS(t.synthesize_partial(c, 2), ConfigError);
}

TEST_CASE("pointwise evaluation at known points") {
  Domain d({kPi});
  auto t = make_transform(d, 3);
  std::vector<double> e1 = {1.0, 0.0, 0.0}, e2 = {0.0, 1.0, 0.0};
  double mid[] = {kPi / 2};
  CHECK(t.evaluate(e1, mid) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-14));
  CHECK(std::abs(t.evaluate(e2, mid)) < 1e-14);
  // Agreement with the grid synthesis at a node.
  auto c = random_coeffs(t.spectrum(), 3);
  auto vals = t.synthesize(c);
  double node[] = {t.grid().nodes(0)[2]};
  CHECK(t.evaluate(c, node) == doctest::Approx(vals[2]).epsilon(1e-13));
}

TEST_CASE("modes satisfy the eigenvalue relation under finite differences") {
  Domain d({kPi, 2 * kPi});
  auto t = make_transform(d, 3);
  const auto& s = t.spectrum();
  std::vector<double> c(s.size(), 0.0);
  std::size_t pick = 7;
  c[pick] = 1.0;
  double x[] = {1.1, 0.7};
  double h = 1e-3;
  double u0 = t.evaluate(c, x);
  KahanSum lap;
  for (int axis = 0; axis < 2; ++axis) {
    double xp[] = {x[0], x[1]}, xm[] = {x[0], x[1]};
    xp[axis] += h;
    xm[axis] -= h;
    lap.add((t.evaluate(c, xp) - 2 * u0 + t.evaluate(c, xm)) / (h * h));
  }
  CHECK(-lap.value() == doctest::Approx(s.eigenvalue(pick) * u0).epsilon(1e-3));
}

TEST_CASE("zero maps to zero exactly") {
  Domain d({1.0, 1.0});
  auto t = make_transform(d, 3);
  std::vector<double> zc(t.spectrum().size(), 0.0);
  for (double v : t.synthesize(zc)) CHECK(v == 0.0);
  std::vector<double> zv(t.grid().total(), 0.0);
  for (double v : t.analyze(zv)) CHECK(v == 0.0);
}

TEST_CASE("quad of the constant one is the box volume") {
  Domain d({kPi, 0.5, 2.2});
  auto t = make_transform(d, 2);
  std::vector<double> ones(t.grid().total(), 1.0);
  CHECK(t.quad(ones) == doctest::Approx(d.volume()).epsilon(1e-13));
}

#ifdef _OPENMP
TEST_CASE("results are bitwise identical across thread counts") {
  Domain d({kPi, 1.3});
  auto t = make_transform(d, 6);
  auto c = random_coeffs(t.spectrum(), 99);
  int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  auto v1 = t.synthesize(c);
  auto a1 = t.analyze(v1);
  omp_set_num_threads(2);
  auto v2 = t.synthesize(c);
  auto a2 = t.analyze(v1);
  omp_set_num_threads(saved);
  REQUIRE(v1.size() == v2.size());
  for (std::size_t i = 0; i < v1.size(); ++i) CHECK(v1[i] == v2[i]);
  for (std::size_t i = 0; i < a1.size(); ++i) CHECK(a1[i] == a2[i]);
}
#endif

}

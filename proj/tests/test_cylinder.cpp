#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "specrel/cylinder.hpp"
#include "specrel/errors.hpp"
#include "specrel/util.hpp"

using namespace specrel;

namespace {
constexpr double kPi = std::numbers::pi;

Transform box2_transform(int N) {
  Domain d({kPi, 2 * kPi});
  Spectrum s(d, N);
  Grid g(d, default_orders(N, 2));
  return Transform(s, g);
}

std::vector<double> random_field(const Spectrum& s, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<double> c(s.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = gauss(rng) / (1.0 + s.eigenvalue(k));
  return c;
}
}  // namespace

TEST_SUITE("cylinder") {

TEST_CASE("single-mode cylinder integrals have rational closed forms") {
  // Ground mode of the pi-cube: lambda = 3, m = 1, mu = 2.
  Domain d({kPi, kPi, kPi});
  Spectrum s(d, 1);
  std::vector<double> c = {1.0};
  auto q = cylinder_quantities(s, c, 1.0);
  CHECK(q.Ex == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(q.Et == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(q.E0 == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(q.T0 == doctest::Approx(1.0).epsilon(1e-14));
  // Ex + Et + m^2 E0 collapses to sum c^2 mu.
  CHECK(q.Ex + q.Et + q.E0 == doctest::Approx(2.0).epsilon(1e-14));

  auto tc = trace_coercivity_check(s, c, 1.0);
  CHECK(tc.lhs == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tc.rhs == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(tc.ratio == doctest::Approx(4.0 / 7.0).epsilon(1e-13));
}

TEST_CASE("extension carries exact decay rates and normal derivative") {
  Domain d({kPi, kPi, kPi});
  Spectrum s(d, 2);
  std::vector<double> c(s.size(), 0.5);
  double m = 1.5;
  CylinderExtension ext(s, c, m);
  const auto& mu = ext.decay_rates();
  for (std::size_t k = 0; k < s.size(); ++k) {
    // mu^2 - m^2 returns lambda to rounding.
    CHECK(mu[k] * mu[k] - m * m == doctest::Approx(s.eigenvalue(k)).epsilon(1e-14));
  }
  auto nd = ext.normal_derivative_coeffs();
  for (std::size_t k = 0; k < s.size(); ++k)
    CHECK(nd[k] == doctest::Approx(mu[k] * c[k]).epsilon(1e-15));
  CHECK_THROWS_AS(CylinderExtension(s, c, -0.5), ConfigError);
}

TEST_CASE("pointwise extension decays in depth at the exact rate") {
  Domain d({kPi});
  Spectrum s(d, 1);
  Grid g(d, default_orders(1, 1));
  Transform t(s, g);
  std::vector<double> c = {1.0};
  double m = 1.0;  // lambda = 1, mu = sqrt(2)
  CylinderExtension ext(s, c, m);
  double x[] = {kPi / 2};
  double base = ext.evaluate(t, x, 0.0);
  CHECK(base == doctest::Approx(std::sqrt(2 / kPi)).epsilon(1e-13));
  for (double depth : {0.5, 1.0, 2.0}) {
    double expect = base * std::exp(-std::sqrt(2.0) * depth);
    CHECK(ext.evaluate(t, x, depth) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK_THROWS_AS(ext.evaluate(t, x, -0.1), ConfigError);
}

TEST_CASE("zero field gives zero cylinder integrals") {
  Domain d({kPi, 2 * kPi});
  Spectrum s(d, 3);
  std::vector<double> c(s.size(), 0.0);
  auto q = cylinder_quantities(s, c, 2.0);
  CHECK(q.Ex == 0.0);
  CHECK(q.Et == 0.0);
  CHECK(q.E0 == 0.0);
  CHECK(q.T0 == 0.0);
}

TEST_CASE("trace bound holds for every field and mass, including m = 0") {
  Domain d({kPi, 2 * kPi});
  Spectrum s(d, 4);
  std::mt19937_64 rng(101);
  std::vector<double> masses = {0.0};
  for (int i = 0; i < 19; ++i) masses.push_back(std::pow(10.0, -2.0 + 4.0 * i / 18.0));
  for (int trial = 0; trial < 100; ++trial) {
    auto c = random_field(s, rng);
    for (double m : masses) {
      auto tc = trace_coercivity_check(s, c, m);
      CHECK(tc.lhs <= tc.rhs * (1 + 1e-12) + 1e-300);
      // Coercivity is never worse than the worst retained mode.
      double floor_ratio = 1.0;
      for (double lam : s.eigenvalues()) {
        double mu = std::sqrt(lam + m * m);
        floor_ratio = std::min(floor_ratio, (mu - m) / mu);
      }
      CHECK(tc.ratio >= floor_ratio - 1e-12);
      CHECK(tc.ratio <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("interval lateral term reduces to k^2 / mu_k") {
  Domain d({kPi});
  Spectrum s(d, 3);
  Grid g(d, default_orders(3, 1));
  Transform t(s, g);
  double m = 1.0;
  std::vector<double> e1 = {1.0, 0.0, 0.0}, e2 = {0.0, 1.0, 0.0};
  CHECK(lateral_boundary_term(t, e1, m) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(lateral_boundary_term(t, e2, m) == doctest::Approx(4.0 / std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("lateral term is a symmetric bilinear form in the field") {
  auto t = box2_transform(3);
  std::mt19937_64 rng(55);
  auto u = random_field(t.spectrum(), rng);
  auto v = random_field(t.spectrum(), rng);
  std::vector<double> sum(u), diff(u);
  for (std::size_t k = 0; k < u.size(); ++k) {
    sum[k] += v[k];
    diff[k] -= v[k];
  }
  double m = 0.8;
  double lhs = lateral_boundary_term(t, sum, m) + lateral_boundary_term(t, diff, m);
  double rhs = 2 * lateral_boundary_term(t, u, m) + 2 * lateral_boundary_term(t, v, m);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("identity residuals are order one off the solution set") {
  auto t = box2_transform(4);
  std::mt19937_64 rng(7);
  auto c = random_field(t.spectrum(), rng);
  double m = 1.0, p = 2.0;
  double nh = nehari_identity_residual(t, c, m, p);
  double ph = pohozaev_residual(t, c, m, p);
  CHECK(nh > 1e-4);
  CHECK(nh < 10.0);
  CHECK(ph > 1e-4);
  CHECK(ph < 10.0);
}

}

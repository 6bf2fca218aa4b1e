#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "specrel/domain.hpp"
#include "specrel/errors.hpp"
#include "specrel/util.hpp"

using namespace specrel;
namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("domain") {

TEST_CASE("box geometry accessors") {
  Domain d({kPi, 2 * kPi});
  CHECK(d.dim() == 2);
  CHECK(d.side(0) == kPi);
  CHECK(d.side(1) == 2 * kPi);
  CHECK(d.min_side() == kPi);
  CHECK(d.volume() == doctest::Approx(2 * kPi * kPi).epsilon(1e-15));
  auto c = d.center();
  CHECK(c[0] == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(c[1] == doctest::Approx(kPi).epsilon(1e-15));
}

TEST_CASE("faces enumerate every boundary hyperplane with outward data") {
  Domain d({1.0, 2.0, 3.0});
  const auto& faces = d.faces();
  REQUIRE(faces.size() == 6);  // 2n of them
  int lo = 0, hi = 0;
  for (const auto& f : faces) {
    CHECK((f.orientation == -1 || f.orientation == 1));
    if (f.orientation == -1) {
      ++lo;
      CHECK(f.coordinate == 0.0);
    } else {
      ++hi;
      CHECK(f.coordinate == d.side(f.axis));
    }
  }
  CHECK(lo == 3);
  CHECK(hi == 3);
}

TEST_CASE("invalid boxes are rejected") {
  CHECK_THROWS_AS(Domain({}), ConfigError);
  CHECK_THROWS_AS(Domain({1.0, -2.0}), ConfigError);
  CHECK_THROWS_AS(Domain({0.0}), ConfigError);
  CHECK_THROWS_AS(Domain({1.0, 1.0, 1.0, 1.0, 1.0}), ConfigError);
}

TEST_CASE("gauss_legendre weights sum to the interval length") {
  for (int order : {1, 2, 5, 16, 40}) {
    auto [x, w] = gauss_legendre(order);
    REQUIRE(x.size() == static_cast<std::size_t>(order));
    CHECK(kahan_total(w) == doctest::Approx(2.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gauss_legendre(0), ConfigError);
}

TEST_CASE("gauss_legendre integrates polynomials of degree 2M-1 exactly") {
  // Order M rule: integral of x^d over [-1,1] for all d <= 2M-1.
  for (int order : {3, 7}) {
    auto [x, w] = gauss_legendre(order);
    for (int d = 0; d <= 2 * order - 1; ++d) {
      KahanSum s;
      for (int i = 0; i < order; ++i) s.add(w[static_cast<std::size_t>(i)] * std::pow(x[static_cast<std::size_t>(i)], d));
      double exact = (d % 2 == 1) ? 0.0 : 2.0 / (d + 1);
      CHECK(s.value() == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("grid maps nodes into the open box and carries the jacobian") {
  Domain d({kPi, 2.0});
  Grid g(d, {5, 7});
  CHECK(g.total() == 35);
  for (int axis = 0; axis < 2; ++axis) {
    const auto& xs = g.nodes(axis);
    for (double x : xs) {
      CHECK(x > 0.0);
      CHECK(x < d.side(axis));
    }
    CHECK(kahan_total(g.weights(axis)) == doctest::Approx(d.side(axis)).epsilon(1e-14));
  }
}

TEST_CASE("grid validates orders") {
  Domain d({1.0, 1.0});
  CHECK_THROWS_AS(Grid(d, {3}), ConfigError);
  CHECK_THROWS_AS(Grid(d, {3, 0}), ConfigError);
}

}

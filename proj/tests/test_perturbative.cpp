#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "specrel/errors.hpp"
#include "specrel/field.hpp"
#include "specrel/perturbative.hpp"
#include "specrel/symbols.hpp"
#include "specrel/util.hpp"

using namespace specrel;

namespace {
constexpr double kPi = std::numbers::pi;

Transform square_transform(int N) {
  Domain d({kPi, kPi});
  Spectrum s(d, N);
  Grid g(d, default_orders(N, 2));
  return Transform(s, g);
}

double rel_l2_diff(std::span<const double> a, std::span<const double> b) {
  KahanSum num, den;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num.add((a[i] - b[i]) * (a[i] - b[i]));
    den.add(b[i] * b[i]);
  }
  return std::sqrt(num.value() / std::max(den.value(), 1e-300));
}

std::vector<double> random_vec(std::size_t K, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<double> v(K);
  for (double& x : v) x = gauss(rng);
  return v;
}
}  // namespace

TEST_SUITE("perturbative") {

TEST_CASE("multiplication by one is the identity in coefficient space") {
  auto t = square_transform(4);
  std::vector<double> ones(t.grid().total(), 1.0);
  auto B = multiplication_matrix(t, ones);
  for (int i = 0; i < B.rows(); ++i) {
    for (int j = 0; j < B.cols(); ++j) {
      double expect = i == j ? 1.0 : 0.0;
      CHECK(std::abs(B(i, j) - expect) < 1e-12);
    }
  }
}

TEST_CASE("multiplication matrices are symmetric") {
  auto t = square_transform(4);
  auto c = random_vec(t.spectrum().size(), 3);
  for (double& x : c) x /= 4.0;
  auto f = t.synthesize(c);
  auto B = multiplication_matrix(t, f);
  double asym = 0.0;
  for (int i = 0; i < B.rows(); ++i)
    for (int j = 0; j < i; ++j) asym = std::max(asym, std::abs(B(i, j) - B(j, i)));
  CHECK(asym < 1e-12);
}

TEST_CASE("smallest_singular_value on diagonal matrices") {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 3);
  D(0, 0) = 3.0;
  D(1, 1) = -0.2;  // sign does not matter for singular values
  D(2, 2) = 5.0;
  CHECK(smallest_singular_value(D) == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(smallest_singular_value(Eigen::MatrixXd::Identity(4, 4)) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("limit solve converges with a nondegenerate linearization") {
  auto t = square_transform(6);
  Eigen::MatrixXd B;
  auto sol = solve_limit(t, 3.0, limit_solver_defaults(), 1e-6, &B);
  REQUIRE(sol.converged);
  CHECK(sol.residual <= 1e-8);
  CHECK(sol.sigma_min > 0.0);
  CHECK(sol.energy > 0.0);
  CHECK(B.rows() == static_cast<int>(t.spectrum().size()));
  // An absurd threshold trips the degeneracy guard on the same problem.
  CHECK_THROWS_AS(solve_limit(t, 3.0, limit_solver_defaults(), 10.0), NumericalError);
}

TEST_CASE("difference operator applies its closed-form symbol") {
  Domain d({kPi, kPi, kPi});
  Spectrum s(d, 1);
  std::vector<double> c = {2.0};
  // lambda = 3, m = 1: the symbol is exactly one.
  auto out = difference_operator(s, c, 1.0);
  CHECK(out[0] == doctest::Approx(2.0).epsilon(1e-15));

  Domain d2({kPi, 1.3});
  Spectrum s2(d2, 5);
  auto x = random_vec(s2.size(), 9);
  for (double m : {1.0, 4.0, 16.0}) {
    auto y = difference_operator(s2, x, m);
    for (std::size_t k = 0; k < x.size(); ++k)
      CHECK(y[k] == difference_symbol(s2.eigenvalue(k), m) * x[k]);
  }
}

TEST_CASE("superlinear remainder vanishes at zero and degenerates cleanly") {
  auto t = square_transform(5);
  auto u = random_vec(t.spectrum().size(), 21);
  std::vector<double> zero(u.size(), 0.0);
  for (double v : quadratic_remainder(t, u, zero, 2.7)) CHECK(v == 0.0);
  // Expanding around zero leaves the bare nonlinearity.
  auto w = random_vec(u.size(), 22);
  auto q = quadratic_remainder(t, zero, w, 2.7);
  auto bare = nonlinear_power(t, w, 2.7);
  for (std::size_t k = 0; k < w.size(); ++k) CHECK(q[k] == bare[k]);
}

TEST_CASE("remainder is second order in the correction") {
  auto t = square_transform(5);
  auto sol = solve_limit(t, 3.0);
  auto w = random_vec(sol.coefficients.size(), 33);
  double wn = norm_l2(w);
  for (double& x : w) x /= wn;
  std::vector<double> logs_t, logs_q;
  for (double tau : {1e-1, 1e-2, 1e-3}) {
    std::vector<double> tw(w);
    for (double& x : tw) x *= tau;
    auto q = quadratic_remainder(t, sol.coefficients, tw, 3.0);
    logs_t.push_back(std::log(tau));
    logs_q.push_back(std::log(norm_l2(q)));
  }
  double slope = (logs_q.back() - logs_q.front()) / (logs_t.back() - logs_t.front());
  CHECK(slope > 1.9);
  CHECK(slope < 2.6);
}

TEST_CASE("gradient seminorm closed forms") {
  auto t = square_transform(4);
  std::vector<double> e1(t.spectrum().size(), 0.0);
  e1[0] = 1.0;
  // q = 2 recovers the H^1 seminorm sqrt(lambda_1).
  CHECK(gradient_seminorm(t, e1, 2.0) ==
        doctest::Approx(std::sqrt(t.spectrum().lambda1())).epsilon(1e-12));
  auto c = random_vec(t.spectrum().size(), 41);
  for (double& x : c) x /= 8.0;
  double base = gradient_seminorm(t, c, 3.0);
  std::vector<double> twice(c);
  for (double& x : twice) x *= 2.0;
  CHECK(gradient_seminorm(t, twice, 3.0) == doctest::Approx(2 * base).epsilon(1e-12));
  CHECK_THROWS_AS(gradient_seminorm(t, c, 0.5), ConfigError);
}

TEST_CASE("correction solver inverts its own operator") {
  auto t = square_transform(6);
  auto sol = solve_limit(t, 3.0);
  double m = 64.0;
  MassLinearSolver solver(t, sol.coefficients, 3.0, m);
  CHECK(solver.mass() == m);
  auto rhs = random_vec(sol.coefficients.size(), 51);
  auto x = solver.solve(rhs);
  auto back = solver.apply(x);
  CHECK(rel_l2_diff(back, rhs) < 1e-10);
  // The normal-equation route reproduces the direct factorization.
  auto x_cg = solver.solve_cgnr(rhs);
  CHECK(rel_l2_diff(x_cg, x) < 1e-8);
  // Adjoint consistency: <Ax, y> = <x, A^T y>.
  auto y = random_vec(rhs.size(), 52);
  double lhs = kahan_dot(solver.apply(x), y);
  double rhs_ip = kahan_dot(x, solver.apply_adjoint(y));
  CHECK(lhs == doctest::Approx(rhs_ip).epsilon(1e-11));
}

TEST_CASE("series inversion refuses the full-size linearization") {
  auto t = square_transform(6);
  auto sol = solve_limit(t, 3.0);
  MassLinearSolver solver(t, sol.coefficients, 3.0, 64.0);
  // The scale-invariant eigenvalue of the limit state keeps the series
  // divergent at every mass; the guard must fire rather than iterate.
  CHECK(solver.neumann_operator_norm() > 1.0);
  auto rhs = random_vec(sol.coefficients.size(), 61);
  CHECK_THROWS_AS(solver.solve_neumann(rhs), NumericalError);

  // At small amplitude the same machinery contracts and matches the direct
  // solve.
  std::vector<double> small(sol.coefficients);
  for (double& x : small) x *= 0.01;
  MassLinearSolver weak(t, small, 3.0, 64.0);
  CHECK(weak.neumann_operator_norm() < 1.0);
  auto via_series = weak.solve_neumann(rhs);
  auto via_lu = weak.solve(rhs);
  CHECK(rel_l2_diff(via_series, via_lu) < 1e-8);
}

TEST_CASE("inverse norm stays bounded as the mass grows") {
  auto t = square_transform(6);
  auto sol = solve_limit(t, 3.0);
  Eigen::MatrixXd B;
  solve_limit(t, 3.0, limit_solver_defaults(), 1e-6, &B);
  double lo = 1e300, hi = 0.0;
  for (double m : {32.0, 64.0, 128.0, 256.0}) {
    MassLinearSolver solver(t, sol.coefficients, 3.0, m, &B);
    double nrm = solver.inverse_norm_estimate();
    CHECK(nrm > 0.0);
    lo = std::min(lo, nrm);
    hi = std::max(hi, nrm);
  }
  CHECK(hi / lo < 2.0);
}

TEST_CASE("fixed point converges at large mass with a small correction") {
  auto t = square_transform(6);
  auto sol = solve_limit(t, 3.0);
  double m = 64.0;
  MassLinearSolver solver(t, sol.coefficients, 3.0, m);
  auto res = fixed_point_solve(t, sol.coefficients, 3.0, m, solver);
  REQUIRE(res.converged);
  CHECK(res.iterations <= 30);
  CHECK(res.residual <= 1e-10);
  CHECK(res.correction_lq > 0.0);
  double wnorm = norm_l2(res.correction);
  CHECK(wnorm > 0.0);
  CHECK(wnorm < 1e-2);  // O(m^{-2}) at m = 64
  REQUIRE_FALSE(res.update_factors.empty());
  // The solved field satisfies the normalized equation; the rescaled one
  // satisfies the original equation with the plain gap multiplier.
  auto gap = apply_multiplier(t.spectrum(), res.original,
                              [m](double lam) { return gap_symbol(lam, m); });
  auto nl = nonlinear_power(t, res.original, 3.0);
  CHECK(rel_l2_diff(gap, nl) < 1e-7);
}

TEST_CASE("fixed point guards fire on misuse and divergence") {
  auto t = square_transform(6);
  auto sol = solve_limit(t, 3.0);
  MassLinearSolver solver(t, sol.coefficients, 3.0, 64.0);
  FixedPointConfig bad;
  bad.max_iterations = 0;
  CHECK_THROWS_AS(fixed_point_solve(t, sol.coefficients, 3.0, 64.0, solver, bad), ConfigError);
  CHECK_THROWS_AS(fixed_point_solve(t, sol.coefficients, 3.0, 32.0, solver), ConfigError);
  FixedPointConfig tiny_ball;
  tiny_ball.delta = 1e-12;
  CHECK_THROWS_AS(fixed_point_solve(t, sol.coefficients, 3.0, 64.0, solver, tiny_ball),
                  NumericalError);
  // Small mass sits far outside the perturbative regime; the iteration must
  // report divergence rather than return garbage.
  MassLinearSolver strained(t, sol.coefficients, 3.0, 0.01);
  CHECK_THROWS_AS(fixed_point_solve(t, sol.coefficients, 3.0, 0.01, strained), NumericalError);
}

TEST_CASE("rate study recovers the inverse-square error law") {
  auto t = square_transform(6);
  std::vector<double> masses = {16.0, 32.0, 64.0, 128.0};
  auto study = rate_study(t, 3.0, masses);
  REQUIRE(study.limit.converged);
  REQUIRE(study.rows.size() == 4);
  double prev_err = 1e300, prev_con = 1e300;
  for (const auto& row : study.rows) {
    CHECK(row.converged);
    CHECK(row.error < prev_err);
    CHECK(row.contraction < 1.0);
    CHECK(row.contraction <= prev_con * (1 + 1e-9));
    prev_err = row.error;
    prev_con = row.contraction;
  }
  CHECK(study.slope > -2.4);
  CHECK(study.slope < -1.6);
  CHECK_THROWS_AS(rate_study(t, 3.0, std::vector<double>{}), ConfigError);
}

TEST_CASE("limit linearization geometry is stable under refinement") {
  auto coarse = square_transform(6);
  auto fine = square_transform(12);
  auto s1 = solve_limit(coarse, 3.0);
  auto s2 = solve_limit(fine, 3.0);
  REQUIRE(s1.converged);
  REQUIRE(s2.converged);
  CHECK(std::abs(s1.sigma_min / s2.sigma_min - 1.0) < 0.1);
  CHECK(std::abs(s1.energy / s2.energy - 1.0) < 1e-3);
}

}

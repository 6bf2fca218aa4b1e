#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "specrel/transforms.hpp"
#include "specrel/variational.hpp"

namespace specrel {

// Large-mass pipeline: solve the limit problem  (-Laplace) u = |u|^{p-1} u
// spectrally, then recover the solution of the normalized massive equation
//   2m (sqrt(-Laplace + m^2) - m) u = |u|^{p-1} u
// as u = u_limit + w with w from a linearized fixed-point iteration, and
// measure how fast w vanishes as m grows.

struct LimitSolution {
  std::vector<double> coefficients;
  double energy = 0.0;
  double residual = 0.0;   // relative equation residual
  double sigma_min = 0.0;  // smallest singular value of I - diag(1/lambda) B
  int iterations = 0;
  bool converged = false;
};

inline SolverConfig limit_solver_defaults() {
  SolverConfig c;
  c.gradient_tol = 1e-10;
  return c;
}

// Dense matrix of multiplication by a grid function f in coefficient space:
// B[k,l] = <phi_k, f phi_l>, assembled one column per basis vector. Symmetric
// up to quadrature rounding since the quadrature Gram is near-orthonormal.
Eigen::MatrixXd multiplication_matrix(const Transform& t, std::span<const double> grid_values);

// I - diag(1/symbol_values) * mult; the Jacobian of the spectral equation
// c - symbol^{-1} * nonlinearity at a linearization point.
Eigen::MatrixXd linearization_matrix(const Eigen::MatrixXd& mult,
                                     std::span<const double> symbol_values);

// Smallest singular value by power iteration on the factorized inverse
// normal map M^{-T} M^{-1}. Deterministic start; returns the estimate after
// convergence of the Rayleigh growth factor or max_iterations.
double smallest_singular_value(const Eigen::MatrixXd& M, int max_iterations = 200,
                               double tol = 1e-10);

// Certified limit solve: ground state of the Dirichlet-Laplacian problem plus
// the nondegeneracy number sigma_min of its linearization. Throws
// NumericalError when sigma_min falls below sigma_threshold (a degenerate
// linearization leaves the correction equation meaningless). When mult_out is
// given, the assembled multiplication matrix of p |u|^{p-1} is moved there
// for reuse.
LimitSolution solve_limit(const Transform& t, double p,
                          const SolverConfig& config = limit_solver_defaults(),
                          double sigma_threshold = 1e-6, Eigen::MatrixXd* mult_out = nullptr);

// (lambda - 2m(sqrt(lambda + m^2) - m)) c_k in the cancellation-free form
// lambda^2 / (sqrt(lambda + m^2) + m)^2.
std::vector<double> difference_operator(const Spectrum& spectrum, std::span<const double> coeffs,
                                        double m);

// Coefficients of Q(w) = |u+w|^{p-1}(u+w) - |u|^{p-1}u - p|u|^{p-1}w, the
// superlinear remainder at the linearization point u. Pointwise cancellation
// makes Q(0) exactly zero.
std::vector<double> quadratic_remainder(const Transform& t, std::span<const double> limit_coeffs,
                                        std::span<const double> correction, double p);

// The correction operator A_m = I - (2m P_m)^{-1} p |u_limit|^{p-1} with a
// dense LU for the production solve and matrix-free actions for the
// independent routes.
class MassLinearSolver {
 public:
  // Assembles the multiplication matrix itself unless a prebuilt one for
  // p |u_limit|^{p-1} is supplied.
  MassLinearSolver(const Transform& t, std::span<const double> limit_coeffs, double p, double m,
                   const Eigen::MatrixXd* mult = nullptr);

  double mass() const { return m_; }

  // Matrix-free action of A_m and its transpose on a coefficient vector.
  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> apply_adjoint(std::span<const double> x) const;

  // Production route: dense LU solve.
  std::vector<double> solve(std::span<const double> rhs) const;

  // Independent route sharing no factorization: conjugate gradient on the
  // normal equations with the matrix-free actions above.
  std::vector<double> solve_cgnr(std::span<const double> rhs, double tol = 1e-12,
                                 int max_iterations = 5000) const;

  // Geometric series in K = (2m P_m)^{-1} p |u_limit|^{p-1}. Refuses to run
  // when the operator norm of K is >= 1: at the actual ground state K has an
  // eigenvalue near p for every m (the limit state is an eigenvector of the
  // preconditioned Hessian), so the series only converges in genuinely
  // small-amplitude regimes.
  std::vector<double> solve_neumann(std::span<const double> rhs, double tol = 1e-12,
                                    int max_iterations = 400) const;

  // Spectral-norm estimate of K by power iteration on K^T K (cached).
  double neumann_operator_norm() const;

  // ||A_m^{-1}||_2 via power iteration on the factorized inverse.
  double inverse_norm_estimate(int max_iterations = 200, double tol = 1e-10) const;

 private:
  const Transform* t_;
  double p_;
  double m_;
  std::vector<double> pm_;     // mass symbol on the retained spectrum
  std::vector<double> fvals_;  // p |u_limit|^{p-1} at the grid nodes
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  mutable double neumann_norm_ = -1.0;
};

struct FixedPointConfig {
  double tol = 1e-11;      // absolute l2 stop on the update
  int max_iterations = 200;
  double delta = 1.0;      // guard radius for ||w||_{L^{np}}
};

struct FixedPointResult {
  std::vector<double> correction;      // w
  std::vector<double> normalized;      // u_limit + w, solves the 2m-normalized equation
  std::vector<double> original;        // (2m)^{-1/(p-1)} (u_limit + w)
  double residual = 0.0;               // relative residual of `normalized`
  double correction_lq = 0.0;          // ||w||_{L^{np}}
  int iterations = 0;
  std::vector<double> update_factors;  // ||dw_{j+1}|| / ||dw_j||
  bool converged = false;
};

// w <- A_m^{-1} (2m P_m)^{-1} [Q(w) + (lambda - 2m P_m) u_limit] from w = 0.
// Throws NumericalError after three consecutive update factors >= 1
// (divergence) or when the converged correction leaves the L^{np} guard ball.
FixedPointResult fixed_point_solve(const Transform& t, std::span<const double> limit_coeffs,
                                   double p, double m, const MassLinearSolver& solver,
                                   const FixedPointConfig& config = {});

// (integral of (sum_j (d_j u)^2)^{q/2})^{1/q}: the pointwise gradient
// magnitude in L^q. The natural size of the correction is q = n.
double gradient_seminorm(const Transform& t, std::span<const double> coeffs, double q);

struct RateRow {
  double m = 0.0;
  double error = 0.0;        // gradient_seminorm of the correction, q = n
  double contraction = 0.0;  // geometric mean of the update factors
  int iterations = 0;
  bool converged = false;
};

struct RateStudyResult {
  LimitSolution limit;
  std::vector<RateRow> rows;
  double slope = 0.0;  // least-squares slope of log error against log mass
};

// One limit solve and multiplication-matrix assembly, then one correction
// solve per mass. Masses must be positive and the limit solve must converge.
RateStudyResult rate_study(const Transform& t, double p, std::span<const double> masses,
                           const SolverConfig& limit_config = limit_solver_defaults(),
                           const FixedPointConfig& fp = {});

}  // namespace specrel

#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "specrel/transforms.hpp"

namespace specrel {

// Coefficient-space field operations. A field is a plain coefficient vector
// keyed by the Transform's spectrum; orthonormality makes the L2 norm the
// Euclidean norm of the coefficients.

double norm_l2(std::span<const double> coeffs);

// |v|^{p-1} v pointwise; 0 at v = 0 (continuous extension for non-integer p).
// The single evaluation form shared by every nonlinearity path, so expansion
// identities hold bitwise, not just to rounding.
inline double signed_power(double v, double p) {
  if (v == 0.0) return 0.0;
  double a = std::pow(std::abs(v), p);
  return v > 0.0 ? a : -a;
}

// (integral of |u|^q)^{1/q} by collocation quadrature. Requires q >= 1.
double norm_lq(const Transform& t, std::span<const double> coeffs, double q);

// sum_k F(lambda_k) c_k^2. Throws SymbolError naming the mode if F is not
// finite on a retained eigenvalue.
double quadratic_form(const Spectrum& spectrum, std::span<const double> coeffs,
                      const std::function<double(double)>& symbol);

// Coefficients of |u|^{p-1} u, evaluated pointwise on the collocation grid
// and projected back. Odd in u by construction. Requires p > 1.
std::vector<double> nonlinear_power(const Transform& t, std::span<const double> coeffs, double p);

// Re-evaluates nonlinear_power on a grid with doubled per-axis orders and
// returns the relative L2 coefficient drift. The honest aliasing control for
// non-integer p, where no polynomial dealiasing rule exists.
double nonlinear_drift(const Transform& t, std::span<const double> coeffs, double p);

// I_m(u) = 1/2 sum c_k^2 sqrt(lambda_k + m^2) - m/2 sum c_k^2
//          - 1/(p+1) ||u||_{p+1}^{p+1}.
double energy(const Transform& t, std::span<const double> coeffs, double m, double p);

// Gradient of I_m in coefficient space:
// g_k = (sqrt(lambda_k + m^2) - m) c_k - <|u|^{p-1}u, phi_k>.
std::vector<double> energy_gradient(const Transform& t, std::span<const double> coeffs, double m,
                                    double p);

// Quadratic aggregate A(u) = sum c_k^2 (mu_k - m) and nonlinear aggregate
// B(u) = ||u||_{p+1}^{p+1}; I_m(t u) = t^2/2 A - t^{p+1}/(p+1) B.
double quadratic_aggregate(const Spectrum& spectrum, std::span<const double> coeffs, double m);

// Scale t0 > 0 with d/dt I_m(t u)|_{t0} = 0: t0 = (A/B)^{1/(p-1)}.
// Throws NumericalError if A <= 0 (cannot occur for m >= 0 on box spectra)
// or B <= 0 (zero field).
double nehari_scale(double quadratic, double nonlinear, double p);
double nehari_scale(const Transform& t, std::span<const double> coeffs, double m, double p);

}  // namespace specrel

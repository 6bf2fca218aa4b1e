#pragma once

#include <span>
#include <vector>

#include "specrel/transforms.hpp"

namespace specrel {

// Harmonic-extension diagnostics. The extension of u to the half-cylinder is
// closed-form per mode, U(x,t) = sum_k c_k e^{-mu_k t} phi_k(x) with
// mu_k = sqrt(lambda_k + m^2); every cylinder integral below is an exact
// coefficient-space expression, so no t-discretization appears anywhere.

class CylinderExtension {
 public:
  // m = 0 is permitted: mu_k = sqrt(lambda_k) stays positive on box spectra.
  CylinderExtension(const Spectrum& spectrum, std::span<const double> coeffs, double m);

  const Spectrum& spectrum() const { return *spec_; }
  double m() const { return m_; }
  const std::vector<double>& trace_coeffs() const { return coeffs_; }
  const std::vector<double>& decay_rates() const { return mu_; }
  // Coefficients of -d/dt U(., 0) = sqrt(-Laplace + m^2) u: mu_k c_k.
  std::vector<double> normal_derivative_coeffs() const;
  // Pointwise U(x, t), t >= 0.
  double evaluate(const Transform& t, std::span<const double> x, double depth) const;

 private:
  const Spectrum* spec_;
  std::vector<double> coeffs_;
  double m_;
  std::vector<double> mu_;
};

struct CylinderQuantities {
  double Ex;  // integral over the cylinder of |grad_x U|^2 = sum c_k^2 lambda_k / (2 mu_k)
  double Et;  // integral of (dU/dt)^2            = sum c_k^2 mu_k / 2
  double E0;  // integral of U^2                  = sum c_k^2 / (2 mu_k)
  double T0;  // integral over the base of U^2    = sum c_k^2
};

CylinderQuantities cylinder_quantities(const Spectrum& spectrum, std::span<const double> coeffs,
                                       double m);

// The lateral-boundary integral sum_{k,l} c_k c_l (mu_k + mu_l)^{-1}
// times the surface integral of (nu . (x - center)) d_nu phi_k d_nu phi_l,
// with coordinates recentred at the box center so nu . x is L_j/2 > 0 on
// every face. The t-integral is analytic; face integrals use the grid's
// per-axis Gauss rules (they factor across axes).
double lateral_boundary_term(const Transform& t, std::span<const double> coeffs, double m);

// |m T0 + ||u||_{p+1}^{p+1} - (Ex + Et + m^2 E0)| over the largest
// constituent magnitude. Near zero only for solutions.
double nehari_identity_residual(const Transform& t, std::span<const double> coeffs, double m,
                                double p);

// Anisotropic identity residual: assembles
//   (n-2)/2 Ex + n/2 Et + n m^2/2 E0 - n/(p+1) ||u||_{p+1}^{p+1}
//   - n m/2 T0 + 1/2 lateral
// normalized by the largest |term|. The power term uses |U|^{p+1}, the
// sign-changing-safe form; for positive solutions the two coincide.
double pohozaev_residual(const Transform& t, std::span<const double> coeffs, double m, double p);

struct TraceCoercivity {
  double lhs;    // m T0
  double rhs;    // m^2 E0 + Et
  double ratio;  // (Ex + Et + m^2 E0 - m T0) / (Ex + Et)
};

// The trace bound m T0 <= m^2 E0 + Et holds for every field and m >= 0
// (per mode: (mu_k - m)^2 >= 0).
TraceCoercivity trace_coercivity_check(const Spectrum& spectrum, std::span<const double> coeffs,
                                       double m);

}  // namespace specrel

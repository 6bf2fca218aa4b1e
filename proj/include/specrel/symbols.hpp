#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "specrel/spectrum.hpp"

namespace specrel {

// Scalar symbols of the operator sqrt(-Laplace + m^2) - m on the Dirichlet
// spectrum, plus the regularized pair used off-spectrum.

inline double relativistic_root(double lam, double m) { return std::sqrt(lam + m * m); }

// Symbol of sqrt(-Laplace + m^2) - m.
double gap_symbol(double lam, double m);

// Symbol of the large-m normalized operator 2m (sqrt(-Laplace + m^2) - m).
double mass_symbol(double lam, double m);

// lam - mass_symbol(lam, m), evaluated in the cancellation-free form
// lam^2 / (sqrt(lam + m^2) + m)^2. Agrees with the direct difference to
// rounding; decays like lam^2 / (4 m^2) for large m.
double difference_symbol(double lam, double m);

// |1/P_inf - 1/P_m| on the spectrum (chi = 0 there), in closed form:
// 1 / (2m (sqrt(lam + m^2) + m)).
double inverse_gap(double lam, double m);

// Regularized symbols P_m = mass_symbol + chi and P_inf = lam + chi, with a
// bump chi that is 1 below lambda1/2, 0 above lambda1, and in particular 0 on
// every retained eigenvalue. chi is the descending quintic smoothstep: C^2.
class SymbolSet {
 public:
  SymbolSet(double m, double lambda1);

  double m() const { return m_; }
  double lambda1() const { return lambda1_; }
  double chi(double lam) const;
  double chi_prime(double lam) const;
  double Pm(double lam) const { return mass_symbol(lam, m_) + chi(lam); }
  double Pinf(double lam) const { return lam + chi(lam); }

  // 1/Pinf - 1/Pm. The chi terms cancel in the numerator, so this evaluates
  // -difference_symbol / (Pinf * Pm); the naive subtraction loses ~eps * m^2
  // / lam digits once the two reciprocals agree to leading order.
  double inverse_difference(double lam) const {
    return -difference_symbol(lam, m_) / (Pinf(lam) * Pm(lam));
  }

 private:
  double m_;
  double lambda1_;
};

// c_k -> F(lambda_k) c_k. Throws SymbolError naming the mode if F(lambda_k)
// is not finite.
std::vector<double> apply_multiplier(const Spectrum& spectrum, std::span<const double> coeffs,
                                     const std::function<double(double)>& symbol);

// Multiplication by 2m (sqrt(lambda + m^2) - m) and its inverse. Requires
// m > 0; exact mutual inverses on retained modes up to rounding.
std::vector<double> apply_mass_operator(const Spectrum& spectrum, std::span<const double> coeffs,
                                        double m);
std::vector<double> invert_mass_operator(const Spectrum& spectrum, std::span<const double> coeffs,
                                         double m);

// Default evaluation grid for symbol bound sweeps: 200 logarithmic points
// over [1e-3 * lambda1, 1e6].
std::vector<double> default_symbol_grid(double lambda1);

struct SymbolBoundRow {
  int k;                     // derivative order
  double m;
  double ratio_constant;     // sup lam^k |d^k (P_m / P_inf)|
  double difference_constant;  // sup lam^k |d^k (1/P_inf - 1/P_m)| / min(1/m^2, 1/(m sqrt(lam+1)))
};

// Derivative bounds by central finite differences (k <= 2; higher orders are
// too noisy to be meaningful). The k=0 difference constant has the analytic
// value inverse_gap / min(...) on the spectrum and stays <= 1.
std::vector<SymbolBoundRow> check_symbol_derivative_bounds(int k_max,
                                                           std::span<const double> m_list,
                                                           std::span<const double> lam_grid,
                                                           double lambda1);

// Max relative mismatch between the k=1 central difference and the analytic
// derivative of 1/P_inf - 1/P_m, probed at a few points above lambda1.
// Validates the FD step choice used by check_symbol_derivative_bounds.
double symbol_fd_validation(double m, double lambda1);

}  // namespace specrel

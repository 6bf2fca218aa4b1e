#pragma once

#include <span>
#include <vector>

namespace specrel {

// The explicit extremal family w(x) = c_n (lambda / (lambda^2 + |x - xi|^2))^{(n-1)/2}
// with harmonic extension W(x,t) obtained by replacing lambda^2 + |x-xi|^2
// with |x-xi|^2 + (t+lambda)^2, and its sharp-constant bookkeeping.

struct BubbleParams {
  int n;                       // dimension >= 2
  double scale;                // lambda > 0
  std::vector<double> center;  // xi
};

// c_n = 2^{(n-1)/2} (Gamma((n+1)/2) / Gamma((n-1)/2))^{(n-1)/2}; equals
// (n-1)^{(n-1)/2} after simplification (asserted in tests).
double bubble_constant(int n);

// Sharp trace-Sobolev constant S_n, via the Gamma closed form. S_2^{-4} = pi
// and S_3^{-6} = 2 pi^2 exactly.
double sharp_constant(int n);

double bubble_trace(std::span<const double> x, const BubbleParams& params);
double bubble_extension(std::span<const double> x, double t, const BubbleParams& params);

// sup over sample points of the relative mismatch between the analytic
// -dW/dt at t=0 and w^{(n+1)/(n-1)}. The identity is exact, so only rounding
// remains.
double verify_entire_equation(const BubbleParams& params,
                              std::span<const std::vector<double>> samples);

struct HarmonicityReport {
  std::vector<double> steps;
  std::vector<double> residuals;  // |(n+1)-dim FD Laplacian of W|
  double fitted_order;            // least-squares slope of log residual vs log h
};

// Central-difference Laplacian of W at an interior point (t > 0) for each
// step; the analytic Laplacian is zero, so the residual must shrink as h^2.
HarmonicityReport verify_harmonicity(const BubbleParams& params, std::span<const double> x,
                                     double t, std::span<const double> steps);

struct SharpNormReport {
  double integral;        // whole-space integral of w^{2n/(n-1)}, lambda = 1
  double reference;       // S_n^{-2n}
  double relative_error;
  int levels;             // panel-doubling levels used
};

// Radial quadrature of the sharp-norm integral via r = tan(theta), with
// panel doubling until the requested tolerance; throws NumericalError if the
// tolerance is not reached.
SharpNormReport sharp_norm_check(int n, double tol = 1e-10, int max_level = 14);

struct QuotientRow {
  double box_side;
  int order;
  double quotient_times_s2;  // Rayleigh quotient of the truncated bubble, scaled by S_n^2
};

// Rayleigh quotient sum c_k^2 sqrt(lambda_k) / ||u||^2_{2n/(n-1)} of the
// cut-off bubble projected on boxes of growing side with proportionally
// growing truncation. Approaches 1/S_n^2 from above; reported, not asserted
// against an a-priori rate.
std::vector<QuotientRow> trace_quotient_probe(int n, double scale,
                                              std::span<const double> box_sides,
                                              std::span<const int> orders, int grid_margin = 12);

}  // namespace specrel

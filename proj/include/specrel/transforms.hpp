#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "specrel/domain.hpp"
#include "specrel/spectrum.hpp"

namespace specrel {

// Default per-axis quadrature orders for a truncation N. The enforced floor is
// 2N+1; the default adds margin so the Gram matrix of retained modes deviates
// from identity by < 1e-12 (measured across N <= 48; 2N+1 alone leaves
// 1e-3..1e-4 deviations).
std::vector<int> default_orders(int order, int dim, int margin = 12);

// Coefficient space <-> collocation grid, as separable per-axis matrix
// products. Parallel sections assign each output element to exactly one
// thread with a fixed-order inner sum, so results are bitwise identical for
// every thread count.
class Transform {
 public:
  Transform(const Spectrum& spectrum, const Grid& grid);

  const Spectrum& spectrum() const { return spec_; }
  const Grid& grid() const { return grid_; }

  // u(x_g) = sum_k c_k phi_k(x_g) at every grid node, row-major over axes.
  std::vector<double> synthesize(std::span<const double> coeffs) const;
  // Quadrature projection <v, phi_k>; exact left inverse of synthesize on
  // retained modes up to rounding.
  std::vector<double> analyze(std::span<const double> values) const;
  // d/dx_axis of the synthesized field at the grid nodes.
  std::vector<double> synthesize_partial(std::span<const double> coeffs, int axis) const;

  // integral over the box of the grid function v
  double quad(std::span<const double> values) const;
  const std::vector<double>& flat_weights() const { return weights_; }

  // sup_{k,l} |<phi_k, phi_l>_quadrature - delta_kl|, exact over all pairs
  // via the per-axis Gram factorization.
  double gram_deviation() const;

  // Pointwise evaluation of sum_k c_k phi_k at an arbitrary interior point.
  double evaluate(std::span<const double> coeffs, std::span<const double> x) const;

 private:
  std::vector<double> apply_chain(std::span<const double> input,
                                  const std::vector<const std::vector<double>*>& mats,
                                  bool grid_to_coeff) const;

  Spectrum spec_;
  Grid grid_;
  // Row-major per-axis matrices: synth_[j] is M_j x N, analysis_[j] is N x M_j
  // (sine values times quadrature weights), deriv_[j] is M_j x N.
  std::vector<std::vector<double>> synth_, analysis_, deriv_;
  std::vector<double> weights_;  // flat tensor weights, size grid().total()
  mutable double gram_dev_ = -1.0;
};

// Dense pointwise projection oracle. Deliberately naive and serial: every
// basis value is recomputed through std::sin, sharing no code with the
// separable kernels. Cost is O(grid * modes); use on small sizes.
namespace reference {
std::vector<double> synthesize(const Spectrum& spectrum, const Grid& grid,
                               std::span<const double> coeffs);
std::vector<double> analyze(const Spectrum& spectrum, const Grid& grid,
                            std::span<const double> values);
}  // namespace reference

}  // namespace specrel

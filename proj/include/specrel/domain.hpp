#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace specrel {

// One axis-aligned boundary hyperplane of the box.
struct Face {
  int axis;            // coordinate held constant
  int orientation;     // -1: x_axis = 0 face, +1: x_axis = L_axis face
  double coordinate;   // the constant coordinate value
  // Outward unit normal: orientation * e_axis.
};

// Open axis-aligned box (0, L_1) x ... x (0, L_n).
class Domain {
 public:
  explicit Domain(std::vector<double> side_lengths);

  int dim() const { return static_cast<int>(sides_.size()); }
  const std::vector<double>& sides() const { return sides_; }
  double side(int j) const { return sides_[static_cast<std::size_t>(j)]; }
  double min_side() const;
  std::vector<double> center() const;
  const std::vector<Face>& faces() const { return faces_; }
  double volume() const;

 private:
  std::vector<double> sides_;
  std::vector<Face> faces_;
};

// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order);

// Tensor-product Gauss-Legendre quadrature grid over the interior of the box.
class Grid {
 public:
  Grid(const Domain& domain, std::vector<int> orders);

  const Domain& domain() const { return domain_; }
  const std::vector<int>& orders() const { return orders_; }
  // Per-axis nodes mapped to (0, L_j) and weights carrying the L_j/2 Jacobian.
  const std::vector<double>& nodes(int axis) const {
    return nodes_[static_cast<std::size_t>(axis)];
  }
  const std::vector<double>& weights(int axis) const {
    return weights_[static_cast<std::size_t>(axis)];
  }
  std::size_t total() const;

 private:
  Domain domain_;
  std::vector<int> orders_;
  std::vector<std::vector<double>> nodes_;
  std::vector<std::vector<double>> weights_;
};

}  // namespace specrel

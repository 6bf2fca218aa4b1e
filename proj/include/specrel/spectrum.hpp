#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "specrel/domain.hpp"

namespace specrel {

// Dirichlet-Laplacian eigensystem of the box, truncated to k in {1..N}^n.
// phi_k(x) = prod_j sqrt(2/L_j) sin(k_j pi x_j / L_j), lambda_k = sum_j (k_j pi / L_j)^2.
// Mode order is lexicographic in k; every module treats coefficient vectors
// as opaque arrays keyed by this ordering.
class Spectrum {
 public:
  static constexpr std::size_t kDefaultModeBudget = 1u << 22;

  Spectrum(const Domain& domain, int order, std::size_t mode_budget = kDefaultModeBudget);

  const Domain& domain() const { return domain_; }
  int order() const { return order_; }
  std::size_t size() const { return lambda_.size(); }
  // Multi-index of mode k, entries in {1..N}.
  const std::vector<int>& mode(std::size_t k) const { return modes_[k]; }
  const std::vector<double>& eigenvalues() const { return lambda_; }
  double eigenvalue(std::size_t k) const { return lambda_[k]; }
  double lambda1() const { return lambda1_; }
  double lambda_max() const { return lambda_max_; }
  std::string mode_name(std::size_t k) const;  // "(2,1,3)" for diagnostics

 private:
  Domain domain_;
  int order_;
  std::vector<std::vector<int>> modes_;
  std::vector<double> lambda_;
  double lambda1_ = 0.0;
  double lambda_max_ = 0.0;
};

}  // namespace specrel

#include "specrel/domain.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <memory>
#include <string>

#include "specrel/errors.hpp"

namespace specrel {

namespace {
constexpr int kMaxDim = 4;
}

Domain::Domain(std::vector<double> side_lengths) : sides_(std::move(side_lengths)) {
  if (sides_.empty() || static_cast<int>(sides_.size()) > kMaxDim) {
    throw ConfigError("domain dimension must be between 1 and " + std::to_string(kMaxDim) +
                      ", got " + std::to_string(sides_.size()));
  }
  for (std::size_t j = 0; j < sides_.size(); ++j) {
    if (!(sides_[j] > 0.0)) {
      throw ConfigError("side length " + std::to_string(j + 1) + " must be positive, got " +
                        std::to_string(sides_[j]));
    }
  }
  for (int j = 0; j < dim(); ++j) {
    faces_.push_back(Face{j, -1, 0.0});
    faces_.push_back(Face{j, +1, sides_[static_cast<std::size_t>(j)]});
  }
}

double Domain::min_side() const { return *std::min_element(sides_.begin(), sides_.end()); }

std::vector<double> Domain::center() const {
  std::vector<double> c(sides_.size());
  for (std::size_t j = 0; j < sides_.size(); ++j) c[j] = 0.5 * sides_[j];
  return c;
}

double Domain::volume() const {
  double v = 1.0;
  for (double L : sides_) v *= L;
  return v;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order) {
  if (order < 1) throw ConfigError("quadrature order must be >= 1, got " + std::to_string(order));
  std::unique_ptr<gsl_integration_glfixed_table, void (*)(gsl_integration_glfixed_table*)> table(
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order)),
      gsl_integration_glfixed_table_free);
  if (!table) throw NumericalError("Gauss-Legendre table allocation failed");
  std::vector<double> x(static_cast<std::size_t>(order)), w(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    double xi, wi;
    gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(i), &xi, &wi, table.get());
    x[static_cast<std::size_t>(i)] = xi;
    w[static_cast<std::size_t>(i)] = wi;
  }
  return {std::move(x), std::move(w)};
}

Grid::Grid(const Domain& domain, std::vector<int> orders)
    : domain_(domain), orders_(std::move(orders)) {
  if (static_cast<int>(orders_.size()) != domain_.dim()) {
    throw ConfigError("grid orders count " + std::to_string(orders_.size()) +
                      " does not match domain dimension " + std::to_string(domain_.dim()));
  }
  nodes_.resize(orders_.size());
  weights_.resize(orders_.size());
  for (int j = 0; j < domain_.dim(); ++j) {
    int M = orders_[static_cast<std::size_t>(j)];
    if (M < 1) throw ConfigError("grid order must be >= 1 on axis " + std::to_string(j + 1));
    auto [x, w] = gauss_legendre(M);
    double L = domain_.side(j);
    auto& nj = nodes_[static_cast<std::size_t>(j)];
    auto& wj = weights_[static_cast<std::size_t>(j)];
    nj.resize(x.size());
    wj.resize(w.size());
    for (std::size_t a = 0; a < x.size(); ++a) {
      nj[a] = 0.5 * L * (x[a] + 1.0);
      wj[a] = 0.5 * L * w[a];
    }
  }
}

std::size_t Grid::total() const {
  std::size_t g = 1;
  for (int M : orders_) g *= static_cast<std::size_t>(M);
  return g;
}

}  // namespace specrel

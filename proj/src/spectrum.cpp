#include "specrel/spectrum.hpp"

#include <cmath>
#include <numbers>

#include "specrel/errors.hpp"

namespace specrel {

Spectrum::Spectrum(const Domain& domain, int order, std::size_t mode_budget)
    : domain_(domain), order_(order) {
  if (order < 1) throw ConfigError("truncation order must be >= 1, got " + std::to_string(order));
  int n = domain_.dim();
  std::size_t count = 1;
  for (int j = 0; j < n; ++j) {
    count *= static_cast<std::size_t>(order);
    if (count > mode_budget) {
      throw CapacityError("mode count " + std::to_string(order) + "^" + std::to_string(n) +
                          " exceeds budget " + std::to_string(mode_budget));
    }
  }

  std::vector<double> axis_lambda(static_cast<std::size_t>(n));
  modes_.reserve(count);
  lambda_.reserve(count);
  std::vector<int> k(static_cast<std::size_t>(n), 1);
  for (;;) {
    double lam = 0.0;
    for (int j = 0; j < n; ++j) {
      double f = static_cast<double>(k[static_cast<std::size_t>(j)]) * std::numbers::pi /
                 domain_.side(j);
      lam += f * f;
    }
    modes_.push_back(k);
    lambda_.push_back(lam);
    // lexicographic increment, last axis fastest
    int j = n - 1;
    while (j >= 0 && k[static_cast<std::size_t>(j)] == order) {
      k[static_cast<std::size_t>(j)] = 1;
      --j;
    }
    if (j < 0) break;
    ++k[static_cast<std::size_t>(j)];
  }

  lambda1_ = lambda_[0];
  lambda_max_ = lambda_[0];
  for (double l : lambda_) {
    if (l < lambda1_) lambda1_ = l;
    if (l > lambda_max_) lambda_max_ = l;
  }
}

std::string Spectrum::mode_name(std::size_t k) const {
  std::string s = "(";
  const auto& m = modes_[k];
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (j) s += ",";
    s += std::to_string(m[j]);
  }
  s += ")";
  return s;
}

}  // namespace specrel

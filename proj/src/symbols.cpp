#include "specrel/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "specrel/errors.hpp"

namespace specrel {

double gap_symbol(double lam, double m) {
  // sqrt(lam + m^2) - m loses digits for m^2 >> lam; divide by the conjugate.
  return lam / (std::sqrt(lam + m * m) + m);
}

double mass_symbol(double lam, double m) { return 2.0 * m * gap_symbol(lam, m); }

double difference_symbol(double lam, double m) {
  double s = std::sqrt(lam + m * m) + m;
  return lam * lam / (s * s);
}

double inverse_gap(double lam, double m) {
  return 1.0 / (2.0 * m * (std::sqrt(lam + m * m) + m));
}

SymbolSet::SymbolSet(double m, double lambda1) : m_(m), lambda1_(lambda1) {
  if (!(m > 0.0)) throw ConfigError("symbol mass must be positive, got " + std::to_string(m));
  if (!(lambda1 > 0.0)) throw ConfigError("lambda1 must be positive");
}

double SymbolSet::chi(double lam) const {
  if (lam <= 0.5 * lambda1_) return 1.0;
  if (lam >= lambda1_) return 0.0;
  double s = (lam - 0.5 * lambda1_) / (0.5 * lambda1_);
  // descending quintic smoothstep: C^2 at both ends
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double SymbolSet::chi_prime(double lam) const {
  if (lam <= 0.5 * lambda1_ || lam >= lambda1_) return 0.0;
  double h = 0.5 * lambda1_;
  double s = (lam - h) / h;
  return -30.0 * s * s * (1.0 - s) * (1.0 - s) / h;
}

std::vector<double> apply_multiplier(const Spectrum& spectrum, std::span<const double> coeffs,
                                     const std::function<double(double)>& symbol) {
  if (coeffs.size() != spectrum.size()) throw ConfigError("coefficient count mismatch");
  std::vector<double> out(coeffs.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    double f = symbol(spectrum.eigenvalue(k));
    if (!std::isfinite(f)) {
      throw SymbolError("symbol not finite on mode " + spectrum.mode_name(k) + " (lambda = " +
                        std::to_string(spectrum.eigenvalue(k)) + ")");
    }
    out[k] = f * coeffs[k];
  }
  return out;
}

std::vector<double> apply_mass_operator(const Spectrum& spectrum, std::span<const double> coeffs,
                                        double m) {
  if (!(m > 0.0)) throw ConfigError("mass must be positive, got " + std::to_string(m));
  return apply_multiplier(spectrum, coeffs, [m](double lam) { return mass_symbol(lam, m); });
}

std::vector<double> invert_mass_operator(const Spectrum& spectrum, std::span<const double> coeffs,
                                         double m) {
  if (!(m > 0.0)) throw ConfigError("mass must be positive, got " + std::to_string(m));
  return apply_multiplier(spectrum, coeffs, [m](double lam) { return 1.0 / mass_symbol(lam, m); });
}

std::vector<double> default_symbol_grid(double lambda1) {
  const int count = 200;
  double lo = std::log(1e-3 * lambda1);
  double hi = std::log(1e6);
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) {
    grid[static_cast<std::size_t>(i)] =
        std::exp(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
  }
  return grid;
}

namespace {

double normalizer(double lam, double m) {
  return std::min(1.0 / (m * m), 1.0 / (m * std::sqrt(lam + 1.0)));
}

// k-th derivative by central differences with a relative step tuned per
// order. Validated against the analytic k=0,1 formulas (symbol_fd_validation).
double central_derivative(const std::function<double(double)>& f, double lam, int k) {
  if (k == 0) return f(lam);
  if (k == 1) {
    double h = lam * 6e-6;
    return (f(lam + h) - f(lam - h)) / (2.0 * h);
  }
  double h = lam * 1.2e-4;
  return (f(lam + h) - 2.0 * f(lam) + f(lam - h)) / (h * h);
}

}  // namespace

std::vector<SymbolBoundRow> check_symbol_derivative_bounds(int k_max,
                                                           std::span<const double> m_list,
                                                           std::span<const double> lam_grid,
                                                           double lambda1) {
  if (k_max < 0 || k_max > 2) {
    throw ConfigError("derivative bound checks support 0 <= k <= 2, got " + std::to_string(k_max));
  }
  for (double m : m_list) {
    if (!(m >= 2.0)) {
      throw ConfigError("symbol bound sweep requires m >= 2, got " + std::to_string(m));
    }
  }
  std::vector<SymbolBoundRow> rows;
  for (double m : m_list) {
    SymbolSet sym(m, lambda1);
    auto ratio = [&sym](double lam) { return sym.Pm(lam) / sym.Pinf(lam); };
    auto diff = [&sym](double lam) { return sym.inverse_difference(lam); };
    for (int k = 0; k <= k_max; ++k) {
      double ratio_c = 0.0, diff_c = 0.0;
      for (double lam : lam_grid) {
        double rk = std::abs(central_derivative(ratio, lam, k)) * std::pow(lam, k);
        double dk = std::abs(central_derivative(diff, lam, k)) * std::pow(lam, k);
        ratio_c = std::max(ratio_c, rk);
        diff_c = std::max(diff_c, dk / normalizer(lam, m));
      }
      rows.push_back(SymbolBoundRow{k, m, ratio_c, diff_c});
    }
  }
  return rows;
}

double symbol_fd_validation(double m, double lambda1) {
  SymbolSet sym(m, lambda1);
  auto diff = [&sym](double lam) { return sym.inverse_difference(lam); };
  double worst = 0.0;
  for (double lam : {2.0 * lambda1, 10.0 * lambda1, 100.0 * lambda1, 1e4 * lambda1}) {
    // analytic: d/dlam [-1/(2m(sqrt(lam+m^2)+m))] = 1/(4 m mu (mu+m)^2)
    double mu = std::sqrt(lam + m * m);
    double exact = 1.0 / (4.0 * m * mu * (mu + m) * (mu + m));
    double fd = central_derivative(diff, lam, 1);
    // the difference is negative and decreasing in magnitude: fd = +exact
    worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
  }
  return worst;
}

}  // namespace specrel

#include "specrel/field.hpp"

#include <cmath>
#include <string>

#include "specrel/errors.hpp"
#include "specrel/util.hpp"

namespace specrel {

double norm_l2(std::span<const double> coeffs) {
  KahanSum s;
  for (double c : coeffs) s.add(c * c);
  return std::sqrt(s.value());
}

double norm_lq(const Transform& t, std::span<const double> coeffs, double q) {
  if (!(q >= 1.0)) throw ConfigError("Lq norm requires q >= 1, got " + std::to_string(q));
  auto v = t.synthesize(coeffs);
  for (double& x : v) x = std::pow(std::abs(x), q);
  return std::pow(t.quad(v), 1.0 / q);
}

double quadratic_form(const Spectrum& spectrum, std::span<const double> coeffs,
                      const std::function<double(double)>& symbol) {
  KahanSum s;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    double f = symbol(spectrum.eigenvalue(k));
    if (!std::isfinite(f)) {
      throw SymbolError("symbol not finite on mode " + spectrum.mode_name(k) + " (lambda = " +
                        std::to_string(spectrum.eigenvalue(k)) + ")");
    }
    s.add(f * coeffs[k] * coeffs[k]);
  }
  return s.value();
}

std::vector<double> nonlinear_power(const Transform& t, std::span<const double> coeffs, double p) {
  if (!(p > 1.0)) throw ConfigError("nonlinear power requires p > 1, got " + std::to_string(p));
  auto v = t.synthesize(coeffs);
  for (double& x : v) x = signed_power(x, p);
  return t.analyze(v);
}

double nonlinear_drift(const Transform& t, std::span<const double> coeffs, double p) {
  auto base = nonlinear_power(t, coeffs, p);
  std::vector<int> doubled;
  for (int M : t.grid().orders()) doubled.push_back(2 * M);
  Grid fine(t.grid().domain(), doubled);
  Transform tf(t.spectrum(), fine);
  auto refined = nonlinear_power(tf, coeffs, p);
  KahanSum diff;
  for (std::size_t k = 0; k < base.size(); ++k) {
    double d = refined[k] - base[k];
    diff.add(d * d);
  }
  double scale = norm_l2(refined);
  return scale > 0.0 ? std::sqrt(diff.value()) / scale : std::sqrt(diff.value());
}

double energy(const Transform& t, std::span<const double> coeffs, double m, double p) {
  if (!(m >= 0.0)) throw ConfigError("mass must be >= 0, got " + std::to_string(m));
  if (!(p > 1.0)) throw ConfigError("exponent must be > 1, got " + std::to_string(p));
  const Spectrum& spec = t.spectrum();
  KahanSum quad;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    double mu = std::sqrt(spec.eigenvalue(k) + m * m);
    quad.add((mu - m) * coeffs[k] * coeffs[k]);
  }
  double B = std::pow(norm_lq(t, coeffs, p + 1.0), p + 1.0);
  return 0.5 * quad.value() - B / (p + 1.0);
}

std::vector<double> energy_gradient(const Transform& t, std::span<const double> coeffs, double m,
                                    double p) {
  auto g = nonlinear_power(t, coeffs, p);
  const Spectrum& spec = t.spectrum();
  for (std::size_t k = 0; k < spec.size(); ++k) {
    double mu = std::sqrt(spec.eigenvalue(k) + m * m);
    g[k] = (mu - m) * coeffs[k] - g[k];
  }
  return g;
}

double quadratic_aggregate(const Spectrum& spectrum, std::span<const double> coeffs, double m) {
  KahanSum s;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    double mu = std::sqrt(spectrum.eigenvalue(k) + m * m);
    s.add((mu - m) * coeffs[k] * coeffs[k]);
  }
  return s.value();
}

double nehari_scale(double quadratic, double nonlinear, double p) {
  if (!(quadratic > 0.0)) {
    throw NumericalError("Nehari scaling needs a positive quadratic part, got " +
                         std::to_string(quadratic));
  }
  if (!(nonlinear > 0.0)) {
    throw NumericalError("Nehari scaling needs a nonzero field");
  }
  return std::pow(quadratic / nonlinear, 1.0 / (p - 1.0));
}

double nehari_scale(const Transform& t, std::span<const double> coeffs, double m, double p) {
  double A = quadratic_aggregate(t.spectrum(), coeffs, m);
  double B = std::pow(norm_lq(t, coeffs, p + 1.0), p + 1.0);
  return nehari_scale(A, B, p);
}

}  // namespace specrel

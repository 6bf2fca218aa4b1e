#include "specrel/cylinder.hpp"

#include <cmath>
#include <numbers>

#include "specrel/errors.hpp"
#include "specrel/field.hpp"
#include "specrel/util.hpp"

namespace specrel {

CylinderExtension::CylinderExtension(const Spectrum& spectrum, std::span<const double> coeffs,
                                     double m)
    : spec_(&spectrum), coeffs_(coeffs.begin(), coeffs.end()), m_(m) {
  if (!(m >= 0.0)) throw ConfigError("extension mass must be >= 0");
  if (coeffs_.size() != spectrum.size()) throw ConfigError("coefficient count mismatch");
  mu_.resize(coeffs_.size());
  for (std::size_t k = 0; k < mu_.size(); ++k) {
    mu_[k] = std::sqrt(spectrum.eigenvalue(k) + m * m);
  }
}

std::vector<double> CylinderExtension::normal_derivative_coeffs() const {
  std::vector<double> out(coeffs_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = mu_[k] * coeffs_[k];
  return out;
}

double CylinderExtension::evaluate(const Transform& t, std::span<const double> x,
                                   double depth) const {
  if (depth < 0.0) throw ConfigError("extension evaluated at negative depth");
  std::vector<double> damped(coeffs_.size());
  for (std::size_t k = 0; k < damped.size(); ++k) {
    damped[k] = coeffs_[k] * std::exp(-mu_[k] * depth);
  }
  return t.evaluate(damped, x);
}

CylinderQuantities cylinder_quantities(const Spectrum& spectrum, std::span<const double> coeffs,
                                       double m) {
  if (!(m >= 0.0)) throw ConfigError("mass must be >= 0");
  if (coeffs.size() != spectrum.size()) throw ConfigError("coefficient count mismatch");
  KahanSum ex, et, e0, t0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    double lam = spectrum.eigenvalue(k);
    double mu = std::sqrt(lam + m * m);
    double c2 = coeffs[k] * coeffs[k];
    ex.add(c2 * lam / (2.0 * mu));
    et.add(c2 * mu / 2.0);
    e0.add(c2 / (2.0 * mu));
    t0.add(c2);
  }
  return CylinderQuantities{ex.value(), et.value(), e0.value(), t0.value()};
}

double lateral_boundary_term(const Transform& t, std::span<const double> coeffs, double m) {
  const Spectrum& spec = t.spectrum();
  if (coeffs.size() != spec.size()) throw ConfigError("coefficient count mismatch");
  if (!(m >= 0.0)) throw ConfigError("mass must be >= 0");
  const Domain& dom = spec.domain();
  int n = dom.dim();
  std::size_t N = static_cast<std::size_t>(spec.order());
  std::size_t K = spec.size();

  // Per-axis quadrature Grams: the face integrals of the cross-axis factors.
  std::vector<std::vector<double>> gram(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double L = dom.side(j);
    double norm = std::sqrt(2.0 / L);
    const auto& x = t.grid().nodes(j);
    const auto& w = t.grid().weights(j);
    auto& G = gram[static_cast<std::size_t>(j)];
    G.assign(N * N, 0.0);
    for (std::size_t q = 0; q < N; ++q) {
      for (std::size_t r = 0; r < N; ++r) {
        KahanSum s;
        for (std::size_t a = 0; a < x.size(); ++a) {
          double fq = norm * std::sin(static_cast<double>(q + 1) * std::numbers::pi * x[a] / L);
          double fr = norm * std::sin(static_cast<double>(r + 1) * std::numbers::pi * x[a] / L);
          s.add(w[a] * fq * fr);
        }
        G[q * N + r] = s.value();
      }
    }
  }

  // Normal derivative magnitude of the 1-D factor at either endpoint:
  // |d/dx sqrt(2/L) sin(q pi x / L)| = sqrt(2/L) q pi / L there, with sign
  // (-1)^q at x = L. Both faces carry nu.(x - center) = L_j/2; summing the
  // two faces gives the parity factor 1 + (-1)^{q+r}.
  std::vector<double> mu(K);
  for (std::size_t k = 0; k < K; ++k) mu[k] = std::sqrt(spec.eigenvalue(k) + m * m);

  std::vector<double> partial(K, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < K; ++k) {
    const auto& mk = spec.mode(k);
    KahanSum acc;
    for (std::size_t l = 0; l < K; ++l) {
      const auto& ml = spec.mode(l);
      double tfac = coeffs[k] * coeffs[l] / (mu[k] + mu[l]);
      if (tfac == 0.0) continue;
      double face_sum = 0.0;
      for (int j = 0; j < n; ++j) {
        int q = mk[static_cast<std::size_t>(j)];
        int r = ml[static_cast<std::size_t>(j)];
        int parity = ((q + r) % 2 == 0) ? 2 : 0;
        if (parity == 0) continue;
        double L = dom.side(j);
        double gq = std::sqrt(2.0 / L) * static_cast<double>(q) * std::numbers::pi / L;
        double gr = std::sqrt(2.0 / L) * static_cast<double>(r) * std::numbers::pi / L;
        double cross = 1.0;
        for (int i = 0; i < n; ++i) {
          if (i == j) continue;
          cross *= gram[static_cast<std::size_t>(i)]
                       [static_cast<std::size_t>(mk[static_cast<std::size_t>(i)] - 1) * N +
                        static_cast<std::size_t>(ml[static_cast<std::size_t>(i)] - 1)];
        }
        face_sum += 0.5 * L * gq * gr * static_cast<double>(parity) * cross;
      }
      acc.add(tfac * face_sum);
    }
    partial[k] = acc.value();
  }
  return kahan_total(partial);
}

double nehari_identity_residual(const Transform& t, std::span<const double> coeffs, double m,
                                double p) {
  auto q = cylinder_quantities(t.spectrum(), coeffs, m);
  double B = std::pow(norm_lq(t, coeffs, p + 1.0), p + 1.0);
  double bulk = q.Ex + q.Et + m * m * q.E0;
  double lhs = m * q.T0 + B;
  double scale = std::max({std::abs(m * q.T0), std::abs(B), std::abs(bulk)});
  if (scale == 0.0) return 0.0;
  return std::abs(lhs - bulk) / scale;
}

double pohozaev_residual(const Transform& t, std::span<const double> coeffs, double m, double p) {
  auto q = cylinder_quantities(t.spectrum(), coeffs, m);
  double n = static_cast<double>(t.spectrum().domain().dim());
  double B = std::pow(norm_lq(t, coeffs, p + 1.0), p + 1.0);
  double lateral = lateral_boundary_term(t, coeffs, m);
  double terms[6] = {0.5 * (n - 2.0) * q.Ex,       0.5 * n * q.Et, 0.5 * n * m * m * q.E0,
                     -n / (p + 1.0) * B,           -0.5 * n * m * q.T0,
                     0.5 * lateral};
  double total = 0.0, scale = 0.0;
  for (double term : terms) {
    total += term;
    scale = std::max(scale, std::abs(term));
  }
  if (scale == 0.0) return 0.0;
  return std::abs(total) / scale;
}

TraceCoercivity trace_coercivity_check(const Spectrum& spectrum, std::span<const double> coeffs,
                                       double m) {
  auto q = cylinder_quantities(spectrum, coeffs, m);
  double denom = q.Ex + q.Et;
  double ratio = denom > 0.0 ? (q.Ex + q.Et + m * m * q.E0 - m * q.T0) / denom : 0.0;
  return TraceCoercivity{m * q.T0, m * m * q.E0 + q.Et, ratio};
}

}  // namespace specrel

#include "specrel/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "specrel/bubbles.hpp"
#include "specrel/cylinder.hpp"
#include "specrel/errors.hpp"
#include "specrel/field.hpp"
#include "specrel/util.hpp"

namespace specrel {

namespace {

struct Aggregates {
  double A;  // sum G_k c_k^2
  double B;  // ||u||_{p+1}^{p+1}
};

Aggregates aggregates(const Transform& t, std::span<const double> G, std::span<const double> c,
                      double p) {
  KahanSum a;
  for (std::size_t k = 0; k < c.size(); ++k) a.add(G[k] * c[k] * c[k]);
  auto v = t.synthesize(c);
  for (double& x : v) x = std::pow(std::abs(x), p + 1.0);
  double B = t.quad(v);
  if (!std::isfinite(B)) throw NumericalError("numerical blowup in the nonlinear term");
  return {a.value(), B};
}

double ray_energy(const Aggregates& ag, double p) { return 0.5 * ag.A - ag.B / (p + 1.0); }

// Rescale c onto the Nehari manifold in place; returns the new aggregates.
Aggregates project_nehari(const Transform& t, std::span<const double> G, std::vector<double>& c,
                          double p) {
  auto ag = aggregates(t, G, c, p);
  double t0 = nehari_scale(ag.A, ag.B, p);
  for (double& x : c) x *= t0;
  double s2 = t0 * t0, sp = std::pow(t0, p + 1.0);
  return {ag.A * s2, ag.B * sp};
}

std::vector<double> initial_guess(const Transform& t, const SolverConfig& config) {
  const Spectrum& spec = t.spectrum();
  std::vector<double> c(spec.size(), 0.0);
  switch (config.start) {
    case SolverConfig::Start::FirstMode:
      c[0] = 1.0;
      break;
    case SolverConfig::Start::SmoothProfile:
      for (std::size_t k = 0; k < c.size(); ++k) c[k] = 1.0 / (1.0 + spec.eigenvalue(k));
      break;
    case SolverConfig::Start::RandomPerturbed: {
      std::mt19937_64 rng(config.seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      c[0] = 1.0;
      for (std::size_t k = 0; k < c.size(); ++k) {
        c[k] += config.perturbation * gauss(rng) / (1.0 + spec.eigenvalue(k));
      }
      break;
    }
  }
  return c;
}

}  // namespace

SolveReport minimize_on_nehari(const Transform& t, std::span<const double> multipliers, double p,
                               const SolverConfig& config) {
  const std::size_t K = t.spectrum().size();
  if (multipliers.size() != K) throw ConfigError("multiplier count mismatch");
  for (std::size_t k = 0; k < K; ++k) {
    if (!(multipliers[k] > 0.0)) {
      throw NumericalError("non-coercive direction: multiplier " + std::to_string(multipliers[k]) +
                           " on mode " + t.spectrum().mode_name(k));
    }
  }
  if (!(p > 1.0)) throw ConfigError("exponent must be > 1");
  if (config.max_iterations < 1 || !(config.gradient_tol > 0.0)) {
    throw ConfigError("solver config requires max_iterations >= 1 and a positive tolerance");
  }

  SolveReport rep;
  std::vector<double> c = initial_guess(t, config);
  if (norm_l2(c) == 0.0) throw ConfigError("initial guess must be nonzero");
  Aggregates ag = project_nehari(t, multipliers, c, p);
  double I = ray_energy(ag, p);
  rep.trace.push_back(I);

  auto gradient = [&](const std::vector<double>& u) {
    auto g = nonlinear_power(t, u, p);
    for (std::size_t k = 0; k < K; ++k) g[k] = multipliers[k] * u[k] - g[k];
    return g;
  };

  std::vector<double> g = gradient(c), d(K);
  for (std::size_t k = 0; k < K; ++k) d[k] = g[k] / multipliers[k];

  bool polish = false;
  double step = config.initial_step;
  double best_res = std::numeric_limits<double>::infinity();
  std::vector<double> best_c = c;
  std::vector<double> prev_c, prev_d;
  int it = 0;

  for (; it < config.max_iterations; ++it) {
    double nc = norm_l2(c);
    double gn = norm_l2(d) / nc;
    double rn = norm_l2(g) / nc;
    if (!std::isfinite(gn) || !std::isfinite(rn)) {
      throw NumericalError("numerical blowup in the descent loop");
    }
    if (gn <= config.gradient_tol && rn <= 10.0 * config.gradient_tol) {
      rep.converged = true;
      rep.stop_reason = "gradient below tolerance";
      break;
    }
    if (!polish && gn <= config.polish_switch) polish = true;

    if (!polish) {
      // Monotone phase: Armijo on the ray-projected energy. The slack term
      // covers the quadrature rounding floor of the energy comparison.
      KahanSum sl;
      for (std::size_t k = 0; k < K; ++k) sl.add(g[k] * d[k]);
      double slope = sl.value();
      double slack = 4e-16 * std::max(1.0, std::abs(I));
      bool accepted = false;
      std::vector<double> cand(K);
      Aggregates cand_ag{};
      double cand_I = 0.0;
      for (int bt = 0; bt < 60; ++bt) {
        for (std::size_t k = 0; k < K; ++k) cand[k] = c[k] - step * d[k];
        cand_ag = project_nehari(t, multipliers, cand, p);
        cand_I = ray_energy(cand_ag, p);
        if (cand_I <= I - config.armijo_c1 * step * slope + slack) {
          accepted = true;
          break;
        }
        step *= config.backtrack;
      }
      if (!accepted) {
        polish = true;  // rounding floor reached before the switch threshold
        continue;
      }
      c.swap(cand);
      ag = cand_ag;
      I = cand_I;
      rep.trace.push_back(I);
      ++rep.armijo_steps;
      // Step cap 1: in the preconditioned metric the Hessian eigenvalues lie
      // in (0, 1], so unit steps stay contractive near the minimizer.
      step = std::min(step * config.step_grow, 1.0);
      g = gradient(c);
      for (std::size_t k = 0; k < K; ++k) d[k] = g[k] / multipliers[k];
      continue;
    }

    // Polish phase: Barzilai-Borwein steps on the preconditioned map with a
    // best-point safeguard; non-monotone but locally much faster than the
    // Armijo phase at gradient norms near the energy rounding floor.
    if (rn < best_res) {
      best_res = rn;
      best_c = c;
    }
    if (rn > 1e3 * best_res) {
      c = best_c;
      prev_c.clear();
      prev_d.clear();
      g = gradient(c);
      for (std::size_t k = 0; k < K; ++k) d[k] = g[k] / multipliers[k];
    }
    double sb = 1.0;
    if (!prev_c.empty()) {
      KahanSum num, den;
      for (std::size_t k = 0; k < K; ++k) {
        double dc = c[k] - prev_c[k];
        double dd = d[k] - prev_d[k];
        num.add(dc * dc);
        den.add(dc * dd);
      }
      if (den.value() > 0.0) sb = num.value() / den.value();
    }
    sb = std::clamp(sb, 0.1, 1e4);
    prev_c = c;
    prev_d = d;
    for (std::size_t k = 0; k < K; ++k) c[k] -= sb * d[k];
    ag = project_nehari(t, multipliers, c, p);
    I = ray_energy(ag, p);
    rep.trace.push_back(I);
    g = gradient(c);
    for (std::size_t k = 0; k < K; ++k) d[k] = g[k] / multipliers[k];
  }

  if (!rep.converged) {
    rep.stop_reason = "max iterations reached";
  }
  double nc = norm_l2(c);
  rep.gradient_norm = norm_l2(d) / nc;
  rep.residual = norm_l2(g) / nc;
  rep.energy = I;
  rep.nehari_value = ag.A - ag.B;
  rep.iterations = it;
  rep.coefficients = std::move(c);
  return rep;
}

SolveReport solve_least_energy(const Transform& t, double m, double p,
                               const SolverConfig& config) {
  if (!(m > 0.0)) throw ConfigError("mass must be positive for the least-energy solve");
  const Spectrum& spec = t.spectrum();
  std::vector<double> G(spec.size());
  for (std::size_t k = 0; k < G.size(); ++k) {
    G[k] = std::sqrt(spec.eigenvalue(k) + m * m) - m;
  }
  SolveReport rep = minimize_on_nehari(t, G, p, config);

  // Nonnegative orientation: the least-energy solution is sign-definite, so
  // flip toward the dominant extremum.
  auto v = t.synthesize(rep.coefficients);
  double vmax = *std::max_element(v.begin(), v.end());
  double vmin = *std::min_element(v.begin(), v.end());
  if (std::abs(vmin) > std::abs(vmax)) {
    for (double& x : rep.coefficients) x = -x;
    for (double& x : v) x = -x;
    std::swap(vmax, vmin);
    vmax = -vmax;
    vmin = -vmin;
  }
  double scale = std::max(std::abs(vmax), std::abs(vmin));
  rep.min_value_ratio = scale > 0.0 ? vmin / scale : 0.0;
  rep.sign_definite = rep.min_value_ratio >= -1e-6;

  rep.pohozaev = pohozaev_residual(t, rep.coefficients, m, p);
  rep.nehari_identity = nehari_identity_residual(t, rep.coefficients, m, p);
  rep.coercivity_ratio = trace_coercivity_check(spec, rep.coefficients, m).ratio;
  return rep;
}

std::vector<MountainPassRow> mountain_pass_level_bound(const Transform& t, double m,
                                                       std::span<const double> lambda_scales,
                                                       const CutoffConfig& cutoff) {
  const Spectrum& spec = t.spectrum();
  const Domain& dom = spec.domain();
  int n = dom.dim();
  if (n < 2) throw ConfigError("level-bound experiment needs dimension >= 2");
  if (!(m >= 0.0)) throw ConfigError("mass must be >= 0");
  double d = dom.min_side();
  double r1 = cutoff.plateau_frac * d;
  double r2 = cutoff.support_frac * d;
  if (!(r1 > 0.0) || !(r2 > r1)) throw ConfigError("cut-off radii must satisfy 0 < plateau < support");
  if (r2 > 0.5 * d) throw GeometryError("cut-off support leaves the box");

  double pp1 = 2.0 * static_cast<double>(n) / (n - 1.0);
  double Sn = sharp_constant(n);
  double threshold = std::pow(Sn, -2.0 * n) / (2.0 * n);
  auto center = dom.center();

  // Grid radii relative to the center, reused across scales.
  std::size_t total = t.grid().total();
  std::vector<double> radius(total);
  {
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    for (std::size_t g = 0; g < total; ++g) {
      double r2sum = 0.0;
      for (int j = 0; j < n; ++j) {
        double dx = t.grid().nodes(j)[idx[static_cast<std::size_t>(j)]] -
                    center[static_cast<std::size_t>(j)];
        r2sum += dx * dx;
      }
      radius[g] = std::sqrt(r2sum);
      for (int j = n - 1; j >= 0; --j) {
        auto& i = idx[static_cast<std::size_t>(j)];
        if (++i < static_cast<std::size_t>(t.grid().orders()[static_cast<std::size_t>(j)])) break;
        i = 0;
      }
    }
  }

  std::vector<MountainPassRow> rows;
  for (double lam : lambda_scales) {
    if (!(lam > 0.0)) throw ConfigError("bubble scale must be positive");
    if (lam >= r1) {
      throw GeometryError("bubble scale " + std::to_string(lam) +
                          " is not below the cut-off plateau radius " + std::to_string(r1));
    }
    std::vector<double> values(total);
    for (std::size_t g = 0; g < total; ++g) {
      double r = radius[g];
      double cut;
      if (r <= r1) {
        cut = 1.0;
      } else if (r >= r2) {
        cut = 0.0;
      } else {
        double s = (r - r1) / (r2 - r1);
        cut = 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
      }
      values[g] = cut == 0.0 ? 0.0 : cut * bubble_constant(n) *
                                         std::pow(lam / (lam * lam + r * r), 0.5 * (n - 1.0));
    }
    auto c = t.analyze(values);
    double alpha = quadratic_aggregate(spec, c, m);
    auto synth = t.synthesize(c);
    for (double& x : synth) x = std::pow(std::abs(x), pp1);
    double beta = t.quad(synth);
    double level = std::pow(alpha, static_cast<double>(n)) /
                   std::pow(beta, static_cast<double>(n - 1)) / (2.0 * n);
    rows.push_back(MountainPassRow{lam, alpha, beta, level, threshold, level < threshold});
  }
  return rows;
}

std::vector<ProbeRow> nonexistence_probe(const Domain& domain, double m, double p,
                                         std::span<const int> orders, const SolverConfig& config,
                                         int grid_margin) {
  std::vector<ProbeRow> rows;
  for (int N : orders) {
    Spectrum spec(domain, N);
    Grid grid(domain, default_orders(N, domain.dim(), grid_margin));
    Transform t(spec, grid);
    SolveReport rep = solve_least_energy(t, m, p, config);
    auto v = t.synthesize(rep.coefficients);
    double linf = 0.0;
    for (double x : v) linf = std::max(linf, std::abs(x));
    rows.push_back(ProbeRow{N, linf, rep.energy, rep.pohozaev, rep.converged});
  }
  return rows;
}

}  // namespace specrel

#include "specrel/perturbative.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "specrel/errors.hpp"
#include "specrel/field.hpp"
#include "specrel/symbols.hpp"
#include "specrel/util.hpp"

namespace specrel {

namespace {

Eigen::VectorXd to_eigen(std::span<const double> x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

std::vector<double> from_eigen(const Eigen::VectorXd& x) {
  return std::vector<double>(x.data(), x.data() + x.size());
}

}  // namespace

Eigen::MatrixXd multiplication_matrix(const Transform& t, std::span<const double> grid_values) {
  if (grid_values.size() != t.grid().total())
    throw ConfigError("grid value count does not match the quadrature grid");
  const auto K = static_cast<Eigen::Index>(t.spectrum().size());
  Eigen::MatrixXd B(K, K);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index l = 0; l < K; ++l) {
    std::vector<double> e(static_cast<std::size_t>(K), 0.0);
    e[static_cast<std::size_t>(l)] = 1.0;
    auto v = t.synthesize(e);
    for (std::size_t g = 0; g < v.size(); ++g) v[g] *= grid_values[g];
    auto col = t.analyze(v);
    for (Eigen::Index k = 0; k < K; ++k) B(k, l) = col[static_cast<std::size_t>(k)];
  }
  return B;
}

Eigen::MatrixXd linearization_matrix(const Eigen::MatrixXd& mult,
                                     std::span<const double> symbol_values) {
  if (static_cast<Eigen::Index>(symbol_values.size()) != mult.rows())
    throw ConfigError("symbol value count does not match the matrix");
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(mult.rows(), mult.cols());
  for (Eigen::Index k = 0; k < mult.rows(); ++k) {
    if (!(symbol_values[static_cast<std::size_t>(k)] > 0.0))
      throw ConfigError("symbol values must be positive");
    M.row(k) -= mult.row(k) / symbol_values[static_cast<std::size_t>(k)];
  }
  return M;
}

double smallest_singular_value(const Eigen::MatrixXd& M, int max_iterations, double tol) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(M.rows());
  v /= v.norm();
  double prev = 0.0, nrm = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd w = lu.solve(v);
    w = lu.transpose().solve(w);
    nrm = w.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm))
      throw NumericalError("inverse power iteration broke down");
    v = w / nrm;
    if (std::abs(nrm - prev) <= tol * nrm) break;
    prev = nrm;
  }
  return 1.0 / std::sqrt(nrm);
}

LimitSolution solve_limit(const Transform& t, double p, const SolverConfig& config,
                          double sigma_threshold, Eigen::MatrixXd* mult_out) {
  const Spectrum& spec = t.spectrum();
  SolveReport rep = minimize_on_nehari(t, spec.eigenvalues(), p, config);

  LimitSolution sol;
  sol.energy = rep.energy;
  sol.residual = rep.residual;
  sol.iterations = rep.iterations;
  sol.converged = rep.converged;
  sol.coefficients = std::move(rep.coefficients);

  auto v = t.synthesize(sol.coefficients);
  for (double& x : v) x = p * std::pow(std::abs(x), p - 1.0);
  Eigen::MatrixXd B = multiplication_matrix(t, v);
  sol.sigma_min = smallest_singular_value(linearization_matrix(B, spec.eigenvalues()));
  if (sol.sigma_min < sigma_threshold) {
    throw NumericalError("limit linearization is degenerate: sigma_min = " +
                         std::to_string(sol.sigma_min));
  }
  if (mult_out != nullptr) *mult_out = std::move(B);
  return sol;
}

std::vector<double> difference_operator(const Spectrum& spectrum, std::span<const double> coeffs,
                                        double m) {
  if (!(m > 0.0)) throw ConfigError("mass must be positive");
  return apply_multiplier(spectrum, coeffs,
                          [m](double lam) { return difference_symbol(lam, m); });
}

std::vector<double> quadratic_remainder(const Transform& t, std::span<const double> limit_coeffs,
                                        std::span<const double> correction, double p) {
  if (!(p > 1.0)) throw ConfigError("exponent must be > 1");
  auto vu = t.synthesize(limit_coeffs);
  auto vw = t.synthesize(correction);
  for (std::size_t g = 0; g < vu.size(); ++g) {
    double u = vu[g], w = vw[g];
    double au = std::abs(u);
    // split terms and share signed_power so the two degenerate slices cancel
    // bitwise: w = 0 gives exactly 0, u = 0 gives exactly nonlinear_power
    double lin_w = au == 0.0 ? 0.0 : p * std::pow(au, p - 1.0) * w;
    vu[g] = (signed_power(u + w, p) - signed_power(u, p)) - lin_w;
  }
  return t.analyze(vu);
}

MassLinearSolver::MassLinearSolver(const Transform& t, std::span<const double> limit_coeffs,
                                   double p, double m, const Eigen::MatrixXd* mult)
    : t_(&t), p_(p), m_(m) {
  if (!(m > 0.0)) throw ConfigError("mass must be positive");
  if (!(p > 1.0)) throw ConfigError("exponent must be > 1");
  const Spectrum& spec = t.spectrum();
  pm_.resize(spec.size());
  for (std::size_t k = 0; k < pm_.size(); ++k) pm_[k] = mass_symbol(spec.eigenvalue(k), m);

  fvals_ = t.synthesize(limit_coeffs);
  for (double& x : fvals_) x = p * std::pow(std::abs(x), p - 1.0);

  Eigen::MatrixXd A = mult != nullptr ? linearization_matrix(*mult, pm_)
                                      : linearization_matrix(multiplication_matrix(t, fvals_), pm_);
  lu_.compute(A);
}

std::vector<double> MassLinearSolver::apply(std::span<const double> x) const {
  auto v = t_->synthesize(x);
  for (std::size_t g = 0; g < v.size(); ++g) v[g] *= fvals_[g];
  auto out = t_->analyze(v);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = x[k] - out[k] / pm_[k];
  return out;
}

std::vector<double> MassLinearSolver::apply_adjoint(std::span<const double> x) const {
  std::vector<double> scaled(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) scaled[k] = x[k] / pm_[k];
  auto v = t_->synthesize(scaled);
  for (std::size_t g = 0; g < v.size(); ++g) v[g] *= fvals_[g];
  auto out = t_->analyze(v);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = x[k] - out[k];
  return out;
}

std::vector<double> MassLinearSolver::solve(std::span<const double> rhs) const {
  return from_eigen(lu_.solve(to_eigen(rhs)));
}

std::vector<double> MassLinearSolver::solve_cgnr(std::span<const double> rhs, double tol,
                                                 int max_iterations) const {
  const std::size_t K = rhs.size();
  std::vector<double> x(K, 0.0);
  std::vector<double> r(rhs.begin(), rhs.end());  // b - A x with x = 0
  auto s = apply_adjoint(r);
  auto d = s;
  double gamma = kahan_dot(s, s);
  double bnorm = norm_l2(rhs);
  if (bnorm == 0.0) return x;
  for (int it = 0; it < max_iterations; ++it) {
    if (norm_l2(r) <= tol * bnorm) break;
    auto q = apply(d);
    double qq = kahan_dot(q, q);
    if (!(qq > 0.0)) break;
    double alpha = gamma / qq;
    for (std::size_t k = 0; k < K; ++k) {
      x[k] += alpha * d[k];
      r[k] -= alpha * q[k];
    }
    s = apply_adjoint(r);
    double gamma_new = kahan_dot(s, s);
    double beta = gamma_new / gamma;
    gamma = gamma_new;
    for (std::size_t k = 0; k < K; ++k) d[k] = s[k] + beta * d[k];
  }
  return x;
}

double MassLinearSolver::neumann_operator_norm() const {
  if (neumann_norm_ >= 0.0) return neumann_norm_;
  const std::size_t K = pm_.size();
  std::vector<double> v(K, 1.0 / std::sqrt(static_cast<double>(K)));
  double nrm = 0.0, prev = 0.0;
  auto apply_K = [&](const std::vector<double>& x) {
    auto g = t_->synthesize(x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= fvals_[i];
    auto out = t_->analyze(g);
    for (std::size_t k = 0; k < K; ++k) out[k] /= pm_[k];
    return out;
  };
  auto apply_KT = [&](const std::vector<double>& x) {
    std::vector<double> scaled(K);
    for (std::size_t k = 0; k < K; ++k) scaled[k] = x[k] / pm_[k];
    auto g = t_->synthesize(scaled);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= fvals_[i];
    return t_->analyze(g);
  };
  for (int it = 0; it < 100; ++it) {
    auto w = apply_KT(apply_K(v));
    nrm = norm_l2(w);
    if (nrm == 0.0) break;
    for (std::size_t k = 0; k < K; ++k) v[k] = w[k] / nrm;
    if (std::abs(nrm - prev) <= 1e-8 * nrm) break;
    prev = nrm;
  }
  neumann_norm_ = std::sqrt(nrm);
  return neumann_norm_;
}

std::vector<double> MassLinearSolver::solve_neumann(std::span<const double> rhs, double tol,
                                                    int max_iterations) const {
  double norm = neumann_operator_norm();
  if (!(norm < 1.0)) {
    throw NumericalError("geometric series for the correction operator diverges: "
                         "iteration map norm " + std::to_string(norm) + " >= 1");
  }
  std::vector<double> x(rhs.begin(), rhs.end());
  std::vector<double> term(rhs.begin(), rhs.end());
  for (int it = 0; it < max_iterations; ++it) {
    auto g = t_->synthesize(term);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= fvals_[i];
    term = t_->analyze(g);
    for (std::size_t k = 0; k < term.size(); ++k) term[k] /= pm_[k];
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += term[k];
    if (norm_l2(term) <= tol * norm_l2(x)) return x;
  }
  throw NumericalError("geometric series did not reach tolerance " + std::to_string(tol));
}

double MassLinearSolver::inverse_norm_estimate(int max_iterations, double tol) const {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(pm_.size()));
  v /= v.norm();
  double prev = 0.0, nrm = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd w = lu_.solve(v);
    w = lu_.transpose().solve(w);
    nrm = w.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm))
      throw NumericalError("inverse power iteration broke down");
    v = w / nrm;
    if (std::abs(nrm - prev) <= tol * nrm) break;
    prev = nrm;
  }
  return std::sqrt(nrm);
}

FixedPointResult fixed_point_solve(const Transform& t, std::span<const double> limit_coeffs,
                                   double p, double m, const MassLinearSolver& solver,
                                   const FixedPointConfig& config) {
  const Spectrum& spec = t.spectrum();
  const std::size_t K = spec.size();
  if (limit_coeffs.size() != K) throw ConfigError("coefficient count mismatch");
  if (solver.mass() != m) throw ConfigError("solver was factorized for a different mass");
  if (config.max_iterations < 1 || !(config.tol > 0.0))
    throw ConfigError("fixed-point config requires max_iterations >= 1 and a positive tolerance");

  std::vector<double> pm(K), dm(K);
  for (std::size_t k = 0; k < K; ++k) {
    pm[k] = mass_symbol(spec.eigenvalue(k), m);
    dm[k] = difference_symbol(spec.eigenvalue(k), m) * limit_coeffs[k];
  }

  FixedPointResult res;
  std::vector<double> w(K, 0.0);
  double prev_update = -1.0;
  int rising = 0;
  for (int it = 0; it < config.max_iterations; ++it) {
    auto rhs = quadratic_remainder(t, limit_coeffs, w, p);
    for (std::size_t k = 0; k < K; ++k) rhs[k] = (rhs[k] + dm[k]) / pm[k];
    auto w_new = solver.solve(rhs);
    KahanSum diff;
    for (std::size_t k = 0; k < K; ++k) {
      double d = w_new[k] - w[k];
      diff.add(d * d);
    }
    double update = std::sqrt(diff.value());
    if (prev_update > 0.0) {
      double factor = update / prev_update;
      res.update_factors.push_back(factor);
      rising = factor >= 1.0 ? rising + 1 : 0;
      if (rising >= 3) {
        throw NumericalError("fixed-point iteration diverging: three consecutive growing "
                             "updates at mass " + std::to_string(m));
      }
    }
    prev_update = update;
    w = std::move(w_new);
    res.iterations = it + 1;
    if (update <= config.tol) {
      res.converged = true;
      break;
    }
  }

  res.correction_lq = norm_lq(t, w, static_cast<double>(spec.domain().dim()) * p);
  if (res.correction_lq > config.delta) {
    throw NumericalError("correction left the guard ball: ||w|| = " +
                         std::to_string(res.correction_lq));
  }

  res.normalized.resize(K);
  for (std::size_t k = 0; k < K; ++k) res.normalized[k] = limit_coeffs[k] + w[k];
  auto nl = nonlinear_power(t, res.normalized, p);
  KahanSum rnum, rden;
  for (std::size_t k = 0; k < K; ++k) {
    double d = pm[k] * res.normalized[k] - nl[k];
    rnum.add(d * d);
    rden.add(res.normalized[k] * res.normalized[k]);
  }
  res.residual = std::sqrt(rnum.value() / rden.value());

  double scale = std::pow(2.0 * m, -1.0 / (p - 1.0));
  res.original.resize(K);
  for (std::size_t k = 0; k < K; ++k) res.original[k] = scale * res.normalized[k];
  res.correction = std::move(w);
  return res;
}

double gradient_seminorm(const Transform& t, std::span<const double> coeffs, double q) {
  if (!(q >= 1.0)) throw ConfigError("seminorm exponent must be >= 1");
  const int n = t.spectrum().domain().dim();
  std::vector<double> g2(t.grid().total(), 0.0);
  for (int j = 0; j < n; ++j) {
    auto gj = t.synthesize_partial(coeffs, j);
    for (std::size_t i = 0; i < g2.size(); ++i) g2[i] += gj[i] * gj[i];
  }
  for (double& x : g2) x = std::pow(x, 0.5 * q);
  return std::pow(t.quad(g2), 1.0 / q);
}

RateStudyResult rate_study(const Transform& t, double p, std::span<const double> masses,
                           const SolverConfig& limit_config, const FixedPointConfig& fp) {
  if (masses.empty()) throw ConfigError("need at least one mass");
  for (double m : masses)
    if (!(m > 0.0)) throw ConfigError("masses must be positive");

  RateStudyResult out;
  Eigen::MatrixXd B;
  out.limit = solve_limit(t, p, limit_config, 1e-6, &B);
  if (!out.limit.converged)
    throw NumericalError("limit solve did not converge: " +
                         std::to_string(out.limit.residual));

  const int n = t.spectrum().domain().dim();
  for (double m : masses) {
    MassLinearSolver solver(t, out.limit.coefficients, p, m, &B);
    auto res = fixed_point_solve(t, out.limit.coefficients, p, m, solver, fp);
    RateRow row;
    row.m = m;
    row.error = gradient_seminorm(t, res.correction, static_cast<double>(n));
    KahanSum lg;
    for (double f : res.update_factors) lg.add(std::log(f));
    row.contraction = res.update_factors.empty()
                          ? 0.0
                          : std::exp(lg.value() / res.update_factors.size());
    row.iterations = res.iterations;
    row.converged = res.converged;
    out.rows.push_back(row);
  }

  KahanSum sx, sy, sxx, sxy;
  for (const auto& row : out.rows) {
    double lx = std::log(row.m), ly = std::log(row.error);
    sx.add(lx);
    sy.add(ly);
    sxx.add(lx * lx);
    sxy.add(lx * ly);
  }
  double k = static_cast<double>(out.rows.size());
  double denom = k * sxx.value() - sx.value() * sx.value();
  out.slope = denom == 0.0 ? 0.0 : (k * sxy.value() - sx.value() * sy.value()) / denom;
  return out;
}

}  // namespace specrel

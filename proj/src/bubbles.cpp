#include "specrel/bubbles.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "specrel/errors.hpp"
#include "specrel/field.hpp"
#include "specrel/transforms.hpp"
#include "specrel/util.hpp"

namespace specrel {

namespace {

void require_dim(int n) {
  if (n < 2) throw ConfigError("bubble family needs dimension >= 2, got " + std::to_string(n));
}

double radius2(std::span<const double> x, const BubbleParams& params) {
  double r2 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double d = x[j] - params.center[j];
    r2 += d * d;
  }
  return r2;
}

}  // namespace

double bubble_constant(int n) {
  require_dim(n);
  double ratio = std::tgamma((n + 1) / 2.0) / std::tgamma((n - 1) / 2.0);
  return std::pow(2.0 * ratio, (n - 1) / 2.0);
}

double sharp_constant(int n) {
  require_dim(n);
  double a = std::sqrt(std::tgamma((n - 1) / 2.0) / std::tgamma((n + 1) / 2.0));
  double b = std::pow(std::tgamma(static_cast<double>(n)) / std::tgamma(n / 2.0),
                      1.0 / (2.0 * n));
  return a * b / (std::sqrt(2.0) * std::pow(M_PI, 0.25));
}

double bubble_trace(std::span<const double> x, const BubbleParams& params) {
  return bubble_extension(x, 0.0, params);
}

double bubble_extension(std::span<const double> x, double t, const BubbleParams& params) {
  require_dim(params.n);
  if (!(params.scale > 0.0)) throw ConfigError("bubble scale must be positive");
  double s = t + params.scale;
  double denom = radius2(x, params) + s * s;
  return bubble_constant(params.n) * std::pow(params.scale / denom, (params.n - 1) / 2.0);
}

double verify_entire_equation(const BubbleParams& params,
                              std::span<const std::vector<double>> samples) {
  require_dim(params.n);
  int n = params.n;
  double cn = bubble_constant(n);
  double lam = params.scale;
  double worst = 0.0;
  for (const auto& x : samples) {
    double denom = radius2(x, params) + lam * lam;
    // -dW/dt at t = 0, from the closed form of the extension.
    double flux = (n - 1.0) * cn * std::pow(lam, (n - 1) / 2.0) * lam *
                  std::pow(denom, -(n + 1) / 2.0);
    double w = cn * std::pow(lam / denom, (n - 1) / 2.0);
    double rhs = std::pow(w, (n + 1.0) / (n - 1.0));
    double scale = std::max(std::abs(flux), std::abs(rhs));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(flux - rhs) / scale);
  }
  return worst;
}

HarmonicityReport verify_harmonicity(const BubbleParams& params, std::span<const double> x,
                                     double t, std::span<const double> steps) {
  require_dim(params.n);
  if (!(t > 0.0)) throw ConfigError("harmonicity probe needs an interior point (t > 0)");
  int n = params.n;
  HarmonicityReport rep;
  std::vector<double> pt(x.begin(), x.end());
  double wc = bubble_extension(pt, t, params);
  for (double h : steps) {
    if (!(h > 0.0) || h >= t) throw ConfigError("step must lie in (0, t)");
    KahanSum lap;
    for (int j = 0; j < n; ++j) {
      double saved = pt[static_cast<std::size_t>(j)];
      pt[static_cast<std::size_t>(j)] = saved + h;
      double up = bubble_extension(pt, t, params);
      pt[static_cast<std::size_t>(j)] = saved - h;
      double dn = bubble_extension(pt, t, params);
      pt[static_cast<std::size_t>(j)] = saved;
      lap.add(up + dn - 2.0 * wc);
    }
    lap.add(bubble_extension(pt, t + h, params) + bubble_extension(pt, t - h, params) - 2.0 * wc);
    rep.steps.push_back(h);
    rep.residuals.push_back(std::abs(lap.value()) / (h * h));
  }
  // Least-squares slope of log residual against log h.
  std::size_t k = rep.steps.size();
  if (k >= 2) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double lx = std::log(rep.steps[i]);
      double ly = std::log(rep.residuals[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    rep.fitted_order = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  } else {
    rep.fitted_order = 0.0;
  }
  return rep;
}

SharpNormReport sharp_norm_check(int n, double tol, int max_level) {
  require_dim(n);
  // After r = tan(theta) the whole-space radial integral collapses to
  //   |S^{n-1}| (n-1)^n  int_0^{pi/2} sin^{n-1} cos^{n-1},
  // a smooth integrand on a finite interval.
  double surface = 2.0 * std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0);
  double amp = std::pow(bubble_constant(n), 2.0 * n / (n - 1.0));
  auto [gx, gw] = gauss_legendre(16);

  auto level_value = [&](int level) {
    int panels = 1 << level;
    double width = (M_PI / 2.0) / panels;
    KahanSum acc;
    for (int p = 0; p < panels; ++p) {
      double left = p * width;
      for (std::size_t q = 0; q < gx.size(); ++q) {
        double theta = left + 0.5 * width * (gx[q] + 1.0);
        double s = std::sin(theta), c = std::cos(theta);
        acc.add(0.5 * width * gw[q] * std::pow(s * c, n - 1.0));
      }
    }
    return surface * amp * acc.value();
  };

  double prev = level_value(0);
  for (int level = 1; level <= max_level; ++level) {
    double cur = level_value(level);
    if (std::abs(cur - prev) <= tol * std::abs(cur)) {
      double ref = std::pow(sharp_constant(n), -2.0 * n);
      return SharpNormReport{cur, ref, std::abs(cur - ref) / ref, level};
    }
    prev = cur;
  }
  throw NumericalError("sharp-norm quadrature did not reach tolerance " + std::to_string(tol));
}

std::vector<QuotientRow> trace_quotient_probe(int n, double scale,
                                              std::span<const double> box_sides,
                                              std::span<const int> orders, int grid_margin) {
  require_dim(n);
  if (box_sides.size() != orders.size())
    throw ConfigError("need one truncation order per box side");
  if (!(scale > 0.0)) throw ConfigError("bubble scale must be positive");
  double pp1 = 2.0 * n / (n - 1.0);
  double s2 = sharp_constant(n) * sharp_constant(n);
  std::vector<QuotientRow> rows;
  for (std::size_t i = 0; i < box_sides.size(); ++i) {
    double L = box_sides[i];
    int N = orders[i];
    Domain dom(std::vector<double>(static_cast<std::size_t>(n), L));
    Spectrum spec(dom, N);
    Grid grid(dom, default_orders(N, n, grid_margin));
    Transform t(spec, grid);
    auto center = dom.center();
    double d = dom.min_side();
    double r1 = 0.25 * d, r2 = 0.45 * d;
    BubbleParams bp{n, scale, center};

    std::size_t total = t.grid().total();
    std::vector<double> values(total);
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    std::vector<double> pt(static_cast<std::size_t>(n));
    for (std::size_t g = 0; g < total; ++g) {
      for (int j = 0; j < n; ++j)
        pt[static_cast<std::size_t>(j)] = t.grid().nodes(j)[idx[static_cast<std::size_t>(j)]];
      double r = std::sqrt(radius2(pt, bp));
      double cut;
      if (r <= r1) {
        cut = 1.0;
      } else if (r >= r2) {
        cut = 0.0;
      } else {
        double s = (r - r1) / (r2 - r1);
        cut = 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
      }
      values[g] = cut == 0.0 ? 0.0 : cut * bubble_trace(pt, bp);
      for (int j = n - 1; j >= 0; --j) {
        auto& ii = idx[static_cast<std::size_t>(j)];
        if (++ii < static_cast<std::size_t>(grid.orders()[static_cast<std::size_t>(j)])) break;
        ii = 0;
      }
    }
    auto c = t.analyze(values);
    double alpha = quadratic_form(spec, c, [](double lam) { return std::sqrt(lam); });
    double beta = norm_lq(t, c, pp1);
    rows.push_back(QuotientRow{L, N, alpha / (beta * beta) * s2});
  }
  return rows;
}

}  // namespace specrel

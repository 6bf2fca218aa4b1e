#include "specrel/transforms.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "specrel/errors.hpp"
#include "specrel/util.hpp"

namespace specrel {

namespace {

// out[p,r,q] = sum_c B[r,c] * in[p,c,q] for a tensor viewed as [P][C][Q].
// The c-loop order is fixed, so each output element is computed identically
// regardless of parallel scheduling.
void apply_axis(const double* in, double* out, const double* B, std::size_t P, std::size_t C,
                std::size_t Q, std::size_t R) {
#pragma omp parallel for collapse(2) schedule(static)
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t r = 0; r < R; ++r) {
      double* orow = out + (p * R + r) * Q;
      std::memset(orow, 0, Q * sizeof(double));
      const double* brow = B + r * C;
      for (std::size_t c = 0; c < C; ++c) {
        const double b = brow[c];
        const double* irow = in + (p * C + c) * Q;
        for (std::size_t q = 0; q < Q; ++q) orow[q] += b * irow[q];
      }
    }
  }
}

}  // namespace

std::vector<int> default_orders(int order, int dim, int margin) {
  if (order < 1) throw ConfigError("truncation order must be >= 1, got " + std::to_string(order));
  if (dim < 1) throw ConfigError("dimension must be >= 1, got " + std::to_string(dim));
  return std::vector<int>(static_cast<std::size_t>(dim), 2 * order + 1 + margin);
}

Transform::Transform(const Spectrum& spectrum, const Grid& grid) : spec_(spectrum), grid_(grid) {
  const Domain& gd = grid_.domain();
  const Domain& sd = spec_.domain();
  if (gd.dim() != sd.dim()) throw ConfigError("spectrum and grid dimension mismatch");
  for (int j = 0; j < gd.dim(); ++j) {
    if (gd.side(j) != sd.side(j)) {
      throw ConfigError("spectrum and grid disagree on side length of axis " +
                        std::to_string(j + 1));
    }
  }
  int N = spec_.order();
  for (int j = 0; j < gd.dim(); ++j) {
    int M = grid_.orders()[static_cast<std::size_t>(j)];
    if (M < 2 * N + 1) {
      throw ResolutionError("grid order " + std::to_string(M) + " on axis " +
                            std::to_string(j + 1) + " is below the oversampling floor " +
                            std::to_string(2 * N + 1));
    }
  }

  int n = gd.dim();
  synth_.resize(static_cast<std::size_t>(n));
  analysis_.resize(static_cast<std::size_t>(n));
  deriv_.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double L = gd.side(j);
    double norm = std::sqrt(2.0 / L);
    const auto& x = grid_.nodes(j);
    const auto& w = grid_.weights(j);
    std::size_t M = x.size();
    std::size_t Ns = static_cast<std::size_t>(N);
    auto& S = synth_[static_cast<std::size_t>(j)];
    auto& A = analysis_[static_cast<std::size_t>(j)];
    auto& D = deriv_[static_cast<std::size_t>(j)];
    S.resize(M * Ns);
    A.resize(Ns * M);
    D.resize(M * Ns);
    for (std::size_t a = 0; a < M; ++a) {
      for (std::size_t q = 0; q < Ns; ++q) {
        double freq = static_cast<double>(q + 1) * std::numbers::pi / L;
        double s = norm * std::sin(freq * x[a]);
        S[a * Ns + q] = s;
        D[a * Ns + q] = norm * freq * std::cos(freq * x[a]);
        A[q * M + a] = s * w[a];
      }
    }
  }

  weights_.resize(grid_.total());
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t g = 0; g < weights_.size(); ++g) {
    double wg = 1.0;
    for (int j = 0; j < n; ++j) wg *= grid_.weights(j)[idx[static_cast<std::size_t>(j)]];
    weights_[g] = wg;
    for (int j = n - 1; j >= 0; --j) {
      auto& i = idx[static_cast<std::size_t>(j)];
      if (++i < static_cast<std::size_t>(grid_.orders()[static_cast<std::size_t>(j)])) break;
      i = 0;
    }
  }
}

std::vector<double> Transform::apply_chain(std::span<const double> input,
                                           const std::vector<const std::vector<double>*>& mats,
                                           bool grid_to_coeff) const {
  int n = spec_.domain().dim();
  std::size_t Ns = static_cast<std::size_t>(spec_.order());
  // Current tensor shape; transformed axis by axis in order.
  std::vector<std::size_t> shape(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    shape[static_cast<std::size_t>(j)] =
        grid_to_coeff ? static_cast<std::size_t>(grid_.orders()[static_cast<std::size_t>(j)]) : Ns;
  }
  std::vector<double> cur(input.begin(), input.end());
  std::vector<double> next;
  for (int j = 0; j < n; ++j) {
    std::size_t C = shape[static_cast<std::size_t>(j)];
    std::size_t R =
        grid_to_coeff ? Ns : static_cast<std::size_t>(grid_.orders()[static_cast<std::size_t>(j)]);
    std::size_t P = 1, Q = 1;
    for (int i = 0; i < j; ++i) P *= shape[static_cast<std::size_t>(i)];
    for (int i = j + 1; i < n; ++i) Q *= shape[static_cast<std::size_t>(i)];
    next.resize(P * R * Q);
    apply_axis(cur.data(), next.data(), mats[static_cast<std::size_t>(j)]->data(), P, C, Q, R);
    cur.swap(next);
    shape[static_cast<std::size_t>(j)] = R;
  }
  return cur;
}

std::vector<double> Transform::synthesize(std::span<const double> coeffs) const {
  if (coeffs.size() != spec_.size()) throw ConfigError("coefficient count does not match spectrum");
  std::vector<const std::vector<double>*> mats;
  for (const auto& S : synth_) mats.push_back(&S);
  return apply_chain(coeffs, mats, false);
}

std::vector<double> Transform::synthesize_partial(std::span<const double> coeffs, int axis) const {
  if (coeffs.size() != spec_.size()) throw ConfigError("coefficient count does not match spectrum");
  if (axis < 0 || axis >= spec_.domain().dim()) throw ConfigError("derivative axis out of range");
  std::vector<const std::vector<double>*> mats;
  for (int j = 0; j < spec_.domain().dim(); ++j) {
    mats.push_back(j == axis ? &deriv_[static_cast<std::size_t>(j)]
                             : &synth_[static_cast<std::size_t>(j)]);
  }
  return apply_chain(coeffs, mats, false);
}

std::vector<double> Transform::analyze(std::span<const double> values) const {
  if (values.size() != grid_.total()) throw ConfigError("value count does not match grid");
  std::vector<const std::vector<double>*> mats;
  for (const auto& A : analysis_) mats.push_back(&A);
  return apply_chain(values, mats, true);
}

double Transform::quad(std::span<const double> values) const {
  if (values.size() != weights_.size()) throw ConfigError("value count does not match grid");
  return kahan_dot(weights_, values);
}

double Transform::gram_deviation() const {
  if (gram_dev_ >= 0.0) return gram_dev_;
  int n = spec_.domain().dim();
  std::size_t Ns = static_cast<std::size_t>(spec_.order());
  // Per-axis Gram G_j = A_j S_j; the full Gram is their Kronecker product.
  std::vector<std::vector<double>> gram(static_cast<std::size_t>(n));
  std::vector<double> diag_max(static_cast<std::size_t>(n), 0.0);
  std::vector<double> off_max(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    std::size_t M = static_cast<std::size_t>(grid_.orders()[static_cast<std::size_t>(j)]);
    const auto& A = analysis_[static_cast<std::size_t>(j)];
    const auto& S = synth_[static_cast<std::size_t>(j)];
    auto& G = gram[static_cast<std::size_t>(j)];
    G.assign(Ns * Ns, 0.0);
    for (std::size_t k = 0; k < Ns; ++k) {
      for (std::size_t l = 0; l < Ns; ++l) {
        KahanSum s;
        for (std::size_t a = 0; a < M; ++a) s.add(A[k * M + a] * S[a * Ns + l]);
        G[k * Ns + l] = s.value();
      }
    }
    for (std::size_t k = 0; k < Ns; ++k) {
      for (std::size_t l = 0; l < Ns; ++l) {
        double v = std::abs(G[k * Ns + l]);
        if (k == l) {
          diag_max[static_cast<std::size_t>(j)] =
              std::max(diag_max[static_cast<std::size_t>(j)], v);
        } else {
          off_max[static_cast<std::size_t>(j)] = std::max(off_max[static_cast<std::size_t>(j)], v);
        }
      }
    }
  }

  // Diagonal deviation: walk all multi-indices.
  double dev = 0.0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t k = 0; k < spec_.size(); ++k) {
    double prod = 1.0;
    for (int j = 0; j < n; ++j) {
      std::size_t kj = idx[static_cast<std::size_t>(j)];
      prod *= gram[static_cast<std::size_t>(j)][kj * Ns + kj];
    }
    dev = std::max(dev, std::abs(prod - 1.0));
    for (int j = n - 1; j >= 0; --j) {
      auto& i = idx[static_cast<std::size_t>(j)];
      if (++i < Ns) break;
      i = 0;
    }
  }
  // Off-diagonal deviation: the bound max over nonempty subsets of unequal
  // axes is attained because axis entries maximize independently.
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double prod = 1.0;
    for (int j = 0; j < n; ++j) {
      prod *= (mask >> j & 1u) ? off_max[static_cast<std::size_t>(j)]
                               : diag_max[static_cast<std::size_t>(j)];
    }
    dev = std::max(dev, prod);
  }
  gram_dev_ = dev;
  return dev;
}

double Transform::evaluate(std::span<const double> coeffs, std::span<const double> x) const {
  if (coeffs.size() != spec_.size()) throw ConfigError("coefficient count does not match spectrum");
  if (static_cast<int>(x.size()) != spec_.domain().dim()) {
    throw ConfigError("evaluation point dimension mismatch");
  }
  int n = spec_.domain().dim();
  std::size_t Ns = static_cast<std::size_t>(spec_.order());
  std::vector<double> table(static_cast<std::size_t>(n) * Ns);
  for (int j = 0; j < n; ++j) {
    double L = spec_.domain().side(j);
    double norm = std::sqrt(2.0 / L);
    for (std::size_t q = 0; q < Ns; ++q) {
      table[static_cast<std::size_t>(j) * Ns + q] =
          norm * std::sin(static_cast<double>(q + 1) * std::numbers::pi * x[static_cast<std::size_t>(j)] / L);
    }
  }
  KahanSum s;
  for (std::size_t k = 0; k < spec_.size(); ++k) {
    double phi = 1.0;
    const auto& mode = spec_.mode(k);
    for (int j = 0; j < n; ++j) {
      phi *= table[static_cast<std::size_t>(j) * Ns +
                   static_cast<std::size_t>(mode[static_cast<std::size_t>(j)] - 1)];
    }
    s.add(coeffs[k] * phi);
  }
  return s.value();
}

namespace reference {

namespace {
double basis_value(const Spectrum& spectrum, const Grid& grid, std::size_t k,
                   const std::vector<std::size_t>& gidx) {
  double phi = 1.0;
  const auto& mode = spectrum.mode(k);
  for (int j = 0; j < spectrum.domain().dim(); ++j) {
    double L = spectrum.domain().side(j);
    double x = grid.nodes(j)[gidx[static_cast<std::size_t>(j)]];
    phi *= std::sqrt(2.0 / L) *
           std::sin(static_cast<double>(mode[static_cast<std::size_t>(j)]) * std::numbers::pi * x / L);
  }
  return phi;
}

void next_index(const Grid& grid, std::vector<std::size_t>& gidx) {
  for (int j = grid.domain().dim() - 1; j >= 0; --j) {
    auto& i = gidx[static_cast<std::size_t>(j)];
    if (++i < static_cast<std::size_t>(grid.orders()[static_cast<std::size_t>(j)])) return;
    i = 0;
  }
}
}  // namespace

std::vector<double> synthesize(const Spectrum& spectrum, const Grid& grid,
                               std::span<const double> coeffs) {
  std::vector<double> out(grid.total());
  std::vector<std::size_t> gidx(static_cast<std::size_t>(grid.domain().dim()), 0);
  for (std::size_t g = 0; g < out.size(); ++g) {
    KahanSum s;
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
      s.add(coeffs[k] * basis_value(spectrum, grid, k, gidx));
    }
    out[g] = s.value();
    next_index(grid, gidx);
  }
  return out;
}

std::vector<double> analyze(const Spectrum& spectrum, const Grid& grid,
                            std::span<const double> values) {
  std::vector<double> out(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    KahanSum s;
    std::vector<std::size_t> gidx(static_cast<std::size_t>(grid.domain().dim()), 0);
    for (std::size_t g = 0; g < values.size(); ++g) {
      double w = 1.0;
      for (int j = 0; j < grid.domain().dim(); ++j) {
        w *= grid.weights(j)[gidx[static_cast<std::size_t>(j)]];
      }
      s.add(w * values[g] * basis_value(spectrum, grid, k, gidx));
      next_index(grid, gidx);
    }
    out[k] = s.value();
  }
  return out;
}

}  // namespace reference

}  // namespace specrel

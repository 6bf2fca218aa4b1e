#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "specrel/transforms.hpp"

namespace specrel {

struct SolverConfig {
  enum class Start { FirstMode, SmoothProfile, RandomPerturbed };

  int max_iterations = 50000;
  double gradient_tol = 1e-9;  // on the preconditioned gradient, relative to ||u||
  double initial_step = 1.0;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  double step_grow = 1.3;
  double polish_switch = 1e-6;  // hand off to the quasi-Newton polish below this
  Start start = Start::FirstMode;
  double perturbation = 0.3;
  std::uint64_t seed = 0;
};

struct SolveReport {
  std::vector<double> coefficients;
  double energy = 0.0;
  double nehari_value = 0.0;    // A(u) - ||u||_{p+1}^{p+1}; ~0 on the manifold
  double residual = 0.0;        // ||grad I|| / ||u|| (equation residual)
  double gradient_norm = 0.0;   // preconditioned, relative
  int iterations = 0;
  int armijo_steps = 0;         // monotone prefix length of the trace
  bool converged = false;
  std::string stop_reason;
  std::vector<double> trace;    // energy per accepted step

  // Identity diagnostics (filled by solve_least_energy).
  double pohozaev = 0.0;
  double nehari_identity = 0.0;
  double coercivity_ratio = 0.0;
  bool sign_definite = false;
  double min_value_ratio = 0.0;  // min grid value / max |grid value|, after flip
};

// Energy minimization over the Nehari manifold of
//   E(u) = 1/2 sum_k G_k c_k^2 - 1/(p+1) ||u||_{p+1}^{p+1}
// for a positive multiplier array G: descent preconditioned by 1/G_k with
// Armijo backtracking and a Nehari rescale each step, then a safeguarded
// Barzilai-Borwein polish once the gradient is small (the Armijo comparison
// hits the rounding floor of the energy before 1e-9 gradients are reached).
SolveReport minimize_on_nehari(const Transform& t, std::span<const double> multipliers, double p,
                               const SolverConfig& config);

// Least-energy solution of (sqrt(-Laplace + m^2) - m) u = |u|^{p-1} u:
// the multiplier is G_k = sqrt(lambda_k + m^2) - m. The returned field is
// flipped to nonnegative orientation and carries the cylinder diagnostics.
SolveReport solve_least_energy(const Transform& t, double m, double p,
                               const SolverConfig& config = {});

struct MountainPassRow {
  double lambda_scale;
  double alpha;      // quadratic aggregate of the projected cut-off bubble
  double beta;       // ||.||_{2n/(n-1)}^{2n/(n-1)} of its synthesis
  double level;      // sup_t of the energy along the ray: alpha^n beta^{1-n} / (2n)
  double threshold;  // S_n^{-2n} / (2n)
  bool below;
};

struct CutoffConfig {
  double plateau_frac = 0.25;  // cut-off is 1 inside this fraction of min_side
  double support_frac = 0.45;  // and 0 outside this fraction
};

// For each scale: project the cut-off bubble centered at the box center onto
// the spectral basis and evaluate the peak energy along its ray, against the
// critical threshold. Exponent is the critical p = (n+1)/(n-1) implied by the
// 2n/(n-1) norm. Throws GeometryError if the cut-off support leaves the box
// or the scale is not below the plateau radius.
std::vector<MountainPassRow> mountain_pass_level_bound(const Transform& t, double m,
                                                       std::span<const double> lambda_scales,
                                                       const CutoffConfig& cutoff = {});

struct ProbeRow {
  int order;        // truncation N
  double linf;      // max |u| over the grid
  double energy;
  double pohozaev;
  bool converged;
};

// Truncation sweep of the least-energy solve, reporting whether the
// Pohozaev residual decays under refinement. True solutions decay >= 4x per
// doubling of N; supercritical discrete minimizers do not.
std::vector<ProbeRow> nonexistence_probe(const Domain& domain, double m, double p,
                                         std::span<const int> orders, const SolverConfig& config,
                                         int grid_margin = 12);

}  // namespace specrel

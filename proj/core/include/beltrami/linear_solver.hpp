#pragma once

#include <vector>

#include "beltrami/grid.hpp"

namespace beltrami {

/// Grid geometry, truncation ladder and iteration controls shared by the
/// linear and quasilinear solvers.
struct SolverConfig {
  int grid_n = 256;
  double box_half_side = 4.0;
  std::vector<int> ladder{2, 4, 8, 16, 32, 64};
  double inner_tol = 1e-10;
  double residual_tol = 1e-3;
  double outer_tol = 1e-6;
  double ladder_tol = 1e-3;
  int max_inner = 500;
  int max_outer = 50;
  /// Damping of the outer update, halved whenever the update grows.
  double outer_damping = 1.0;
  /// Decreasing margins defining the compact exhaustion K_j.
  std::vector<double> compact_margins{0.5, 0.25, 0.125};
  /// Coefficient samples per cell axis; 1 is pointwise evaluation at nodes.
  int coefficient_subsamples = 1;

  void validate() const;
};

/// f_zbar = mu f_z + nu conj(f_z) with coefficient grids bounded by k_bound < 1.
struct LinearProblem {
  GridField mu;
  GridField nu;
  double k_bound;

  /// Builds a problem with k_bound = max(|mu| + |nu|) over the grid; throws
  /// NotContractive if that maximum is >= 1.
  static LinearProblem from_fields(GridField mu, GridField nu);
  void validate() const;
};

struct IterationTrace {
  std::vector<double> update_norms;   // relative L2 norm of each update
  std::vector<double> ratios;         // update_norms[k]/update_norms[k-1], from step 2 on
  int steps = 0;
  bool converged = false;
};

/// f -> s (f - t): translation t = f(0), positive real scale s = 1/|f(1) - f(0)|.
struct Normalization {
  cplx translation{};
  double scale = 1.0;
  double arg_f1 = 0.0;  // arg f(1) after normalization, in [0, 2pi)
};

struct Solution {
  GridField f;
  GridField fz;
  GridField fzbar;
  /// Density omega = f_zbar of the unnormalized map z + T omega; used for warm starts.
  GridField omega;
  int rung = 0;
  IterationTrace trace;
  Normalization normalization;
  double residual_rel_l2 = 0.0;
  /// Radius of the disk containing the coefficient support.
  double support_radius = 0.0;
};

/// One fixed-point map: omega -> mu (1 + S omega) + nu conj(1 + S omega).
GridField picard_step(const GridField& omega, const LinearProblem& problem);

/// Principal solution f = z + T omega of the linear problem, normalized so that
/// f(0) = 0 and |f(1)| = 1. Starts from omega = 0 unless `initial` is given.
Solution solve_linear(const LinearProblem& problem, const SolverConfig& config,
                      const GridField* initial = nullptr);

/// Applies the normalization in place and returns it. Throws
/// DegenerateNormalization when |f(1) - f(0)| < 1e-12.
Normalization normalize(Solution& solution);

/// ||f_zbar - mu f_z - nu conj(f_z)||_2 / ||f_z||_2 over the whole grid.
double linear_residual(const GridField& fz, const GridField& fzbar, const GridField& mu,
                       const GridField& nu);

/// Radius of the smallest origin-centred disk containing every nonzero sample.
double support_radius_of(const GridField& mu, const GridField& nu);

}  // namespace beltrami

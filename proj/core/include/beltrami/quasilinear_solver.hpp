#pragma once

#include <memory>
#include <vector>

#include "beltrami/coefficients.hpp"
#include "beltrami/linear_solver.hpp"

namespace beltrami {

struct RungSummary {
  int n = 0;
  int outer_steps = 0;
  bool outer_converged = false;
  int inner_steps = 0;           // summed over outer steps
  double last_outer_update = 0;  // sup-norm on the largest compact
  double residual = 0.0;         // relative L2 residual of the rung equation
  double k_max = 0.0;            // max |mu_n|+|nu_n| on the frozen grids
  double k_bound = 0.0;          // (n-1)/(n+1)
  double effective_max = 0.0;    // max |mu_n + (conj(f_z)/f_z) nu_n| over outer steps
  double damping = 1.0;          // outer damping in force when the rung finished
  /// d_j(n) = sup over K_j of |f^(n) - f^(prev)|, one per compact margin; empty on the first rung.
  std::vector<double> distances;
};

struct LadderReport {
  std::vector<double> margins;
  std::vector<RungSummary> rungs;
  int final_rung = 0;
  /// True once every d_j(n) fell below the ladder tolerance.
  bool converged = false;
  /// Rungs ran out before the ladder tolerance was met; the last solution is still returned.
  bool exhausted = false;
};

struct QuasilinearResult {
  Solution solution;
  LadderReport report;
};

/// Truncation used for each rung: by maximal dilatation, or by a majorant Q(z).
struct LadderTruncation {
  TruncationPredicate::Mode mode = TruncationPredicate::Mode::kByK;
  std::shared_ptr<const Expression> q;

  TruncationPredicate at(int n) const;
};

/// (mu_n(z, f(z)), nu_n(z, f(z))) sampled at every node of f's grid.
struct FrozenCoefficients {
  GridField mu;
  GridField nu;
};

/// With subsamples > 1 each node instead carries the average over an
/// s x s block of sub-points of its cell, with w = bilinear interpolant of f.
FrozenCoefficients frozen_coefficient_fields(const CoefficientSpec& spec, const GridField& f, int rung,
                                             const LadderTruncation& truncation = {}, int subsamples = 1);

/// Nodes at distance >= margin from the box boundary and, when support_radius
/// is positive, from the circle |z| = support_radius.
std::vector<std::size_t> compact_nodes(const GridField& geometry, double margin,
                                       double support_radius = 0.0);

/// max |f - g| over compact_nodes(f, margin, support_radius). Throws
/// EmptyCompact when margin >= L or no node remains.
double compact_sup_distance(const GridField& f, const GridField& g, double margin,
                            double support_radius = 0.0);

/// Ladder over config.ladder with a freeze-w outer iteration per rung. Each
/// rung warm-starts from the previous limit. Throws OuterDivergence after five
/// consecutive growing outer updates.
QuasilinearResult solve_quasilinear(const CoefficientSpec& spec, const SolverConfig& config,
                                    const LadderTruncation& truncation = {});

}  // namespace beltrami

#include "beltrami/quasilinear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "beltrami/dilatation.hpp"
#include "beltrami/errors.hpp"
#include "beltrami/parallel.hpp"

namespace beltrami {

TruncationPredicate LadderTruncation::at(int n) const {
  if (mode == TruncationPredicate::Mode::kByQ) {
    if (!q) throw ParamOutOfRange("BY_Q truncation needs a majorant Q");
    return TruncationPredicate::by_q(q, n);
  }
  return TruncationPredicate::by_k(n);
}

FrozenCoefficients frozen_coefficient_fields(const CoefficientSpec& spec, const GridField& f, int rung,
                                             const LadderTruncation& truncation, int subsamples) {
  if (subsamples < 1) throw ParamOutOfRange("coefficient subsamples must be >= 1");
  const CoefficientSpec rung_spec = spec.truncated(truncation.at(rung));
  const int n = f.n();
  const double h = f.h();
  const int s = subsamples;
  FrozenCoefficients out{GridField(n, f.half_side()), GridField(n, f.half_side())};
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    for (int k = 0; k < n; ++k) {
      const std::size_t i = j * n + k;
      if (s == 1) {
        CoefficientValues v = rung_spec.evaluate(f.z_at(i), f[i]);
        out.mu[i] = v.mu;
        out.nu[i] = v.nu;
        continue;
      }
      cplx mu{}, nu{};
      for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) {
          const cplx z = f.z_at(i) + cplx{((b + 0.5) / s - 0.5) * h, ((a + 0.5) / s - 0.5) * h};
          CoefficientValues v = rung_spec.evaluate(z, f.interpolate(z));
          mu += v.mu;
          nu += v.nu;
        }
      out.mu[i] = mu / static_cast<double>(s * s);
      out.nu[i] = nu / static_cast<double>(s * s);
    }
  });
  return out;
}

std::vector<std::size_t> compact_nodes(const GridField& geometry, double margin, double support_radius) {
  const double L = geometry.half_side();
  if (!(margin < L)) throw EmptyCompact("compact margin must be smaller than the box half-side");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < geometry.size(); ++i) {
    const cplx z = geometry.z_at(i);
    const double to_box = L - std::max(std::abs(z.real()), std::abs(z.imag()));
    if (to_box < margin) continue;
    if (support_radius > 0.0 && std::abs(std::abs(z) - support_radius) < margin) continue;
    out.push_back(i);
  }
  if (out.empty()) throw EmptyCompact("no grid node lies in the requested compact");
  return out;
}

double compact_sup_distance(const GridField& f, const GridField& g, double margin, double support_radius) {
  if (!f.same_geometry(g)) throw InvalidGrid("grid geometry mismatch");
  double d = 0.0;
  for (std::size_t i : compact_nodes(f, margin, support_radius)) d = std::max(d, std::abs(f[i] - g[i]));
  return d;
}

namespace {

Solution identity_solution(int n, double L) {
  GridField one(n, L);
  for (std::size_t i = 0; i < one.size(); ++i) one[i] = 1.0;
  return Solution{GridField::identity(n, L), std::move(one), GridField(n, L), GridField(n, L), 0, {}, {}, 0.0, 0.0};
}

void blend(GridField& into, const GridField& from, double lambda) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i] = (1.0 - lambda) * from[i] + lambda * into[i];
}

double effective_coefficient_max(const FrozenCoefficients& c, const GridField& fz) {
  double m = 0.0;
  for (std::size_t i = 0; i < fz.size(); ++i) {
    const double a = std::abs(fz[i]);
    const cplx ratio = a > 0.0 ? std::conj(fz[i]) / fz[i] : cplx{};
    m = std::max(m, std::abs(effective_single_coefficient(c.mu[i], c.nu[i], ratio)));
  }
  return m;
}

}  // namespace

QuasilinearResult solve_quasilinear(const CoefficientSpec& spec, const SolverConfig& config,
                                    const LadderTruncation& truncation) {
  config.validate();
  const int grid_n = config.grid_n;
  const double L = config.box_half_side;
  if (spec.support_radius() > 0.5 * L)
    throw SupportTooLarge("coefficient support radius exceeds half the box half-side");

  const double R = spec.support_radius();
  const double outer_margin = config.compact_margins.back();
  const bool frozen_once = !spec.depends_on_w();

  LadderReport report;
  report.margins = config.compact_margins;
  Solution current = identity_solution(grid_n, L);
  GridField previous_rung = current.f;
  bool have_previous = false;

  for (int rung : config.ladder) {
    RungSummary rs;
    rs.n = rung;
    rs.k_bound = rung_k_bound(rung);
    double lambda = config.outer_damping;
    double prev_update = std::numeric_limits<double>::infinity();
    int growth = 0;

    for (int m = 1; m <= config.max_outer; ++m) {
      FrozenCoefficients frozen = frozen_coefficient_fields(spec, current.f, rung, truncation, config.coefficient_subsamples);
      rs.effective_max = std::max(rs.effective_max, effective_coefficient_max(frozen, current.fz));
      LinearProblem problem = LinearProblem::from_fields(std::move(frozen.mu), std::move(frozen.nu));
      rs.k_max = std::max(rs.k_max, problem.k_bound);

      Solution next = solve_linear(problem, config, &current.omega);
      rs.inner_steps += next.trace.steps;
      if (lambda < 1.0) {
        blend(next.f, current.f, lambda);
        blend(next.fz, current.fz, lambda);
        blend(next.fzbar, current.fzbar, lambda);
        blend(next.omega, current.omega, lambda);
      }
      const double update = compact_sup_distance(next.f, current.f, outer_margin, R);
      current = std::move(next);
      current.rung = rung;
      rs.outer_steps = m;
      rs.last_outer_update = update;
      if (frozen_once || update < config.outer_tol) {
        rs.outer_converged = true;
        break;
      }
      if (update > prev_update) {
        lambda *= 0.5;
        if (++growth >= 5)
          throw OuterDivergence("outer updates grew for 5 consecutive steps at rung " + std::to_string(rung));
      } else {
        growth = 0;
      }
      prev_update = update;
    }
    rs.damping = lambda;

    FrozenCoefficients final_coeffs = frozen_coefficient_fields(spec, current.f, rung, truncation, config.coefficient_subsamples);
    rs.residual = linear_residual(current.fz, current.fzbar, final_coeffs.mu, final_coeffs.nu);
    current.residual_rel_l2 = rs.residual;
    current.support_radius = R;

    bool settled = have_previous;
    if (have_previous) {
      for (double margin : config.compact_margins) {
        const double d = compact_sup_distance(current.f, previous_rung, margin, R);
        rs.distances.push_back(d);
        settled = settled && d < config.ladder_tol;
      }
    }
    report.rungs.push_back(std::move(rs));
    report.final_rung = rung;
    if (settled) {
      report.converged = true;
      break;
    }
    previous_rung = current.f;
    have_previous = true;
  }
  report.exhausted = !report.converged;
  return {std::move(current), std::move(report)};
}

}  // namespace beltrami

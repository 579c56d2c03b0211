#include "beltrami/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "beltrami/errors.hpp"
#include "beltrami/expression.hpp"
#include "beltrami/transforms.hpp"

namespace beltrami {

void SolverConfig::validate() const {
  GridField probe(grid_n, box_half_side);  // throws InvalidGrid
  (void)probe;
  if (ladder.empty()) throw ParamOutOfRange("ladder must not be empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 1) throw ParamOutOfRange("ladder rungs must be >= 1");
    if (i > 0 && ladder[i] <= ladder[i - 1]) throw ParamOutOfRange("ladder must be strictly increasing");
  }
  for (double t : {inner_tol, residual_tol, outer_tol, ladder_tol})
    if (!(t > 0.0)) throw ParamOutOfRange("tolerances must be positive");
  if (coefficient_subsamples < 1) throw ParamOutOfRange("coefficient subsamples must be >= 1");
  if (max_inner < 1 || max_outer < 1) throw ParamOutOfRange("iteration caps must be >= 1");
  if (!(outer_damping > 0.0 && outer_damping <= 1.0))
    throw ParamOutOfRange("outer damping must lie in (0, 1]");
  if (compact_margins.empty()) throw ParamOutOfRange("at least one compact margin is required");
  for (std::size_t i = 0; i < compact_margins.size(); ++i) {
    if (!(compact_margins[i] > 0.0)) throw ParamOutOfRange("compact margins must be positive");
    if (i > 0 && compact_margins[i] >= compact_margins[i - 1])
      throw ParamOutOfRange("compact margins must be decreasing");
  }
}

LinearProblem LinearProblem::from_fields(GridField mu, GridField nu) {
  if (!mu.same_geometry(nu)) throw InvalidGrid("mu and nu grids differ in geometry");
  double k = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) k = std::max(k, std::abs(mu[i]) + std::abs(nu[i]));
  LinearProblem p{std::move(mu), std::move(nu), k};
  p.validate();
  return p;
}

void LinearProblem::validate() const {
  if (!mu.same_geometry(nu)) throw InvalidGrid("mu and nu grids differ in geometry");
  if (!mu.all_finite() || !nu.all_finite()) throw InvalidGrid("coefficient grids must be finite");
  if (!(k_bound < 1.0))
    throw NotContractive("coefficient bound |mu|+|nu| = " + std::to_string(k_bound) + " is not < 1");
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (std::abs(mu[i]) + std::abs(nu[i]) > k_bound + 1e-12)
      throw NotContractive("coefficient grid exceeds the declared bound");
  check_transform_support(mu);
  check_transform_support(nu);
}

GridField picard_step(const GridField& omega, const LinearProblem& problem) {
  GridField s = beurling_transform(omega);
  GridField out(omega.n(), omega.half_side());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const cplx fz = 1.0 + s[i];
    out[i] = problem.mu[i] * fz + problem.nu[i] * std::conj(fz);
  }
  return out;
}

double linear_residual(const GridField& fz, const GridField& fzbar, const GridField& mu,
                       const GridField& nu) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < fz.size(); ++i) {
    num += std::norm(fzbar[i] - mu[i] * fz[i] - nu[i] * std::conj(fz[i]));
    den += std::norm(fz[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

double support_radius_of(const GridField& mu, const GridField& nu) {
  double r = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu[i] != cplx{} || nu[i] != cplx{}) r = std::max(r, std::abs(mu.z_at(i)));
  return r;
}

Normalization normalize(Solution& solution) {
  const cplx f0 = solution.f.interpolate(0.0);
  const cplx f1 = solution.f.interpolate(1.0);
  const double d = std::abs(f1 - f0);
  if (!(d >= 1e-12)) throw DegenerateNormalization("|f(1) - f(0)| is below 1e-12");
  const double s = 1.0 / d;
  for (std::size_t i = 0; i < solution.f.size(); ++i) {
    solution.f[i] = s * (solution.f[i] - f0);
    solution.fz[i] *= s;
    solution.fzbar[i] *= s;
  }
  return {f0, s, arg_0_2pi(solution.f.interpolate(1.0))};
}

Solution solve_linear(const LinearProblem& problem, const SolverConfig& config,
                      const GridField* initial) {
  problem.validate();
  const int n = problem.mu.n();
  const double L = problem.mu.half_side();

  GridField omega = initial ? *initial : GridField(n, L);
  if (!omega.same_geometry(problem.mu)) throw InvalidGrid("initial density has a different geometry");

  IterationTrace trace;
  for (int step = 1; step <= config.max_inner; ++step) {
    GridField next = picard_step(omega, problem);
    const double scale = std::max(next.l2_norm(), omega.l2_norm());
    const double update = scale > 0.0 ? (next - omega).l2_norm() / scale : 0.0;
    if (!std::isfinite(update)) throw MaxIterations("non-finite update in fixed-point iteration");
    if (!trace.update_norms.empty() && trace.update_norms.back() > 0.0)
      trace.ratios.push_back(update / trace.update_norms.back());
    trace.update_norms.push_back(update);
    trace.steps = step;
    omega = std::move(next);
    if (update < config.inner_tol) {
      trace.converged = true;
      break;
    }
  }
  if (!trace.converged)
    throw MaxIterations("fixed-point update " + std::to_string(trace.update_norms.back()) +
                        " still above tolerance after " + std::to_string(config.max_inner) + " steps");

  // d(z + T omega) = 1 + S omega and dbar(z + T omega) = omega.
  GridField f = GridField::identity(n, L) + cauchy_transform(omega);
  GridField fz = beurling_transform(omega);
  for (std::size_t i = 0; i < fz.size(); ++i) fz[i] += 1.0;
  GridField fzbar = omega;
  Solution sol{std::move(f), std::move(fz), std::move(fzbar), std::move(omega), 0, std::move(trace),
               {}, 0.0, support_radius_of(problem.mu, problem.nu)};
  sol.normalization = normalize(sol);
  sol.residual_rel_l2 = linear_residual(sol.fz, sol.fzbar, problem.mu, problem.nu);
  return sol;
}

}  // namespace beltrami

#include <doctest.h>

#include <cmath>

#include "beltrami/coefficients.hpp"
#include "beltrami/dilatation.hpp"
#include "beltrami/errors.hpp"
#include "beltrami/quasilinear_solver.hpp"
#include "beltrami/verify.hpp"

using namespace beltrami;

TEST_CASE("compact sup distance") {
  const GridField f = GridField::identity(64, 2.0);
  CHECK(compact_sup_distance(f, f, 0.5) == 0.0);

  GridField g = f;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += 0.1;
  CHECK(compact_sup_distance(g, f, 0.5) == doctest::Approx(0.1));

  // identity vs z + 0.5 conj(z) chi_D
  GridField h = GridField::sample(64, 2.0, [](cplx z) { return std::abs(z) < 1.0 ? z + 0.5 * std::conj(z) : z; });
  for (double margin : {0.25, 0.5, 1.0, 1.5}) {
    double expected = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const cplx z = f.z_at(i);
      if (2.0 - std::max(std::abs(z.real()), std::abs(z.imag())) < margin) continue;
      if (std::abs(z) < 1.0) expected = std::max(expected, 0.5 * std::abs(z));
    }
    CHECK(compact_sup_distance(h, f, margin) == doctest::Approx(expected));
  }
  // margin 1.5 keeps only |x|,|y| <= 0.5: max 0.5 |z| at a corner
  CHECK(compact_sup_distance(h, f, 1.5) == doctest::Approx(0.5 * std::abs(cplx{0.5, 0.5})));

  CHECK_THROWS_AS(compact_sup_distance(f, f, 2.0), EmptyCompact);
  CHECK_THROWS_AS(compact_sup_distance(f, GridField::identity(32, 2.0), 0.5), InvalidGrid);

  const auto nodes = compact_nodes(f, 0.25, 1.0);
  for (std::size_t i : nodes) CHECK(std::abs(std::abs(f.z_at(i)) - 1.0) >= 0.25);
}

TEST_CASE("frozen coefficient fields") {
  const auto sec4 = builtin_catalog("paper-example-sec4", {});
  const GridField id = GridField::identity(256, 4.0);

  SUBCASE("w-independent spec ignores f") {
    const auto cd = builtin_catalog("constant-disk", {0.5});
    const auto a = frozen_coefficient_fields(cd, id, 8);
    const auto b = frozen_coefficient_fields(cd, id * cplx{3.0, 1.0}, 8);
    CHECK((a.mu - b.mu).sup_norm() == 0.0);
  }
  SUBCASE("sec4 with f = id at z = 0.25") {
    const auto c = frozen_coefficient_fields(sec4, id, 64);
    const std::size_t i = static_cast<std::size_t>(128) * 256 + 128 + 8;
    REQUIRE(std::abs(id.z_at(i) - cplx{0.25}) < 1e-15);
    CHECK(c.mu[i].real() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("rung 2 bound") {
    const auto c = frozen_coefficient_fields(sec4, id, 2);
    double m = 0.0;
    for (std::size_t i = 0; i < id.size(); ++i) m = std::max(m, std::abs(c.mu[i]) + std::abs(c.nu[i]));
    CHECK(m <= 1.0 / 3.0 + 1e-15);
  }
}

TEST_CASE("w-independent spec reduces to the linear solver") {
  SolverConfig cfg;
  cfg.grid_n = 128;
  const auto spec = builtin_catalog("constant-disk", {0.5});
  const QuasilinearResult q = solve_quasilinear(spec, cfg);
  for (const auto& r : q.report.rungs) CHECK(r.outer_steps == 1);
  CHECK(q.report.converged);

  GridField mu(128, 4.0), nu(128, 4.0);
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = spec.evaluate(mu.z_at(i), 0.0).mu;
  const Solution lin = solve_linear(LinearProblem::from_fields(mu, nu), cfg);
  // both stop at the inner tolerance from different starting densities
  const double k = 0.5;
  CHECK((q.solution.f - lin.f).sup_norm() <= cfg.inner_tol * k / (1.0 - k));
}

TEST_CASE("toy quasilinear spec against a damped reference iteration") {
  SolverConfig cfg;
  cfg.grid_n = 128;
  const auto spec = builtin_catalog("toy-quasilinear", {0.3});
  const QuasilinearResult q = solve_quasilinear(spec, cfg);
  CHECK(q.report.converged);
  const auto& last = q.report.rungs.back();
  CHECK(last.outer_converged);
  CHECK(residual(q.solution, spec).rel_l2 <= 1e-3);

  // reference: f <- (1 - lambda) f + lambda solve_linear(mu(z, f)), untruncated, cold starts
  const double lambda = 0.5;
  GridField f = GridField::identity(128, 4.0);
  std::vector<double> updates;
  for (int m = 0; m < 200; ++m) {
    GridField mu(128, 4.0), nu(128, 4.0);
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = spec.evaluate(mu.z_at(i), f[i]).mu;
    const Solution s = solve_linear(LinearProblem::from_fields(mu, nu), cfg);
    GridField next = (1.0 - lambda) * f + lambda * s.f;
    updates.push_back((next - f).sup_norm());
    f = std::move(next);
    if (updates.back() < 1e-10) break;
  }
  CHECK(updates.back() < 1e-10);
  CHECK((q.solution.f - f).sup_norm() <= 1e-5);

  // outer updates of the reference decay geometrically
  for (std::size_t k = 2; k + 1 < updates.size() && updates[k + 1] > 1e-12; ++k) CHECK(updates[k + 1] < updates[k]);
}

TEST_CASE("sec4 at n = 128") {
  SolverConfig cfg;
  cfg.grid_n = 128;
  const auto spec = builtin_catalog("paper-example-sec4", {});
  const QuasilinearResult q = solve_quasilinear(spec, cfg);
  CHECK(q.report.converged);
  CHECK_FALSE(q.report.exhausted);
  for (const auto& r : q.report.rungs) {
    CHECK(r.k_max <= r.k_bound + 1e-12);
    CHECK(r.effective_max <= r.k_bound + 1e-12);
    for (double d : r.distances) CHECK(std::isfinite(d));
  }
  CHECK(residual(q.solution, spec).rel_l2 <= 1e-2);
  CHECK(jacobian_stats(q.solution).fraction_nonpositive <= 0.01);
}

TEST_CASE("ladder exhaustion is flagged, not thrown") {
  SolverConfig cfg;
  cfg.grid_n = 64;
  cfg.ladder = {2, 4};
  const QuasilinearResult q = solve_quasilinear(builtin_catalog("paper-example-sec4", {}), cfg);
  CHECK(q.report.exhausted);
  CHECK_FALSE(q.report.converged);
  CHECK(q.report.final_rung == 4);
  CHECK(q.report.rungs.size() == 2);
}

TEST_CASE("BY_Q truncation and support precondition") {
  SolverConfig cfg;
  cfg.grid_n = 64;
  cfg.ladder = {4, 8};
  LadderTruncation t;
  t.mode = TruncationPredicate::Mode::kByQ;
  CHECK_THROWS_AS(t.at(4), ParamOutOfRange);
  t.q = std::make_shared<const Expression>(parse_majorant_expr("1/r"));
  CHECK_NOTHROW(solve_quasilinear(builtin_catalog("paper-example-sec4-phase2", {}), cfg, t));

  cfg.box_half_side = 1.5;
  CHECK_THROWS_AS(solve_quasilinear(builtin_catalog("constant-disk", {0.5}), cfg), SupportTooLarge);
}

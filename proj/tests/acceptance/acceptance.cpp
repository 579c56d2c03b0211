// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "beltrami/coefficients.hpp"
#include "beltrami/dilatation.hpp"
#include "beltrami/errors.hpp"
#include "beltrami/linear_solver.hpp"
#include "beltrami/quasilinear_solver.hpp"
#include "beltrami/transforms.hpp"
#include "beltrami/verify.hpp"
#include "beltrami_cli/commands.hpp"

using namespace beltrami;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

int failures = 0;

void criterion(int id, const char* name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "[exception: " << e.what() << "] ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("criterion %d [PRIMARY] %s: %s (%s) %.2fs\n", id, name, o.pass ? "PASS" : "FAIL",
              o.detail.str().c_str(), secs);
  std::fflush(stdout);
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GridField disk_field(int n, double L, cplx k) {
  return GridField::sample(n, L, [k](cplx z) { return std::abs(z) < 1.0 ? k : cplx{}; });
}

cplx closed_form(cplx z) { return std::abs(z) <= 1.0 ? z + 0.5 * std::conj(z) : z + 0.5 / z; }

Solution from_map(int n, double L, const std::function<cplx(cplx)>& f, double support) {
  const GridField g = GridField::sample(n, L, f);
  DerivativePair d = derivatives(g);
  return Solution{g, std::move(d.fz), std::move(d.fzbar), GridField(n, L), 0, {}, {}, 0.0, support};
}

Solution exact_map(int n, double L, const std::function<cplx(cplx)>& f, cplx fz, cplx fzbar, double support) {
  return Solution{GridField::sample(n, L, f), GridField::sample(n, L, [fz](cplx) { return fz; }),
                  GridField::sample(n, L, [fzbar](cplx) { return fzbar; }), GridField(n, L), 0, {}, {}, 0.0,
                  support};
}

std::size_t node_index(const GridField& g, cplx z) {
  const int k = static_cast<int>(std::lround((z.real() + g.half_side()) / g.h()));
  const int j = static_cast<int>(std::lround((z.imag() + g.half_side()) / g.h()));
  return static_cast<std::size_t>(j) * g.n() + k;
}

std::optional<QuasilinearResult> sec4_256;

void example_constants(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = cli::run_example(0);
  const double secs = since(t0);
  const double limit = rep.q_divergence.limit.value_or(std::nan(""));
  o.detail << "disk integral " << rep.disk_integral << " (rel err " << rep.disk_integral_rel_error << "), I limit "
           << limit << " " << to_string(rep.q_divergence.verdict) << ", Q1=1 " << to_string(rep.q1_divergence.verdict);
  o.require(std::abs(rep.disk_integral / (2.0 * oracle::kPi) - 1.0) <= 1e-2, "disk integral");
  o.require(std::abs(limit - 0.5) <= 1e-4, "divergence limit");
  o.require(rep.q_divergence.verdict == DivergenceVerdict::kConvergent, "Q verdict");
  o.require(rep.q1_divergence.verdict == DivergenceVerdict::kDivergent, "Q1 verdict");
  o.require(secs < 10.0, "runtime");
}

void closed_form_solver(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 256;
  const double L = 4.0;
  const GridField zero(n, L), k = disk_field(n, L, 0.5);
  for (bool nu_only : {false, true}) {
    const Solution s = solve_linear(nu_only ? LinearProblem::from_fields(zero, k) : LinearProblem::from_fields(k, zero),
                                    SolverConfig{});
    double err = 0.0;
    for (std::size_t i = 0; i < s.f.size(); ++i) {
      const cplx z = s.f.z_at(i);
      if (std::abs(std::abs(z) - 1.0) < 0.1 || std::abs(z) > 2.0) continue;
      err = std::max(err, std::abs(s.f[i] - closed_form(z) / 1.5));
    }
    // measured contraction: geometric mean of update ratios after the transient
    double log_sum = 0.0;
    int count = 0;
    for (std::size_t r = 2; r < s.trace.ratios.size(); ++r)
      if (s.trace.update_norms[r] > 1e-13) {
        log_sum += std::log(s.trace.ratios[r]);
        ++count;
      }
    const double ratio = count ? std::exp(log_sum / count) : std::nan("");
    o.detail << (nu_only ? "nu" : "mu") << ": sup err " << err << ", ratio " << ratio << "; ";
    o.require(s.trace.converged, "converged");
    o.require(err <= 1e-2, "sup error");
    o.require(std::abs(ratio - 0.5) <= 0.05, "contraction ratio");
  }
  o.require(since(t0) < 30.0, "runtime");
}

void transform_oracles(Outcome& o) {
  const GridField w = GridField::sample(512, 4.0, [](cplx z) { return cplx{0.7, -0.2} * oracle::bump(z - cplx{0.3, 0.1}); });
  const DerivativePair d = derivatives(cauchy_transform(w));
  const double dbar_err = (d.fzbar - w).l2_norm() / w.l2_norm();

  // compactly supported, with zero discrete mean
  const GridField m1 = GridField::sample(128, 4.0, [](cplx z) {
    return oracle::bump(z - cplx{0.2, -0.1}) + cplx{0.0, 1.3} * oracle::bump(z + cplx{0.3, 0.2});
  });
  const GridField m0 = GridField::sample(128, 4.0, [](cplx z) { return oracle::bump(z); });
  cplx s1{}, s0{};
  for (std::size_t i = 0; i < m1.size(); ++i) {
    s1 += m1[i];
    s0 += m0[i];
  }
  const GridField m = m1 - (s1 / s0) * m0;
  const double iso = beurling_transform(m).l2_norm() / m.l2_norm();

  o.detail << "dbar T err " << dbar_err << ", |S|/|w| - 1 = " << iso - 1.0 << "; disk probes";
  o.require(dbar_err <= 1e-6, "dbar T = id");
  o.require(std::abs(iso - 1.0) <= 1e-8, "isometry");

  const auto probes = oracle::disk_probes();
  std::vector<cplx> exact_t, exact_s;
  for (cplx z : probes) {
    exact_t.push_back(oracle::cauchy_disk(z));
    exact_s.push_back(oracle::beurling_disk(z));
  }
  double prev[4] = {INFINITY, INFINITY, INFINITY, INFINITY};
  for (int n : {128, 256, 512}) {
    const GridField chi = GridField::sample_averaged(n, 8.0, 8, [](cplx z) { return oracle::disk_indicator(z); });
    const GridField t = cauchy_transform(chi), s = beurling_transform(chi);
    double max_t = 0, max_s = 0, rms_t = 0, rms_s = 0;
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const std::size_t i = node_index(t, probes[p]);
      const double et = std::abs(t[i] - exact_t[p]), es = std::abs(s[i] - exact_s[p]);
      max_t = std::max(max_t, et);
      max_s = std::max(max_s, es);
      rms_t += et * et;
      rms_s += es * es;
    }
    rms_t = std::sqrt(rms_t / probes.size());
    rms_s = std::sqrt(rms_s / probes.size());
    o.detail << " n=" << n << " T max " << max_t << " S max " << max_s;
    const double cur[4] = {max_t, max_s, rms_t, rms_s};
    for (int q = 0; q < 4; ++q) {
      o.require(cur[q] < prev[q], "refinement at n=" + std::to_string(n));
      prev[q] = cur[q];
    }
    if (n == 512) {
      o.require(max_t <= 5e-2, "T probes");
      o.require(max_s <= 5e-2, "S probes");
    }
  }
}

void quasilinear_run(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const CoefficientSpec spec = builtin_catalog("paper-example-sec4", {});
  SolverConfig cfg;
  cfg.grid_n = 256;
  sec4_256 = solve_quasilinear(spec, cfg);
  const auto& r = *sec4_256;
  const double res = residual(r.solution, spec).rel_l2;
  const auto jac = jacobian_stats(r.solution, 1.0);
  const auto inj = injectivity_check(r.solution);
  o.detail << "final rung " << r.report.final_rung << (r.report.converged ? " converged" : " not converged")
           << ", residual " << res << ", J>0 on " << 100.0 * (1.0 - jac.fraction_nonpositive) << "%, injectivity "
           << (inj.pass() ? "PASS" : "FAIL") << " (" << inj.orientation_flips << " flips, " << inj.overlapping_cells
           << " overlapping cells)";
  o.require(r.report.final_rung <= 64, "ladder bound");
  o.require(res <= 1e-2, "residual");
  o.require(1.0 - jac.fraction_nonpositive >= 0.99, "Jacobian");
  o.require(inj.pass(), "injectivity");

  std::vector<const RungSummary*> with_d;
  for (const auto& rung : r.report.rungs)
    if (!rung.distances.empty()) with_d.push_back(&rung);
  bool decreasing = with_d.size() >= 3;
  if (decreasing)
    for (std::size_t j = 0; j < r.report.margins.size(); ++j)
      for (std::size_t k = with_d.size() - 2; k < with_d.size(); ++k)
        decreasing = decreasing && with_d[k]->distances[j] < with_d[k - 1]->distances[j];
  o.detail << ", d_j over the last rungs:";
  for (std::size_t k = with_d.size() >= 3 ? with_d.size() - 3 : 0; k < with_d.size(); ++k)
    o.detail << " n=" << with_d[k]->n << " d0=" << with_d[k]->distances.front();
  o.require(decreasing, "d_j decreasing");
  o.require(since(t0) < 300.0, "runtime");
}

void dilatation_identities(Outcome& o) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0), ang(0.0, 2.0 * oracle::kPi);
  double worst_kip = 0.0;
  std::size_t kt_fail = 0;
  int kip_samples = 0;
  while (kip_samples < 10000) {
    const cplx fz{3 * u(rng), 3 * u(rng)}, fzbar{3 * u(rng), 3 * u(rng)};
    if (std::abs(std::abs(fz) - std::abs(fzbar)) < 1e-6) continue;
    const double a = inner_dilatation_p(fz, fzbar, 2.0), b = map_dilatation(fz, fzbar);
    worst_kip = std::max(worst_kip, std::abs(a - b));
    ++kip_samples;
  }
  int kt_samples = 0;
  while (kt_samples < 10000) {
    const cplx mu = std::polar(0.99 * std::abs(u(rng)), ang(rng));
    const cplx nu = std::polar((0.99 - std::abs(mu)) * std::abs(u(rng)), ang(rng));
    const cplx z{u(rng), u(rng)}, z0{u(rng), u(rng)};
    if (z == z0) continue;
    const double theta = ang(rng);
    if (tangential_dilatation(mu, nu, z, z0, theta) > maximal_dilatation(mu, nu) * (1.0 + 1e-12)) ++kt_fail;
    ++kt_samples;
  }
  o.detail << "max |K_I2 - K_map| " << worst_kip << ", K^T > K on " << kt_fail << " samples; truncation:";
  o.require(worst_kip == 0.0, "K_I2 = K_map");
  o.require(kt_fail == 0, "K^T <= K");

  const CoefficientSpec spec = builtin_catalog("paper-example-sec4", {});
  for (int n : {2, 4, 8}) {
    const CoefficientSpec t = spec.truncated(TruncationPredicate::by_k(n));
    double worst = 0.0;
    for (int a = 0; a < 41; ++a)
      for (int b = 0; b < 41; ++b) {
        const cplx z{-1.0 + a / 20.0, -1.0 + b / 20.0};
        if (std::abs(z) > 1.0 || spec.is_singular_point(z)) continue;
        for (double wr : {0.0, 0.05, 0.3, 1.0, 10.0, 100.0})
          for (int p = 0; p < 8; ++p) {
            const auto v = t.evaluate_unchecked(z, std::polar(wr, p * oracle::kPi / 4));
            worst = std::max(worst, std::abs(v.mu) + std::abs(v.nu));
          }
      }
    o.detail << " n=" << n << " max " << worst;
    o.require(worst <= rung_k_bound(n) + 1e-12, "ellipticity at n=" + std::to_string(n));
  }
}

void inverse_oracle(Outcome& o) {
  const Solution s = exact_map(128, 2.0, [](cplx z) { return z + 0.5 * std::conj(z); }, 1.0, 0.5, 1.0);
  const InverseReport r = inverse_dilatation_audit(s, 2.0, MajorantSpec::constant(3.0), {});
  const double rel_lo = std::abs(r.kip_min / 3.0 - 1.0), rel_hi = std::abs(r.kip_max / 3.0 - 1.0);
  const double integral_rel = std::abs(r.integral_kip / (3.0 * r.window_area) - 1.0);
  o.detail << "K_I2 in [" << r.kip_min << ", " << r.kip_max << "], integral/area " << r.integral_kip / r.window_area;
  o.require(std::max(rel_lo, rel_hi) <= 1e-3, "K_I2 = 3");
  o.require(integral_rel <= 1e-2, "integral");
}

void continuity_bound(Outcome& o) {
  const CoefficientSpec spec = builtin_catalog("paper-example-sec4", {});
  SolverConfig cfg;
  cfg.grid_n = 128;
  const QuasilinearResult coarse = solve_quasilinear(spec, cfg);
  if (!sec4_256) {
    cfg.grid_n = 256;
    sec4_256 = solve_quasilinear(spec, cfg);
  }
  const double q_l1 = 2.0 * oracle::kPi;
  const ContinuityFit a = continuity_modulus_fit(coarse.solution, q_l1, 0.5);
  const ContinuityFit b = continuity_modulus_fit(sec4_256->solution, q_l1, 0.5);
  const double change = b.c / a.c - 1.0;
  o.detail << "compact |z| <= " << a.compact_radius << ", C(128) " << a.c << ", C(256) " << b.c << ", change "
           << 100.0 * change << "%";
  o.require(std::isfinite(a.c) && std::isfinite(b.c), "finite");
  o.require(std::abs(change) <= 0.2, "stability");
}

void negative_controls(Outcome& o) {
  const CoefficientSpec disk = builtin_catalog("constant-disk", {0.5});
  const Solution corrupted =
      from_map(256, 4.0, [](cplx z) { return (std::abs(z) < 1.0 ? 1.1 : 1.0) * (z + 0.5 * std::conj(z)); }, 1.0);
  const double res = residual(corrupted, disk).rel_l2;
  const Solution conj = exact_map(64, 2.0, [](cplx z) { return std::conj(z); }, 0.0, 1.0, 1.0);
  const double frac = jacobian_stats(conj).fraction_nonpositive;
  const auto sq = injectivity_check(GridField::sample(64, 2.0, [](cplx z) { return z * z; }), Annulus{0.5, 1.5});
  bool rejected = true;
  for (double k : {1.0, 1.5}) {
    const GridField zero(64, 4.0);
    try {
      (void)solve_linear(LinearProblem::from_fields(disk_field(64, 4.0, k), zero), SolverConfig{});
      rejected = false;
    } catch (const NotContractive&) {
    }
    try {
      (void)LinearProblem::from_fields(disk_field(64, 4.0, 0.5 * k), disk_field(64, 4.0, 0.5 * k));
      rejected = false;
    } catch (const NotContractive&) {
    }
  }
  o.detail << "corrupted residual " << res << ", conj J fraction " << frac << ", z^2 injectivity "
           << (sq.pass() ? "PASS" : "FAIL") << ", k >= 1 " << (rejected ? "rejected" : "accepted");
  o.require(res > 1e-1, "corrupted residual");
  o.require(frac == 1.0, "conj Jacobian");
  o.require(!sq.pass(), "z^2 injectivity");
  o.require(rejected, "NotContractive");
}

}  // namespace

int main() {
  criterion(1, "example constants", example_constants);
  criterion(2, "closed-form solver oracle", closed_form_solver);
  criterion(3, "transform oracles", transform_oracles);
  criterion(4, "quasilinear example run", quasilinear_run);
  criterion(5, "dilatation identities", dilatation_identities);
  criterion(6, "inverse audit oracle", inverse_oracle);
  criterion(7, "continuity bound", continuity_bound);
  criterion(8, "negative controls", negative_controls);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

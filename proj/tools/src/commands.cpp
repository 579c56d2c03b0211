#include "beltrami_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "beltrami/dilatation.hpp"
#include "beltrami/quasilinear_solver.hpp"
#include "beltrami_cli/archive.hpp"

namespace beltrami::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct SolveOutcome {
  Solution solution;
  std::optional<LadderReport> ladder;
  std::string mode;
};

Solution solve_linear_spec(const CoefficientSpec& spec, const SolverConfig& cfg) {
  const int n = cfg.grid_n;
  const double L = cfg.box_half_side;
  GridField mu(n, L), nu(n, L);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const cplx z = mu.z_at(i);
    if (spec.is_singular_point(z)) continue;
    CoefficientValues v = spec.evaluate_unchecked(z, z);
    mu[i] = v.mu;
    nu[i] = v.nu;
  }
  Solution s = solve_linear(LinearProblem::from_fields(std::move(mu), std::move(nu)), cfg);
  s.support_radius = spec.support_radius();
  return s;
}

SolveOutcome solve_spec(const CoefficientSpec& spec, const RunConfig& cfg) {
  const bool linear = cfg.mode == "linear" || (cfg.mode == "auto" && !spec.depends_on_w());
  if (linear) {
    if (spec.depends_on_w()) throw ConfigError("linear mode needs coefficients independent of w");
    if (spec.support_radius() > 0.5 * cfg.solver.box_half_side)
      throw SupportTooLarge("coefficient support radius exceeds half the box half-side");
    return {solve_linear_spec(spec, cfg.solver), std::nullopt, "linear"};
  }
  LadderTruncation truncation;
  if (cfg.truncation == "q") {
    truncation.mode = TruncationPredicate::Mode::kByQ;
    truncation.q = std::make_shared<const Expression>(parse_majorant_expr(cfg.truncation_q));
  }
  QuasilinearResult r = solve_quasilinear(spec, cfg.solver, truncation);
  return {std::move(r.solution), std::move(r.report), "quasilinear"};
}

void ensure_out(const RunConfig& cfg) { std::filesystem::create_directories(cfg.out); }

ScalarField scalar_field(const GridField& g, const std::function<double(std::size_t)>& value) {
  ScalarField s{g.n(), g.half_side(), std::vector<double>(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) s.data[i] = value(i);
  return s;
}

void write_heatmap(const std::filesystem::path& path, const ScalarField& s) {
  double lo = kInfinity, hi = -kInfinity;
  for (double v : s.data)
    if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  if (!(hi > lo)) hi = lo + 1.0;
  std::ofstream os(path, std::ios::binary);
  s.write_ppm(os, lo, hi);
}

std::vector<PsiReport> psi_reports(const RunConfig& cfg, const MajorantSpec& q1) {
  std::vector<PsiReport> out;
  const auto ladder = default_divergence_ladder(cfg.audit.delta);
  for (cplx z0 : cfg.probes)
    out.push_back(psi_admissibility(cfg.psi, q1, z0, cfg.audit.delta, cfg.audit.delta, ladder));
  return out;
}

void print_bound(std::ostream& out, const char* name, const BoundCheck& b) {
  out << "  " << name << ": " << (b.passed() ? "PASS" : "FAIL") << " (" << b.samples << " samples, "
      << b.violations << " violations, max excess " << b.max_excess << ")\n";
  if (b.witness)
    out << "    witness z = " << b.witness->z << ", w = " << b.witness->w << ", theta = " << b.witness->theta
        << ", value " << b.witness->value << " > bound " << b.witness->bound << '\n';
}

void write_condition_outputs(const RunConfig& cfg, const ConditionReport& report,
                             const std::vector<PsiReport>& psi, bool violation) {
  ensure_out(cfg);
  if (cfg.write_json) {
    json doc = to_json(report);
    doc["bound_violation"] = violation;
    json p = json::array();
    for (const auto& r : psi) p.push_back(to_json(r));
    doc["psi"] = p;
    write_json(cfg.out / "condition_report.json", doc);
  }
  if (cfg.write_csv) {
    std::ofstream os(cfg.out / "condition_evidence.csv", std::ios::binary);
    write_condition_csv(os, report);
  }
}

}  // namespace

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  const CoefficientSpec spec = resolve_spec(cfg.spec);
  const MajorantSpec q = MajorantSpec::parse(cfg.q, MajorantSpec::Role::kQ);
  const MajorantSpec q1 = MajorantSpec::parse(cfg.q1, MajorantSpec::Role::kQ1);
  const auto psi = psi_reports(cfg, q1);
  ConditionReport report;
  bool violation = false;
  try {
    report = audit_theorem1(spec, q, q1, cfg.probes, cfg.audit);
  } catch (const BoundViolation& e) {
    report = e.report();
    violation = true;
  }
  write_condition_outputs(cfg, report, psi, violation);

  out << "analyze " << spec.label() << " with Q = " << cfg.q << ", Q1 = " << cfg.q1 << '\n';
  print_bound(out, "K <= Q", report.k_bound);
  print_bound(out, "K^T <= Q1", report.kt_bound);
  for (std::size_t k = 0; k < report.probes.size(); ++k) {
    const auto& p = report.probes[k];
    out << "  z0 = " << p.z0 << ": Q divergence " << to_string(p.q_divergence.verdict) << ", Q1 divergence "
        << to_string(p.q1_divergence.verdict) << ", Q1 FMO " << to_string(p.q1_fmo.verdict)
        << ", psi admissible " << (psi[k].admissible ? "yes" : "no") << '\n';
  }
  out << "  report: " << (cfg.out / "condition_report.json").string() << '\n';
  return violation ? kExitBound : kExitOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const CoefficientSpec spec = resolve_spec(cfg.spec);
  SolveOutcome r = solve_spec(spec, cfg);
  ensure_out(cfg);
  const auto archive_dir = cfg.out / "solution";
  write_archive(archive_dir, r.solution, spec, cfg.spec, r.mode, cfg.solver, r.ladder);

  json ladder_doc{{"mode", r.mode}, {"spec", spec.label()}};
  if (r.ladder) {
    ladder_doc["ladder"] = to_json(*r.ladder);
  } else {
    ladder_doc["trace"] = to_json(r.solution.trace);
  }
  write_json(cfg.out / "ladder_report.json", ladder_doc);
  if (cfg.write_csv && r.ladder) {
    std::ofstream os(cfg.out / "ladder_report.csv", std::ios::binary);
    write_ladder_csv(os, *r.ladder);
  }

  out << "solve " << spec.label() << " (" << r.mode << ", n = " << cfg.solver.grid_n << ", L = "
      << cfg.solver.box_half_side << ")\n";
  if (r.ladder) {
    for (const auto& rung : r.ladder->rungs) {
      out << "  rung " << std::setw(3) << rung.n << ": outer " << rung.outer_steps << ", residual "
          << rung.residual;
      if (!rung.distances.empty()) {
        out << ", d =";
        for (double d : rung.distances) out << ' ' << d;
      }
      out << '\n';
    }
    out << "  ladder " << (r.ladder->converged ? "converged" : "exhausted") << " at rung " << r.ladder->final_rung
        << '\n';
  } else {
    out << "  " << r.solution.trace.steps << " fixed-point steps, residual " << r.solution.residual_rel_l2 << '\n';
  }
  out << "  archive: " << archive_dir.string() << '\n';
  return r.ladder && !r.ladder->converged ? kExitFlagged : kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const ArchivedSolution a = read_archive(cfg.archive);
  const Solution& s = a.solution;
  VerificationReport v;
  const ResidualReport res = residual(s, a.spec);
  v.residual_l2_rel = res.rel_l2;
  v.residual_sup = res.sup;
  v.jacobian = jacobian_stats(s);
  v.injectivity = injectivity_check(s);

  std::string inverse_error;
  if (cfg.p) {
    try {
      const MajorantSpec q = cfg.inverse_q.empty() ? MajorantSpec::constant(1.0) : MajorantSpec::parse(cfg.inverse_q);
      InverseOptions options;
      options.image_n = cfg.image_n;
      v.inverse = inverse_dilatation_audit(s, *cfg.p, q, cfg.inverse_probes, options);
    } catch (const NotInvertible& e) {
      inverse_error = e.what();
    } catch (const OutOfImage& e) {
      inverse_error = e.what();
    }
  }
  if (cfg.q_l1) {
    ContinuityOptions options;
    options.seed = cfg.seed;
    options.r0 = cfg.r0;
    v.continuity = continuity_modulus_fit(s, *cfg.q_l1, cfg.margin, options);
  }

  const bool residual_ok = v.residual_l2_rel <= cfg.verify_residual_tol;
  const bool jacobian_ok = v.jacobian.fraction_nonpositive <= 0.01;
  const bool flagged = !residual_ok || !jacobian_ok || !v.injectivity.pass() || !inverse_error.empty();

  ensure_out(cfg);
  if (cfg.write_json) {
    json doc = to_json(v);
    doc["archive"] = cfg.archive.string();
    doc["spec_label"] = a.spec.label();
    doc["spec_reference"] = a.spec_reference;
    doc["inverse_error"] = inverse_error.empty() ? json(nullptr) : json(inverse_error);
    doc["flagged"] = flagged;
    write_json(cfg.out / "verification_report.json", doc);
  }
  if (cfg.write_csv) {
    std::ofstream os(cfg.out / "residual.csv", std::ios::binary);
    res.field.write_csv(os);
  }
  if (cfg.heatmaps) {
    write_heatmap(cfg.out / "residual_abs.ppm", scalar_field(res.field, [&](std::size_t i) {
                    return std::abs(res.field[i]);
                  }));
    write_heatmap(cfg.out / "jacobian.ppm", scalar_field(s.f, [&](std::size_t i) {
                    return jacobian(s.fz[i], s.fzbar[i]);
                  }));
  }

  out << "verify " << cfg.archive.string() << " (" << a.spec.label() << ")\n"
      << "  residual rel L2 " << v.residual_l2_rel << " (" << (residual_ok ? "ok" : "above tolerance")
      << "), sup " << v.residual_sup << '\n'
      << "  Jacobian min " << v.jacobian.min << ", fraction <= 0: " << v.jacobian.fraction_nonpositive << '\n'
      << "  injectivity " << (v.injectivity.pass() ? "PASS" : "FAIL") << " (" << v.injectivity.orientation_flips
      << " flips, " << v.injectivity.overlapping_cells << " overlapping cells)\n";
  if (v.inverse)
    out << "  inverse: integral K_I,p = " << v.inverse->integral_kip << " over window area "
        << v.inverse->window_area << '\n';
  if (!inverse_error.empty()) out << "  inverse: " << inverse_error << '\n';
  if (v.continuity) out << "  continuity C = " << v.continuity->c << " (spread " << v.continuity->spread << ")\n";
  return flagged ? kExitFlagged : kExitOk;
}

ExampleReport run_example(int grid_n) {
  ExampleReport rep;
  const MajorantSpec inv_r = MajorantSpec::parse("1/r");
  const MajorantSpec one = MajorantSpec::constant(1.0, MajorantSpec::Role::kQ1);

  using boost::math::quadrature::gauss_kronrod;
  rep.disk_integral = gauss_kronrod<double, 15>::integrate(
      [&](double r) { return 2.0 * kPi * r * circle_mean(inv_r, 0.0, r); }, 0.0, 1.0, 15, 1e-12);
  rep.disk_integral_rel_error = std::abs(rep.disk_integral - 2.0 * kPi) / (2.0 * kPi);

  const double delta = 0.5;
  const auto ladder = default_divergence_ladder(delta);
  rep.q_divergence = divergence_integral(inv_r, 0.0, delta, ladder);
  rep.q1_divergence = divergence_integral(one, 0.0, delta, ladder);
  rep.psi = psi_admissibility("", MajorantSpec::parse("1/r", MajorantSpec::Role::kQ1), 0.0, delta, delta, ladder);

  for (const char* name : {"paper-example-sec4", "paper-example-sec4-phase2"}) {
    const CoefficientSpec spec = builtin_catalog(name, {});
    const bool phase2 = std::string(name).ends_with("phase2");
    double& deviation = phase2 ? rep.phase2_max_deviation : rep.phase1_max_deviation;
    for (double r : {0.1, 0.3, 0.6, 0.9})
      for (double w_abs : {0.0, 0.2, 1.0})
        for (double phi : {0.0, kPi / 3.0, 2.0 * kPi / 3.0, kPi, 1.5 * kPi}) {
          const cplx z = std::polar(r, phi);
          const CoefficientValues c = spec.evaluate_unchecked(z, w_abs);
          KtSample k{phase2 ? "phase2" : "phase1", r, w_abs, phi,
                     tangential_dilatation(c.mu, c.nu, z, 0.0, 0.0), r + w_abs};
          deviation = std::max(deviation, std::abs(k.kt - k.r_plus_w));
          if (phase2 && k.r_plus_w > 1.0) ++rep.kt_above_one;
          rep.kt_samples.push_back(k);
        }
  }

  if (grid_n > 0) {
    SolverConfig cfg;
    cfg.grid_n = grid_n;
    const CoefficientSpec spec = builtin_catalog("paper-example-sec4", {});
    QuasilinearResult r = solve_quasilinear(spec, cfg);
    ExampleSolve es;
    es.grid_n = grid_n;
    es.final_rung = r.report.final_rung;
    es.ladder_converged = r.report.converged;
    es.residual_l2_rel = residual(r.solution, spec).rel_l2;
    es.jacobian_positive_fraction = 1.0 - jacobian_stats(r.solution).fraction_nonpositive;
    es.injectivity = injectivity_check(r.solution);
    rep.solve = es;
  }
  return rep;
}

json example_json(const ExampleReport& rep) {
  json kt = json::array();
  for (const auto& k : rep.kt_samples)
    kt.push_back({{"variant", k.variant},
                  {"r", real(k.r)},
                  {"w_abs", real(k.w_abs)},
                  {"arg_z", real(k.phi)},
                  {"kt", real(k.kt)},
                  {"r_plus_w", real(k.r_plus_w)}});
  json doc{{"disk_integral", real(rep.disk_integral)},
           {"disk_integral_expected", real(2.0 * kPi)},
           {"disk_integral_rel_error", real(rep.disk_integral_rel_error)},
           {"q_divergence", to_json(rep.q_divergence)},
           {"q1_divergence", to_json(rep.q1_divergence)},
           {"psi_default", to_json(rep.psi)},
           {"kt_phase1_max_deviation", real(rep.phase1_max_deviation)},
           {"kt_phase2_max_deviation", real(rep.phase2_max_deviation)},
           {"kt_samples_above_one", rep.kt_above_one},
           {"kt_samples", kt}};
  if (rep.solve) {
    const auto& s = *rep.solve;
    doc["solve"] = {{"grid_n", s.grid_n},
                    {"final_rung", s.final_rung},
                    {"ladder_converged", s.ladder_converged},
                    {"residual_l2_rel", real(s.residual_l2_rel)},
                    {"jacobian_positive_fraction", real(s.jacobian_positive_fraction)},
                    {"injectivity", to_json(s.injectivity)}};
  } else {
    doc["solve"] = nullptr;
  }
  return doc;
}

int cmd_example(const RunConfig& cfg, std::ostream& out) {
  const ExampleReport rep = run_example(cfg.grid_given ? cfg.solver.grid_n : 128);
  ensure_out(cfg);
  write_json(cfg.out / "example_report.json", example_json(rep));

  out << std::setprecision(10);
  out << "int over the unit disk of 1/r: " << rep.disk_integral << " (2 pi = " << 2.0 * kPi
      << ", rel. error " << rep.disk_integral_rel_error << ")\n";
  out << "I(eps) for Q = 1/r, delta = 0.5: " << rep.q_divergence.integral.back() << " at eps = "
      << rep.q_divergence.eps.back() << ", verdict " << to_string(rep.q_divergence.verdict);
  if (rep.q_divergence.limit) out << ", limit " << *rep.q_divergence.limit;
  out << '\n';
  out << "I(eps) for Q1 = 1: " << rep.q1_divergence.integral.back() << ", verdict "
      << to_string(rep.q1_divergence.verdict) << '\n';
  out << "default psi with q1 = 1/r admissible: " << (rep.psi.admissible ? "yes" : "no") << '\n';
  out << "K^T vs r + |w| at z0 = 0: max deviation phase1 " << rep.phase1_max_deviation << ", phase2 "
      << rep.phase2_max_deviation << '\n';
  out << "K^T < 1 fails on " << rep.kt_above_one << " phase2 samples with r + |w| > 1\n";
  if (rep.solve) {
    const auto& s = *rep.solve;
    out << "solve at n = " << s.grid_n << ": ladder " << (s.ladder_converged ? "converged" : "exhausted")
        << " at rung " << s.final_rung << ", residual " << s.residual_l2_rel << ", J > 0 on "
        << s.jacobian_positive_fraction << ", injectivity " << (s.injectivity.pass() ? "PASS" : "FAIL") << " ("
        << s.injectivity.orientation_flips << " flips, " << s.injectivity.overlapping_cells << " overlaps)\n";
  }
  out << "report: " << (cfg.out / "example_report.json").string() << '\n';
  return kExitOk;
}

int cmd_catalog(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.spec.empty()) {
    out << resolve_spec(cfg.spec).to_file_text();
    return kExitOk;
  }
  for (const auto& name : catalog_names()) {
    const CoefficientSpec s = builtin_catalog(name, {});
    out << name << "\n  mu = " << s.mu().to_string() << "\n  nu = " << s.nu().to_string()
        << "\n  support_radius = " << s.support_radius() << '\n';
  }
  return kExitOk;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.command) {
      case Command::kAnalyze: return cmd_analyze(cfg, out);
      case Command::kSolve: return cmd_solve(cfg, out);
      case Command::kVerify: return cmd_verify(cfg, out);
      case Command::kExample: return cmd_example(cfg, out);
      case Command::kCatalog: return cmd_catalog(cfg, out);
    }
  } catch (const BoundViolation& e) {
    err << "error: " << e.what() << '\n';
    return kExitBound;
  } catch (const MaxIterations& e) {
    err << "error: " << e.what() << '\n';
    return kExitFlagged;
  } catch (const OuterDivergence& e) {
    err << "error: " << e.what() << '\n';
    return kExitFlagged;
  } catch (const NotContractive& e) {
    err << "error: NotContractive: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

int main_entry(int argc, const char* const* argv) {
  std::optional<RunConfig> cfg;
  try {
    cfg = parse_command_line(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (!cfg) return kExitOk;
  return run(*cfg, std::cout, std::cerr);
}

}  // namespace beltrami::cli

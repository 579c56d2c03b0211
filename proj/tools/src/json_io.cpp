#include "beltrami_cli/json_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "beltrami/errors.hpp"

namespace beltrami::cli {

json real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json complex(cplx z) { return json::array({real(z.real()), real(z.imag())}); }

json reals(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(real(x));
  return a;
}

json to_json(const IterationTrace& t) {
  return {{"steps", t.steps}, {"converged", t.converged}, {"update_norms", reals(t.update_norms)},
          {"ratios", reals(t.ratios)}};
}

json to_json(const Normalization& n) {
  return {{"translation", complex(n.translation)}, {"scale", real(n.scale)}, {"arg_f1", real(n.arg_f1)}};
}

json to_json(const RungSummary& r) {
  return {{"n", r.n},
          {"outer_steps", r.outer_steps},
          {"outer_converged", r.outer_converged},
          {"inner_steps", r.inner_steps},
          {"last_outer_update", real(r.last_outer_update)},
          {"residual", real(r.residual)},
          {"k_max", real(r.k_max)},
          {"k_bound", real(r.k_bound)},
          {"effective_max", real(r.effective_max)},
          {"damping", real(r.damping)},
          {"d", reals(r.distances)}};
}

json to_json(const LadderReport& report) {
  json rungs = json::array();
  for (const auto& r : report.rungs) rungs.push_back(to_json(r));
  return {{"margins", reals(report.margins)},
          {"final_rung", report.final_rung},
          {"converged", report.converged},
          {"exhausted", report.exhausted},
          {"rungs", rungs}};
}

json to_json(const DivergenceReport& d) {
  json out{{"z0", complex(d.z0)},
           {"delta", real(d.delta)},
           {"verdict", to_string(d.verdict)},
           {"fit_slope", real(d.fit_slope)},
           {"tail_estimate", real(d.tail_estimate)},
           {"limit", d.limit ? real(*d.limit) : json(nullptr)},
           {"eps", reals(d.eps)},
           {"integral", reals(d.integral)},
           {"slopes", reals(d.slopes)}};
  return out;
}

json to_json(const FmoReport& f) {
  return {{"x0", complex(f.x0)},
          {"verdict", to_string(f.verdict)},
          {"eps", reals(f.eps)},
          {"means", reals(f.means)},
          {"oscillations", reals(f.oscillations)}};
}

json to_json(const PsiReport& p) {
  return {{"z0", complex(p.z0)},
          {"eps0", real(p.eps0)},
          {"eps_prime", real(p.eps_prime)},
          {"psi", p.psi},
          {"positive_finite", p.positive_finite},
          {"grows", p.grows},
          {"ratio_vanishes", p.ratio_vanishes},
          {"admissible", p.admissible},
          {"eps", reals(p.eps)},
          {"integral", reals(p.integral)},
          {"ratio", reals(p.ratio)}};
}

json to_json(const BoundCheck& b) {
  json out{{"passed", b.passed()},
           {"samples", b.samples},
           {"violations", b.violations},
           {"max_excess", real(b.max_excess)}};
  if (b.witness) {
    const auto& w = *b.witness;
    out["witness"] = {{"z", complex(w.z)},         {"w", complex(w.w)},         {"z0", complex(w.z0)},
                      {"theta", real(w.theta)},    {"value", real(w.value)},    {"bound", real(w.bound)}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

json to_json(const ProbeAudit& p) {
  return {{"z0", complex(p.z0)},
          {"q1_hypothesis", p.q1_hypothesis},
          {"q1_fmo", to_json(p.q1_fmo)},
          {"q1_divergence", to_json(p.q1_divergence)},
          {"q_divergence", to_json(p.q_divergence)}};
}

json to_json(const ConditionReport& r) {
  json probes = json::array();
  for (const auto& p : r.probes) probes.push_back(to_json(p));
  return {{"spec", r.spec_label},
          {"Q", r.q_text},
          {"Q1", r.q1_text},
          {"k_bound", to_json(r.k_bound)},
          {"kt_bound", to_json(r.kt_bound)},
          {"probes", probes}};
}

json to_json(const JacobianStats& j) {
  return {{"min", real(j.min)}, {"fraction_nonpositive", real(j.fraction_nonpositive)}, {"samples", j.samples}};
}

json to_json(const InjectivityReport& i) {
  return {{"pass", i.pass()},
          {"cells", i.cells},
          {"orientation_flips", i.orientation_flips},
          {"overlapping_cells", i.overlapping_cells},
          {"folded_cell_count", i.folded_cell_count}};
}

json to_json(const InverseReport& r) {
  json probes = json::array();
  for (const auto& p : r.probes)
    probes.push_back({{"w0", complex(p.w0)},
                      {"samples", p.samples},
                      {"violations", p.violations},
                      {"max_excess", real(p.max_excess)}});
  return {{"p", real(r.p)},
          {"window_center", complex(r.window_center)},
          {"window_half", real(r.window_half)},
          {"image_n", r.image_n},
          {"window_area", real(r.window_area)},
          {"integral_kip", real(r.integral_kip)},
          {"integral_kmap", real(r.integral_kmap)},
          {"kip_min", real(r.kip_min)},
          {"kip_max", real(r.kip_max)},
          {"probes", probes}};
}

json to_json(const ContinuityFit& c) {
  return {{"r0", real(c.r0)},
          {"compact_radius", real(c.compact_radius)},
          {"q_l1_norm", real(c.q_l1_norm)},
          {"c", real(c.c)},
          {"spread", real(c.spread)},
          {"distances", reals(c.distances)},
          {"c_per_scale", reals(c.c_per_scale)}};
}

json to_json(const VerificationReport& v) {
  return {{"residual_l2_rel", real(v.residual_l2_rel)},
          {"residual_sup", real(v.residual_sup)},
          {"jacobian", to_json(v.jacobian)},
          {"injectivity", to_json(v.injectivity)},
          {"inverse", v.inverse ? to_json(*v.inverse) : json(nullptr)},
          {"continuity", v.continuity ? to_json(*v.continuity) : json(nullptr)}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write " + path.string());
  os << doc.dump(2) << '\n';
}

namespace {

void divergence_rows(std::ostream& os, std::size_t probe, const char* which, const DivergenceReport& d) {
  for (std::size_t k = 0; k < d.eps.size(); ++k) {
    os << probe << ',' << which << ",divergence," << d.eps[k] << ',' << d.integral[k] << ',';
    if (k > 0 && k - 1 < d.slopes.size()) os << d.slopes[k - 1];
    os << '\n';
  }
}

}  // namespace

void write_condition_csv(std::ostream& os, const ConditionReport& report) {
  os.precision(17);
  os << "probe,majorant,test,eps,value,aux\n";
  for (std::size_t p = 0; p < report.probes.size(); ++p) {
    const auto& a = report.probes[p];
    divergence_rows(os, p, "Q", a.q_divergence);
    divergence_rows(os, p, "Q1", a.q1_divergence);
    for (std::size_t k = 0; k < a.q1_fmo.eps.size(); ++k)
      os << p << ",Q1,fmo," << a.q1_fmo.eps[k] << ',' << a.q1_fmo.oscillations[k] << ','
         << a.q1_fmo.means[k] << '\n';
  }
}

void write_ladder_csv(std::ostream& os, const LadderReport& report) {
  os.precision(17);
  os << "n,outer_steps,residual";
  for (std::size_t j = 0; j < report.margins.size(); ++j) os << ",d" << j;
  os << '\n';
  for (const auto& r : report.rungs) {
    os << r.n << ',' << r.outer_steps << ',' << r.residual;
    for (std::size_t j = 0; j < report.margins.size(); ++j) {
      os << ',';
      if (j < r.distances.size()) os << r.distances[j];
    }
    os << '\n';
  }
}

}  // namespace beltrami::cli

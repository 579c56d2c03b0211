#include "beltrami/conditions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "beltrami/dilatation.hpp"
#include "beltrami/parallel.hpp"

namespace beltrami {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kQuadTol = 1e-10;
constexpr unsigned kQuadDepth = 15;

/// Adaptive Gauss-Kronrod. A positive `floor` shifts the integrand by that
/// constant so the relative tolerance also acts as an absolute one; integrands
/// that vanish up to round-off otherwise never satisfy it.
template <typename F>
double integrate(F&& f, double a, double b, const char* what, double floor = 0.0) {
  double error = 0.0;
  auto shifted = [&](double x) { return f(x) + floor; };
  double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(shifted, a, b, kQuadDepth,
                                                                               kQuadTol, &error);
  if (!std::isfinite(value) || !std::isfinite(error))
    throw QuadratureFailure(std::string("non-finite quadrature result for ") + what);
  return value - floor * (b - a);
}

void check_ladder(const std::vector<double>& eps, double top, const char* name) {
  if (eps.empty()) throw ParamOutOfRange(std::string(name) + " ladder is empty");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0 && eps[k] < top))
      throw ParamOutOfRange(std::string(name) + " ladder values must lie in (0, " + std::to_string(top) + ")");
    if (k > 0 && !(eps[k] < eps[k - 1]))
      throw ParamOutOfRange(std::string(name) + " ladder must be strictly decreasing");
  }
}

struct Growth {
  std::vector<double> slopes;
  double fit_slope = 0.0;
  double tail = 0.0;
  DivergenceVerdict verdict = DivergenceVerdict::kInconclusive;
};

/// Classifies I(eps) along a decreasing ladder below `top`. x = log(top/eps).
///
/// DIVERGENT: slope * x stays non-decreasing (to within 5% per step) over the
/// last four decades, i.e. the slope decays no faster than 1/x.
/// CONVERGENT: slopes shrink by a factor <= 0.8 per step over the same window
/// and the geometric tail is below 1e-6 relative.
Growth classify_growth(const std::vector<double>& eps, const std::vector<double>& integral, double top) {
  Growth g;
  const std::size_t n = eps.size();
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = std::log(top / eps[k]);
    const double x_prev = k == 0 ? 0.0 : x[k - 1];
    const double i_prev = k == 0 ? 0.0 : integral[k - 1];
    g.slopes.push_back((integral[k] - i_prev) / (x[k] - x_prev));
  }

  const double window_start = x.back() - 4.0 * std::numbers::ln10;
  std::size_t first = n;
  for (std::size_t k = 0; k < n; ++k)
    if (x[k] >= window_start - 1e-12) {
      first = k;
      break;
    }

  // Least-squares slope of I against x over the window.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(n - first);
  for (std::size_t k = first; k < n; ++k) {
    sx += x[k];
    sy += integral[k];
    sxx += x[k] * x[k];
    sxy += x[k] * integral[k];
  }
  const double den = m * sxx - sx * sx;
  g.fit_slope = den > 0.0 ? (m * sxy - sx * sy) / den : 0.0;

  const double span_decades = std::log10(top / eps.back()) - (first == 0 ? 0.0 : std::log10(top / eps[first - 1]));
  if (window_start < 0.0 || span_decades < 4.0 - 1e-9 || n - first < 3) return g;

  bool divergent = true;
  bool geometric = true;
  double rho = 0.0;
  for (std::size_t k = first + 1; k < n; ++k) {
    const double a = g.slopes[k - 1] * x[k - 1];
    const double b = g.slopes[k] * x[k];
    if (!(a > 0.0) || b < 0.95 * a) divergent = false;
    if (!(g.slopes[k - 1] > 0.0)) {
      geometric = geometric && g.slopes[k] == 0.0;
      continue;
    }
    const double r = g.slopes[k] / g.slopes[k - 1];
    rho = std::max(rho, r);
    if (r > 0.8) geometric = false;
  }
  if (divergent && g.slopes[n - 1] * x[n - 1] < 0.95 * g.slopes[first] * x[first]) divergent = false;

  const double last_increment = integral[n - 1] - (n >= 2 ? integral[n - 2] : 0.0);
  g.tail = geometric ? last_increment * rho / (1.0 - rho) : kInfinity;

  if (divergent)
    g.verdict = DivergenceVerdict::kDivergent;
  else if (geometric && std::abs(g.tail) <= 1e-6 * std::max(1.0, std::abs(integral[n - 1])))
    g.verdict = DivergenceVerdict::kConvergent;
  return g;
}

double checked_circle_mean(const MajorantSpec& q, cplx z0, double r, int m) {
  double v;
  try {
    v = circle_mean(q, z0, r, m);
  } catch (const EvalError& e) {
    throw QuadratureFailure(std::string("majorant undefined on the circle of radius ") + std::to_string(r) +
                            ": " + e.what());
  }
  if (!std::isfinite(v)) throw QuadratureFailure("non-finite circle mean at radius " + std::to_string(r));
  return v;
}

}  // namespace

MajorantSpec MajorantSpec::parse(std::string_view text, Role role) {
  return {std::make_shared<const Expression>(parse_majorant_expr(text)), role, std::string(text)};
}

MajorantSpec MajorantSpec::constant(double value, Role role) {
  Expression e = Expression::constant(value, majorant_variables());
  std::string text = e.to_string();
  return {std::make_shared<const Expression>(std::move(e)), role, std::move(text)};
}

double MajorantSpec::operator()(cplx z, cplx z0) const {
  std::array<cplx, 5> env{z, cplx{}, cplx{std::abs(z), 0.0}, cplx{arg_0_2pi(z), 0.0}, z0};
  const cplx v = expr->evaluate(env);
  if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
    throw EvalError("majorant '" + text + "' is not real-valued");
  return v.real();
}

const char* to_string(DivergenceVerdict v) {
  switch (v) {
    case DivergenceVerdict::kDivergent: return "DIVERGENT";
    case DivergenceVerdict::kConvergent: return "CONVERGENT";
    default: return "INCONCLUSIVE";
  }
}

const char* to_string(FmoVerdict v) {
  switch (v) {
    case FmoVerdict::kLikelyFmo: return "LIKELY_FMO";
    case FmoVerdict::kLikelyNotFmo: return "LIKELY_NOT_FMO";
    default: return "INCONCLUSIVE";
  }
}

std::vector<double> default_divergence_ladder(double delta) {
  std::vector<double> out;
  for (int k = 1;; ++k) {
    double e = delta * std::pow(10.0, -0.5 * k);
    if (e < 1e-8) break;
    out.push_back(e);
  }
  return out;
}

std::vector<double> default_fmo_ladder() {
  std::vector<double> out;
  for (int k = 3; k <= 12; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

double circle_mean(const MajorantSpec& q, cplx z0, double r, int m) {
  if (!(r > 0.0)) throw ParamOutOfRange("circle radius must be positive");
  if (m < 16) throw ParamOutOfRange("circle mean needs at least 16 nodes");
  double acc = 0.0;
  for (int k = 0; k < m; ++k) acc += q(z0 + std::polar(r, kTwoPi * k / m), z0);
  return acc / m;
}

DivergenceReport divergence_integral(const MajorantSpec& q, cplx z0, double delta,
                                     const std::vector<double>& eps_ladder, int circle_nodes) {
  if (!(delta > 0.0)) throw ParamOutOfRange("delta must be positive");
  check_ladder(eps_ladder, delta, "divergence");
  if (eps_ladder.back() < 1e-8 * (1.0 - 1e-12)) throw ParamOutOfRange("divergence ladder must stay >= 1e-8");

  DivergenceReport rep;
  rep.z0 = z0;
  rep.delta = delta;
  rep.eps = eps_ladder;
  auto integrand = [&](double u) {
    const double qm = checked_circle_mean(q, z0, std::exp(u), circle_nodes);
    if (!(qm > 0.0)) throw QuadratureFailure("circle mean is not positive at r = " + std::to_string(std::exp(u)));
    return 1.0 / qm;
  };
  double acc = 0.0;
  double upper = delta;
  for (double e : eps_ladder) {
    acc += integrate(integrand, std::log(e), std::log(upper), "the divergence integral");
    rep.integral.push_back(acc);
    upper = e;
  }
  Growth g = classify_growth(rep.eps, rep.integral, delta);
  rep.slopes = std::move(g.slopes);
  rep.fit_slope = g.fit_slope;
  rep.tail_estimate = g.tail;
  rep.verdict = g.verdict;
  if (rep.verdict == DivergenceVerdict::kConvergent) rep.limit = rep.integral.back() + rep.tail_estimate;
  return rep;
}

FmoReport fmo_estimate(const MajorantSpec& q, cplx x0, const std::vector<double>& eps_ladder, int circle_nodes) {
  check_ladder(eps_ladder, kInfinity, "FMO");
  if (circle_nodes < 16) throw ParamOutOfRange("circle quadrature needs at least 16 nodes");
  FmoReport rep;
  rep.x0 = x0;
  rep.eps = eps_ladder;
  for (double eps : eps_ladder) {
    // Polar coordinates rho = eps * s; the disk average is 2 * int_0^1 s * (circle mean at eps*s) ds.
    const double mean =
        2.0 * integrate([&](double s) { return s * checked_circle_mean(q, x0, eps * s, circle_nodes); }, 0.0, 1.0,
                        "the disk mean", 1.0);
    auto oscillation_on_circle = [&](double s) {
      double acc = 0.0;
      for (int k = 0; k < circle_nodes; ++k) {
        double v;
        try {
          v = q(x0 + std::polar(eps * s, kTwoPi * k / circle_nodes), x0);
        } catch (const EvalError& e) {
          throw QuadratureFailure(std::string("majorant undefined inside the disk: ") + e.what());
        }
        acc += std::abs(v - mean);
      }
      return s * acc / circle_nodes;
    };
    const double osc = 2.0 * integrate(oscillation_on_circle, 0.0, 1.0, "the mean oscillation", 1.0);
    rep.means.push_back(mean);
    rep.oscillations.push_back(osc);
  }

  const auto& o = rep.oscillations;
  const std::size_t n = o.size();
  double scale = 0.0;
  for (double m : rep.means) scale = std::max(scale, std::abs(m));
  const bool all_zero = std::all_of(o.begin(), o.end(), [&](double v) { return v <= 1e-12 * (1.0 + scale); });
  bool monotone = n >= 2;
  for (std::size_t k = 1; k < n; ++k)
    if (o[k] < o[k - 1] * (1.0 - 1e-9)) monotone = false;
  const std::size_t half = n / 2;
  const double first_max = n > 1 ? *std::max_element(o.begin(), o.begin() + static_cast<std::ptrdiff_t>(half)) : o[0];
  const double second_max = *std::max_element(o.begin() + static_cast<std::ptrdiff_t>(half), o.end());

  if (all_zero)
    rep.verdict = FmoVerdict::kLikelyFmo;
  else if (monotone && o.back() >= 2.0 * o.front())
    rep.verdict = FmoVerdict::kLikelyNotFmo;
  else if (n > 1 && second_max <= 1.25 * first_max)
    rep.verdict = FmoVerdict::kLikelyFmo;
  return rep;
}

PsiReport psi_admissibility(std::string_view psi_text, const MajorantSpec& q1, cplx z0, double eps0,
                            double eps_prime, const std::vector<double>& eps_ladder, int circle_nodes) {
  if (!(eps0 > 0.0 && eps_prime > 0.0 && eps_prime <= eps0))
    throw ParamOutOfRange("psi admissibility needs 0 < eps' <= eps0");
  check_ladder(eps_ladder, eps0, "psi");

  PsiReport rep;
  rep.z0 = z0;
  rep.eps0 = eps0;
  rep.eps_prime = eps_prime;

  std::shared_ptr<const Expression> psi_expr;
  if (!psi_text.empty()) {
    psi_expr = std::make_shared<const Expression>(Expression::parse(psi_text, {"t"}));
    rep.psi = std::string(psi_text);
  } else {
    rep.psi = "1/(t*q1(t))";
  }
  auto psi = [&](double t) {
    if (psi_expr) {
      std::array<cplx, 1> env{cplx{t, 0.0}};
      try {
        return psi_expr->evaluate(env).real();
      } catch (const EvalError& e) {
        throw QuadratureFailure(std::string("psi undefined at t = ") + std::to_string(t) + ": " + e.what());
      }
    }
    return 1.0 / (t * checked_circle_mean(q1, z0, t, circle_nodes));
  };

  for (double e : eps_ladder)
    if (e < eps_prime) rep.eps.push_back(e);
  if (rep.eps.empty()) throw ParamOutOfRange("no ladder point lies below eps'");

  // Substitution t = e^u on both integrals.
  double acc_i = 0.0, acc_a = 0.0;
  double upper = eps0;
  for (double e : rep.eps) {
    const double a = std::log(e), b = std::log(upper);
    acc_i += integrate([&](double u) { const double t = std::exp(u); return psi(t) * t; }, a, b, "I(eps, eps0)");
    acc_a += integrate(
        [&](double u) {
          const double t = std::exp(u);
          const double p = psi(t);
          return kTwoPi * t * t * checked_circle_mean(q1, z0, t, circle_nodes) * p * p;
        },
        a, b, "the annulus integral");
    rep.integral.push_back(acc_i);
    rep.ratio.push_back(acc_a / (acc_i * acc_i));
    upper = e;
  }

  rep.positive_finite = std::all_of(rep.integral.begin(), rep.integral.end(),
                                    [](double v) { return v > 0.0 && std::isfinite(v); });
  rep.grows = classify_growth(rep.eps, rep.integral, eps0).verdict == DivergenceVerdict::kDivergent;
  bool decreasing = rep.ratio.size() >= 2;
  for (std::size_t k = 1; k < rep.ratio.size(); ++k)
    if (rep.ratio[k] > rep.ratio[k - 1] * (1.0 + 1e-12)) decreasing = false;
  rep.ratio_vanishes = decreasing && rep.ratio.back() <= 0.5 * rep.ratio.front();
  rep.admissible = rep.positive_finite && rep.grows && rep.ratio_vanishes;
  return rep;
}

BoundViolation::BoundViolation(ConditionReport report)
    : Error([&] {
        const BoundCheck& c = report.k_bound.passed() ? report.kt_bound : report.k_bound;
        const char* kind = report.k_bound.passed() ? "K^T <= Q1" : "K <= Q";
        std::string msg = std::string("bound ") + kind + " violated";
        if (c.witness) {
          const BoundWitness& w = *c.witness;
          msg += " at z = (" + std::to_string(w.z.real()) + ", " + std::to_string(w.z.imag()) + "), w = (" +
                 std::to_string(w.w.real()) + ", " + std::to_string(w.w.imag()) + "), theta = " +
                 std::to_string(w.theta) + ": " + std::to_string(w.value) + " > " + std::to_string(w.bound);
        }
        return msg;
      }()),
      report_(std::move(report)) {}

const BoundWitness& BoundViolation::witness() const {
  const BoundCheck& c = report_.k_bound.passed() ? report_.kt_bound : report_.k_bound;
  return *c.witness;
}

namespace {

void record(BoundCheck& check, double value, double bound, double tol, const BoundWitness& at) {
  ++check.samples;
  if (value <= bound) {
    const double slack = value == bound ? 0.0 : value - bound;  // inf <= inf counts as equality
    check.max_excess = check.samples == 1 ? slack : std::max(check.max_excess, slack);
    return;
  }
  const double excess = value - bound;  // may be +inf
  if (excess > tol) {
    ++check.violations;
    if (!check.witness || excess > check.max_excess) {
      BoundWitness w = at;
      w.value = value;
      w.bound = bound;
      check.witness = w;
    }
  }
  check.max_excess = check.samples == 1 ? excess : std::max(check.max_excess, excess);
}

void merge(BoundCheck& into, const BoundCheck& part) {
  if (part.samples == 0) return;
  into.max_excess = into.samples == 0 ? part.max_excess : std::max(into.max_excess, part.max_excess);
  into.samples += part.samples;
  into.violations += part.violations;
  if (part.witness) {
    const double ex = part.witness->value - part.witness->bound;
    if (!into.witness || ex > into.witness->value - into.witness->bound) into.witness = part.witness;
  }
}

}  // namespace

ConditionReport audit_theorem1(const CoefficientSpec& spec, const MajorantSpec& q, const MajorantSpec& q1,
                               const std::vector<cplx>& probe_points, const AuditOptions& options) {
  if (options.z_grid < 2 || options.w_phases < 1 || options.theta_count < 1 || options.w_radii.empty())
    throw ParamOutOfRange("audit sampling sizes must be positive");

  ConditionReport report;
  report.spec_label = spec.label();
  report.q_text = q.text;
  report.q1_text = q1.text;

  const double R = spec.support_radius();
  std::vector<cplx> ws;
  for (double rad : options.w_radii) {
    if (rad == 0.0) {
      ws.emplace_back();
      continue;
    }
    for (int p = 0; p < options.w_phases; ++p) ws.push_back(std::polar(rad, kTwoPi * p / options.w_phases));
  }

  const int m = options.z_grid;
  std::vector<BoundCheck> k_rows(m), kt_rows(m);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t row) {
    const double y = -R + 2.0 * R * row / (m - 1);
    for (int col = 0; col < m; ++col) {
      const cplx z{-R + 2.0 * R * col / (m - 1), y};
      if (std::abs(z) > R || spec.is_singular_point(z)) continue;
      const double qz = evaluate_majorant(*q.expr, z);
      for (cplx w : ws) {
        const CoefficientValues c = spec.evaluate_unchecked(z, w);
        const double K = maximal_dilatation(c.mu, c.nu);
        record(k_rows[row], K, qz, options.tolerance, {z, w, {}, 0.0});
        for (cplx z0 : probe_points) {
          if (z == z0) continue;
          const double q1z = evaluate_majorant(*q1.expr, z, z0);
          for (int t = 0; t < options.theta_count; ++t) {
            const double theta = kTwoPi * t / options.theta_count;
            record(kt_rows[row], tangential_dilatation(c.mu, c.nu, z, z0, theta), q1z, options.tolerance,
                   {z, w, z0, theta});
          }
        }
      }
    }
  });
  for (int row = 0; row < m; ++row) {
    merge(report.k_bound, k_rows[row]);
    merge(report.kt_bound, kt_rows[row]);
  }

  const std::vector<double> div_ladder =
      options.divergence_ladder.empty() ? default_divergence_ladder(options.delta) : options.divergence_ladder;
  const std::vector<double> fmo_ladder = options.fmo_ladder.empty() ? default_fmo_ladder() : options.fmo_ladder;
  report.probes.resize(probe_points.size());
  parallel_for(probe_points.size(), [&](std::size_t i) {
    ProbeAudit& p = report.probes[i];
    p.z0 = probe_points[i];
    p.q1_fmo = fmo_estimate(q1, p.z0, fmo_ladder);
    p.q1_divergence = divergence_integral(q1, p.z0, options.delta, div_ladder);
    p.q_divergence = divergence_integral(q, p.z0, options.delta, div_ladder);
    p.q1_hypothesis = p.q1_fmo.verdict == FmoVerdict::kLikelyFmo ||
                      p.q1_divergence.verdict == DivergenceVerdict::kDivergent;
  });

  if (!report.k_bound.passed() || !report.kt_bound.passed()) throw BoundViolation(std::move(report));
  return report;
}

}  // namespace beltrami

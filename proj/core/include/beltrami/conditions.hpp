#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "beltrami/coefficients.hpp"
#include "beltrami/errors.hpp"

namespace beltrami {

/// Nonnegative majorant Q(z) (role kQ) or tangential majorant Q1_{z0}(z)
/// (role kQ1). Expressions may use z, r = |z|, theta = arg z and z0.
struct MajorantSpec {
  enum class Role { kQ, kQ1 };

  std::shared_ptr<const Expression> expr;
  Role role = Role::kQ;
  std::string text;

  static MajorantSpec parse(std::string_view text, Role role = Role::kQ);
  static MajorantSpec constant(double value, Role role = Role::kQ);

  /// Real value at z with centre z0; EvalError on domain faults.
  double operator()(cplx z, cplx z0 = {}) const;
};

enum class DivergenceVerdict { kDivergent, kConvergent, kInconclusive };
enum class FmoVerdict { kLikelyFmo, kLikelyNotFmo, kInconclusive };

const char* to_string(DivergenceVerdict v);
const char* to_string(FmoVerdict v);

/// Decreasing ladder delta * 10^{-k/2}, k = 1, 2, ..., stopping at 1e-8.
std::vector<double> default_divergence_ladder(double delta);
/// 2^-3, ..., 2^-12.
std::vector<double> default_fmo_ladder();

struct DivergenceReport {
  cplx z0{};
  double delta = 0.0;
  std::vector<double> eps;
  std::vector<double> integral;    // I(eps_k) = int_{eps_k}^{delta} dr / (r q(r))
  std::vector<double> slopes;      // dI / dlog(1/eps) between consecutive ladder points
  double fit_slope = 0.0;          // least-squares slope of I vs log(1/eps) over the last 4 decades
  double tail_estimate = 0.0;      // geometric tail beyond the last ladder point
  std::optional<double> limit;     // set when CONVERGENT
  DivergenceVerdict verdict = DivergenceVerdict::kInconclusive;
};

struct FmoReport {
  cplx x0{};
  std::vector<double> eps;
  std::vector<double> means;         // disk means of q over B(x0, eps)
  std::vector<double> oscillations;  // mean |q - mean| over B(x0, eps)
  FmoVerdict verdict = FmoVerdict::kInconclusive;
};

struct PsiReport {
  cplx z0{};
  double eps0 = 0.0;
  double eps_prime = 0.0;
  std::string psi;                 // expression in t, or the default description
  std::vector<double> eps;         // ladder points below eps_prime
  std::vector<double> integral;    // I(eps, eps0)
  std::vector<double> ratio;       // R(eps) = int q1 psi^2 dm / I^2
  bool positive_finite = false;
  bool grows = false;              // I -> infinity
  bool ratio_vanishes = false;     // R -> 0
  bool admissible = false;
};

/// Trapezoidal mean of q over |z - z0| = r with m >= 16 nodes.
double circle_mean(const MajorantSpec& q, cplx z0, double r, int m = 64);

/// I(eps) = int_eps^delta dr / (r q_{z0}(r)) with q_{z0} the circle mean,
/// integrated by adaptive Gauss-Kronrod in log r.
DivergenceReport divergence_integral(const MajorantSpec& q, cplx z0, double delta,
                                     const std::vector<double>& eps_ladder, int circle_nodes = 64);

/// Disk means and mean oscillations of q over B(x0, eps) by polar quadrature.
FmoReport fmo_estimate(const MajorantSpec& q, cplx x0, const std::vector<double>& eps_ladder,
                       int circle_nodes = 64);

/// psi_text is an expression in t; empty selects psi(t) = 1/(t q1_{z0}(t)).
PsiReport psi_admissibility(std::string_view psi_text, const MajorantSpec& q1, cplx z0, double eps0,
                            double eps_prime, const std::vector<double>& eps_ladder,
                            int circle_nodes = 64);

struct BoundWitness {
  cplx z{};
  cplx w{};
  cplx z0{};
  double theta = 0.0;
  double value = 0.0;  // K or K^T
  double bound = 0.0;  // Q(z) or Q1_{z0}(z)
};

struct BoundCheck {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double max_excess = 0.0;  // max(value - bound), may be negative
  std::optional<BoundWitness> witness;
  bool passed() const { return violations == 0; }
};

struct ProbeAudit {
  cplx z0{};
  FmoReport q1_fmo;
  DivergenceReport q1_divergence;
  DivergenceReport q_divergence;
  /// Either alternative of the hypothesis on Q1 at this probe.
  bool q1_hypothesis = false;
};

struct AuditOptions {
  int z_grid = 33;  // z samples per axis over the support square, kept inside the support disk
  std::vector<double> w_radii{0.0, 1e-2, 1e-1, 1.0, 1e1, 1e2};
  int w_phases = 8;
  int theta_count = 64;
  double delta = 0.5;
  std::vector<double> divergence_ladder;  // empty: default_divergence_ladder(delta)
  std::vector<double> fmo_ladder;         // empty: default_fmo_ladder()
  double tolerance = 1e-9;
};

struct ConditionReport {
  std::string spec_label;
  std::string q_text;
  std::string q1_text;
  BoundCheck k_bound;   // K <= Q
  BoundCheck kt_bound;  // K^T <= Q1_{z0}, over all probes
  std::vector<ProbeAudit> probes;
};

/// Raised when sampling finds K > Q or K^T > Q1 by more than the tolerance.
/// Carries the complete report, including the verdicts computed so far.
class BoundViolation : public Error {
 public:
  explicit BoundViolation(ConditionReport report);

  const ConditionReport& report() const noexcept { return report_; }
  const BoundWitness& witness() const;

 private:
  ConditionReport report_;
};

/// Samples (z, w, theta) against both majorants and runs the FMO and
/// divergence tests on Q1 (and the divergence test on Q) at each probe.
/// Throws BoundViolation after the full report has been assembled.
ConditionReport audit_theorem1(const CoefficientSpec& spec, const MajorantSpec& q, const MajorantSpec& q1,
                               const std::vector<cplx>& probe_points, const AuditOptions& options = {});

}  // namespace beltrami

#pragma once

#include <complex>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "beltrami/expression.hpp"

namespace beltrami {

struct CoefficientValues {
  cplx mu;
  cplx nu;
};

/// Zeroes (mu, nu) wherever a majorant exceeds the rung threshold n.
struct TruncationPredicate {
  enum class Mode { kByQ, kByK };

  Mode mode = Mode::kByK;
  /// Majorant Q(z) for kByQ, parsed over majorant_variables(); unused for kByK.
  std::shared_ptr<const Expression> q;
  int n = 1;

  static TruncationPredicate by_k(int n);
  static TruncationPredicate by_q(std::shared_ptr<const Expression> q, int n);

  /// True when the untruncated values are kept at (z, w).
  bool holds(cplx z, cplx w, const CoefficientValues& raw) const;
};

/// Two-characteristic coefficient pair mu(z, w), nu(z, w), compactly supported
/// in |z| <= support_radius.
///
/// Specs are immutable values; copies share their expression trees.
class CoefficientSpec {
 public:
  CoefficientSpec(Expression mu, Expression nu, double support_radius, std::string label,
                  std::vector<cplx> singular_points = {});

  /// Parses both expressions over coefficient_variables().
  static CoefficientSpec from_text(std::string_view mu, std::string_view nu, double support_radius,
                                   std::string label, std::vector<cplx> singular_points = {});

  static CoefficientSpec zero(double support_radius = 1.0);

  /// Checked evaluation: (0, 0) outside the support; throws EllipticityViolation
  /// if |mu|+|nu| >= 1 anywhere other than a declared singular point.
  CoefficientValues evaluate(cplx z, cplx w) const;

  /// Evaluation without the ellipticity check (truncations still apply).
  CoefficientValues evaluate_unchecked(cplx z, cplx w) const;

  /// Adds one truncation layer; layers compose by intersection.
  CoefficientSpec truncated(TruncationPredicate pred) const;

  bool depends_on_w() const;
  bool is_singular_point(cplx z) const;

  const Expression& mu() const { return *mu_; }
  const Expression& nu() const { return *nu_; }
  double support_radius() const noexcept { return support_radius_; }
  const std::string& label() const noexcept { return label_; }
  const std::vector<cplx>& singular_points() const noexcept { return singular_points_; }
  const std::vector<TruncationPredicate>& truncations() const noexcept { return truncations_; }

  /// Spec file text: mu/nu/support_radius/label (+ singular when present).
  std::string to_file_text() const;

 private:
  CoefficientValues raw(cplx z, cplx w) const;

  std::shared_ptr<const Expression> mu_;
  std::shared_ptr<const Expression> nu_;
  double support_radius_;
  std::string label_;
  std::vector<cplx> singular_points_;
  std::vector<TruncationPredicate> truncations_;
};

CoefficientValues eval_coefficients(const CoefficientSpec& spec, cplx z, cplx w);

Expression parse_coefficient_expr(std::string_view text);

/// Majorant expression Q(z) or Q1_{z0}(z); variables z, w, r, theta, z0.
Expression parse_majorant_expr(std::string_view text);

/// Evaluates a majorant at z (with centre z0) as a real number. Domain faults
/// map to +infinity: majorants take values in [0, infinity].
double evaluate_majorant(const Expression& q, cplx z, cplx z0 = {});

/// Named coefficient families:
///   paper-example-sec4          mu = e^{i theta}(1-r-|w|)/(1+r+|w|), nu = 0 on the unit disk
///   paper-example-sec4-phase2   same with e^{2 i theta}
///   constant-disk [k, k_nu]     mu = k, nu = k_nu on |z| < 1
///   radial-power [k, a]         mu = k r^a e^{2 i theta} on |z| < 1
///   toy-quasilinear [k]         mu = k/(1+|w|^2) on |z| < 1
CoefficientSpec builtin_catalog(std::string_view name, const std::vector<double>& params);
std::vector<std::string> catalog_names();

CoefficientSpec truncate_spec(const CoefficientSpec& spec, const TruncationPredicate& pred);

/// Loads a spec file (`mu = "..."`, `nu = "..."`, `support_radius = R`, `label = "..."`).
CoefficientSpec load_spec_file(const std::filesystem::path& path);
CoefficientSpec parse_spec_text(std::string_view text);

/// Resolves "catalog-name[:p1,p2]" or a path to a spec file.
CoefficientSpec resolve_spec(std::string_view reference);

}  // namespace beltrami

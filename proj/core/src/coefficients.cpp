#include "beltrami/coefficients.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "beltrami/dilatation.hpp"
#include "beltrami/errors.hpp"
#include "beltrami/keyvalue.hpp"

namespace beltrami {

namespace {

constexpr double kSingularTolerance = 1e-12;

std::array<cplx, 4> coefficient_env(cplx z, cplx w) {
  return {z, w, cplx{std::abs(z), 0.0}, cplx{arg_0_2pi(z), 0.0}};
}

}  // namespace

TruncationPredicate TruncationPredicate::by_k(int n) {
  if (n < 1) throw ParamOutOfRange("truncation threshold must be >= 1");
  return {Mode::kByK, nullptr, n};
}

TruncationPredicate TruncationPredicate::by_q(std::shared_ptr<const Expression> q, int n) {
  if (n < 1) throw ParamOutOfRange("truncation threshold must be >= 1");
  if (!q) throw ParamOutOfRange("BY_Q truncation needs a majorant");
  return {Mode::kByQ, std::move(q), n};
}

bool TruncationPredicate::holds(cplx z, cplx /*w*/, const CoefficientValues& raw) const {
  if (mode == Mode::kByK) return maximal_dilatation(raw.mu, raw.nu) <= n;
  return evaluate_majorant(*q, z) <= n;
}

CoefficientSpec::CoefficientSpec(Expression mu, Expression nu, double support_radius,
                                 std::string label, std::vector<cplx> singular_points)
    : mu_(std::make_shared<const Expression>(std::move(mu))),
      nu_(std::make_shared<const Expression>(std::move(nu))),
      support_radius_(support_radius),
      label_(std::move(label)),
      singular_points_(std::move(singular_points)) {
  if (!(support_radius_ > 0.0) || !std::isfinite(support_radius_))
    throw ParamOutOfRange("support_radius must be a positive real");
}

CoefficientSpec CoefficientSpec::from_text(std::string_view mu, std::string_view nu,
                                           double support_radius, std::string label,
                                           std::vector<cplx> singular_points) {
  return CoefficientSpec(parse_coefficient_expr(mu), parse_coefficient_expr(nu), support_radius,
                         std::move(label), std::move(singular_points));
}

CoefficientSpec CoefficientSpec::zero(double support_radius) {
  return from_text("0", "0", support_radius, "zero");
}

CoefficientValues CoefficientSpec::raw(cplx z, cplx w) const {
  auto env = coefficient_env(z, w);
  return {mu_->evaluate(env), nu_->is_zero_constant() ? cplx{} : nu_->evaluate(env)};
}

CoefficientValues CoefficientSpec::evaluate_unchecked(cplx z, cplx w) const {
  if (std::abs(z) > support_radius_) return {};
  CoefficientValues v = raw(z, w);
  for (const auto& t : truncations_)
    if (!t.holds(z, w, v)) return {};
  return v;
}

CoefficientValues CoefficientSpec::evaluate(cplx z, cplx w) const {
  CoefficientValues v = evaluate_unchecked(z, w);
  double s = std::abs(v.mu) + std::abs(v.nu);
  if (s >= 1.0 && !is_singular_point(z)) throw EllipticityViolation(z, w, s);
  return v;
}

CoefficientSpec CoefficientSpec::truncated(TruncationPredicate pred) const {
  CoefficientSpec out = *this;
  out.truncations_.push_back(std::move(pred));
  return out;
}

bool CoefficientSpec::depends_on_w() const { return mu_->references("w") || nu_->references("w"); }

bool CoefficientSpec::is_singular_point(cplx z) const {
  for (cplx p : singular_points_)
    if (std::abs(z - p) <= kSingularTolerance) return true;
  return false;
}

std::string CoefficientSpec::to_file_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "mu = " << KeyValueFile::quote(mu_->to_string()) << "\n";
  os << "nu = " << KeyValueFile::quote(nu_->to_string()) << "\n";
  os << "support_radius = " << support_radius_ << "\n";
  os << "label = " << KeyValueFile::quote(label_) << "\n";
  if (!singular_points_.empty()) {
    std::string list;
    for (std::size_t k = 0; k < singular_points_.size(); ++k) {
      if (k) list += ", ";
      list += Expression::constant(singular_points_[k]).to_string();
    }
    os << "singular = " << KeyValueFile::quote(list) << "\n";
  }
  return os.str();
}

CoefficientValues eval_coefficients(const CoefficientSpec& spec, cplx z, cplx w) {
  return spec.evaluate(z, w);
}

Expression parse_coefficient_expr(std::string_view text) {
  return Expression::parse(text, coefficient_variables());
}

Expression parse_majorant_expr(std::string_view text) {
  return Expression::parse(text, majorant_variables());
}

double evaluate_majorant(const Expression& q, cplx z, cplx z0) {
  std::array<cplx, 5> env{z, cplx{}, cplx{std::abs(z), 0.0}, cplx{arg_0_2pi(z), 0.0}, z0};
  try {
    return q.evaluate(env).real();
  } catch (const EvalError&) {
    return kInfinity;
  }
}

namespace {

double param(const std::vector<double>& params, std::size_t k, double fallback) {
  return k < params.size() ? params[k] : fallback;
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  std::string s(buf, ptr);
  return v < 0 ? "(" + s + ")" : s;
}

}  // namespace

std::vector<std::string> catalog_names() {
  return {"paper-example-sec4", "paper-example-sec4-phase2", "constant-disk", "radial-power",
          "toy-quasilinear"};
}

CoefficientSpec builtin_catalog(std::string_view name, const std::vector<double>& params) {
  // mu(0, 0) = 1 for both section-4 variants; the origin is declared singular.
  if (name == "paper-example-sec4" || name == "paper-example-sec4-phase2") {
    if (!params.empty()) throw ParamOutOfRange(std::string(name) + " takes no parameters");
    const char* phase = name == "paper-example-sec4" ? "exp(i*theta)" : "exp(2*i*theta)";
    return CoefficientSpec::from_text(std::string(phase) + "*(1 - r - abs(w))/(1 + r + abs(w))",
                                      "0", 1.0, std::string(name), {cplx{}});
  }
  if (name == "constant-disk") {
    if (params.size() > 2) throw ParamOutOfRange("constant-disk takes [k] or [k, k_nu]");
    double k = param(params, 0, 0.5);
    double k_nu = param(params, 1, 0.0);
    if (std::abs(k) + std::abs(k_nu) >= 1.0)
      throw ParamOutOfRange("constant-disk requires |k| + |k_nu| < 1");
    return CoefficientSpec::from_text(fmt(k), fmt(k_nu), 1.0, "constant-disk");
  }
  if (name == "radial-power") {
    if (params.size() > 2) throw ParamOutOfRange("radial-power takes [k, a]");
    double k = param(params, 0, 0.5);
    double a = param(params, 1, 1.0);
    if (std::abs(k) >= 1.0) throw ParamOutOfRange("radial-power requires |k| < 1");
    if (a < 0.0) throw ParamOutOfRange("radial-power requires a >= 0");
    return CoefficientSpec::from_text(fmt(k) + "*r^" + fmt(a) + "*exp(2*i*theta)", "0", 1.0,
                                      "radial-power");
  }
  if (name == "toy-quasilinear") {
    if (params.size() > 1) throw ParamOutOfRange("toy-quasilinear takes [k]");
    double k = param(params, 0, 0.3);
    if (std::abs(k) >= 1.0) throw ParamOutOfRange("toy-quasilinear requires |k| < 1");
    return CoefficientSpec::from_text(fmt(k) + "/(1 + abs(w)^2)", "0", 1.0, "toy-quasilinear");
  }
  throw UnknownCatalogEntry("unknown catalog entry '" + std::string(name) + "'");
}

CoefficientSpec truncate_spec(const CoefficientSpec& spec, const TruncationPredicate& pred) {
  return spec.truncated(pred);
}

namespace {

CoefficientSpec spec_from_entries(const KeyValueFile& kv) {
  auto mu = kv.require("mu");
  auto nu = kv.get("nu").value_or("0");
  auto radius = kv.get_real("support_radius");
  if (!radius) throw FormatError("missing key 'support_radius'");
  auto label = kv.get("label").value_or("unnamed");
  std::vector<cplx> singular;
  if (auto list = kv.get("singular")) {
    std::stringstream ss(*list);
    std::string item;
    while (std::getline(ss, item, ','))
      singular.push_back(Expression::parse(item, {}).evaluate({}));
  }
  return CoefficientSpec::from_text(mu, nu, *radius, label, std::move(singular));
}

}  // namespace

CoefficientSpec parse_spec_text(std::string_view text) {
  return spec_from_entries(KeyValueFile::parse(text));
}

CoefficientSpec load_spec_file(const std::filesystem::path& path) {
  return spec_from_entries(KeyValueFile::load(path));
}

CoefficientSpec resolve_spec(std::string_view reference) {
  std::string ref(reference);
  std::string name = ref;
  std::vector<double> params;
  if (auto colon = ref.find(':'); colon != std::string::npos) {
    name = ref.substr(0, colon);
    std::stringstream ss(ref.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc{} || ptr != item.data() + item.size())
        throw ParamOutOfRange("bad catalog parameter '" + item + "'");
      params.push_back(v);
    }
  }
  for (const auto& known : catalog_names())
    if (known == name) return builtin_catalog(name, params);
  if (std::filesystem::exists(ref)) return load_spec_file(ref);
  throw UnknownCatalogEntry("'" + ref + "' is neither a catalog entry nor a spec file");
}

}  // namespace beltrami

#include "beltrami/dilatation.hpp"

#include <cmath>

#include "beltrami/errors.hpp"

namespace beltrami {

double maximal_dilatation(cplx mu, cplx nu) {
  double s = std::abs(mu) + std::abs(nu);
  if (s >= 1.0) return kInfinity;
  return (1.0 + s) / (1.0 - s);
}

double tangential_dilatation(cplx mu, cplx nu, cplx z, cplx z0, double theta) {
  return tangential_dilatation(mu + nu * std::polar(1.0, theta), z, z0);
}

double tangential_dilatation(cplx mu, cplx z, cplx z0) {
  cplx d = z - z0;
  if (d == cplx{}) throw DegenerateBase("tangential dilatation undefined at z == z0");
  double den = 1.0 - std::norm(mu);
  if (den <= 0.0) return kInfinity;
  cplx phase = std::conj(d) / d;
  return std::norm(1.0 - phase * mu) / den;
}

double jacobian(cplx fz, cplx fzbar) { return std::norm(fz) - std::norm(fzbar); }

double map_dilatation(cplx fz, cplx fzbar) {
  double a = std::abs(fz);
  double b = std::abs(fzbar);
  if (a + b == 0.0) return 1.0;
  if (a == b) return kInfinity;
  return (a + b) / (a - b);
}

double inner_dilatation_p(cplx fz, cplx fzbar, double p) {
  double a = std::abs(fz);
  double b = std::abs(fzbar);
  if (a + b == 0.0) return 1.0;
  if (a == b) return kInfinity;
  if (p == 2.0) return map_dilatation(fz, fzbar);
  // J = (a+b)(a-b) avoids the cancellation in |fz|^2 - |fzbar|^2.
  return (a + b) * (a - b) / std::pow(std::abs(a - b), p);
}

cplx effective_single_coefficient(cplx mu, cplx nu, cplx ratio) { return mu + ratio * nu; }

}  // namespace beltrami

#pragma once

#include <complex>
#include <limits>

namespace beltrami {

using cplx = std::complex<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Degenerate points are encoded as +infinity (or 1 at points where both
// derivatives vanish) so that grid fields of these quantities stay total.

/// (1+|mu|+|nu|)/(1-|mu|-|nu|); +inf once |mu|+|nu| >= 1.
double maximal_dilatation(cplx mu, cplx nu);

/// Tangential dilatation of (mu, nu) at z relative to the centre z0 and the
/// phase parameter theta:
///   |1 - (conj(z-z0)/(z-z0)) (mu + nu e^{i theta})|^2 / (1 - |mu + nu e^{i theta}|^2).
/// Throws DegenerateBase when z == z0.
double tangential_dilatation(cplx mu, cplx nu, cplx z, cplx z0, double theta);

/// Single-characteristic form of the same quantity (nu = 0).
double tangential_dilatation(cplx mu, cplx z, cplx z0);

double jacobian(cplx fz, cplx fzbar);

/// (|fz|+|fzbar|)/(|fz|-|fzbar|), with 1 where both vanish and +inf where J = 0.
double map_dilatation(cplx fz, cplx fzbar);

/// (|fz|^2-|fzbar|^2)/(|fz|-|fzbar|)^p, same degenerate conventions as map_dilatation.
double inner_dilatation_p(cplx fz, cplx fzbar, double p);

/// mu + ratio*nu, the single coefficient equivalent to (mu, nu) once the
/// unimodular factor conj(f_z)/f_z is known (ratio = 0 where f_z = 0).
cplx effective_single_coefficient(cplx mu, cplx nu, cplx ratio);

/// Maximal dilatation bound for a truncation rung: |mu|+|nu| <= (n-1)/(n+1).
inline double rung_k_bound(int n) { return (n - 1.0) / (n + 1.0); }

}  // namespace beltrami

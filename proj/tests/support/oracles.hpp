#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

/// Cauchy transform of the unit-disk indicator, (1/pi) int_D dA(s)/(z - s),
/// by adaptive quadrature in polar coordinates centred at z. Along the ray
/// s = z + rho e^{i phi} the rho-integral of rho/(z - s) is -e^{-i phi}
/// times the chord length inside D, so only the angular integral is numeric.
inline cplx cauchy_disk(cplx z) {
  using boost::math::quadrature::gauss_kronrod;
  auto chord = [z](double phi) {
    // |z + rho e|^2 = 1 -> rho^2 + 2 b rho + c = 0
    const cplx e = std::polar(1.0, phi);
    const double b = (std::conj(z) * e).real();
    const double c = std::norm(z) - 1.0;
    const double disc = b * b - c;
    if (disc <= 0.0) return 0.0;
    const double lo = std::max(0.0, -b - std::sqrt(disc));
    const double hi = -b + std::sqrt(disc);
    return hi > lo ? hi - lo : 0.0;
  };
  auto integrand = [&](double phi) { return -std::polar(1.0, -phi) * chord(phi); };
  auto part = [&](auto component) {
    if (std::abs(z) <= 1.0)
      return gauss_kronrod<double, 61>::integrate([&](double phi) { return component(integrand(phi)); }, 0.0,
                                                  2.0 * kPi, 20, 1e-13);
    // Outside the disk the chord vanishes except on the window |phi - centre| < alpha,
    // with square-root endpoints; phi = centre + alpha sin(t) smooths them.
    const double alpha = std::asin(1.0 / std::abs(z));
    const double centre = std::arg(z) + kPi;
    return gauss_kronrod<double, 61>::integrate(
        [&](double t) { return component(integrand(centre + alpha * std::sin(t))) * alpha * std::cos(t); },
        -0.5 * kPi, 0.5 * kPi, 20, 1e-13);
  };
  const double re = part([](cplx v) { return v.real(); });
  const double im = part([](cplx v) { return v.imag(); });
  return cplx{re, im} / kPi;
}

/// d/dz of cauchy_disk by central differences, (d/dx - i d/dy)/2.
inline cplx beurling_disk(cplx z, double step = 1e-4) {
  const cplx dx = (cauchy_disk(z + step) - cauchy_disk(z - step)) / (2.0 * step);
  const cplx dy = (cauchy_disk(z + cplx{0, step}) - cauchy_disk(z - cplx{0, step})) / (2.0 * step);
  return 0.5 * (dx - cplx{0, 1} * dy);
}

/// Twenty probes on the 1/8 lattice, at least 0.25 away from |z| = 1.
inline std::vector<cplx> disk_probes() {
  return {{0.0, 0.0},     {0.25, 0.0},   {0.0, 0.375},  {-0.5, 0.25},  {0.375, -0.375},
          {-0.25, -0.5},  {0.5, 0.5},    {-0.625, 0.0}, {0.125, 0.625}, {0.0, -0.125},
          {1.5, 0.0},     {0.0, 1.375},  {-1.25, 0.75}, {1.0, -1.0},   {-1.5, -1.0},
          {2.0, 0.5},     {-0.5, 2.0},   {2.25, -1.5},  {-2.5, 0.0},   {0.75, 2.5}};
}

inline double disk_indicator(cplx z) { return std::abs(z) < 1.0 ? 1.0 : 0.0; }

/// Smooth bump exp(-1/(1 - |z|^2/R^2)) on |z| < R.
inline double bump(cplx z, double R = 1.0) {
  const double t = std::norm(z) / (R * R);
  return t < 1.0 ? std::exp(-1.0 / (1.0 - t)) : 0.0;
}

}  // namespace oracle

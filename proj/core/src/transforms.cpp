#include "beltrami/transforms.hpp"

#include <cmath>
#include <numbers>

#include "beltrami/errors.hpp"
#include "beltrami/fft.hpp"

namespace beltrami {

namespace {

/// Angular frequency of DFT index k on a period-2L axis.
double frequency(int k, int n, double half_side) {
  int ks = k < n / 2 ? k : k - n;
  return std::numbers::pi * ks / half_side;
}

template <typename Multiplier>
GridField apply_multiplier(const GridField& f, Multiplier&& mult) {
  const int n = f.n();
  const double L = f.half_side();
  std::vector<cplx> buf(f.data().begin(), f.data().end());
  fft2d_forward(buf, n);
  for (int j = 0; j < n; ++j) {
    const double xi2 = frequency(j, n, L);
    for (int k = 0; k < n; ++k) {
      const double xi1 = frequency(k, n, L);
      buf[static_cast<std::size_t>(j) * n + k] *= mult(j, k, xi1, xi2);
    }
  }
  fft2d_inverse(buf, n);
  return GridField(n, L, std::move(buf));
}

}  // namespace

void check_transform_support(const GridField& omega) {
  const double limit = 0.5 * omega.half_side() + 1e-9;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (omega[i] == cplx{}) continue;
    cplx z = omega.z_at(i);
    if (std::abs(z.real()) > limit || std::abs(z.imag()) > limit)
      throw SupportTooLarge("field support reaches (" + std::to_string(z.real()) + ", " +
                            std::to_string(z.imag()) + "), outside the centred half box");
  }
}

GridField cauchy_transform(const GridField& omega) {
  check_transform_support(omega);
  GridField u = apply_multiplier(omega, [](int j, int k, double xi1, double xi2) -> cplx {
    if (j == 0 && k == 0) return {};
    return 2.0 / (cplx{0.0, 1.0} * cplx{xi1, xi2});
  });
  const double area = 4.0 * omega.half_side() * omega.half_side();
  cplx mass{}, conj_moment{};
  for (std::size_t i = 0; i < omega.size(); ++i) {
    mass += omega[i];
    conj_moment += std::conj(omega.z_at(i)) * omega[i];
  }
  mass *= omega.cell_area();
  conj_moment *= omega.cell_area();
  const cplx mean = mass / area;
  const cplx offset = conj_moment / area;
  for (std::size_t i = 0; i < u.size(); ++i) u[i] += mean * std::conj(u.z_at(i)) - offset;
  return u;
}

GridField beurling_transform(const GridField& omega) {
  check_transform_support(omega);
  return apply_multiplier(omega, [](int j, int k, double xi1, double xi2) -> cplx {
    if (j == 0 && k == 0) return {};
    cplx zeta{xi1, xi2};
    return std::conj(zeta) / zeta;
  });
}

namespace {

/// Value at x_n predicted by the quartic through the last five samples.
cplx extrapolate_past_end(const cplx* p, std::ptrdiff_t stride, int n) {
  auto at = [&](int k) { return p[static_cast<std::ptrdiff_t>(k) * stride]; };
  return 5.0 * at(n - 1) - 10.0 * at(n - 2) + 10.0 * at(n - 3) - 5.0 * at(n - 4) + at(n - 5);
}

DerivativePair spectral_derivatives(const GridField& f) {
  const int n = f.n();
  const double L = f.half_side();
  const cplx* d = f.data().data();

  cplx slope_x{}, slope_y{};
  for (int j = 0; j < n; ++j) slope_x += extrapolate_past_end(d + static_cast<std::ptrdiff_t>(j) * n, 1, n) - d[j * n];
  for (int k = 0; k < n; ++k) slope_y += extrapolate_past_end(d + k, n, n) - d[k];
  slope_x /= 2.0 * L * n;
  slope_y /= 2.0 * L * n;

  GridField periodic = f;
  for (std::size_t i = 0; i < periodic.size(); ++i) {
    cplx z = periodic.z_at(i);
    periodic[i] -= slope_x * z.real() + slope_y * z.imag();
  }

  const cplx I{0.0, 1.0};
  auto partial = [&](bool conjugate) {
    return apply_multiplier(periodic, [&](int j, int k, double xi1, double xi2) -> cplx {
      // Odd derivatives drop the unpaired Nyquist mode.
      double a = (k == n / 2) ? 0.0 : xi1;
      double b = (j == n / 2) ? 0.0 : xi2;
      return conjugate ? 0.5 * I * cplx{a, b} : 0.5 * I * cplx{a, -b};
    });
  };
  DerivativePair out{partial(false), partial(true)};
  const cplx trend_z = 0.5 * (slope_x - I * slope_y);
  const cplx trend_zbar = 0.5 * (slope_x + I * slope_y);
  for (std::size_t i = 0; i < out.fz.size(); ++i) {
    out.fz[i] += trend_z;
    out.fzbar[i] += trend_zbar;
  }
  return out;
}

DerivativePair fd_derivatives(const GridField& f) {
  const int n = f.n();
  const double h = f.h();
  auto diff = [&](int j, int k, bool along_x) {
    auto at = [&](int m) { return along_x ? f(j, m) : f(m, k); };
    int i = along_x ? k : j;
    if (i == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    if (i == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    return (at(i + 1) - at(i - 1)) / (2.0 * h);
  };
  DerivativePair out{GridField(n, f.half_side()), GridField(n, f.half_side())};
  const cplx I{0.0, 1.0};
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      cplx fx = diff(j, k, true);
      cplx fy = diff(j, k, false);
      out.fz(j, k) = 0.5 * (fx - I * fy);
      out.fzbar(j, k) = 0.5 * (fx + I * fy);
    }
  return out;
}

}  // namespace

DerivativePair derivatives(const GridField& f, DerivativeMethod method) {
  return method == DerivativeMethod::kSpectral ? spectral_derivatives(f) : fd_derivatives(f);
}

}  // namespace beltrami

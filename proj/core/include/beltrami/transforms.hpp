#pragma once

#include "beltrami/grid.hpp"

namespace beltrami {

struct DerivativePair {
  GridField fz;
  GridField fzbar;
};

enum class DerivativeMethod { kSpectral, kFiniteDifference };

/// Throws SupportTooLarge unless every nonzero sample of omega lies in the
/// centred square of half-side L/2.
void check_transform_support(const GridField& omega);

/// Cauchy transform T omega(z) = (1/pi) \int omega(s) / (z - s) dA(s), so that
/// dbar(T omega) = omega and T omega -> 0 at infinity.
///
/// The periodic part uses the Fourier multiplier 2/(i zeta), zeta = xi1 + i xi2,
/// with the zero mode removed. The removed mean m is restored exactly by the
/// term m*conj(z) minus the first conjugate moment over the box area; on a
/// square box the remaining periodization error is O(|z|^3 / L^4).
GridField cauchy_transform(const GridField& omega);

/// Beurling transform S omega = d(T omega): multiplier conj(zeta)/zeta, zero
/// at zeta = 0. Exact L2 isometry on mean-zero fields.
GridField beurling_transform(const GridField& omega);

/// f_z = (f_x - i f_y)/2 and f_zbar = (f_x + i f_y)/2.
///
/// Spectral mode first removes a linear trend a*x + b*y estimated from the
/// wrap-around jump (quartic edge extrapolation), so fields of the form
/// periodic + affine, such as z + T omega, differentiate to round-off.
DerivativePair derivatives(const GridField& f, DerivativeMethod method = DerivativeMethod::kSpectral);

}  // namespace beltrami

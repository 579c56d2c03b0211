#pragma once

#include <complex>
#include <span>

namespace beltrami {

/// Unnormalized in-place 2-D DFT of an n x n row-major array.
///
/// Backed by FFTW with estimate-mode plans cached per n, which keeps the
/// output bit-identical across runs for a given size.
void fft2d_forward(std::span<std::complex<double>> data, int n);

/// Inverse transform including the 1/n^2 normalization.
void fft2d_inverse(std::span<std::complex<double>> data, int n);

}  // namespace beltrami

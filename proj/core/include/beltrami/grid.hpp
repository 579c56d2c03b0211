#pragma once

#include <complex>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace beltrami {

using cplx = std::complex<double>;

/// Complex samples on the periodic square [-L, L)^2.
///
/// Row-major: sample (j, k) sits at z = (-L + k h) + i(-L + j h), h = 2L/n,
/// so row j is a line of constant imaginary part.
class GridField {
 public:
  GridField(int n, double half_side);
  GridField(int n, double half_side, std::vector<cplx> data);

  /// Samples fn(z) at every node.
  static GridField sample(int n, double half_side, const std::function<cplx(cplx)>& fn);
  /// Cell averages of fn over s x s sub-samples centred on each node.
  static GridField sample_averaged(int n, double half_side, int s,
                                   const std::function<cplx(cplx)>& fn);
  static GridField identity(int n, double half_side);

  int n() const noexcept { return n_; }
  double half_side() const noexcept { return half_side_; }
  double h() const noexcept { return 2.0 * half_side_ / n_; }
  double cell_area() const noexcept { return h() * h(); }
  std::size_t size() const noexcept { return data_.size(); }

  cplx z(int j, int k) const { return {-half_side_ + k * h(), -half_side_ + j * h()}; }
  cplx z_at(std::size_t index) const {
    return z(static_cast<int>(index / n_), static_cast<int>(index % n_));
  }

  cplx& operator()(int j, int k) { return data_[static_cast<std::size_t>(j) * n_ + k]; }
  cplx operator()(int j, int k) const { return data_[static_cast<std::size_t>(j) * n_ + k]; }
  cplx& operator[](std::size_t i) { return data_[i]; }
  cplx operator[](std::size_t i) const { return data_[i]; }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  bool same_geometry(const GridField& other) const noexcept {
    return n_ == other.n_ && half_side_ == other.half_side_;
  }

  /// Bilinear interpolation; exact at nodes. Points outside the sampled
  /// square are clamped to it.
  cplx interpolate(cplx z) const;

  double l2_norm() const;  // sqrt(sum |f|^2 h^2)
  double sup_norm() const;
  bool all_finite() const;

  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);
  GridField& operator*=(cplx scalar);
  friend GridField operator+(GridField a, const GridField& b) { return a += b; }
  friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
  friend GridField operator*(GridField a, cplx s) { return a *= s; }
  friend GridField operator*(cplx s, GridField a) { return a *= s; }

  /// Binary: "BLGF", u32 n, f64 L, then n*n little-endian (re, im) f64 pairs.
  void write_binary(std::ostream& os) const;
  void save_binary(const std::filesystem::path& path) const;
  static GridField read_binary(std::istream& is);
  static GridField load_binary(const std::filesystem::path& path);

  /// CSV with header "x,y,re,im".
  void write_csv(std::ostream& os) const;

 private:
  void validate() const;

  int n_;
  double half_side_;
  std::vector<cplx> data_;
};

/// Real-valued scalar field on the same geometry (dilatations, Jacobians, ...).
struct ScalarField {
  int n = 0;
  double half_side = 0.0;
  std::vector<double> data;

  void write_csv(std::ostream& os) const;
  /// Binary PPM heatmap, values mapped linearly on [lo, hi]; non-finite pixels are black.
  void write_ppm(std::ostream& os, double lo, double hi) const;
};

}  // namespace beltrami

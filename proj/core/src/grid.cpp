#include "beltrami/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "beltrami/errors.hpp"

namespace beltrami {

namespace {

constexpr char kMagic[4] = {'B', 'L', 'G', 'F'};

static_assert(std::endian::native == std::endian::little,
              "GridField binary I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw FormatError("truncated GridField stream");
  return v;
}

}  // namespace

GridField::GridField(int n, double half_side)
    : GridField(n, half_side, std::vector<cplx>(static_cast<std::size_t>(n) * n)) {}

GridField::GridField(int n, double half_side, std::vector<cplx> data)
    : n_(n), half_side_(half_side), data_(std::move(data)) {
  validate();
}

void GridField::validate() const {
  if (n_ < 16 || !std::has_single_bit(static_cast<unsigned>(n_)))
    throw InvalidGrid("grid size must be a power of two >= 16, got " + std::to_string(n_));
  if (!(half_side_ > 0.0) || !std::isfinite(half_side_))
    throw InvalidGrid("grid half-side must be positive");
  if (data_.size() != static_cast<std::size_t>(n_) * n_)
    throw InvalidGrid("grid data has wrong length");
}

GridField GridField::sample(int n, double half_side, const std::function<cplx(cplx)>& fn) {
  GridField g(n, half_side);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) g(j, k) = fn(g.z(j, k));
  return g;
}

GridField GridField::sample_averaged(int n, double half_side, int s,
                                     const std::function<cplx(cplx)>& fn) {
  GridField g(n, half_side);
  const double h = g.h();
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      cplx acc{};
      for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b)
          acc += fn(g.z(j, k) + cplx{((b + 0.5) / s - 0.5) * h, ((a + 0.5) / s - 0.5) * h});
      g(j, k) = acc / static_cast<double>(s * s);
    }
  }
  return g;
}

GridField GridField::identity(int n, double half_side) {
  return sample(n, half_side, [](cplx z) { return z; });
}

cplx GridField::interpolate(cplx z) const {
  const double h = this->h();
  double u = std::clamp((z.real() + half_side_) / h, 0.0, n_ - 1.0);
  double v = std::clamp((z.imag() + half_side_) / h, 0.0, n_ - 1.0);
  int k0 = std::min(static_cast<int>(std::floor(u)), n_ - 2);
  int j0 = std::min(static_cast<int>(std::floor(v)), n_ - 2);
  double a = u - k0;
  double b = v - j0;
  const GridField& f = *this;
  return (1 - a) * (1 - b) * f(j0, k0) + a * (1 - b) * f(j0, k0 + 1) + (1 - a) * b * f(j0 + 1, k0) +
         a * b * f(j0 + 1, k0 + 1);
}

double GridField::l2_norm() const {
  double acc = 0.0;
  for (cplx v : data_) acc += std::norm(v);
  return std::sqrt(acc * cell_area());
}

double GridField::sup_norm() const {
  double m = 0.0;
  for (cplx v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool GridField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](cplx v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

GridField& GridField::operator+=(const GridField& other) {
  if (!same_geometry(other)) throw InvalidGrid("grid geometry mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  if (!same_geometry(other)) throw InvalidGrid("grid geometry mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

GridField& GridField::operator*=(cplx scalar) {
  for (cplx& v : data_) v *= scalar;
  return *this;
}

void GridField::write_binary(std::ostream& os) const {
  os.write(kMagic, 4);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(n_));
  put<double>(os, half_side_);
  os.write(reinterpret_cast<const char*>(data_.data()),
           static_cast<std::streamsize>(data_.size() * sizeof(cplx)));
}

void GridField::save_binary(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write " + path.string());
  write_binary(os);
}

GridField GridField::read_binary(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw FormatError("not a BLGF grid file");
  auto n = get<std::uint32_t>(is);
  auto half_side = get<double>(is);
  if (n < 16 || n > (1u << 15)) throw FormatError("implausible grid size in BLGF header");
  std::vector<cplx> data(static_cast<std::size_t>(n) * n);
  is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(cplx)));
  if (!is) throw FormatError("truncated BLGF payload");
  return GridField(static_cast<int>(n), half_side, std::move(data));
}

GridField GridField::load_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot read " + path.string());
  return read_binary(is);
}

void GridField::write_csv(std::ostream& os) const {
  os << "x,y,re,im\n";
  auto old = os.precision(17);
  for (int j = 0; j < n_; ++j)
    for (int k = 0; k < n_; ++k) {
      cplx p = z(j, k);
      cplx v = (*this)(j, k);
      os << p.real() << ',' << p.imag() << ',' << v.real() << ',' << v.imag() << '\n';
    }
  os.precision(old);
}

void ScalarField::write_csv(std::ostream& os) const {
  os << "x,y,value\n";
  auto old = os.precision(17);
  const double h = 2.0 * half_side / n;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      os << -half_side + k * h << ',' << -half_side + j * h << ','
         << data[static_cast<std::size_t>(j) * n + k] << '\n';
  os.precision(old);
}

void ScalarField::write_ppm(std::ostream& os, double lo, double hi) const {
  os << "P6\n" << n << ' ' << n << "\n255\n";
  const double span = hi > lo ? hi - lo : 1.0;
  // Top row of the image is the largest imaginary part.
  for (int j = n - 1; j >= 0; --j) {
    for (int k = 0; k < n; ++k) {
      double v = data[static_cast<std::size_t>(j) * n + k];
      unsigned char rgb[3] = {0, 0, 0};
      if (std::isfinite(v)) {
        double t = std::clamp((v - lo) / span, 0.0, 1.0);
        rgb[0] = static_cast<unsigned char>(255.0 * t);
        rgb[1] = static_cast<unsigned char>(255.0 * (1.0 - std::abs(2.0 * t - 1.0)));
        rgb[2] = static_cast<unsigned char>(255.0 * (1.0 - t));
      }
      os.write(reinterpret_cast<const char*>(rgb), 3);
    }
  }
}

}  // namespace beltrami

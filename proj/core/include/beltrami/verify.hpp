#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "beltrami/coefficients.hpp"
#include "beltrami/conditions.hpp"
#include "beltrami/linear_solver.hpp"

namespace beltrami {

struct ResidualReport {
  GridField field;         // f_zbar - mu(z,f) f_z - nu(z,f) conj(f_z)
  double rel_l2 = 0.0;     // over the coefficient support
  double sup = 0.0;
  std::size_t samples = 0;
};

/// Pointwise residual of the quasilinear equation with the untruncated spec.
/// Norms are taken over |z| <= support_radius, skipping declared singular points.
ResidualReport residual(const Solution& solution, const CoefficientSpec& spec);

struct JacobianStats {
  double min = 0.0;
  double fraction_nonpositive = 0.0;
  std::size_t samples = 0;
};

/// J = |f_z|^2 - |f_zbar|^2 over |z| <= radius (default: the solution's
/// support radius, or the whole grid when that is 0).
JacobianStats jacobian_stats(const Solution& solution, std::optional<double> radius = std::nullopt);

/// Closed annulus r_inner <= |z| <= r_outer; cells are used only when all
/// four corners lie inside.
struct Annulus {
  double r_inner = 0.0;
  double r_outer = 0.0;
};

struct InjectivityReport {
  std::size_t cells = 0;
  std::size_t orientation_flips = 0;   // mapped triangles with signed area <= 0
  std::size_t overlapping_cells = 0;   // cells whose image overlaps a non-adjacent cell's image
  std::size_t folded_cell_count = 0;   // cells with a flip or an overlap
  bool pass() const { return orientation_flips == 0 && overlapping_cells == 0; }
};

/// Splits each cell into two triangles, maps the vertices by f and checks
/// orientation and pairwise overlap through a uniform bin index.
InjectivityReport injectivity_check(const GridField& f, std::optional<Annulus> region = std::nullopt);
InjectivityReport injectivity_check(const Solution& solution, std::optional<Annulus> region = std::nullopt);

struct InverseProbe {
  cplx w0{};
  std::size_t samples = 0;
  std::size_t violations = 0;  // K^T_{mu_g}(w, w0) > Q(w)
  double max_excess = 0.0;
};

struct InverseReport {
  double p = 2.0;
  cplx window_center{};
  double window_half = 0.0;
  int image_n = 0;
  double window_area = 0.0;
  double integral_kip = 0.0;   // sum of K_{I,p}(w, g) dm over the window
  double integral_kmap = 0.0;  // sum of K_{mu_g}(w) dm over the window
  double kip_min = 0.0;
  double kip_max = 0.0;
  std::vector<InverseProbe> probes;
};

struct InverseOptions {
  int image_n = 128;
  /// Half-width of the square image window centred at f(0); by default the
  /// largest square inside the image of the disk |z| <= support radius.
  std::optional<double> window_half;
  double tolerance = 1e-9;
};

/// Discrete inverse g of f on an image-side grid by triangle point location
/// and barycentric interpolation; g_w, g_wbar by finite differences.
/// Throws NotInvertible when f fails injectivity_check, OutOfImage when a
/// window node or probe lies outside the mapped grid.
InverseReport inverse_dilatation_audit(const Solution& solution, double p, const MajorantSpec& q,
                                       const std::vector<cplx>& probes, const InverseOptions& options = {});

struct ContinuityOptions {
  int pairs_per_scale = 256;
  int scales = 6;                  // distances r0 2^-1, ..., r0 2^-scales
  std::uint64_t seed = 20240229;
  std::optional<double> r0;        // defaults to the margin
};

struct ContinuityFit {
  double r0 = 0.0;
  double compact_radius = 0.0;
  double q_l1_norm = 0.0;
  std::vector<double> distances;
  std::vector<double> c_per_scale;
  double c = 0.0;                  // max over scales
  double spread = 0.0;             // max/min of c_per_scale
};

/// Smallest C with |f(x)-f(y)| <= C ||Q||_1^{1/2} / log^{1/2}(1 + r0/(2|x-y|))
/// over seeded random pairs in the compact |z| <= R - margin, where R is the
/// support radius (L/2 when the solution has none).
ContinuityFit continuity_modulus_fit(const Solution& solution, double q_l1_norm, double margin,
                                     const ContinuityOptions& options = {});

struct VerificationReport {
  double residual_l2_rel = 0.0;
  double residual_sup = 0.0;
  JacobianStats jacobian;
  InjectivityReport injectivity;
  std::optional<InverseReport> inverse;
  std::optional<ContinuityFit> continuity;
};

}  // namespace beltrami

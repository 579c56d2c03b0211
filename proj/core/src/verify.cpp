#include "beltrami/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "beltrami/dilatation.hpp"
#include "beltrami/errors.hpp"

namespace beltrami {

ResidualReport residual(const Solution& solution, const CoefficientSpec& spec) {
  const GridField& f = solution.f;
  ResidualReport out{GridField(f.n(), f.half_side())};
  const double R = spec.support_radius();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const cplx z = f.z_at(i);
    const bool inside = std::abs(z) <= R;
    CoefficientValues c{};
    if (inside && !spec.is_singular_point(z)) c = spec.evaluate_unchecked(z, f[i]);
    const cplx fz = solution.fz[i];
    const cplx r = solution.fzbar[i] - c.mu * fz - c.nu * std::conj(fz);
    out.field[i] = r;
    if (!inside || spec.is_singular_point(z)) continue;
    num += std::norm(r);
    den += std::norm(fz);
    out.sup = std::max(out.sup, std::abs(r));
    ++out.samples;
  }
  out.rel_l2 = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return out;
}

JacobianStats jacobian_stats(const Solution& solution, std::optional<double> radius) {
  const double rad = radius.value_or(solution.support_radius);
  JacobianStats s;
  s.min = kInfinity;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < solution.f.size(); ++i) {
    if (rad > 0.0 && std::abs(solution.f.z_at(i)) > rad) continue;
    const double J = jacobian(solution.fz[i], solution.fzbar[i]);
    s.min = std::min(s.min, J);
    if (J <= 0.0) ++bad;
    ++s.samples;
  }
  s.fraction_nonpositive = s.samples ? static_cast<double>(bad) / s.samples : 0.0;
  return s;
}

namespace {

struct Triangle {
  std::array<std::size_t, 3> v;  // grid indices, counter-clockwise in the z-plane
  std::size_t cell;
};

struct Mesh {
  const GridField* f = nullptr;
  std::vector<Triangle> tris;
  std::size_t cells = 0;
};

Mesh build_mesh(const GridField& f, std::optional<Annulus> region) {
  Mesh m;
  m.f = &f;
  const int n = f.n();
  auto in_region = [&](std::size_t i) {
    if (!region) return true;
    const double r = std::abs(f.z_at(i));
    return r >= region->r_inner && r <= region->r_outer;
  };
  for (int j = 0; j + 1 < n; ++j)
    for (int k = 0; k + 1 < n; ++k) {
      const std::size_t a = static_cast<std::size_t>(j) * n + k, b = a + 1, d = a + n, c = d + 1;
      if (!(in_region(a) && in_region(b) && in_region(c) && in_region(d))) continue;
      const std::size_t cell = m.cells++;
      m.tris.push_back({{a, b, c}, cell});
      m.tris.push_back({{a, c, d}, cell});
    }
  return m;
}

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

double signed_area(const Mesh& m, const Triangle& t) {
  const GridField& f = *m.f;
  return 0.5 * cross(f[t.v[1]] - f[t.v[0]], f[t.v[2]] - f[t.v[0]]);
}

struct Box {
  double x0, y0, x1, y1;
};

Box bounds(const Mesh& m, const Triangle& t) {
  const GridField& f = *m.f;
  Box b{kInfinity, kInfinity, -kInfinity, -kInfinity};
  for (std::size_t v : t.v) {
    b.x0 = std::min(b.x0, f[v].real());
    b.y0 = std::min(b.y0, f[v].imag());
    b.x1 = std::max(b.x1, f[v].real());
    b.y1 = std::max(b.y1, f[v].imag());
  }
  return b;
}

/// Uniform bins over the image bounding box; each triangle is listed in every
/// bin its bounding box touches.
struct BinIndex {
  double x0 = 0, y0 = 0, bw = 1;
  int nx = 1, ny = 1;
  std::vector<std::vector<std::uint32_t>> bins;
  std::vector<Box> boxes;

  int bx(double x) const { return std::clamp(static_cast<int>((x - x0) / bw), 0, nx - 1); }
  int by(double y) const { return std::clamp(static_cast<int>((y - y0) / bw), 0, ny - 1); }
};

BinIndex build_bins(const Mesh& m) {
  BinIndex idx;
  idx.boxes.reserve(m.tris.size());
  Box all{kInfinity, kInfinity, -kInfinity, -kInfinity};
  for (const Triangle& t : m.tris) {
    Box b = bounds(m, t);
    idx.boxes.push_back(b);
    all = {std::min(all.x0, b.x0), std::min(all.y0, b.y0), std::max(all.x1, b.x1), std::max(all.y1, b.y1)};
  }
  if (m.tris.empty()) return idx;
  const double w = std::max(all.x1 - all.x0, 1e-300), h = std::max(all.y1 - all.y0, 1e-300);
  const double target = std::max(1.0, std::sqrt(static_cast<double>(m.tris.size()) / 2.0));
  idx.bw = std::max(w, h) / target;
  idx.x0 = all.x0;
  idx.y0 = all.y0;
  idx.nx = std::max(1, static_cast<int>(std::ceil(w / idx.bw)));
  idx.ny = std::max(1, static_cast<int>(std::ceil(h / idx.bw)));
  idx.bins.resize(static_cast<std::size_t>(idx.nx) * idx.ny);
  for (std::uint32_t t = 0; t < m.tris.size(); ++t) {
    const Box& b = idx.boxes[t];
    for (int y = idx.by(b.y0); y <= idx.by(b.y1); ++y)
      for (int x = idx.bx(b.x0); x <= idx.bx(b.x1); ++x)
        idx.bins[static_cast<std::size_t>(y) * idx.nx + x].push_back(t);
  }
  return idx;
}

bool share_vertex(const Triangle& a, const Triangle& b) {
  for (std::size_t u : a.v)
    for (std::size_t v : b.v)
      if (u == v) return true;
  return false;
}

/// Separating-axis test; contact within `tol` does not count as overlap.
bool interiors_overlap(const std::array<cplx, 3>& p, const std::array<cplx, 3>& q, double tol) {
  auto separated_along = [&](cplx axis) {
    double p0 = kInfinity, p1 = -kInfinity, q0 = kInfinity, q1 = -kInfinity;
    for (cplx v : p) {
      const double s = v.real() * axis.real() + v.imag() * axis.imag();
      p0 = std::min(p0, s);
      p1 = std::max(p1, s);
    }
    for (cplx v : q) {
      const double s = v.real() * axis.real() + v.imag() * axis.imag();
      q0 = std::min(q0, s);
      q1 = std::max(q1, s);
    }
    const double len = std::abs(axis);
    return p1 <= q0 + tol * len || q1 <= p0 + tol * len;
  };
  for (const auto* tri : {&p, &q})
    for (int e = 0; e < 3; ++e) {
      const cplx edge = (*tri)[(e + 1) % 3] - (*tri)[e];
      if (edge == cplx{}) continue;
      if (separated_along(cplx{-edge.imag(), edge.real()})) return false;
    }
  return true;
}

std::array<cplx, 3> image(const Mesh& m, const Triangle& t) {
  const GridField& f = *m.f;
  return {f[t.v[0]], f[t.v[1]], f[t.v[2]]};
}

/// Barycentric location of w in triangle t; returns g(w) when inside.
std::optional<cplx> locate_in(const Mesh& m, const Triangle& t, cplx w, double tol) {
  const GridField& f = *m.f;
  const cplx A = f[t.v[0]], B = f[t.v[1]], C = f[t.v[2]];
  const double det = cross(B - A, C - A);
  if (det <= 0.0) return std::nullopt;
  const double s = cross(w - A, C - A) / det;
  const double u = cross(B - A, w - A) / det;
  if (s < -tol || u < -tol || s + u > 1.0 + tol) return std::nullopt;
  const cplx za = f.z_at(t.v[0]), zb = f.z_at(t.v[1]), zc = f.z_at(t.v[2]);
  return za + s * (zb - za) + u * (zc - za);
}

std::optional<cplx> locate(const Mesh& m, const BinIndex& idx, cplx w) {
  if (m.tris.empty()) return std::nullopt;
  const double tol = 1e-12 * idx.bw * std::max(idx.nx, idx.ny);
  if (w.real() < idx.x0 - tol || w.imag() < idx.y0 - tol || w.real() > idx.x0 + idx.bw * idx.nx + tol ||
      w.imag() > idx.y0 + idx.bw * idx.ny + tol)
    return std::nullopt;
  // bx/by are monotone, so any triangle whose box contains w is listed in w's bin.
  for (std::uint32_t t : idx.bins[static_cast<std::size_t>(idx.by(w.imag())) * idx.nx + idx.bx(w.real())])
    if (auto g = locate_in(m, m.tris[t], w, 1e-12)) return g;
  return std::nullopt;
}

InjectivityReport check_mesh(const Mesh& m, const BinIndex& idx) {
  InjectivityReport rep;
  rep.cells = m.cells;
  std::vector<char> flipped(m.cells, 0), overlapped(m.cells, 0);
  for (const Triangle& t : m.tris)
    if (!(signed_area(m, t) > 0.0)) {
      ++rep.orientation_flips;
      flipped[t.cell] = 1;
    }

  const double extent = std::max({idx.bw * idx.nx, idx.bw * idx.ny, 1e-300});
  const double tol = 1e-12 * extent;
  for (int by = 0; by < idx.ny; ++by)
    for (int bx = 0; bx < idx.nx; ++bx) {
      const auto& bin = idx.bins[static_cast<std::size_t>(by) * idx.nx + bx];
      for (std::size_t a = 0; a < bin.size(); ++a)
        for (std::size_t b = a + 1; b < bin.size(); ++b) {
          const Triangle& ta = m.tris[bin[a]];
          const Triangle& tb = m.tris[bin[b]];
          if (ta.cell == tb.cell || share_vertex(ta, tb)) continue;
          const Box& A = idx.boxes[bin[a]];
          const Box& B = idx.boxes[bin[b]];
          if (A.x1 <= B.x0 + tol || B.x1 <= A.x0 + tol || A.y1 <= B.y0 + tol || B.y1 <= A.y0 + tol) continue;
          // Test each pair once, in the first bin both boxes share.
          if (std::max(idx.bx(A.x0), idx.bx(B.x0)) != bx || std::max(idx.by(A.y0), idx.by(B.y0)) != by) continue;
          if (interiors_overlap(image(m, ta), image(m, tb), tol)) {
            overlapped[ta.cell] = 1;
            overlapped[tb.cell] = 1;
          }
        }
    }
  for (std::size_t c = 0; c < m.cells; ++c) {
    rep.overlapping_cells += overlapped[c];
    rep.folded_cell_count += (flipped[c] || overlapped[c]) ? 1 : 0;
  }
  return rep;
}

}  // namespace

InjectivityReport injectivity_check(const GridField& f, std::optional<Annulus> region) {
  Mesh m = build_mesh(f, region);
  return check_mesh(m, build_bins(m));
}

InjectivityReport injectivity_check(const Solution& solution, std::optional<Annulus> region) {
  return injectivity_check(solution.f, region);
}

InverseReport inverse_dilatation_audit(const Solution& solution, double p, const MajorantSpec& q,
                                       const std::vector<cplx>& probes, const InverseOptions& options) {
  if (!(p > 1.0 && p <= 2.0)) throw ParamOutOfRange("inverse audit needs 1 < p <= 2");
  if (options.image_n < 4) throw ParamOutOfRange("image grid needs at least 4 nodes per axis");
  const GridField& f = solution.f;
  Mesh mesh = build_mesh(f, std::nullopt);
  BinIndex idx = build_bins(mesh);
  const InjectivityReport inj = check_mesh(mesh, idx);
  if (!inj.pass())
    throw NotInvertible("map is not injective on the grid (" + std::to_string(inj.folded_cell_count) +
                        " folded cells)");

  InverseReport rep;
  rep.p = p;
  rep.image_n = options.image_n;
  rep.window_center = f.interpolate(0.0);
  if (options.window_half) {
    rep.window_half = *options.window_half;
  } else {
    const double rho = solution.support_radius > 0.0 ? solution.support_radius : 0.5 * f.half_side();
    double dmin = kInfinity;
    for (int k = 0; k < 512; ++k)
      dmin = std::min(dmin, std::abs(f.interpolate(std::polar(rho, 2.0 * std::numbers::pi * k / 512)) -
                                     rep.window_center));
    rep.window_half = dmin / std::sqrt(2.0);
  }
  if (!(rep.window_half > 0.0)) throw OutOfImage("image window is empty");

  const int m = options.image_n;
  const double a = rep.window_half;
  const double h = 2.0 * a / m;
  rep.window_area = 4.0 * a * a;
  auto node = [&](int j, int k) {
    return rep.window_center + cplx{-a + (k + 0.5) * h, -a + (j + 0.5) * h};
  };

  std::vector<cplx> g(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      auto v = locate(mesh, idx, node(j, k));
      if (!v) throw OutOfImage("image window node outside the mapped grid");
      g[static_cast<std::size_t>(j) * m + k] = *v;
    }

  auto diff = [&](int j, int k, bool along_x) {
    auto at = [&](int t) { return along_x ? g[static_cast<std::size_t>(j) * m + t] : g[static_cast<std::size_t>(t) * m + k]; };
    const int i = along_x ? k : j;
    if (i == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    if (i == m - 1) return (3.0 * at(m - 1) - 4.0 * at(m - 2) + at(m - 3)) / (2.0 * h);
    return (at(i + 1) - at(i - 1)) / (2.0 * h);
  };

  std::vector<cplx> mu_g(g.size());
  rep.kip_min = kInfinity;
  rep.kip_max = 0.0;
  const cplx I{0.0, 1.0};
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      const cplx gx = diff(j, k, true), gy = diff(j, k, false);
      const cplx gw = 0.5 * (gx - I * gy), gwbar = 0.5 * (gx + I * gy);
      const double kip = inner_dilatation_p(gw, gwbar, p);
      rep.integral_kip += kip * h * h;
      rep.integral_kmap += map_dilatation(gw, gwbar) * h * h;
      rep.kip_min = std::min(rep.kip_min, kip);
      rep.kip_max = std::max(rep.kip_max, kip);
      mu_g[static_cast<std::size_t>(j) * m + k] = std::abs(gw) > 0.0 ? gwbar / gw : cplx{kInfinity, 0.0};
    }

  for (cplx w0 : probes) {
    if (!locate(mesh, idx, w0)) throw OutOfImage("probe point outside the image of the grid");
    InverseProbe pr;
    pr.w0 = w0;
    pr.max_excess = -kInfinity;
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const cplx w = node(j, k);
        if (w == w0) continue;
        const cplx mu = mu_g[static_cast<std::size_t>(j) * m + k];
        const double kt = std::isfinite(mu.real()) ? tangential_dilatation(mu, w, w0) : kInfinity;
        const double bound = evaluate_majorant(*q.expr, w, w0);
        ++pr.samples;
        const double excess = kt == bound ? 0.0 : kt - bound;
        pr.max_excess = std::max(pr.max_excess, excess);
        if (excess > options.tolerance) ++pr.violations;
      }
    rep.probes.push_back(pr);
  }
  return rep;
}

ContinuityFit continuity_modulus_fit(const Solution& solution, double q_l1_norm, double margin,
                                     const ContinuityOptions& options) {
  if (!(q_l1_norm > 0.0)) throw ParamOutOfRange("||Q||_1 must be positive");
  if (!(margin > 0.0)) throw ParamOutOfRange("margin must be positive");
  if (options.pairs_per_scale < 1 || options.scales < 1) throw ParamOutOfRange("pair sampling sizes must be positive");
  const GridField& f = solution.f;
  const double base = solution.support_radius > 0.0 ? solution.support_radius : 0.5 * f.half_side();
  ContinuityFit fit;
  fit.r0 = options.r0.value_or(margin);
  fit.compact_radius = base - margin;
  fit.q_l1_norm = q_l1_norm;
  if (!(fit.compact_radius > 0.0)) throw EmptyCompact("margin leaves no compact inside the support");
  if (!(fit.r0 > 0.0)) throw ParamOutOfRange("r0 must be positive");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double Rk = fit.compact_radius;
  auto point_in_compact = [&] {
    for (;;) {
      const cplx z{Rk * unit(rng), Rk * unit(rng)};
      if (std::abs(z) <= Rk) return z;
    }
  };

  const double root_q = std::sqrt(q_l1_norm);
  for (int s = 1; s <= options.scales; ++s) {
    const double d = fit.r0 * std::ldexp(1.0, -s);
    const double shape = std::sqrt(std::log(1.0 + fit.r0 / (2.0 * d)));
    double c = 0.0;
    for (int i = 0; i < options.pairs_per_scale; ++i) {
      cplx x, y;
      for (int tries = 0;; ++tries) {
        x = point_in_compact();
        y = x + std::polar(d, angle(rng));
        if (std::abs(y) <= Rk) break;
        if (tries > 10000) throw EmptyCompact("compact too small for pair distance " + std::to_string(d));
      }
      c = std::max(c, std::abs(f.interpolate(x) - f.interpolate(y)) * shape / root_q);
    }
    fit.distances.push_back(d);
    fit.c_per_scale.push_back(c);
  }
  fit.c = *std::max_element(fit.c_per_scale.begin(), fit.c_per_scale.end());
  const double cmin = *std::min_element(fit.c_per_scale.begin(), fit.c_per_scale.end());
  fit.spread = cmin > 0.0 ? fit.c / cmin : kInfinity;
  return fit;
}

}  // namespace beltrami

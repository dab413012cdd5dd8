#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "gelfand/common.hpp"
#include "gelfand/geometry.hpp"

namespace gelfand {

enum class NodeClass : unsigned char {
  exterior,
  dirichlet,  // snapped onto the boundary; carries u = 0, not an unknown
  interior,
  axis_s,  // s = 0 (i = 0)
  axis_t,  // t = 0 (j = 0)
  origin
};

/// One of the four lattice links of an active node.
/// neighbor >= 0: full link to another active node (theta == 1).
/// cut: the link crosses the Dirichlet boundary at fraction theta in (0,1].
/// neither: no link on this side (axis side of an axis node).
struct LinkInfo {
  int neighbor = -1;
  double theta = 0.0;
  bool cut = false;
};

// Link directions: 0 = -s, 1 = +s, 2 = -t, 3 = +t.
inline constexpr int kDirSM = 0, kDirSP = 1, kDirTM = 2, kDirTP = 3;

/// Uniform lattice over the generator's bounding box with per-node
/// classification, monomial weights s^{m-1} t^{k-1}, Shortley-Weller cut
/// fractions, and the cell measures that make the assembled operator
/// symmetric. Axis nodes are genuine unknowns: the monomial weight vanishes
/// there, which encodes the natural (zero-flux) condition u_s = 0 at s = 0
/// without ghost nodes; their cell measures are the exact half-cell integrals
/// of the weight.
class Grid {
 public:
  DomainSpec spec;
  double h = 0.0;
  int ni = 0, nj = 0;  // lattice dimensions, s_i = i*h, t_j = j*h

  std::vector<NodeClass> klass;      // ni*nj
  std::vector<int> active_of_node;   // flat lattice index -> active id or -1
  std::vector<int> node_of_active;   // active id -> flat lattice index

  // per active node
  std::vector<double> dist;                      // signed boundary distance
  std::vector<double> mono_w;                    // s^{m-1} t^{k-1}
  std::vector<double> quad_w;                    // quadrature weight (see below)
  std::vector<double> vol;                       // operator cell measure, > 0
  std::vector<std::array<LinkInfo, 4>> links;

  double inradius = 0.0;
  double cmk = 0.0;  // |S^{m-1}| |S^{k-1}|
  int nearest_origin = 0;  // active id of the node closest to the origin

  int m() const { return spec.m; }
  int k() const { return spec.k; }
  double s_of(int i) const { return i * h; }
  double t_of(int j) const { return j * h; }
  int flat(int i, int j) const { return j * ni + i; }
  int active_count() const { return static_cast<int>(node_of_active.size()); }
  int active_at(int i, int j) const {
    if (i < 0 || j < 0 || i >= ni || j >= nj) return -1;
    return active_of_node[flat(i, j)];
  }
  Point2 point_of_active(int a) const {
    const int f = node_of_active[a];
    return {s_of(f % ni), t_of(f / ni)};
  }
  NodeClass class_of_active(int a) const { return klass[node_of_active[a]]; }
  int count_class(NodeClass c) const {
    int n = 0;
    for (auto cl : klass) n += (cl == c);
    return n;
  }

  /// Per-direction 1D cell measure of the monomial weight: lumped w*h on
  /// interior slabs, exact half-cell integral on the axis slab.
  double cell_s(int i) const {
    return i == 0 ? std::pow(0.5 * h, spec.m) / spec.m
                  : std::pow(s_of(i), spec.m - 1) * h;
  }
  double cell_t(int j) const {
    return j == 0 ? std::pow(0.5 * h, spec.k) / spec.k
                  : std::pow(t_of(j), spec.k - 1) * h;
  }
};

namespace detail {

inline double snap_tol() { return 1e-6; }

/// Cut fraction along the link from an active node toward an exterior
/// neighbor: the zero of the signed distance, located by bisection.
inline double cut_fraction(const DomainSpec& spec, double s, double t,
                           double ds, double dt) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (boundary_distance(spec, s + mid * ds, t + mid * dt) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return std::max(0.5 * (lo + hi), snap_tol());
}

}  // namespace detail

/// Builds the grid. Requires at least 8 cells across the generator inradius.
inline Grid build_grid(const DomainSpec& spec, double h) {
  if (!(h > 0.0)) throw SpacingTooCoarse("spacing must be positive");
  Grid g;
  g.spec = spec;
  g.h = h;
  g.inradius = generator_inradius(spec.generator);
  if (g.inradius / h < 8.0)
    throw SpacingTooCoarse("fewer than 8 cells across the generator inradius (h too coarse)");

  const Point2 box = bounding_box(spec.generator);
  g.ni = static_cast<int>(std::ceil(box.s / h)) + 2;
  g.nj = static_cast<int>(std::ceil(box.t / h)) + 2;
  g.klass.assign(static_cast<std::size_t>(g.ni) * g.nj, NodeClass::exterior);
  g.active_of_node.assign(g.klass.size(), -1);

  const double snap = detail::snap_tol() * h;
  for (int j = 0; j < g.nj; ++j) {
    for (int i = 0; i < g.ni; ++i) {
      const double d = boundary_distance(spec, g.s_of(i), g.t_of(j));
      NodeClass& c = g.klass[g.flat(i, j)];
      if (d > snap) {
        if (i == 0 && j == 0)
          c = NodeClass::origin;
        else if (i == 0)
          c = NodeClass::axis_s;
        else if (j == 0)
          c = NodeClass::axis_t;
        else
          c = NodeClass::interior;
      } else if (d > 0.0) {
        c = NodeClass::dirichlet;
      }
    }
  }

  auto is_active = [&](NodeClass c) {
    return c == NodeClass::interior || c == NodeClass::axis_s ||
           c == NodeClass::axis_t || c == NodeClass::origin;
  };

  for (std::size_t f = 0; f < g.klass.size(); ++f) {
    if (is_active(g.klass[f])) {
      g.active_of_node[f] = static_cast<int>(g.node_of_active.size());
      g.node_of_active.push_back(static_cast<int>(f));
    }
  }

  const int n = g.active_count();
  g.dist.resize(n);
  g.mono_w.resize(n);
  g.quad_w.resize(n);
  g.vol.resize(n);
  g.links.resize(n);

  const int m = spec.m, k = spec.k;
  double best_r2 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) {
    const int f = g.node_of_active[a];
    const int i = f % g.ni, j = f / g.ni;
    const double s = g.s_of(i), t = g.t_of(j);
    g.dist[a] = boundary_distance(spec, s, t);
    g.mono_w[a] = std::pow(s, m - 1) * std::pow(t, k - 1);
    // Lumped monomial quadrature weight, clipped by the cell fraction inside
    // the region so boundary cells are not over-counted.
    const double clip = std::clamp(0.5 + g.dist[a] / h, 0.0, 1.0);
    g.quad_w[a] = g.mono_w[a] * h * h * clip;
    g.vol[a] = g.cell_s(i) * g.cell_t(j);

    const double r2 = s * s + t * t;
    if (r2 < best_r2) {
      best_r2 = r2;
      g.nearest_origin = a;
    }

    const int di[4] = {-1, 1, 0, 0};
    const int dj[4] = {0, 0, -1, 1};
    for (int dir = 0; dir < 4; ++dir) {
      LinkInfo& link = g.links[a][dir];
      const int in = i + di[dir], jn = j + dj[dir];
      if (in < 0 || jn < 0) continue;  // axis side: natural, no link
      const int fn = g.flat(in, jn);
      if (in < g.ni && jn < g.nj && is_active(g.klass[fn])) {
        link.neighbor = g.active_of_node[fn];
        link.theta = 1.0;
        continue;
      }
      if (in < g.ni && jn < g.nj && g.klass[fn] == NodeClass::dirichlet) {
        link.cut = true;
        link.theta = 1.0;  // boundary snapped onto the neighbor node
        continue;
      }
      link.cut = true;
      link.theta = detail::cut_fraction(spec, s, t, di[dir] * h, dj[dir] * h);
    }
  }

  g.cmk = unit_sphere_area(m) * unit_sphere_area(k);
  return g;
}

/// Weighted quadrature: c_{m,k} * sum field * extra * w * h^2 over active
/// nodes. Terms with field*w == 0 contribute zero without evaluating the
/// extra weight, which makes axis-singular weights such as s^{-2*alpha-2}
/// integrable whenever the field vanishes on the axis.
template <class F>
double weighted_integral(const Grid& g, const std::vector<double>& field, F&& extra) {
  double acc = 0.0;
  const int n = g.active_count();
  for (int a = 0; a < n; ++a) {
    const double fw = field[a] * g.quad_w[a];
    if (fw == 0.0) continue;
    const Point2 p = g.point_of_active(a);
    const double e = extra(p.s, p.t);
    const double term = fw * e;
    if (!std::isfinite(term))
      throw NonFiniteIntegrand("non-finite integrand at s=" + std::to_string(p.s) +
                               ", t=" + std::to_string(p.t));
    acc += term;
  }
  return g.cmk * acc;
}

inline double weighted_integral(const Grid& g, const std::vector<double>& field) {
  return weighted_integral(g, field, [](double, double) { return 1.0; });
}

/// Discrete gradient (u_s, u_t) per active node. Centered where both
/// neighbors are unknowns; one-sided into the interior at cut links (the
/// formula stays exact for linear fields that do not vanish on the
/// boundary); forced to zero on the matching axis, where the reflected
/// solution has a critical line.
inline void gradient_fields(const Grid& g, const std::vector<double>& u,
                            std::vector<double>& us, std::vector<double>& ut) {
  const int n = g.active_count();
  us.assign(n, 0.0);
  ut.assign(n, 0.0);
  for (int a = 0; a < n; ++a) {
    const NodeClass c = g.class_of_active(a);
    const auto& L = g.links[a];
    auto one_dim = [&](int dm, int dp) -> double {
      const LinkInfo& lo = L[dm];
      const LinkInfo& hi = L[dp];
      if (lo.neighbor >= 0 && hi.neighbor >= 0)
        return (u[hi.neighbor] - u[lo.neighbor]) / (2.0 * g.h);
      if (hi.neighbor >= 0 && lo.cut)
        return (u[hi.neighbor] - u[a]) / g.h;
      if (lo.neighbor >= 0)  // hi side cut or absent
        return (u[a] - u[lo.neighbor]) / g.h;
      // both sides cut (sliver): fall back to the Dirichlet-aware side
      if (hi.cut && lo.cut) {
        const LinkInfo& wide = hi.theta >= lo.theta ? hi : lo;
        const double sgn = (&wide == &hi) ? 1.0 : -1.0;
        return sgn * (0.0 - u[a]) / (wide.theta * g.h);
      }
      if (hi.cut) return (0.0 - u[a]) / (hi.theta * g.h);
      if (lo.cut) return (u[a] - 0.0) / (lo.theta * g.h);
      return 0.0;
    };
    if (c == NodeClass::axis_s || c == NodeClass::origin)
      us[a] = 0.0;
    else
      us[a] = one_dim(kDirSM, kDirSP);
    if (c == NodeClass::axis_t || c == NodeClass::origin)
      ut[a] = 0.0;
    else
      ut[a] = one_dim(kDirTM, kDirTP);
  }
}

/// Bilinear interpolation of an active-node field; exterior and Dirichlet
/// lattice values count as zero (the solution extended by zero).
inline double interpolate(const Grid& g, const std::vector<double>& u, double s,
                          double t) {
  if (s < 0.0 || t < 0.0) return 0.0;
  const double x = s / g.h, y = t / g.h;
  const int i = std::min(static_cast<int>(x), g.ni - 2);
  const int j = std::min(static_cast<int>(y), g.nj - 2);
  if (i < 0 || j < 0 || i >= g.ni - 1 || j >= g.nj - 1) return 0.0;
  const double fx = x - i, fy = y - j;
  auto val = [&](int ii, int jj) {
    const int a = g.active_at(ii, jj);
    return a >= 0 ? u[a] : 0.0;
  };
  return (1 - fx) * (1 - fy) * val(i, j) + fx * (1 - fy) * val(i + 1, j) +
         (1 - fx) * fy * val(i, j + 1) + fx * fy * val(i + 1, j + 1);
}

}  // namespace gelfand

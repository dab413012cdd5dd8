#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gelfand/common.hpp"

namespace gelfand {

struct Point2 {
  double s = 0.0;
  double t = 0.0;
};

inline double hypot2(double a, double b) { return std::sqrt(a * a + b * b); }

// ---------------------------------------------------------------------------
// Generator curves. The generator region sits in the closed quadrant
// {s >= 0, t >= 0}; its reflection across both axes is the planar section of
// the full domain of double revolution. The coordinate axes are never
// Dirichlet boundary: only the curved part of the generator boundary carries
// u = 0, matching the perimeter convention used throughout.
// ---------------------------------------------------------------------------

enum class GeneratorKind { quarter_disc, super_ellipse, dumbbell };

struct GeneratorCurve {
  GeneratorKind kind = GeneratorKind::quarter_disc;

  // quarter_disc
  double radius = 1.0;

  // super_ellipse: (s/rs)^e + (t/rt)^e < 1, convex for e >= 1
  double rs = 1.0, rt = 1.0, exponent = 2.0;

  // dumbbell: two discs joined by a capsule neck (Figure-1 style nonconvex
  // generator; the maximum of u sits in a lobe, not at the origin)
  Point2 lobe_a{1.0, 0.2};
  Point2 lobe_b{0.2, 1.0};
  double lobe_radius = 0.3;
  double neck_width = 0.05;

  static GeneratorCurve quarterdisc(double R) {
    if (!(R > 0.0)) throw Error("quarter_disc radius must be positive");
    GeneratorCurve g;
    g.kind = GeneratorKind::quarter_disc;
    g.radius = R;
    return g;
  }

  static GeneratorCurve superellipse(double rs, double rt, double e) {
    if (!(rs > 0.0) || !(rt > 0.0))
      throw Error("super_ellipse semi-axes must be positive");
    if (!(e >= 1.0)) throw Error("super_ellipse exponent must be >= 1");
    GeneratorCurve g;
    g.kind = GeneratorKind::super_ellipse;
    g.rs = rs;
    g.rt = rt;
    g.exponent = e;
    return g;
  }

  static GeneratorCurve make_dumbbell(Point2 a, Point2 b, double lobe_radius,
                                      double neck_width) {
    if (!(lobe_radius > 0.0) || !(neck_width > 0.0))
      throw Error("dumbbell lobe radius and neck width must be positive");
    GeneratorCurve g;
    g.kind = GeneratorKind::dumbbell;
    g.lobe_a = a;
    g.lobe_b = b;
    g.lobe_radius = lobe_radius;
    g.neck_width = neck_width;
    return g;
  }
};

namespace detail {

inline double dist_point_segment(Point2 p, Point2 a, Point2 b) {
  const double vx = b.s - a.s, vy = b.t - a.t;
  const double wx = p.s - a.s, wy = p.t - a.t;
  const double vv = vx * vx + vy * vy;
  double w = vv > 0.0 ? std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0) : 0.0;
  return hypot2(wx - w * vx, wy - w * vy);
}

/// Point on the superellipse boundary at parameter theta in [0, pi/2].
inline Point2 superellipse_point(const GeneratorCurve& g, double theta) {
  const double p = 2.0 / g.exponent;
  const double c = std::cos(theta), s = std::sin(theta);
  return {g.rs * std::pow(std::max(c, 0.0), p),
          g.rt * std::pow(std::max(s, 0.0), p)};
}

/// Unsigned distance from p to the superellipse boundary by a coarse scan
/// followed by golden-section refinement. The curve is convex (e >= 1), so
/// the distance along the parameter is unimodal for quadrant points.
inline double superellipse_boundary_distance(const GeneratorCurve& g, Point2 p) {
  constexpr int kScan = 96;
  const double half_pi = 0.5 * std::numbers::pi;
  double best = 0.0, best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double th = half_pi * i / kScan;
    const Point2 q = superellipse_point(g, th);
    const double d = hypot2(p.s - q.s, p.t - q.t);
    if (d < best_d) {
      best_d = d;
      best = th;
    }
  }
  double lo = std::max(0.0, best - half_pi / kScan);
  double hi = std::min(half_pi, best + half_pi / kScan);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  auto dist = [&](double th) {
    const Point2 q = superellipse_point(g, th);
    return hypot2(p.s - q.s, p.t - q.t);
  };
  double f1 = dist(x1), f2 = dist(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = dist(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = dist(x2);
    }
  }
  return std::min(f1, f2);
}

}  // namespace detail

/// Signed distance to the generator's Dirichlet boundary, positive inside.
/// Axes do not count as boundary. For the dumbbell the value is the exact
/// union bound min over the lobes/neck distances: correct sign and zero set,
/// 1-Lipschitz, conservative (never overestimates) inside.
inline double boundary_distance(const GeneratorCurve& g, double s, double t) {
  switch (g.kind) {
    case GeneratorKind::quarter_disc:
      return g.radius - hypot2(s, t);
    case GeneratorKind::super_ellipse: {
      const double level = std::pow(std::abs(s) / g.rs, g.exponent) +
                           std::pow(std::abs(t) / g.rt, g.exponent);
      const double d = detail::superellipse_boundary_distance(g, {s, t});
      return level < 1.0 ? d : -d;
    }
    case GeneratorKind::dumbbell: {
      const double da = g.lobe_radius - hypot2(s - g.lobe_a.s, t - g.lobe_a.t);
      const double db = g.lobe_radius - hypot2(s - g.lobe_b.s, t - g.lobe_b.t);
      const double dn =
          0.5 * g.neck_width - detail::dist_point_segment({s, t}, g.lobe_a, g.lobe_b);
      return std::max({da, db, dn});
    }
  }
  return -1.0;
}

inline bool curve_contains(const GeneratorCurve& g, double s, double t) {
  return boundary_distance(g, s, t) > 0.0;
}

/// Convexity of the full domain == convexity of the doubly-reflected planar
/// region; decided analytically per kind.
inline bool curve_is_convex(const GeneratorCurve& g) {
  switch (g.kind) {
    case GeneratorKind::quarter_disc:
      return true;
    case GeneratorKind::super_ellipse:
      return g.exponent >= 1.0;
    case GeneratorKind::dumbbell:
      return false;
  }
  return false;
}

/// Tight axis-aligned bounding box of the generator region.
inline Point2 bounding_box(const GeneratorCurve& g) {
  switch (g.kind) {
    case GeneratorKind::quarter_disc:
      return {g.radius, g.radius};
    case GeneratorKind::super_ellipse:
      return {g.rs, g.rt};
    case GeneratorKind::dumbbell: {
      const double r = g.lobe_radius;
      const double w = 0.5 * g.neck_width;
      const double pad = std::max(r, w);
      return {std::max(g.lobe_a.s, g.lobe_b.s) + pad,
              std::max(g.lobe_a.t, g.lobe_b.t) + pad};
    }
  }
  return {1.0, 1.0};
}

/// Largest distance from an interior point to the Dirichlet boundary.
/// Closed form for the quarter disc, grid scan plus local refinement
/// otherwise. Only used for spacing validation and cutoff defaults.
inline double generator_inradius(const GeneratorCurve& g) {
  if (g.kind == GeneratorKind::quarter_disc) return g.radius;
  const Point2 box = bounding_box(g);
  constexpr int kN = 160;
  double best = 0.0;
  Point2 at{0.0, 0.0};
  for (int i = 0; i <= kN; ++i) {
    for (int j = 0; j <= kN; ++j) {
      const double s = box.s * i / kN, t = box.t * j / kN;
      const double d = boundary_distance(g, s, t);
      if (d > best) {
        best = d;
        at = {s, t};
      }
    }
  }
  double step = std::max(box.s, box.t) / kN;
  for (int it = 0; it < 40; ++it) {
    bool moved = false;
    for (const auto& [ds, dt] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
      const double s = std::max(0.0, at.s + ds), t = std::max(0.0, at.t + dt);
      const double d = boundary_distance(g, s, t);
      if (d > best) {
        best = d;
        at = {s, t};
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

// ---------------------------------------------------------------------------
// DomainSpec: rotation multiplicities plus the generator curve.
// ---------------------------------------------------------------------------

struct DomainSpec {
  int m = 2;
  int k = 2;
  GeneratorCurve generator;

  DomainSpec() = default;
  DomainSpec(int m_, int k_, GeneratorCurve gen) : m(m_), k(k_), generator(gen) {
    if (m < 2 || k < 2)
      throw Error("rotation multiplicities require m >= 2 and k >= 2 (n = m + k >= 4)");
  }

  int n() const { return m + k; }
};

inline bool contains(const DomainSpec& spec, double s, double t) {
  return curve_contains(spec.generator, s, t);
}

inline bool is_convex(const DomainSpec& spec) {
  return curve_is_convex(spec.generator);
}

inline double boundary_distance(const DomainSpec& spec, double s, double t) {
  return boundary_distance(spec.generator, s, t);
}

}  // namespace gelfand

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "gelfand/common.hpp"
#include "gelfand/grid.hpp"
#include "gelfand/quadrature.hpp"

namespace gelfand {

namespace detail {
inline void check_exponents(double a, double b) {
  if (!(a > -1.0) || !(b > -1.0))
    throw ExponentOutOfRange("weight exponents must satisfy a > -1 and b > -1");
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Monotone graph domains in the (sigma, tau) quadrant:
// U = {(sigma, tau) : tau < psi(sigma)} with psi nonincreasing, bounded,
// extended by zero. Staircases are admitted as limits of the strictly
// decreasing class.
// ---------------------------------------------------------------------------

class MonotoneGraphDomain {
 public:
  struct GraphPiece {
    double lo = 0.0, hi = 0.0;
    std::function<double(double)> psi;
  };
  struct ArcPiece {  // smooth boundary piece, parametric
    double lo = 0.0, hi = 0.0;
    std::function<Point2(double)> gamma;
    std::function<Point2(double)> dgamma;
  };
  struct Riser {  // vertical boundary segment at fixed sigma > 0
    double sigma = 0.0;
    double tau_lo = 0.0, tau_hi = 0.0;
  };

  std::vector<GraphPiece> graph;
  std::vector<ArcPiece> arcs;
  std::vector<Riser> risers;
  double sigma_bar = 0.0;
  double psi_sup = 0.0;

  static MonotoneGraphDomain quarter_disc(double R) {
    if (!(R > 0.0)) throw Error("quarter_disc radius must be positive");
    MonotoneGraphDomain d;
    d.sigma_bar = R;
    d.psi_sup = R;
    d.graph.push_back({0.0, R, [R](double s) { return std::sqrt(std::max(0.0, R * R - s * s)); }});
    d.arcs.push_back({0.0, 0.5 * std::numbers::pi,
                      [R](double th) { return Point2{R * std::cos(th), R * std::sin(th)}; },
                      [R](double th) { return Point2{-R * std::sin(th), R * std::cos(th)}; }});
    return d;
  }

  /// steps: (sigma_i, psi_i) with strictly increasing sigma and strictly
  /// decreasing positive heights; psi == psi_i on (sigma_{i-1}, sigma_i).
  static MonotoneGraphDomain staircase(const std::vector<Point2>& steps) {
    if (steps.size() < 1) throw HypothesisViolated("staircase needs at least one step");
    MonotoneGraphDomain d;
    double prev_x = 0.0;
    double prev_psi = std::numeric_limits<double>::infinity();
    for (const auto& st : steps) {
      if (!(st.s > prev_x)) throw HypothesisViolated("staircase breaks must increase");
      if (!(st.t > 0.0) || !(st.t < prev_psi))
        throw HypothesisViolated("staircase heights must decrease strictly");
      const double x0 = prev_x, x1 = st.s, psi = st.t;
      d.graph.push_back({x0, x1, [psi](double) { return psi; }});
      d.arcs.push_back({x0, x1, [psi](double s) { return Point2{s, psi}; },
                        [](double) { return Point2{1.0, 0.0}; }});
      if (prev_psi != std::numeric_limits<double>::infinity())
        d.risers.push_back({x0, psi, prev_psi});
      prev_x = x1;
      prev_psi = psi;
    }
    d.risers.push_back({prev_x, 0.0, prev_psi});  // terminal drop to the axis
    d.sigma_bar = prev_x;
    d.psi_sup = steps.front().t;
    return d;
  }

  /// Piecewise-linear graph through (0, psi0), (x1, psi1), ..., (xK, psiK);
  /// heights nonincreasing; a trailing positive height adds a terminal riser.
  static MonotoneGraphDomain piecewise_linear(const std::vector<Point2>& pts) {
    if (pts.size() < 2) throw HypothesisViolated("need at least two graph points");
    if (pts.front().s != 0.0) throw HypothesisViolated("graph must start at sigma = 0");
    MonotoneGraphDomain d;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const Point2 p0 = pts[i - 1], p1 = pts[i];
      if (!(p1.s > p0.s)) throw HypothesisViolated("abscissae must increase strictly");
      if (p1.t > p0.t + 1e-15) throw HypothesisViolated("heights must not increase");
      const double slope = (p1.t - p0.t) / (p1.s - p0.s);
      d.graph.push_back({p0.s, p1.s,
                         [p0, slope](double s) { return p0.t + slope * (s - p0.s); }});
      if (p0.t > 0.0 || p1.t > 0.0)  // segments on the sigma-axis are not boundary
        d.arcs.push_back({p0.s, p1.s,
                          [p0, slope](double s) { return Point2{s, p0.t + slope * (s - p0.s)}; },
                          [slope](double) { return Point2{1.0, slope}; }});
    }
    if (pts.back().t > 0.0) d.risers.push_back({pts.back().s, 0.0, pts.back().t});
    d.sigma_bar = pts.back().s;
    d.psi_sup = pts.front().t;
    return d;
  }

  double psi(double sigma) const {
    for (const auto& p : graph)
      if (sigma >= p.lo && sigma <= p.hi) return p.psi(sigma);
    return 0.0;
  }
};

/// m(U) = integral over U of sigma^a tau^b = (1/(b+1)) int sigma^a psi^{b+1}.
inline double weighted_area(const MonotoneGraphDomain& dom, double a, double b) {
  detail::check_exponents(a, b);
  double acc = 0.0;
  for (const auto& p : dom.graph)
    acc += integrate(
        [&](double s) { return std::pow(s, a) * std::pow(p.psi(s), b + 1.0); }, p.lo,
        p.hi, 1e-10);
  return acc / (b + 1.0);
}

/// Weighted perimeter of the graph boundary inside the open quadrant; the
/// coordinate axes are not counted. Vertical risers carry the closed-form
/// tau-integral at fixed sigma.
inline double weighted_perimeter(const MonotoneGraphDomain& dom, double a, double b) {
  detail::check_exponents(a, b);
  double acc = 0.0;
  for (const auto& arc : dom.arcs)
    acc += integrate(
        [&](double u) {
          const Point2 g = arc.gamma(u);
          const Point2 dg = arc.dgamma(u);
          return std::pow(g.s, a) * std::pow(g.t, b) * hypot2(dg.s, dg.t);
        },
        arc.lo, arc.hi, 1e-10);
  for (const auto& r : dom.risers)
    acc += std::pow(r.sigma, a) *
           (std::pow(r.tau_hi, b + 1.0) - std::pow(r.tau_lo, b + 1.0)) / (b + 1.0);
  return acc;
}

/// Admissible isoperimetric constant from the graph-domain proof chain:
/// Cauchy-Schwarz on 1 + ((b+1)/a)|psi'| against sqrt(1 + psi'^2),
/// integration by parts of -d/dsigma(psi^{b+1}/a), and the threshold
/// 1/psi + 1/sigma >= 1/mu with m(U) = mu^D/((a+1)(b+1)). Roles of the
/// exponents swap when a <= 0 < b.
inline double isoperimetric_constant(double a, double b) {
  detail::check_exponents(a, b);
  if (!(std::max(a, b) > 0.0))
    throw ExponentOutOfRange("isoperimetric constant needs max(a,b) > 0");
  const double aa = a > 0.0 ? a : b;
  const double bb = a > 0.0 ? b : a;
  const double D = a + b + 2.0;
  const double slope = (bb + 1.0) / aa;
  return std::sqrt(1.0 + slope * slope) * std::pow((aa + 1.0) * (bb + 1.0), 1.0 / D) /
         (bb + 1.0);
}

struct IsoperimetricResult {
  double lhs = 0.0;       // m(U)^{(D-1)/D}
  double rhs = 0.0;       // weighted perimeter
  double constant = 0.0;  // admissible C
  bool pass = false;      // lhs <= C * rhs + 1e-10
};

inline IsoperimetricResult isoperimetric_check(const MonotoneGraphDomain& dom,
                                               double a, double b) {
  detail::check_exponents(a, b);
  if (!(std::max(a, b) > 0.0))
    throw ExponentOutOfRange("isoperimetric check needs max(a,b) > 0");
  IsoperimetricResult r;
  const double D = a + b + 2.0;
  const double area = weighted_area(dom, a, b);
  r.lhs = std::pow(area, (D - 1.0) / D);
  r.rhs = weighted_perimeter(dom, a, b);
  r.constant = isoperimetric_constant(a, b);
  r.pass = r.lhs <= r.constant * r.rhs + 1e-10;
  return r;
}

// ---------------------------------------------------------------------------
// Quadrant fields: nodal functions on a uniform (sigma, tau) lattice, the
// carrier for the weighted Sobolev checks.
// ---------------------------------------------------------------------------

struct QuadrantField {
  int ns = 0, nt = 0;
  double hs = 0.0, ht = 0.0;
  std::vector<double> v;  // row-major, j*ns + i

  double at(int i, int j) const { return v[static_cast<std::size_t>(j) * ns + i]; }
  double& at(int i, int j) { return v[static_cast<std::size_t>(j) * ns + i]; }
  double sigma(int i) const { return i * hs; }
  double tau(int j) const { return j * ht; }
  double max_value() const { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

  template <class F>
  static QuadrantField sample(int ns, int nt, double hs, double ht, F&& fn) {
    QuadrantField q;
    q.ns = ns;
    q.nt = nt;
    q.hs = hs;
    q.ht = ht;
    q.v.resize(static_cast<std::size_t>(ns) * nt);
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < ns; ++i) q.at(i, j) = fn(i * hs, j * ht);
    return q;
  }

  /// Same nodal values on a lattice scaled by R: represents u(sigma/R, tau/R).
  QuadrantField scaled(double R) const {
    QuadrantField q = *this;
    q.hs *= R;
    q.ht *= R;
    return q;
  }
};

/// Verifies u >= 0, compact support, and nonincreasing discrete differences
/// in both directions (tolerance per the hypothesis class).
inline void require_monotone(const QuadrantField& u, double tol = 1e-12) {
  double scale = std::max(1.0, u.max_value());
  for (int j = 0; j < u.nt; ++j)
    for (int i = 0; i < u.ns; ++i) {
      const double val = u.at(i, j);
      if (val < -tol * scale) throw HypothesisViolated("field must be nonnegative");
      if (i + 1 < u.ns && u.at(i + 1, j) > val + tol * scale)
        throw HypothesisViolated("u_sigma <= 0 violated");
      if (j + 1 < u.nt && u.at(i, j + 1) > val + tol * scale)
        throw HypothesisViolated("u_tau <= 0 violated");
    }
  for (int j = 0; j < u.nt; ++j)
    if (u.at(u.ns - 1, j) > tol * scale)
      throw HypothesisViolated("support must be compact (sigma direction)");
  for (int i = 0; i < u.ns; ++i)
    if (u.at(i, u.nt - 1) > tol * scale)
      throw HypothesisViolated("support must be compact (tau direction)");
}

namespace detail {

/// Exact cell integrals of the monomial weight paired with cell-centered
/// values of the integrand.
template <class CellFn>
double cell_quadrature(const QuadrantField& u, double a, double b, CellFn&& fn) {
  double acc = 0.0;
  for (int j = 0; j + 1 < u.nt; ++j) {
    const double It =
        (std::pow(u.tau(j + 1), b + 1.0) - std::pow(u.tau(j), b + 1.0)) / (b + 1.0);
    for (int i = 0; i + 1 < u.ns; ++i) {
      const double Is =
          (std::pow(u.sigma(i + 1), a + 1.0) - std::pow(u.sigma(i), a + 1.0)) /
          (a + 1.0);
      const double v00 = u.at(i, j), v10 = u.at(i + 1, j), v01 = u.at(i, j + 1),
                   v11 = u.at(i + 1, j + 1);
      if (v00 == 0.0 && v10 == 0.0 && v01 == 0.0 && v11 == 0.0) continue;
      const double center = 0.25 * (v00 + v10 + v01 + v11);
      const double gs = 0.5 * ((v10 - v00) + (v11 - v01)) / u.hs;
      const double gt = 0.5 * ((v01 - v00) + (v11 - v10)) / u.ht;
      acc += Is * It * fn(center, gs, gt);
    }
  }
  return acc;
}

}  // namespace detail

struct SobolevResult {
  double lhs = 0.0;    // (int sigma^a tau^b u^{q*})^{1/q*}
  double rhs = 0.0;    // (int sigma^a tau^b |grad u|^q)^{1/q}
  double ratio = 0.0;  // lhs / rhs
  double qstar = 0.0;  // Dq/(D-q)
};

inline SobolevResult sobolev_check(const QuadrantField& u, double a, double b,
                                   double q) {
  detail::check_exponents(a, b);
  // a = b = 0 is the classical unweighted case and stays admissible
  if (!(std::max(a, b) >= 0.0))
    throw ExponentOutOfRange("sobolev check needs max(a,b) >= 0");
  const double D = a + b + 2.0;
  if (!(q >= 1.0) || !(q < D))
    throw ExponentOutOfRange("sobolev check needs 1 <= q < D = a+b+2");
  require_monotone(u);

  SobolevResult r;
  r.qstar = D * q / (D - q);
  const double lhs_int = detail::cell_quadrature(
      u, a, b, [&](double c, double, double) { return std::pow(c, r.qstar); });
  const double rhs_int = detail::cell_quadrature(u, a, b, [&](double, double gs, double gt) {
    return std::pow(std::sqrt(gs * gs + gt * gt), q);
  });
  r.lhs = std::pow(lhs_int, 1.0 / r.qstar);
  r.rhs = std::pow(rhs_int, 1.0 / q);
  r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Layer-cake route for q = 1: the gradient integral recomputed as the
// lambda-integral of weighted level-set lengths (marching squares).
// ---------------------------------------------------------------------------

/// Weighted length of the level curve {u = level} inside the open quadrant.
inline double weighted_level_length(const QuadrantField& u, double a, double b,
                                    double level) {
  double acc = 0.0;
  for (int j = 0; j + 1 < u.nt; ++j) {
    for (int i = 0; i + 1 < u.ns; ++i) {
      const double c[4] = {u.at(i, j) - level, u.at(i + 1, j) - level,
                           u.at(i + 1, j + 1) - level, u.at(i, j + 1) - level};
      // corner k at (sigma_k, tau_k), counter-clockwise from (i,j)
      const double sx[4] = {u.sigma(i), u.sigma(i + 1), u.sigma(i + 1), u.sigma(i)};
      const double ty[4] = {u.tau(j), u.tau(j), u.tau(j + 1), u.tau(j + 1)};
      Point2 pts[4];
      int np = 0;
      for (int e = 0; e < 4; ++e) {
        const int e2 = (e + 1) % 4;
        if ((c[e] > 0.0) != (c[e2] > 0.0)) {
          const double w = c[e] / (c[e] - c[e2]);
          pts[np++] = {sx[e] + w * (sx[e2] - sx[e]), ty[e] + w * (ty[e2] - ty[e])};
        }
      }
      auto add_segment = [&](const Point2& p, const Point2& q2) {
        const double ms = 0.5 * (p.s + q2.s), mt = 0.5 * (p.t + q2.t);
        if (ms <= 0.0 || mt <= 0.0) return;  // axis pieces are not counted
        acc += std::pow(ms, a) * std::pow(mt, b) * hypot2(p.s - q2.s, p.t - q2.t);
      };
      if (np == 2) {
        add_segment(pts[0], pts[1]);
      } else if (np == 4) {
        // saddle: pair by the cell-center sign
        const double center = 0.25 * (c[0] + c[1] + c[2] + c[3]);
        if ((center > 0.0) == (c[0] > 0.0)) {
          add_segment(pts[0], pts[3]);
          add_segment(pts[1], pts[2]);
        } else {
          add_segment(pts[0], pts[1]);
          add_segment(pts[2], pts[3]);
        }
      }
    }
  }
  return acc;
}

struct LayerCakeResult {
  double direct = 0.0;  // int sigma^a tau^b |grad u|
  double coarea = 0.0;  // int_0^inf m({u = level}) dlevel, 100 levels
};

inline LayerCakeResult layer_cake_sobolev(const QuadrantField& u, double a, double b) {
  detail::check_exponents(a, b);
  require_monotone(u);
  LayerCakeResult r;
  r.direct = detail::cell_quadrature(
      u, a, b, [](double, double gs, double gt) { return std::sqrt(gs * gs + gt * gt); });
  const double umax = u.max_value();
  if (umax <= 0.0) return r;
  constexpr int kLevels = 100;
  const double dl = umax / kLevels;
  for (int l = 0; l < kLevels; ++l)
    r.coarea += weighted_level_length(u, a, b, (l + 0.5) * dl) * dl;
  return r;
}

// ---------------------------------------------------------------------------
// Change of variables sigma = s^{2+alpha}, tau = t^{2+beta}: resampling a
// grid field onto a uniform quadrant lattice (zero-extended outside the
// generator region).
// ---------------------------------------------------------------------------

inline QuadrantField change_of_variables(const Grid& g, const std::vector<double>& u,
                                         double alpha, double beta, int resolution = 0) {
  if (alpha < 0.0 || beta < 0.0)
    throw ExponentOutOfRange("change of variables needs alpha, beta >= 0");
  const int N = resolution > 0 ? resolution : std::max(g.ni, g.nj);
  const double smax = g.s_of(g.ni - 1), tmax = g.t_of(g.nj - 1);
  const double sigma_max = std::pow(smax, 2.0 + alpha);
  const double tau_max = std::pow(tmax, 2.0 + beta);
  const double es = 1.0 / (2.0 + alpha), et = 1.0 / (2.0 + beta);
  return QuadrantField::sample(N, N, sigma_max / (N - 1), tau_max / (N - 1),
                               [&](double sg, double tu) {
                                 const double s = std::pow(sg, es);
                                 const double t = std::pow(tu, et);
                                 return interpolate(g, u, s, t);
                               });
}

// ---------------------------------------------------------------------------
// Random families for the property sweeps (per-instance seeds derive from a
// master seed; generation is scheduling-independent).
// ---------------------------------------------------------------------------

inline MonotoneGraphDomain random_staircase(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nstep(2, 12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int K = nstep(rng);
  std::vector<double> xs(K), hs(K);
  for (int i = 0; i < K; ++i) {
    xs[i] = 0.05 + 1.95 * unit(rng);
    hs[i] = 0.05 + 1.45 * unit(rng);
  }
  std::sort(xs.begin(), xs.end());
  std::sort(hs.begin(), hs.end(), std::greater<>());
  // enforce strict separation
  std::vector<Point2> steps;
  double prev_x = 0.0, prev_h = std::numeric_limits<double>::infinity();
  for (int i = 0; i < K; ++i) {
    double x = std::max(xs[i], prev_x + 1e-3);
    double ht = std::min(hs[i], prev_h - 1e-3);
    if (ht <= 1e-3) break;
    steps.push_back({x, ht});
    prev_x = x;
    prev_h = ht;
  }
  if (steps.empty()) steps.push_back({1.0, 1.0});
  return MonotoneGraphDomain::staircase(steps);
}

/// Random nonnegative, compactly supported, coordinate-wise nonincreasing
/// field: tensor powers, max-type cones, or staircase mixtures.
inline QuadrantField random_monotone_field(std::mt19937_64& rng, int n = 129) {
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double L = 1.0;
  const double hs = L / (n - 1), ht = L / (n - 1);
  const int which = kind(rng);
  if (which == 0) {
    const double Ls = 0.3 + 0.5 * unit(rng), Lt = 0.3 + 0.5 * unit(rng);
    const double ps = 1.0 + 2.0 * unit(rng), pt = 1.0 + 2.0 * unit(rng);
    const double amp = 0.5 + unit(rng);
    return QuadrantField::sample(n, n, hs, ht, [=](double s, double t) {
      const double gs = std::max(0.0, 1.0 - s / Ls);
      const double gt = std::max(0.0, 1.0 - t / Lt);
      return amp * std::pow(gs, ps) * std::pow(gt, pt);
    });
  }
  if (which == 1) {
    const double Ls = 0.3 + 0.5 * unit(rng), Lt = 0.3 + 0.5 * unit(rng);
    const double p = 1.0 + 2.0 * unit(rng);
    return QuadrantField::sample(n, n, hs, ht, [=](double s, double t) {
      const double m = std::max(s / Ls, t / Lt);
      return std::pow(std::max(0.0, 1.0 - m), p);
    });
  }
  // staircase mixture: sum of box indicators with decreasing extents
  const int terms = 2 + static_cast<int>(3 * unit(rng));
  std::vector<double> as(terms), bs(terms), cs(terms);
  for (int l = 0; l < terms; ++l) {
    as[l] = 0.15 + 0.65 * unit(rng);
    bs[l] = 0.15 + 0.65 * unit(rng);
    cs[l] = 0.2 + unit(rng);
  }
  return QuadrantField::sample(n, n, hs, ht, [=](double s, double t) {
    double acc = 0.0;
    for (int l = 0; l < terms; ++l)
      if (s < as[l] && t < bs[l]) acc += cs[l];
    return acc;
  });
}

// ---------------------------------------------------------------------------
// Witness family: a non-monotone bump of shrinking support sliding toward
// the sigma-axis. For a < 0 < b the Sobolev ratio with the optimal exponent
// is expected to blow up along the family; values are reported, not
// asserted.
// ---------------------------------------------------------------------------

struct WitnessRow {
  double tau0 = 0.0;  // bump center height above the sigma-axis
  double ratio = 0.0;
};

inline std::vector<WitnessRow> sobolev_witness_trend(double a, double b, double q,
                                                     const std::vector<double>& tau0s) {
  detail::check_exponents(a, b);
  const double D = a + b + 2.0;
  const double qstar = D * q / (D - q);
  std::vector<WitnessRow> rows;
  for (double tau0 : tau0s) {
    const double eps = 0.5 * tau0;  // support clears the axis
    const double sigma0 = 1.0;
    auto bump = [&](double s, double t) {
      const double xs = (s - sigma0) / eps, xt = (t - tau0) / eps;
      const double r2 = xs * xs + xt * xt;
      return r2 >= 1.0 ? 0.0 : (1.0 - r2) * (1.0 - r2);
    };
    // local lattice over the support box
    const int N = 201;
    const double hs = 2.0 * eps / (N - 1);
    double lhs = 0.0, rhs = 0.0;
    for (int j = 0; j + 1 < N; ++j) {
      for (int i = 0; i + 1 < N; ++i) {
        const double s0 = sigma0 - eps + i * hs, t0 = tau0 - eps + j * hs;
        const double sc = s0 + 0.5 * hs, tc = t0 + 0.5 * hs;
        const double u00 = bump(s0, t0), u10 = bump(s0 + hs, t0), u01 = bump(s0, t0 + hs),
                     u11 = bump(s0 + hs, t0 + hs);
        const double c = 0.25 * (u00 + u10 + u01 + u11);
        const double gs = 0.5 * ((u10 - u00) + (u11 - u01)) / hs;
        const double gt = 0.5 * ((u01 - u00) + (u11 - u10)) / hs;
        const double w = std::pow(sc, a) * std::pow(tc, b) * hs * hs;
        lhs += w * std::pow(c, qstar);
        rhs += w * std::pow(std::sqrt(gs * gs + gt * gt), q);
      }
    }
    rows.push_back({tau0, std::pow(lhs, 1.0 / qstar) / std::pow(rhs, 1.0 / q)});
  }
  return rows;
}

}  // namespace gelfand

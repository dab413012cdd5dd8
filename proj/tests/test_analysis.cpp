#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "gelfand/analysis.hpp"

using namespace gelfand;
using Catch::Approx;

namespace {

DomainSpec ball(int m, int k) {
  return DomainSpec(m, k, GeneratorCurve::quarterdisc(1.0));
}

std::vector<double> nodal(const Grid& g, auto&& f) {
  std::vector<double> v(g.active_count());
  for (int a = 0; a < g.active_count(); ++a) {
    const Point2 p = g.point_of_active(a);
    v[a] = f(p.s, p.t);
  }
  return v;
}

}  // namespace

TEST_CASE("exponent formulas against hand arithmetic") {
  const auto r34 = exponents(3, 4);
  CHECK(r34.q_mk == Approx(1.950476).margin(5e-7));
  CHECK(r34.bounded_regime);
  CHECK(std::isinf(r34.p_mk));
  CHECK(r34.alpha_sup == Approx(std::sqrt(2.0)));
  CHECK(r34.beta_sup == Approx(std::sqrt(3.0)));

  const auto r26 = exponents(2, 6);
  CHECK(r26.q_mk == Approx(2.083075).margin(5e-7));
  CHECK(r26.p_mk == Approx(50.150).margin(5e-3));
  CHECK_FALSE(r26.bounded_regime);

  const auto r44 = exponents(4, 4);
  CHECK(r44.q_mk == Approx(2.143594).margin(5e-7));
  CHECK(r44.p_mk == Approx(29.856).margin(5e-3));

  // radial thresholds: infinite at n = 10, finite above
  CHECK(std::isinf(p_radial(10)));
  CHECK(p_radial(14) == Approx(10.039833).margin(1e-5));
  CHECK(std::isinf(p_radial(9)));
}

TEST_CASE("dimension dichotomy is exhaustive for n <= 20") {
  for (int n = 4; n <= 20; ++n) {
    for (int m = 2; m <= n - 2; ++m) {
      const int k = n - m;
      const auto r = exponents(m, k);
      REQUIRE((r.q_mk < 2.0) == (n <= 7));
      REQUIRE(r.bounded_regime == (n <= 7));
    }
  }
}

TEST_CASE("sandwich bounds and the lower threshold for n >= 8") {
  for (int n = 8; n <= 20; ++n) {
    const double p_balanced = p_from_q(q_of(0.5 * n, 0.5 * n));
    const double p_edge = p_from_q(q_of(2.0, n - 2.0));
    for (int m = 2; m <= n / 2; ++m) {
      const int k = n - m;
      const auto r = exponents(m, k);
      REQUIRE(r.p_mk >= p_balanced - 1e-12);
      REQUIRE(r.p_mk <= p_edge + 1e-12);
      REQUIRE(r.p_mk > 2.0 * n / (n - 4.0));
    }
  }
}

TEST_CASE("norms of the radial test field") {
  const auto g = build_grid(ball(2, 2), 1.0 / 128);
  const auto u = nodal(g, [](double s, double t) { return (1.0 - s * s - t * t) / 8.0; });
  const auto rep = norms(g, u, {1.0, 2.0});

  CHECK(rep.sup_norm == Approx(0.125));  // value at the origin node

  // integral of |grad u|^2 dx over the unit 4-ball = pi^2/48
  const double exact = std::pow(std::numbers::pi, 2) / 48.0;
  CHECK(std::abs(rep.grad_energy - exact) < 0.01 * exact);

  const std::vector<double> zero(g.active_count(), 0.0);
  const auto zrep = norms(g, zero, {1.0, 2.0});
  CHECK(zrep.sup_norm == 0.0);
  CHECK(zrep.lp.at(2.0) == 0.0);
  CHECK(zrep.grad_energy == 0.0);
}

TEST_CASE("boundary observable") {
  const auto g = build_grid(ball(2, 2), 1.0 / 64);
  const auto u = nodal(g, [](double s, double t) { return (1.0 - s * s - t * t) / 8.0; });

  SECTION("radial monotonicity pins the collar sup") {
    const auto rep = boundary_observable(g, u, 0.1);
    CHECK(rep.sup_collar == Approx((1.0 - 0.81) / 8.0).margin(0.006));
    CHECK(rep.ratio == Approx(rep.sup_collar / rep.l1));
  }

  SECTION("zero field has zero ratio by convention") {
    const std::vector<double> zero(g.active_count(), 0.0);
    const auto rep = boundary_observable(g, zero, 0.1);
    CHECK(rep.ratio == 0.0);
  }

  SECTION("delta out of range") {
    CHECK_THROWS_AS(boundary_observable(g, u, 0.0), DeltaOutOfRange);
    CHECK_THROWS_AS(boundary_observable(g, u, 2.0), DeltaOutOfRange);
  }
}

TEST_CASE("collar ratio stays bounded along the exp branch") {
  const auto g = build_grid(ball(2, 2), 1.0 / 32);
  const auto op = assemble(g);
  BranchOptions opts;
  opts.record_mu1 = false;
  const Branch branch = continue_branch(op, exp_nonlinearity(), opts);
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  for (std::size_t i = 1; i < branch.points.size(); ++i) {
    const auto rep =
        boundary_observable(g, to_std(branch.points[i].solution.values), 0.2);
    rmin = std::min(rmin, rep.ratio);
    rmax = std::max(rmax, rep.ratio);
  }
  CHECK(rmax / rmin < 10.0);
}

TEST_CASE("ball solutions are split-invariant") {
  // (2,4) and (3,3) discretize the same radial problem in R^6
  const double h = 1.0 / 32;
  const auto ga = build_grid(ball(2, 4), h);
  const auto gb = build_grid(ball(3, 3), h);
  const auto opa = assemble(ga);
  const auto opb = assemble(gb);
  const auto f = exp_nonlinearity();

  Eigen::VectorXd ua = Eigen::VectorXd::Zero(opa.size());
  Eigen::VectorXd ub = Eigen::VectorXd::Zero(opb.size());
  for (double lam : {2.0, 3.5, 5.0}) {  // chained solves, safely below the fold
    ua = solve_fixed(opa, f, lam, ua).field.values;
    ub = solve_fixed(opb, f, lam, ub).field.values;
  }
  double err = 0.0;
  for (double r = 0.05; r <= 0.9; r += 0.05) {
    const double va = interpolate(ga, to_std(ua), r / std::sqrt(2.0), r / std::sqrt(2.0));
    const double vb = interpolate(gb, to_std(ub), r / std::sqrt(2.0), r / std::sqrt(2.0));
    err = std::max(err, std::abs(va - vb));
  }
  CHECK(err <= 5.0 * h);
}

TEST_CASE("refinement study on the 4-ball is BOUNDED") {
  const auto res = refinement_study(ball(2, 2), exp_nonlinearity(), 0.99,
                                    {1.0 / 8, 1.0 / 16, 1.0 / 32}, {2.0});
  REQUIRE(res.rows.size() == 3);
  for (const auto& r : res.rows) REQUIRE(r.ok);
  CHECK(res.sup_verdict == Verdict::bounded);
  CHECK(res.lp_verdicts.at(2.0) == Verdict::bounded);
}

TEST_CASE("refinement study needs three spacings") {
  CHECK_THROWS_AS(refinement_study(ball(2, 2), exp_nonlinearity(), 0.99,
                                   {1.0 / 16, 1.0 / 32}, {}),
                  LadderTooShort);
}

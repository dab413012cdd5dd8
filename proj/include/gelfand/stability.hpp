#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <vector>

#include "gelfand/nonlinearity.hpp"
#include "gelfand/operator.hpp"

namespace gelfand {

struct StabilityReport {
  double mu1 = 0.0;
  Eigen::VectorXd eigenfield;  // <phi,phi>_w = 1, sign-normalized positive
  std::vector<double> rayleigh_history;
  int iterations = 0;
  double residual = 0.0;  // ||(A - q) phi - mu1 phi||_w
};

/// Smallest eigenvalue of A - diag(potential) in the weighted inner product,
/// by inverse power iteration with a fixed shift below a Gershgorin lower
/// bound. Deterministic start field = 1. Converged when successive Rayleigh
/// quotients differ by < 1e-10; throws IterationStalled after 500 iterations
/// if the eigenpair residual is still above tolerance.
inline StabilityReport smallest_eigenvalue(const WeightedOperator& op,
                                           const Eigen::VectorXd& potential,
                                           const Eigen::VectorXd* seed = nullptr) {
  const int n = op.size();
  if (!potential.allFinite()) throw Error("eigenvalue potential must be finite");

  // Gershgorin lower bound for V^{-1} L - diag(q): row centers minus radii.
  double lower = std::numeric_limits<double>::infinity();
  for (int col = 0; col < n; ++col) {
    double diag = 0.0, off = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.L, col); it; ++it) {
      if (it.row() == col)
        diag = it.value();
      else
        off += std::abs(it.value());
    }
    lower = std::min(lower, (diag - off) / op.V[col] - potential[col]);
  }
  const double shift = lower - 0.01 * (1.0 + std::abs(lower));

  Eigen::SparseMatrix<double> K = op.L;
  for (int i = 0; i < n; ++i)
    K.coeffRef(i, i) -= (potential[i] + shift) * op.V[i];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(K);
  if (chol.info() != Eigen::Success)
    throw Error("shifted operator factorization failed");

  Eigen::VectorXd x = seed && seed->size() == n ? *seed : Eigen::VectorXd::Ones(n);
  x /= op.norm(x);

  StabilityReport rep;
  auto rayleigh = [&](const Eigen::VectorXd& y) {
    return op.grid->cmk *
           (y.dot(op.L * y) - (potential.array() * y.array().square() * op.V.array()).sum());
  };

  auto pair_residual = [&](const Eigen::VectorXd& y, double mu) {
    Eigen::VectorXd r = op.L * y - op.V.cwiseProduct(potential.cwiseProduct(y)) -
                        mu * op.V.cwiseProduct(y);
    return op.strong_norm_of_weak(r);
  };

  // The Rayleigh quotient converges quadratically in the eigenvector error,
  // so its stabilization alone leaves the residual several orders larger;
  // iterate until both the quotient differences and the pair residual meet
  // their tolerances.
  double mu_prev = std::numeric_limits<double>::infinity();
  double mu = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd y = chol.solve(op.V.cwiseProduct(x));
    y /= op.norm(y);
    mu = rayleigh(y);
    rep.rayleigh_history.push_back(mu);
    rep.iterations = it + 1;
    x = y;
    rep.residual = pair_residual(x, mu);
    if (std::abs(mu - mu_prev) < 1e-10 &&
        rep.residual <= 1e-8 * std::max(1.0, std::abs(mu)))
      break;
    mu_prev = mu;
  }

  rep.mu1 = mu;
  rep.eigenfield = x;
  if (rep.residual > 1e-8 * std::max(1.0, std::abs(rep.mu1)))
    throw IterationStalled(rep.mu1, rep.residual, rep.iterations);

  // first eigenfunction convention: positive where it is largest
  int imax = 0;
  x.cwiseAbs().maxCoeff(&imax);
  if (rep.eigenfield[imax] < 0.0) rep.eigenfield = -rep.eigenfield;
  return rep;
}

/// Discrete second-variation form Q_u(xi): <A xi, xi>_w minus the weighted
/// integral of lambda f'(u) xi^2, both sides evaluated with the operator's
/// cell measures so the Rayleigh identity holds exactly on eigenfields.
inline double quadratic_form(const WeightedOperator& op, const Eigen::VectorXd& u,
                             const Nonlinearity& f, double lambda,
                             const Eigen::VectorXd& xi) {
  Eigen::ArrayXd fp(op.size());
  for (int i = 0; i < op.size(); ++i) fp[i] = f.deriv(u[i]);
  return op.grid->cmk *
         (xi.dot(op.L * xi) - lambda * (fp * xi.array().square() * op.V.array()).sum());
}

// ---------------------------------------------------------------------------
// Weighted-energy inequality machinery: testing the semi-stability
// consequence (m-1) * int u_s^2 eta^2 / s^2 <= int u_s^2 |grad eta|^2
// with the cutoff eta = s^{-alpha} rho(dist), rho vanishing in the boundary
// layer, and the resulting global weighted energies.
// ---------------------------------------------------------------------------

struct LemmaReport {
  double alpha = 0.0, beta = 0.0, delta = 0.0;
  double lhs_s = 0.0, rhs_s = 0.0, margin_s = 0.0;
  double lhs_t = 0.0, rhs_t = 0.0, margin_t = 0.0;
  double energy_s = 0.0, energy_t = 0.0;  // int u_s^2 s^{-2a-2}, t analogue
  double inland_s = 0.0, band_s = 0.0, ratio_s = 0.0;
  double inland_t = 0.0, band_t = 0.0, ratio_t = 0.0;
};

/// Smoothstep cutoff in boundary distance: 0 inside the delta/3 boundary
/// layer, 1 beyond delta/2.
inline double boundary_cutoff(double dist, double delta) {
  return smoothstep01((dist - delta / 3.0) / (delta / 2.0 - delta / 3.0));
}

inline LemmaReport lemma_inequality_check(const Grid& g, const std::vector<double>& u,
                                          double alpha, double beta, double delta) {
  if (!(delta > 0.0) || delta > g.inradius)
    throw DeltaOutOfRange("delta must lie in (0, inradius]");
  const int n = g.active_count();
  std::vector<double> us, ut;
  gradient_fields(g, u, us, ut);

  LemmaReport rep;
  rep.alpha = alpha;
  rep.beta = beta;
  rep.delta = delta;

  auto run_direction = [&](const std::vector<double>& grad, double expo, int mult,
                           bool s_direction, double& lhs, double& rhs, double& energy,
                           double& inland, double& band, double& ratio) {
    // cutoff field eta = rho(dist) * max(axis_coord, h)^{-expo}
    std::vector<double> eta(n);
    for (int a = 0; a < n; ++a) {
      const Point2 p = g.point_of_active(a);
      const double coord = s_direction ? p.s : p.t;
      eta[a] = boundary_cutoff(g.dist[a], delta) * std::pow(std::max(coord, g.h), -expo);
    }
    std::vector<double> es, et;
    gradient_fields(g, eta, es, et);

    std::vector<double> lhs_field(n), rhs_field(n), energy_field(n), inland_field(n),
        band_field(n);
    for (int a = 0; a < n; ++a) {
      const double g2 = grad[a] * grad[a];
      lhs_field[a] = g2 * eta[a] * eta[a];
      rhs_field[a] = g2 * (es[a] * es[a] + et[a] * et[a]);
      energy_field[a] = g2;
      const bool inland_node = g.dist[a] >= 0.5 * delta;
      inland_field[a] = inland_node ? g2 : 0.0;
      band_field[a] = inland_node ? 0.0 : g2;
    }
    auto inv_sq = [s_direction](double s, double t) {
      const double c = s_direction ? s : t;
      return 1.0 / (c * c);
    };
    lhs = mult * weighted_integral(g, lhs_field, inv_sq);
    rhs = weighted_integral(g, rhs_field);
    energy = weighted_integral(g, energy_field, [expo, s_direction](double s, double t) {
      const double c = s_direction ? s : t;
      return std::pow(c, -2.0 * expo - 2.0);
    });
    inland = weighted_integral(g, inland_field, inv_sq);
    band = weighted_integral(g, band_field);
    ratio = band > 0.0 ? inland / band : 0.0;
  };

  run_direction(us, alpha, g.m() - 1, true, rep.lhs_s, rep.rhs_s, rep.energy_s,
                rep.inland_s, rep.band_s, rep.ratio_s);
  run_direction(ut, beta, g.k() - 1, false, rep.lhs_t, rep.rhs_t, rep.energy_t,
                rep.inland_t, rep.band_t, rep.ratio_t);
  rep.margin_s = rep.rhs_s - rep.lhs_s;
  rep.margin_t = rep.rhs_t - rep.lhs_t;
  return rep;
}

}  // namespace gelfand

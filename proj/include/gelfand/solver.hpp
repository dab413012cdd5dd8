#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <limits>
#include <vector>

#include "gelfand/nonlinearity.hpp"
#include "gelfand/operator.hpp"
#include "gelfand/stability.hpp"

namespace gelfand {

struct SolutionField {
  double lambda = 0.0;
  Eigen::VectorXd values;
  double residual_norm = 0.0;
};

enum class SolveStatus { converged, no_convergence };

/// Non-convergence near the fold is a signal, not a failure, so it is part of
/// the result rather than an exception; the last iterate and residual ride
/// along for diagnostics.
struct SolveOutcome {
  SolveStatus status = SolveStatus::no_convergence;
  SolutionField field;
  int iterations = 0;
  double residual_norm = std::numeric_limits<double>::infinity();

  bool converged() const { return status == SolveStatus::converged; }
};

struct SolveOptions {
  double tol = 1e-10;  // weighted-L2 residual target, times the source scale
  int max_iter = 50;
};

/// Damped Newton iteration for A u = lambda f(u).
inline SolveOutcome solve_fixed(const WeightedOperator& op, const Nonlinearity& f,
                                double lambda, const Eigen::VectorXd& initial,
                                SolveOptions opts = {}) {
  const int n = op.size();
  SolveOutcome out;
  out.field.lambda = lambda;

  Eigen::VectorXd u = initial.size() == n ? initial : Eigen::VectorXd::Zero(n);
  const double scale = std::max(1.0, lambda * f.eval(0.0));
  const double target = opts.tol * scale;

  auto weak_residual = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    Eigen::VectorXd fw(n);
    for (int i = 0; i < n; ++i) fw[i] = f.eval(w[i]);
    return op.L * w - lambda * op.V.cwiseProduct(fw);
  };

  Eigen::VectorXd r = weak_residual(u);
  double rnorm = op.strong_norm_of_weak(r);

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol;
  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    out.iterations = iter;
    out.residual_norm = rnorm;
    if (std::isfinite(rnorm) && rnorm <= target) {
      out.status = SolveStatus::converged;
      out.field.values = u;
      out.field.residual_norm = rnorm;
      return out;
    }
    if (iter == opts.max_iter || !std::isfinite(rnorm)) break;

    Eigen::SparseMatrix<double> J = op.L;
    for (int i = 0; i < n; ++i)
      J.coeffRef(i, i) -= lambda * op.V[i] * f.deriv(u[i]);
    chol.compute(J);
    if (chol.info() != Eigen::Success) break;
    const Eigen::VectorXd step = chol.solve(-r);
    if (!step.allFinite()) break;

    // halve the step until the residual decreases
    double alpha = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 30; ++halvings, alpha *= 0.5) {
      const Eigen::VectorXd u_try = u + alpha * step;
      const Eigen::VectorXd r_try = weak_residual(u_try);
      const double rn_try = op.strong_norm_of_weak(r_try);
      if (std::isfinite(rn_try) && rn_try < rnorm) {
        u = u_try;
        r = r_try;
        rnorm = rn_try;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  out.field.values = u;
  out.field.residual_norm = rnorm;
  out.residual_norm = rnorm;
  return out;
}

// ---------------------------------------------------------------------------
// Minimal-branch continuation
// ---------------------------------------------------------------------------

struct BranchPoint {
  double lambda = 0.0;
  SolutionField solution;
  double mu1 = 0.0;      // smallest eigenvalue of the linearization
  double u0 = 0.0;       // value at the node nearest the origin
  double sup_norm = 0.0;
  double l1_norm = 0.0;
};

struct BranchOptions {
  double lambda_step0 = 0.0;  // 0: auto = 0.1 * mu1(A) / f'(0)
  double step_min = 0.0;      // 0: auto = 1e-6 * lambda_step0
  double tol = 1e-10;
  int max_points = 400;
  bool record_mu1 = true;
};

struct Branch {
  std::vector<BranchPoint> points;
  double step0 = 0.0;
  double step_min = 0.0;
  double lambda_last = 0.0;
  double smallest_failed_step = std::numeric_limits<double>::infinity();
  bool exhausted = false;  // step fell below step_min (fold bracketed)
  double mu1_operator = 0.0;

  /// Uncertainty interval for the extremal parameter. The upper end is the
  /// last accepted lambda plus the smallest rejected advance, floored at a
  /// few minimal steps: Newton failure localizes the fold no better than the
  /// continuation's step resolution.
  double lambda_lo() const { return lambda_last; }
  double lambda_hi() const {
    const double gap =
        std::isfinite(smallest_failed_step) ? smallest_failed_step : step0;
    return lambda_last + std::max(gap, 8.0 * step_min);
  }
};

/// Natural continuation from (lambda, u) = (0, 0): advance lambda by the
/// current step re-using the previous solution as the initial guess; halve the
/// step on non-convergence; stop when the step falls below step_min.
inline Branch continue_branch(const WeightedOperator& op, const Nonlinearity& f,
                              BranchOptions opts = {}) {
  const Grid& g = *op.grid;
  const int n = op.size();

  Branch branch;
  const Eigen::VectorXd zero_pot = Eigen::VectorXd::Zero(n);
  StabilityReport base = smallest_eigenvalue(op, zero_pot);
  branch.mu1_operator = base.mu1;
  branch.step0 = opts.lambda_step0 > 0.0 ? opts.lambda_step0
                                         : 0.1 * base.mu1 / f.deriv(0.0);
  branch.step_min = opts.step_min > 0.0 ? opts.step_min : 1e-6 * branch.step0;

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd phi_seed = base.eigenfield;
  double lambda = 0.0;

  auto record = [&](double lam, const SolutionField& sol) {
    BranchPoint pt;
    pt.lambda = lam;
    pt.solution = sol;
    if (opts.record_mu1) {
      Eigen::VectorXd pot(n);
      for (int i = 0; i < n; ++i) pot[i] = lam * f.deriv(sol.values[i]);
      StabilityReport rep = smallest_eigenvalue(op, pot, &phi_seed);
      pt.mu1 = rep.mu1;
      phi_seed = rep.eigenfield;
    }
    pt.u0 = sol.values[g.nearest_origin];
    pt.sup_norm = sol.values.cwiseAbs().maxCoeff();
    std::vector<double> absu(n);
    for (int i = 0; i < n; ++i) absu[i] = std::abs(sol.values[i]);
    pt.l1_norm = weighted_integral(g, absu);
    branch.points.push_back(std::move(pt));
  };

  {
    SolutionField trivial;
    trivial.lambda = 0.0;
    trivial.values = u;
    trivial.residual_norm = 0.0;
    record(0.0, trivial);
  }

  double step = branch.step0;
  while (step >= branch.step_min &&
         static_cast<int>(branch.points.size()) < opts.max_points) {
    const double lambda_try = lambda + step;
    SolveOptions sopts;
    sopts.tol = opts.tol;
    SolveOutcome out = solve_fixed(op, f, lambda_try, u, sopts);
    if (out.converged()) {
      u = out.field.values;
      lambda = lambda_try;
      record(lambda, out.field);
    } else {
      branch.smallest_failed_step = std::min(branch.smallest_failed_step, step);
      step *= 0.5;
    }
  }
  branch.exhausted = step < branch.step_min;
  branch.lambda_last = lambda;
  return branch;
}

// ---------------------------------------------------------------------------
// Extremal parameter estimation over a grid ladder
// ---------------------------------------------------------------------------

struct LambdaStarRow {
  double h = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double mu1_zero = 0.0;  // linear extrapolation of mu1(lambda) to zero
  int points = 0;
};

struct LambdaStarEstimate {
  std::vector<LambdaStarRow> per_grid;
  double extrapolated = 0.0;
  double uncertainty = 0.0;
};

/// Linear extrapolation of mu1(lambda) to zero over the last <= 5 branch
/// points. Near the fold mu1 behaves like sqrt(lambda* - lambda); an
/// unweighted line through that curve overshoots the fold by the full span
/// of the fit window, so the fit is weighted by mu1^-6, which concentrates
/// it on the points closest to the root (asymptotically the secant through
/// the last two). NaN when the branch is too short or mu1 is not decreasing.
inline double mu1_fold_prediction(const Branch& branch) {
  const auto& pts = branch.points;
  const int use = static_cast<int>(std::min<std::size_t>(5, pts.size()));
  if (use < 2) return std::numeric_limits<double>::quiet_NaN();
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < use; ++i) {
    const auto& p = pts[pts.size() - use + i];
    const double mu = std::max(std::abs(p.mu1), 1e-12);
    const double w = 1.0 / (mu * mu * mu * mu * mu * mu);
    sw += w;
    sx += w * p.lambda;
    sy += w * p.mu1;
    sxx += w * p.lambda * p.lambda;
    sxy += w * p.lambda * p.mu1;
  }
  const double det = sw * sxx - sx * sx;
  if (std::abs(det) < 1e-300) return std::numeric_limits<double>::quiet_NaN();
  const double slope = (sw * sxy - sx * sy) / det;
  const double icept = (sy * sxx - sx * sxy) / det;
  if (!(slope < 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return -icept / slope;
}

/// Runs one continuation per ladder spacing and combines the per-grid fold
/// brackets into a Richardson-style extrapolated estimate (geometric-tail
/// acceleration on the bracket midpoints; falls back to the finest grid when
/// the differences do not contract).
inline LambdaStarEstimate lambda_star(const DomainSpec& spec, const Nonlinearity& f,
                                      const std::vector<double>& ladder,
                                      BranchOptions opts = {}) {
  if (ladder.size() < 2)
    throw LadderTooShort("lambda_star needs a refinement ladder of >= 2 spacings");
  LambdaStarEstimate est;
  std::vector<double> mids;
  for (const double h : ladder) {
    const Grid g = build_grid(spec, h);
    const WeightedOperator op = assemble(g);
    const Branch branch = continue_branch(op, f, opts);
    LambdaStarRow row;
    row.h = h;
    row.lambda_lo = branch.lambda_lo();
    row.lambda_hi = branch.lambda_hi();
    row.mu1_zero = mu1_fold_prediction(branch);
    row.points = static_cast<int>(branch.points.size());
    est.per_grid.push_back(row);
    mids.push_back(0.5 * (row.lambda_lo + row.lambda_hi));
  }

  const std::size_t nm = mids.size();
  double extrap = mids.back();
  if (nm >= 3) {
    const double d1 = mids[nm - 2] - mids[nm - 3];
    const double d2 = mids[nm - 1] - mids[nm - 2];
    if (d1 != 0.0) {
      const double r = d2 / d1;
      if (r > 0.0 && r < 0.95) extrap = mids[nm - 1] + d2 * r / (1.0 - r);
    }
  } else {
    // order-one Richardson from two grids
    extrap = 2.0 * mids[1] - mids[0];
  }
  est.extrapolated = extrap;
  est.uncertainty = std::max(std::abs(extrap - mids.back()),
                             0.5 * (est.per_grid.back().lambda_hi -
                                    est.per_grid.back().lambda_lo));
  return est;
}

/// Re-solve at lambda = fraction * lambda_star_estimate starting from the
/// nearest stored branch solution. Non-convergence propagates in the outcome;
/// the caller may lower the fraction.
inline SolveOutcome extremal_approximation(const WeightedOperator& op,
                                           const Nonlinearity& f, const Branch& branch,
                                           double fraction, double lambda_star_estimate,
                                           SolveOptions opts = {}) {
  const double target = fraction * lambda_star_estimate;
  const BranchPoint* nearest = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : branch.points) {
    const double d = std::abs(p.lambda - target);
    if (d < best) {
      best = d;
      nearest = &p;
    }
  }
  Eigen::VectorXd init =
      nearest ? nearest->solution.values : Eigen::VectorXd::Zero(op.size());
  return solve_fixed(op, f, target, init, opts);
}

}  // namespace gelfand

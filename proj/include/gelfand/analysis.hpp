#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "gelfand/solver.hpp"

namespace gelfand {

// ---------------------------------------------------------------------------
// Critical exponents
// ---------------------------------------------------------------------------

/// x / (2 + sqrt(x - 1)) for real x >= 1; the building block of the
/// dimension condition and of the critical exponents.
inline double q_split(double x) { return x / (2.0 + std::sqrt(x - 1.0)); }

inline double q_of(double m, double k) { return q_split(m) + q_split(k); }

/// 2 + 4/(q - 2); +inf when q <= 2 (the bounded regime has no finite
/// integrability threshold).
inline double p_from_q(double q) {
  if (!(q > 2.0)) return std::numeric_limits<double>::infinity();
  return 2.0 + 4.0 / (q - 2.0);
}

/// Radial threshold: finite only for n > 10, +inf at n = 10 (the denominator
/// vanishes) and below.
inline double p_radial(double n) { return p_from_q(q_split(n)); }

struct ExponentReport {
  int m = 0, k = 0, n = 0;
  double q_mk = 0.0;
  double p_mk = 0.0;      // +inf in the bounded regime q_mk <= 2
  double p_rad = 0.0;     // radial threshold for n = m + k
  bool bounded_regime = false;  // q_mk < 2, equivalently n <= 7
  double alpha_sup = 0.0;       // sqrt(m-1)
  double beta_sup = 0.0;        // sqrt(k-1)
};

inline ExponentReport exponents(int m, int k) {
  if (m < 2 || k < 2)
    throw Error("exponents require integer m >= 2 and k >= 2");
  ExponentReport r;
  r.m = m;
  r.k = k;
  r.n = m + k;
  r.q_mk = q_of(m, k);
  r.p_mk = p_from_q(r.q_mk);
  r.p_rad = p_radial(r.n);
  r.bounded_regime = r.q_mk < 2.0;
  r.alpha_sup = std::sqrt(m - 1.0);
  r.beta_sup = std::sqrt(k - 1.0);
  return r;
}

// ---------------------------------------------------------------------------
// Norms of solution fields
// ---------------------------------------------------------------------------

struct NormReport {
  std::map<double, double> lp;  // p -> ||u||_Lp
  double sup_norm = 0.0;
  double grad_energy = 0.0;   // integral of (u_s^2 + u_t^2) dx
  double h1_seminorm = 0.0;   // sqrt of grad_energy
};

inline NormReport norms(const Grid& g, const std::vector<double>& u,
                        const std::vector<double>& p_list) {
  NormReport rep;
  const int n = g.active_count();
  for (int a = 0; a < n; ++a) rep.sup_norm = std::max(rep.sup_norm, std::abs(u[a]));
  for (double p : p_list) {
    std::vector<double> up(n);
    for (int a = 0; a < n; ++a) up[a] = std::pow(std::abs(u[a]), p);
    rep.lp[p] = std::pow(weighted_integral(g, up), 1.0 / p);
  }
  std::vector<double> us, ut, g2(n);
  gradient_fields(g, u, us, ut);
  for (int a = 0; a < n; ++a) g2[a] = us[a] * us[a] + ut[a] * ut[a];
  rep.grad_energy = weighted_integral(g, g2);
  rep.h1_seminorm = std::sqrt(rep.grad_energy);
  return rep;
}

// ---------------------------------------------------------------------------
// Boundary-layer observable: sup over the delta-collar against the L1 mass
// ---------------------------------------------------------------------------

struct BoundaryObservable {
  double delta = 0.0;
  double sup_collar = 0.0;
  double l1 = 0.0;
  double ratio = 0.0;  // 0 by convention when the L1 mass vanishes
};

inline BoundaryObservable boundary_observable(const Grid& g,
                                              const std::vector<double>& u,
                                              double delta) {
  if (!(delta > 0.0) || !(delta < g.inradius))
    throw DeltaOutOfRange("delta must lie in (0, inradius)");
  BoundaryObservable rep;
  rep.delta = delta;
  const int n = g.active_count();
  std::vector<double> absu(n);
  for (int a = 0; a < n; ++a) {
    absu[a] = std::abs(u[a]);
    if (g.dist[a] < delta) rep.sup_collar = std::max(rep.sup_collar, absu[a]);
  }
  rep.l1 = weighted_integral(g, absu);
  rep.ratio = rep.l1 > 0.0 ? rep.sup_collar / rep.l1 : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Refinement study: the finite proxy for the bounded/unbounded dichotomy
// ---------------------------------------------------------------------------

enum class Verdict { bounded, inconclusive, growing, failed };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::bounded: return "BOUNDED";
    case Verdict::inconclusive: return "INCONCLUSIVE";
    case Verdict::growing: return "GROWING";
    case Verdict::failed: return "FAILED";
  }
  return "?";
}

struct StudyRow {
  double h = 0.0;
  bool ok = false;
  double lambda_lo = 0.0, lambda_hi = 0.0;
  double lambda_used = 0.0;
  double sup_norm = 0.0;
  double u0 = 0.0;
  std::map<double, double> lp;
  std::string error;
};

struct StudyResult {
  double fraction = 0.0;
  std::vector<StudyRow> rows;
  Verdict sup_verdict = Verdict::failed;
  std::map<double, Verdict> lp_verdicts;
};

namespace detail {

/// Successive-ratio proxy on a refinement sequence. Cauchy (< 1.1 growth per
/// halving) reads as bounded; ratios beyond 1.5, or persistent increments
/// together with ratios above 1.1, read as growing; the gray band in between
/// with shrinking increments is inconclusive by design near regime
/// boundaries.
inline Verdict sequence_verdict(const std::vector<double>& vals) {
  if (vals.size() < 2) return Verdict::failed;
  double rmax = 0.0;
  bool increments_persist = false;
  for (std::size_t i = 1; i < vals.size(); ++i) {
    const double prev = vals[i - 1], cur = vals[i];
    const double ratio = prev > 0.0 ? cur / prev : 1.0;
    rmax = std::max(rmax, ratio);
    if (i >= 2) {
      const double d1 = vals[i - 1] - vals[i - 2];
      const double d2 = cur - prev;
      if (d2 >= 0.8 * d1 && d2 > 0.0) increments_persist = true;
    }
  }
  if (rmax < 1.1) return Verdict::bounded;
  if (rmax >= 1.5 || increments_persist) return Verdict::growing;
  return Verdict::inconclusive;
}

}  // namespace detail

/// Per-spacing rows: continue the branch, re-solve at
/// lambda = fraction * (per-grid fold estimate), record sup and L^p norms.
/// Solver failures mark the row failed and the study continues.
inline StudyResult refinement_study(const DomainSpec& spec, const Nonlinearity& f,
                                    double fraction, const std::vector<double>& ladder,
                                    const std::vector<double>& p_list,
                                    BranchOptions bopts = {}) {
  if (ladder.size() < 3)
    throw LadderTooShort("refinement_study needs a ladder of >= 3 spacings");
  StudyResult res;
  res.fraction = fraction;

  for (const double h : ladder) {
    StudyRow row;
    row.h = h;
    try {
      const Grid g = build_grid(spec, h);
      const WeightedOperator op = assemble(g);
      const Branch branch = continue_branch(op, f, bopts);
      row.lambda_lo = branch.lambda_lo();
      row.lambda_hi = branch.lambda_hi();
      row.lambda_used = fraction * 0.5 * (row.lambda_lo + row.lambda_hi);
      const SolveOutcome out =
          extremal_approximation(op, f, branch, fraction,
                                 0.5 * (row.lambda_lo + row.lambda_hi));
      if (!out.converged()) {
        row.error = "no convergence at the requested fraction";
      } else {
        const auto u = to_std(out.field.values);
        const NormReport nr = norms(g, u, p_list);
        row.sup_norm = nr.sup_norm;
        row.u0 = out.field.values[g.nearest_origin];
        row.lp = nr.lp;
        row.ok = true;
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    res.rows.push_back(std::move(row));
  }

  std::vector<double> sups;
  for (const auto& r : res.rows)
    if (r.ok) sups.push_back(r.sup_norm);
  res.sup_verdict = detail::sequence_verdict(sups);

  for (double p : p_list) {
    std::vector<double> vals;
    for (const auto& r : res.rows)
      if (r.ok) vals.push_back(r.lp.at(p));
    res.lp_verdicts[p] = detail::sequence_verdict(vals);
  }
  return res;
}

}  // namespace gelfand

#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <vector>

#include "gelfand/grid.hpp"

namespace gelfand {

/// Discrete weighted elliptic operator A = V^{-1} L for
/// -(1/w) div(w grad u) with w = s^{m-1} t^{k-1}, Dirichlet data eliminated.
/// L is assembled from shared half-link coefficients, so it is symmetric to
/// machine precision and A is self-adjoint in the V-weighted inner product;
/// V is positive on every active node (axis cells use exact half-cell
/// integrals of the weight).
class WeightedOperator {
 public:
  const Grid* grid = nullptr;
  Eigen::SparseMatrix<double> L;  // weak form, symmetric positive definite
  Eigen::VectorXd V;              // cell measures

  int size() const { return static_cast<int>(V.size()); }

  /// Strong-form application (A u)_p = (L u)_p / V_p.
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const {
    return (L * u).cwiseQuotient(V);
  }

  /// Discrete approximation of the measure inner product
  /// c_{m,k} * integral of u v over the full domain.
  double dot(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    return grid->cmk * (u.array() * v.array() * V.array()).sum();
  }

  double norm(const Eigen::VectorXd& u) const { return std::sqrt(dot(u, u)); }

  /// Weighted L2 norm of the strong residual A u - gfield, computed from the
  /// weak residual r = L u - V .* gfield.
  double strong_norm_of_weak(const Eigen::VectorXd& r) const {
    return std::sqrt(grid->cmk * (r.array().square() / V.array()).sum());
  }
};

/// Assembles the weighted operator for a grid. Interior half-link weights are
/// ((s_i + s_{i+1})/2)^{m-1} t_j^{k-1} and the t analogue; links in the slab
/// next to an axis carry the exact transverse half-cell integral instead of
/// the (vanishing) lumped monomial; Shortley-Weller cut links are scaled by
/// 1/theta and contribute to the diagonal only.
inline WeightedOperator assemble(const Grid& g) {
  const int n = g.active_count();
  const int m = g.m(), k = g.k();
  const double h = g.h;

  // transverse factors per slab: integral of the weight across the cell / h
  auto t_factor = [&](int j) { return g.cell_t(j) / h; };
  auto s_factor = [&](int i) { return g.cell_s(i) / h; };

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  std::vector<double> diag(n, 0.0);

  for (int a = 0; a < n; ++a) {
    const int f = g.node_of_active[a];
    const int i = f % g.ni, j = f / g.ni;
    const double s = g.s_of(i), t = g.t_of(j);

    // +s and +t full links are added once per link from the lower endpoint
    const auto& links = g.links[a];

    if (links[kDirSP].neighbor >= 0) {
      const double c = std::pow(s + 0.5 * h, m - 1) * t_factor(j);
      const int b = links[kDirSP].neighbor;
      diag[a] += c;
      diag[b] += c;
      trip.emplace_back(a, b, -c);
      trip.emplace_back(b, a, -c);
    }
    if (links[kDirTP].neighbor >= 0) {
      const double c = std::pow(t + 0.5 * h, k - 1) * s_factor(i);
      const int b = links[kDirTP].neighbor;
      diag[a] += c;
      diag[b] += c;
      trip.emplace_back(a, b, -c);
      trip.emplace_back(b, a, -c);
    }

    // cut links: Dirichlet value eliminated, diagonal contribution only
    if (links[kDirSP].cut) {
      const double th = links[kDirSP].theta;
      diag[a] += std::pow(s + 0.5 * th * h, m - 1) * t_factor(j) / th;
    }
    if (links[kDirSM].cut) {
      const double th = links[kDirSM].theta;
      diag[a] += std::pow(s - 0.5 * th * h, m - 1) * t_factor(j) / th;
    }
    if (links[kDirTP].cut) {
      const double th = links[kDirTP].theta;
      diag[a] += std::pow(t + 0.5 * th * h, k - 1) * s_factor(i) / th;
    }
    if (links[kDirTM].cut) {
      const double th = links[kDirTM].theta;
      diag[a] += std::pow(t - 0.5 * th * h, k - 1) * s_factor(i) / th;
    }
  }

  for (int a = 0; a < n; ++a) trip.emplace_back(a, a, diag[a]);

  WeightedOperator op;
  op.grid = &g;
  op.L.resize(n, n);
  op.L.setFromTriplets(trip.begin(), trip.end());
  op.L.makeCompressed();
  op.V.resize(n);
  for (int a = 0; a < n; ++a) op.V[a] = g.vol[a];
  return op;
}

/// Solves the linear Dirichlet problem A u = gfield (weak form L u = V .* g).
inline Eigen::VectorXd solve_poisson(const WeightedOperator& op,
                                     const Eigen::VectorXd& gfield) {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(op.L);
  if (chol.info() != Eigen::Success)
    throw Error("stiffness factorization failed");
  return chol.solve(op.V.cwiseProduct(gfield));
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
}

}  // namespace gelfand

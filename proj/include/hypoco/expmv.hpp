#pragma once

// Action of e^{tL} on a block of vectors by scaled truncated Taylor series.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>

#include "hypoco/errors.hpp"

namespace hypoco {

/// ‖M‖_∞ (max absolute row sum) of a sparse matrix.
template <class Sparse>
double sparse_inf_norm(const Sparse& M) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(M.rows());
  for (int k = 0; k < M.outerSize(); ++k)
    for (typename Sparse::InnerIterator it(M, k); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

/// Returns e^{tL}F. The interval is split into s substeps with ‖(t/s)L‖_∞ ≤ 1,
/// each summed until the next term is below 1e−17 of the partial sum.
template <class Sparse>
Eigen::MatrixXd expmv(const Sparse& L, double t, const Eigen::MatrixXd& F) {
  if (!(t >= 0.0)) throw UsageError("expmv: t must be nonnegative");
  if (t == 0.0) return F;
  const double norm = sparse_inf_norm(L);
  const long s = std::max(1L, static_cast<long>(std::ceil(t * norm)));
  const double h = t / static_cast<double>(s);
  Eigen::MatrixXd X = F;
  Eigen::MatrixXd term(F.rows(), F.cols());
  for (long step = 0; step < s; ++step) {
    term = X;
    Eigen::MatrixXd sum = X;
    for (int k = 1; k <= 60; ++k) {
      term = (h / k) * (L * term);
      sum += term;
      const double tn = term.cwiseAbs().maxCoeff();
      const double sn = sum.cwiseAbs().maxCoeff();
      if (tn <= 1e-17 * sn) break;
      if (k == 60) throw SolveError("expmv: Taylor series did not converge");
    }
    X = std::move(sum);
  }
  return X;
}

}  // namespace hypoco

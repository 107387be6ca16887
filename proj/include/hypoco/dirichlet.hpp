#pragma once

// Exit problem LW + θW = 0 off U, W = 1 on U, on an upwind grid, and its
// comparison with Monte Carlo estimates of E_x e^{θT_U}.

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hypoco/errors.hpp"
#include "hypoco/grid.hpp"
#include "hypoco/montecarlo.hpp"
#include "hypoco/potential.hpp"

namespace hypoco {

struct DirichletSolution {
  const GridOperator* grid = nullptr;
  double theta = 0.0;
  double x_lo = 0.0, x_hi = 0.0;
  std::vector<int> U_cells;
  std::vector<bool> in_U;
  Vec W;
  /// max |LW + θW| over cells outside U.
  double residual = 0.0;
  /// max over U of (LW + θW); LW ≤ −θW + C then holds on every cell.
  double lyapunov_C = 0.0;
  double min_W = 0.0;
  /// W nondecreasing in |x| along every slice outside U (within 1e−9).
  bool monotone = true;
  std::vector<std::string> warnings;

  /// u-average of W on slice i.
  double slice_average(int i) const {
    const auto& g = *grid;
    double s = 0.0;
    for (int j = 0; j < g.nv; ++j) s += g.w[g.index(i, j)] * W[g.index(i, j)];
    return s / g.slice_mass[i];
  }

  /// u-averaged W at x by linear interpolation between slice centres; 1 inside U.
  double averaged_at(double x) const {
    if (x >= x_lo && x <= x_hi) return 1.0;
    const auto& g = *grid;
    if (x <= g.xc.front()) return slice_average(0);
    if (x >= g.xc.back()) return slice_average(g.nx - 1);
    const double s = (x - g.xc.front()) / g.dx;
    const int i = std::min(static_cast<int>(std::floor(s)), g.nx - 2);
    const double f = s - i;
    return (1.0 - f) * slice_average(i) + f * slice_average(i + 1);
  }

  /// max over slices of (u-averaged W)/e^{V(x)/2} and where it occurs.
  std::pair<double, double> max_growth_ratio() const {
    const auto& g = *grid;
    double best = 0.0, where = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      const double r = slice_average(i) / std::exp(0.5 * rtorus_potential(g.xc[i]));
      if (r > best) {
        best = r;
        where = g.xc[i];
      }
    }
    return {best, where};
  }
};

/// U = {lo ≤ x ≤ hi} × (all velocities/angles), as a set of cells by centre.
/// `admissible_rate`, when given, is h(μ(U)); θ above it is reported as a warning.
inline DirichletSolution solve_dirichlet(const GridOperator& g, double lo, double hi, double theta,
                                         std::optional<double> admissible_rate = std::nullopt) {
  if (!(theta >= 0.0)) throw UsageError("solve_dirichlet: theta must be nonnegative");
  const int N = g.size();
  DirichletSolution sol;
  sol.grid = &g;
  sol.theta = theta;
  sol.x_lo = lo;
  sol.x_hi = hi;
  sol.in_U.assign(N, false);
  for (int i = 0; i < g.nx; ++i)
    if (g.xc[i] >= lo && g.xc[i] <= hi)
      for (int j = 0; j < g.nv; ++j) {
        sol.in_U[g.index(i, j)] = true;
        sol.U_cells.push_back(g.index(i, j));
      }
  if (sol.U_cells.empty()) throw UsageError("solve_dirichlet: target set contains no grid cell");
  if (admissible_rate && theta >= *admissible_rate)
    sol.warnings.push_back("theta is at or above the admissible rate h(mu(U)); the bound does not apply");
  if (g.scheme != Scheme::Upwind)
    sol.warnings.push_back("grid is not upwinded; the discrete maximum principle may fail");

  std::vector<int> out_index(N, -1);
  std::vector<int> outside;
  for (int a = 0; a < N; ++a)
    if (!sol.in_U[a]) {
      out_index[a] = static_cast<int>(outside.size());
      outside.push_back(a);
    }

  // Solve for Δ = W − 1: (L + θ)Δ = −θ on U^c (L1 = 0), Δ = 0 on U.
  sol.W = Vec::Ones(N);
  if (!outside.empty() && theta > 0.0) {
    const int n = static_cast<int>(outside.size());
    std::vector<Eigen::Triplet<double>> trip;
    for (int r = 0; r < n; ++r) {
      const int a = outside[r];
      trip.emplace_back(r, r, theta);
      for (SpMat::InnerIterator it(g.L, a); it; ++it)
        if (out_index[it.col()] >= 0) trip.emplace_back(r, out_index[it.col()], it.value());
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
      throw SolveError("solve_dirichlet: restricted system is singular; theta is at or above the principal "
                       "eigenvalue of the exit problem, use a smaller theta");
    const Vec b = Vec::Constant(n, -theta);
    Vec delta = lu.solve(b);
    for (int it = 0; it < 3; ++it) {
      const Vec r = b - A * delta;
      if (r.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + delta.cwiseAbs().maxCoeff())) break;
      delta += lu.solve(r);
    }
    if (!delta.allFinite()) throw SolveError("solve_dirichlet: non-finite solution; use a smaller theta");
    for (int r = 0; r < n; ++r) sol.W[outside[r]] = 1.0 + delta[r];
  }

  const Vec lw = g.L * sol.W + theta * sol.W;
  sol.residual = 0.0;
  for (int a : outside) sol.residual = std::max(sol.residual, std::abs(lw[a]));
  sol.lyapunov_C = -std::numeric_limits<double>::infinity();
  for (int a : sol.U_cells) sol.lyapunov_C = std::max(sol.lyapunov_C, lw[a]);
  sol.min_W = sol.W.minCoeff();
  if (sol.min_W < 1.0 - 1e-12)
    throw SolveError("solve_dirichlet: solution drops below 1; theta exceeds the principal exit eigenvalue");

  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      const int a = g.index(i, j), b = g.index(i + 1, j);
      if (sol.in_U[a] || sol.in_U[b]) continue;
      if (g.xc[i] >= 0.0 && sol.W[b] < sol.W[a] - 1e-9 * sol.W[a]) sol.monotone = false;
      if (g.xc[i + 1] <= 0.0 && sol.W[a] < sol.W[b] - 1e-9 * sol.W[b]) sol.monotone = false;
    }
  if (!sol.monotone) sol.warnings.push_back("W is not monotone in |x| along every slice");
  return sol;
}

struct CrossPoint {
  double x = 0.0;
  double W_pde = 0.0;
  double W_coarse = 0.0;
  double delta_disc = 0.0;
  double W_mc = 0.0;
  double std_error = 0.0;
  bool pass = false;
};

struct CrossValidation {
  std::vector<CrossPoint> points;
  bool pass = true;
};

/// |W_fine − Ŵ_mc| ≤ 3SE + |W_fine − W_coarse| at each probe.
inline CrossValidation crossvalidate(const DirichletSolution& fine, const DirichletSolution& coarse,
                                     const GrowthProfile& mc) {
  if (std::abs(fine.theta - mc.theta) > 1e-12 * fine.theta || std::abs(coarse.theta - mc.theta) > 1e-12 * fine.theta)
    throw UsageError("crossvalidate: theta differs between the solutions and the Monte Carlo profile");
  CrossValidation cv;
  for (const auto& p : mc.points) {
    CrossPoint c;
    c.x = p.x;
    c.W_pde = fine.averaged_at(p.x);
    c.W_coarse = coarse.averaged_at(p.x);
    c.delta_disc = std::abs(c.W_pde - c.W_coarse);
    c.W_mc = p.W;
    c.std_error = p.std_error;
    c.pass = std::abs(c.W_pde - c.W_mc) <= 3.0 * c.std_error + c.delta_disc;
    cv.pass = cv.pass && c.pass;
    cv.points.push_back(c);
  }
  return cv;
}

}  // namespace hypoco

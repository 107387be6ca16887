#pragma once

// Finite-volume discretizations of the ℝ×𝕋 and 1-d kinetic Langevin
// generators. Transport fluxes come from a discrete stream function ψ with
// ρb = (∂_vψ, −∂_xψ), so every cell is exactly divergence-free; the skew scheme
// splits each flux symmetrically, the upwind scheme turns it into a jump rate.

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "hypoco/errors.hpp"
#include "hypoco/potential.hpp"

namespace hypoco {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Scheme { Skew, Upwind };
enum class GridKind { RTorus, Langevin };

inline std::string to_string(Scheme s) { return s == Scheme::Skew ? "skew" : "upwind"; }

/// μ-weighted generator on an nx × nv cell grid, index a = i·nv + j
/// (i along x, j along the velocity/angle variable).
struct GridOperator {
  GridKind kind = GridKind::RTorus;
  Scheme scheme = Scheme::Skew;
  int nx = 0;
  int nv = 0;
  double x_lo = 0.0, x_hi = 0.0;
  double v_lo = 0.0, v_hi = 0.0;
  bool periodic_v = true;
  double dx = 0.0, dv = 0.0;
  std::vector<double> xc;
  std::vector<double> vc;
  /// Discrete μ, Σw = 1.
  Vec w;
  /// Mass of each x-slice, m_i = Σ_j w_{ij}.
  Vec slice_mass;
  SpMat T;
  SpMat Q;
  SpMat L;
  /// The nv × nv velocity/angle block of Q (identical on every slice).
  Mat q_block;
  /// Largest normalized weight on a truncation boundary cell.
  double boundary_weight = 0.0;
  double conservation_defect = 0.0;
  double invariance_defect = 0.0;

  int size() const noexcept { return nx * nv; }
  int index(int i, int j) const noexcept { return i * nv + j; }

  double inner(const Vec& f, const Vec& g) const { return (w.array() * f.array() * g.array()).sum(); }
  double norm(const Vec& f) const { return std::sqrt(inner(f, f)); }
  double mean(const Vec& f) const { return w.dot(f); }
  Vec center(const Vec& f) const { return f.array() - mean(f); }

  /// Π: w-weighted average over the velocity/angle variable on each x-slice.
  Vec project(const Vec& f) const {
    Vec out(f.size());
    for (int i = 0; i < nx; ++i) {
      double s = 0.0;
      for (int j = 0; j < nv; ++j) s += w[index(i, j)] * f[index(i, j)];
      const double avg = s / slice_mass[i];
      for (int j = 0; j < nv; ++j) out[index(i, j)] = avg;
    }
    return out;
  }

  /// Sparse matrix of Π.
  SpMat projection_matrix() const {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(size()) * nv);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nv; ++j)
        for (int k = 0; k < nv; ++k) t.emplace_back(index(i, j), index(i, k), w[index(i, k)] / slice_mass[i]);
    SpMat P(size(), size());
    P.setFromTriplets(t.begin(), t.end());
    return P;
  }

  /// Evaluates f at cell centres.
  template <class F>
  Vec sample(F&& f) const {
    Vec out(size());
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nv; ++j) out[index(i, j)] = f(xc[i], vc[j]);
    return out;
  }
};

namespace detail {

struct FluxBuilder {
  int nx, nv;
  bool periodic_v;
  std::vector<double> wt;  // unnormalized cell weights ρ·Δx·Δv
  Scheme scheme;
  std::vector<Eigen::Triplet<double>> trip;

  int idx(int i, int j) const { return i * nv + ((j % nv) + nv) % nv; }

  void add(int a, int b, double F) {
    if (scheme == Scheme::Skew) {
      trip.emplace_back(a, b, 0.5 * F / wt[a]);
      trip.emplace_back(b, a, -0.5 * F / wt[b]);
    } else if (F > 0.0) {
      trip.emplace_back(a, b, F / wt[a]);
      trip.emplace_back(a, a, -F / wt[a]);
    } else if (F < 0.0) {
      trip.emplace_back(b, a, -F / wt[b]);
      trip.emplace_back(b, b, F / wt[b]);
    }
  }

  /// psi(i, jn) at x node i ∈ [0, nx], v node jn (v_lo + jn·Δv).
  template <class Psi>
  void transport(Psi&& psi) {
    for (int i = 0; i + 1 < nx; ++i)
      for (int j = 0; j < nv; ++j) add(idx(i, j), idx(i + 1, j), psi(i + 1, j + 1) - psi(i + 1, j));
    const int faces = periodic_v ? nv : nv - 1;
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < faces; ++j) add(idx(i, j), idx(i, j + 1), -(psi(i + 1, j + 1) - psi(i, j + 1)));
  }
};

inline void finalize(GridOperator& g, std::vector<double> wt, std::vector<Eigen::Triplet<double>>& t_trip,
                     std::vector<Eigen::Triplet<double>>& q_trip) {
  const int N = g.size();
  double total = 0.0;
  for (double v : wt) total += v;
  g.w.resize(N);
  for (int a = 0; a < N; ++a) g.w[a] = wt[a] / total;
  if (!(g.w.minCoeff() > 0.0)) throw BuildError("grid build: a cell weight underflows to zero; shrink the domain");
  g.slice_mass = Vec::Zero(g.nx);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.nv; ++j) g.slice_mass[i] += g.w[g.index(i, j)];

  g.T.resize(N, N);
  g.T.setFromTriplets(t_trip.begin(), t_trip.end());
  g.Q.resize(N, N);
  g.Q.setFromTriplets(q_trip.begin(), q_trip.end());
  g.L = g.T + g.Q;
  g.L.makeCompressed();

  g.q_block = Mat::Zero(g.nv, g.nv);
  for (int j = 0; j < g.nv; ++j)
    for (SpMat::InnerIterator it(g.Q, g.index(0, j)); it; ++it) g.q_block(j, it.col()) = it.value();
  const int mid = g.nx / 2;
  for (int j = 0; j < g.nv; ++j)
    for (SpMat::InnerIterator it(g.Q, g.index(mid, j)); it; ++it)
      if (std::abs(g.q_block(j, it.col() - g.index(mid, 0)) - it.value()) > 1e-9 * std::abs(it.value()))
        throw BuildError("grid build: velocity block of Q differs between slices");

  double bw = 0.0;
  for (int j = 0; j < g.nv; ++j) bw = std::max({bw, g.w[g.index(0, j)], g.w[g.index(g.nx - 1, j)]});
  if (!g.periodic_v)
    for (int i = 0; i < g.nx; ++i) bw = std::max({bw, g.w[g.index(i, 0)], g.w[g.index(i, g.nv - 1)]});
  g.boundary_weight = bw;

  const Vec ones = Vec::Ones(N);
  g.conservation_defect = (g.L * ones).cwiseAbs().maxCoeff();
  const Vec wl = g.L.transpose() * g.w;
  g.invariance_defect = wl.cwiseAbs().maxCoeff();

  if (g.boundary_weight >= 1e-8)
    throw BuildError("grid build: boundary cell weight " + std::to_string(g.boundary_weight) +
                     " >= 1e-8; enlarge the truncation domain");
  if (g.conservation_defect > 1e-10)
    throw BuildError("grid build: |L1| = " + std::to_string(g.conservation_defect) + " > 1e-10");
  if (g.invariance_defect > 1e-8)
    throw BuildError("grid build: |w^T L| = " + std::to_string(g.invariance_defect) + " > 1e-8");
}

}  // namespace detail

/// Y₀ + ∂_u² on [−R, R] × 𝕋 with Y₀ = cos u ∂_x + V′(x) sin u ∂_u; no-flux at x = ±R.
inline GridOperator build_rtorus_generator(int nx, int nu, double R, Scheme scheme = Scheme::Skew) {
  if (nx < 16 || nu < 16) throw BuildError("build_rtorus_generator: nx and nu must be at least 16");
  if (!(R > 0.0)) throw BuildError("build_rtorus_generator: R must be positive");
  GridOperator g;
  g.kind = GridKind::RTorus;
  g.scheme = scheme;
  g.nx = nx;
  g.nv = nu;
  g.x_lo = -R;
  g.x_hi = R;
  g.v_lo = 0.0;
  g.v_hi = 2.0 * std::numbers::pi;
  g.periodic_v = true;
  g.dx = 2.0 * R / nx;
  g.dv = 2.0 * std::numbers::pi / nu;
  for (int i = 0; i < nx; ++i) g.xc.push_back(-R + (i + 0.5) * g.dx);
  for (int j = 0; j < nu; ++j) g.vc.push_back((j + 0.5) * g.dv);

  detail::FluxBuilder fb{nx, nu, true, {}, scheme, {}};
  fb.wt.resize(static_cast<std::size_t>(nx) * nu);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nu; ++j) fb.wt[g.index(i, j)] = std::exp(-rtorus_potential(g.xc[i])) * g.dx * g.dv;

  std::vector<double> node_rho(nx + 1);
  for (int i = 0; i <= nx; ++i) node_rho[i] = (i == 0 || i == nx) ? 0.0 : std::exp(-rtorus_potential(-R + i * g.dx));
  fb.transport([&](int i, int jn) { return node_rho[i] * std::sin((jn % nu) * g.dv); });

  std::vector<Eigen::Triplet<double>> q;
  const double c = 1.0 / (g.dv * g.dv);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nu; ++j) {
      const int a = g.index(i, j);
      q.emplace_back(a, fb.idx(i, j + 1), c);
      q.emplace_back(a, fb.idx(i, j - 1), c);
      q.emplace_back(a, a, -2.0 * c);
    }
  detail::finalize(g, fb.wt, fb.trip, q);
  return g;
}

/// v∂_x − (U′(x) + v)∂_v + ∂_v² on [−Rx, Rx] × [−Rv, Rv]; no-flux on all sides.
inline GridOperator build_langevin_generator(int nx, int nv, double Rx, double Rv, const Polynomial& U,
                                             Scheme scheme = Scheme::Skew) {
  if (nx < 16 || nv < 16) throw BuildError("build_langevin_generator: nx and nv must be at least 16");
  if (!(Rx > 0.0) || !(Rv > 0.0)) throw BuildError("build_langevin_generator: domain must be nonempty");
  GridOperator g;
  g.kind = GridKind::Langevin;
  g.scheme = scheme;
  g.nx = nx;
  g.nv = nv;
  g.x_lo = -Rx;
  g.x_hi = Rx;
  g.v_lo = -Rv;
  g.v_hi = Rv;
  g.periodic_v = false;
  g.dx = 2.0 * Rx / nx;
  g.dv = 2.0 * Rv / nv;
  for (int i = 0; i < nx; ++i) g.xc.push_back(-Rx + (i + 0.5) * g.dx);
  for (int j = 0; j < nv; ++j) g.vc.push_back(-Rv + (j + 0.5) * g.dv);

  // Shift the energy so the largest cell density is O(1).
  double umin = U(g.xc[0]);
  for (double x : g.xc) umin = std::min(umin, U(x));
  const auto rho = [&](double x, double v) { return std::exp(-(U(x) - umin) - 0.5 * v * v); };

  detail::FluxBuilder fb{nx, nv, false, {}, scheme, {}};
  fb.wt.resize(static_cast<std::size_t>(nx) * nv);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nv; ++j) fb.wt[g.index(i, j)] = rho(g.xc[i], g.vc[j]) * g.dx * g.dv;

  fb.transport([&](int i, int jn) {
    if (i == 0 || i == nx || jn == 0 || jn == nv) return 0.0;
    return -rho(-Rx + i * g.dx, -Rv + jn * g.dv);
  });

  std::vector<Eigen::Triplet<double>> q;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j + 1 < nv; ++j) {
      const int a = g.index(i, j);
      const int b = g.index(i, j + 1);
      const double cond = rho(g.xc[i], -Rv + (j + 1) * g.dv) * g.dx / g.dv;
      q.emplace_back(a, b, cond / fb.wt[a]);
      q.emplace_back(a, a, -cond / fb.wt[a]);
      q.emplace_back(b, a, cond / fb.wt[b]);
      q.emplace_back(b, b, -cond / fb.wt[b]);
    }
  detail::finalize(g, fb.wt, fb.trip, q);
  return g;
}

}  // namespace hypoco

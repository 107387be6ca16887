#pragma once

// DMS operators on a skew grid and the hypocoercivity certificate
//   ρ = min { −⟨f, (L + SL)f⟩_w : w·f = 0, ‖f‖_w = 1 }.
//
// Everything is evaluated in the isometric coordinates y = √w ∘ f, where
// w-adjoints become transposes. With Ẽ the orthonormal slice basis (Π̃ = ẼẼᵀ),
// T̃ the transport used by A, Ỹ = T̃Ẽ and C̃ = (I + ỸᵀỸ)⁻¹:
//   Ã = ẼC̃Ỹᵀ,   S̃ = ΦΨΦᵀ,   Φ = P̃₀[Ẽ, Ỹ],   Ψ = ε/2·[[0, C̃], [C̃, 0]],
// and the symmetrized certificate operator is H̃ = −Q̃ − ½UZUᵀ with
// U = [Φ, L̃ᵀΦ], Z = [[0, Ψ], [Ψ, 0]]. H̃ is a block-diagonal matrix plus a
// rank-4nx term, so shifted inverses are exact via the push-through identity.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hypoco/errors.hpp"
#include "hypoco/expmv.hpp"
#include "hypoco/grid.hpp"

namespace hypoco {

using SpCol = Eigen::SparseMatrix<double>;

class DMSOperators {
 public:
  /// A is built from the DMS transport −T (for ∂_t f + T_DMS f = Qf); with
  /// +T the certificate is negative for every ε.
  DMSOperators(const GridOperator& g, double epsilon) : g_(&g), eps_(epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw UsageError("build_dms: epsilon must lie in (0, 1)");
    if (g.scheme != Scheme::Skew) throw UsageError("build_dms: requires the skew (antisymmetric) transport scheme");
    const int N = g.size();
    const int nx = g.nx;
    const int nv = g.nv;
    sw_ = g.w.cwiseSqrt();
    isw_ = sw_.cwiseInverse();
    v_ = sw_;

    gamma_sqrt_.resize(nv);
    for (int j = 0; j < nv; ++j) gamma_sqrt_[j] = std::sqrt(g.w[g.index(0, j)] / g.slice_mass[0]);

    std::vector<Eigen::Triplet<double>> et;
    et.reserve(N);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nv; ++j) et.emplace_back(g.index(i, j), i, std::sqrt(g.w[g.index(i, j)] / g.slice_mass[i]));
    E_.resize(N, nx);
    E_.setFromTriplets(et.begin(), et.end());
    sqrt_m_ = g.slice_mass.cwiseSqrt();

    const SpCol Tc = g.T;
    const SpCol Lc = g.L;
    const SpCol Qc = g.Q;
    Td_ = -(sw_.asDiagonal() * Tc * isw_.asDiagonal());
    Lt_ = sw_.asDiagonal() * Lc * isw_.asDiagonal();
    Qt_ = sw_.asDiagonal() * Qc * isw_.asDiagonal();
    Y_ = Td_ * E_;

    const Mat YtY = Mat(SpCol(Y_.transpose() * Y_));
    Cinv_ = Mat::Identity(nx, nx) + YtY;
    C_ = Cinv_.llt().solve(Mat::Identity(nx, nx));
    C_ = 0.5 * (C_ + C_.transpose());

    // Φ = Φ_s − v cᵀ.
    Phi_s_.resize(N, 2 * nx);
    {
      std::vector<Eigen::Triplet<double>> pt;
      for (int k = 0; k < E_.outerSize(); ++k)
        for (SpCol::InnerIterator it(E_, k); it; ++it) pt.emplace_back(it.row(), k, it.value());
      for (int k = 0; k < Y_.outerSize(); ++k)
        for (SpCol::InnerIterator it(Y_, k); it; ++it) pt.emplace_back(it.row(), nx + k, it.value());
      Phi_s_.setFromTriplets(pt.begin(), pt.end());
    }
    c_ = Vec::Zero(2 * nx);
    c_.head(nx) = sqrt_m_;

    Psi_ = Mat::Zero(2 * nx, 2 * nx);
    Psi_.topRightCorner(nx, nx) = 0.5 * eps_ * C_;
    Psi_.bottomLeftCorner(nx, nx) = 0.5 * eps_ * C_;

    // ‖S̃‖ from the Gram matrix of Φ.
    const Vec Phit_v = Phi_s_.transpose() * v_;
    Mat G = Mat(SpCol(Phi_s_.transpose() * Phi_s_));
    G -= Phit_v * c_.transpose() + c_ * Phit_v.transpose();
    G += (v_.squaredNorm()) * c_ * c_.transpose();
    G = 0.5 * (G + G.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> ge(G);
    const Vec lam = ge.eigenvalues().cwiseMax(0.0);
    const Mat R = lam.cwiseSqrt().asDiagonal() * ge.eigenvectors().transpose();
    Eigen::SelfAdjointEigenSolver<Mat> se(R * Psi_ * R.transpose(), Eigen::EigenvaluesOnly);
    s_norm_ = se.eigenvalues().cwiseAbs().maxCoeff();
  }

  const GridOperator& grid() const noexcept { return *g_; }
  double epsilon() const noexcept { return eps_; }
  /// Operator norm of S in L²(w) (S vanishes on constants, so this is also the
  /// norm on the mean-zero subspace).
  double s_norm() const noexcept { return s_norm_; }

  Vec to_tilde(const Vec& f) const { return sw_.cwiseProduct(f); }
  Vec from_tilde(const Vec& y) const { return isw_.cwiseProduct(y); }

  Vec apply_Pi(const Vec& f) const { return g_->project(f); }
  /// The DMS transport −T.
  Vec apply_T(const Vec& f) const { return from_tilde(Td_ * to_tilde(f)); }
  Vec apply_A(const Vec& f) const { return from_tilde(A_tilde(to_tilde(f))); }
  Vec apply_A_adjoint(const Vec& f) const {
    const Vec y = to_tilde(f);
    return from_tilde(Y_ * (C_ * (E_.transpose() * y)));
  }
  Vec apply_S(const Vec& f) const { return from_tilde(S_tilde(to_tilde(f))); }
  Vec apply_B(const Vec& f) const { return f + apply_S(f); }
  double b_norm_sq(const Vec& f) const { return g_->inner(f, apply_B(f)); }

  /// (TΠ)*(TΠ) restricted to the Π-range, in slice coordinates (ỸᵀỸ).
  Mat macroscopic_matrix() const { return Cinv_ - Mat::Identity(Cinv_.rows(), Cinv_.cols()); }

  Vec A_tilde(const Vec& y) const { return E_ * (C_ * (Y_.transpose() * y)); }
  Vec Phi_t_times(const Vec& y) const {
    Vec r = Phi_s_.transpose() * y;
    r -= c_ * v_.dot(y);
    return r;
  }
  Vec Phi_times(const Vec& z) const { return Phi_s_ * z - v_ * c_.dot(z); }
  Vec S_tilde(const Vec& y) const { return Phi_times(Psi_ * Phi_t_times(y)); }

  /// H̃y = −Q̃y − ½(S̃L̃ + L̃ᵀS̃)y; with `with_s == false` only −Q̃y.
  Vec H_tilde(const Vec& y, bool with_s = true) const {
    Vec out = -(Qt_ * y);
    if (with_s) out -= 0.5 * (S_tilde(Lt_ * y) + Lt_.transpose() * S_tilde(y));
    return out;
  }

  /// Dense S in original coordinates (small grids only).
  Mat dense_S() const {
    const int N = g_->size();
    if (N > 4096) throw UsageError("dense_S: grid too large to materialize");
    Mat out(N, N);
    for (int k = 0; k < N; ++k) out.col(k) = apply_S(Vec::Unit(N, k));
    return out;
  }

  // Internals shared with the certificate solver.
  const SpCol& E() const noexcept { return E_; }
  const SpCol& Phi_s() const noexcept { return Phi_s_; }
  const SpCol& L_tilde() const noexcept { return Lt_; }
  const SpCol& Q_tilde() const noexcept { return Qt_; }
  const Vec& c() const noexcept { return c_; }
  const Vec& v() const noexcept { return v_; }
  const Mat& Psi() const noexcept { return Psi_; }
  const Vec& gamma_sqrt() const noexcept { return gamma_sqrt_; }

 private:
  const GridOperator* g_;
  double eps_;
  Vec sw_, isw_, v_, sqrt_m_, c_, gamma_sqrt_;
  SpCol E_, Td_, Lt_, Qt_, Y_, Phi_s_;
  Mat C_, Cinv_, Psi_;
  double s_norm_ = 0.0;
};

inline DMSOperators build_dms(const GridOperator& g, double epsilon) { return DMSOperators(g, epsilon); }

namespace detail {

/// Exact (H̃ − sI + vvᵀ)⁻¹ by the push-through identity
/// (D + ŨM̃Ũᵀ)⁻¹ = D⁻¹ − D⁻¹Ũ(I + M̃ŨᵀD⁻¹Ũ)⁻¹M̃ŨᵀD⁻¹ with D = −Q̃ + Π̃ − sI.
class ShiftedInverse {
 public:
  ShiftedInverse(const DMSOperators& d, double shift, bool with_s) : d_(&d) {
    const auto& g = d.grid();
    const int N = g.size();
    const int nx = g.nx;
    const int nv = g.nv;
    nv_ = nv;
    nx_ = nx;

    // Slice block of D; Q̃ blocks are identical on every slice.
    const Vec& e = d.gamma_sqrt();
    Mat qt(nv, nv);
    for (int j = 0; j < nv; ++j)
      for (int k = 0; k < nv; ++k) qt(j, k) = e[j] * g.q_block(j, k) / e[k];
    Mat blk = -qt + e * e.transpose() - shift * Mat::Identity(nv, nv);
    Eigen::PartialPivLU<Mat> blu(blk);
    dinv_ = blu.inverse();

    // Ũ = [U_s, F], U_s = [Φ_s, L̃ᵀΦ_s], F = [v, L̃ᵀv]; M̃ collects every low-rank term.
    const int r4 = with_s ? 4 * nx : nx;
    const int r = r4 + 2;
    SpCol Us;
    if (with_s) {
      const SpCol LtPhi = d.L_tilde().transpose() * d.Phi_s();
      Us.resize(N, 4 * nx);
      std::vector<Eigen::Triplet<double>> ut;
      for (int k = 0; k < d.Phi_s().outerSize(); ++k)
        for (SpCol::InnerIterator it(d.Phi_s(), k); it; ++it) ut.emplace_back(it.row(), k, it.value());
      for (int k = 0; k < LtPhi.outerSize(); ++k)
        for (SpCol::InnerIterator it(LtPhi, k); it; ++it) ut.emplace_back(it.row(), 2 * nx + k, it.value());
      Us.setFromTriplets(ut.begin(), ut.end());
    } else {
      Us = d.E();
    }
    F_.resize(N, 2);
    F_.col(0) = d.v();
    F_.col(1) = d.L_tilde().transpose() * d.v();

    Mt_ = Mat::Zero(r, r);
    if (with_s) {
      // U = Ũ P with P = [I; −Gᵀ], G = blockdiag(c, c).
      Mat P = Mat::Zero(r, r4);
      P.topRows(r4).setIdentity();
      const Vec& c = d.c();
      P.row(r4).head(2 * nx) = -c.transpose();
      P.row(r4 + 1).segment(2 * nx, 2 * nx) = -c.transpose();
      Mat Z = Mat::Zero(r4, r4);
      Z.topRightCorner(2 * nx, 2 * nx) = d.Psi();
      Z.bottomLeftCorner(2 * nx, 2 * nx) = d.Psi();
      Mt_ = -0.5 * P * Z * P.transpose();
    }
    for (int k = 0; k < nx; ++k) Mt_(k, k) -= 1.0;
    Mt_(r4, r4) += 1.0;

    // D⁻¹ as a sparse block-diagonal matrix.
    std::vector<Eigen::Triplet<double>> dt;
    dt.reserve(static_cast<std::size_t>(nx) * nv * nv);
    for (int i = 0; i < nx; ++i)
      for (int k = 0; k < nv; ++k)
        for (int j = 0; j < nv; ++j) dt.emplace_back(i * nv + j, i * nv + k, dinv_(j, k));
    SpCol Dinv(N, N);
    Dinv.setFromTriplets(dt.begin(), dt.end());
    DinvUs_ = Dinv * Us;
    DinvF_ = Mat(N, 2);
    for (int k = 0; k < 2; ++k) DinvF_.col(k) = apply_dinv(F_.col(k));
    Us_ = std::move(Us);

    Mat UtDU(r, r);
    UtDU.topLeftCorner(r4, r4) = Mat(SpCol(Us_.transpose() * DinvUs_));
    UtDU.topRightCorner(r4, 2) = Us_.transpose() * DinvF_;
    UtDU.bottomLeftCorner(2, r4) = (DinvUs_.transpose() * F_).transpose();
    UtDU.bottomRightCorner(2, 2) = F_.transpose() * DinvF_;
    cap_.compute(Mat::Identity(r, r) + Mt_ * UtDU);
    r4_ = r4;
  }

  Vec solve(const Vec& b) const {
    const Vec z = apply_dinv(b);
    Vec t(r4_ + 2);
    t.head(r4_) = Us_.transpose() * z;
    t.tail(2) = F_.transpose() * z;
    const Vec s = cap_.solve(Mt_ * t);
    return z - DinvUs_ * s.head(r4_) - DinvF_ * s.tail(2);
  }

 private:
  Vec apply_dinv(const Vec& b) const {
    Vec out(b.size());
    for (int i = 0; i < nx_; ++i) out.segment(i * nv_, nv_).noalias() = dinv_ * b.segment(i * nv_, nv_);
    return out;
  }

  const DMSOperators* d_;
  int nx_ = 0, nv_ = 0, r4_ = 0;
  Mat dinv_;
  SpCol Us_, DinvUs_;
  Mat F_, DinvF_, Mt_;
  Eigen::PartialPivLU<Mat> cap_;
};

inline void deflate(Vec& y, const Vec& v) { y -= v * v.dot(y); }

}  // namespace detail

struct RhoOptions {
  /// Replace S by 0 (negative control).
  bool negative_control = false;
  double residual_tolerance = 1e-10;
  int max_lanczos = 300;
  std::uint64_t seed = 1;
};

struct RhoEstimate {
  double rho = 0.0;
  double epsilon = 0.0;
  /// Same value as rho; kept separately so a failed run still reports it.
  double certificate = 0.0;
  bool positive = false;
  bool negative_control = false;
  /// Minimizing f (w-normalized, w-mean zero) in original coordinates.
  Vec eigenvector;
  double residual = 0.0;
  int iterations = 0;
};

/// Smallest eigenvalue of −½[(L+SL) + (L+SL)*] on the w-mean-zero subspace by
/// shift-invert Lanczos with full reorthogonalization and deflation of √w.
inline RhoEstimate estimate_rho(const DMSOperators& d, const RhoOptions& opt = {}) {
  const auto& g = d.grid();
  const int N = g.size();
  const bool with_s = !opt.negative_control;
  const Vec& v = d.v();
  // Shift 0 isolates the bottom of the spectrum; without S the bottom is
  // degenerate (all slice-constant functions), so shift by −1 instead.
  const double shift = with_s ? 0.0 : -1.0;
  const detail::ShiftedInverse op(d, shift, with_s);

  std::mt19937_64 gen(opt.seed);
  std::normal_distribution<double> nd;
  Vec q(N);
  for (int k = 0; k < N; ++k) q[k] = nd(gen);
  detail::deflate(q, v);
  q.normalize();

  const int m_max = std::min(opt.max_lanczos, N - 2);
  Mat Qb(N, m_max + 1);
  Qb.col(0) = q;
  std::vector<double> alpha, beta;
  Vec best;
  double theta = 0.0;
  int iters = 0;
  for (int k = 0; k < m_max; ++k) {
    Vec z = op.solve(Qb.col(k));
    detail::deflate(z, v);
    const double a = Qb.col(k).dot(z);
    for (int pass = 0; pass < 2; ++pass) {
      z -= Qb.leftCols(k + 1) * (Qb.leftCols(k + 1).transpose() * z);
      detail::deflate(z, v);
    }
    const double b = z.norm();
    alpha.push_back(a);
    beta.push_back(b);
    iters = k + 1;
    Mat Tk = Mat::Zero(k + 1, k + 1);
    for (int i = 0; i <= k; ++i) {
      Tk(i, i) = alpha[i];
      if (i < k) Tk(i, i + 1) = Tk(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Mat> te(Tk);
    const Vec s = te.eigenvectors().col(k);
    theta = te.eigenvalues()[k];
    const double resid = std::abs(b * s[k]);
    if (resid <= 1e-14 * std::abs(theta) || b < 1e-300 || k + 1 == m_max) {
      best = Qb.leftCols(k + 1) * s;
      break;
    }
    Qb.col(k + 1) = z / b;
  }
  detail::deflate(best, v);
  best.normalize();

  const auto rayleigh = [&](const Vec& y, double& lam) {
    const Vec hy = d.H_tilde(y, with_s);
    lam = y.dot(hy);
    return (hy - lam * y).norm();
  };
  double lam = 0.0;
  double res = rayleigh(best, lam);
  for (int polish = 0; polish < 4 && res > opt.residual_tolerance; ++polish) {
    const detail::ShiftedInverse inv(d, lam, with_s);
    for (int it = 0; it < 2; ++it) {
      best = inv.solve(best);
      detail::deflate(best, v);
      best.normalize();
    }
    res = rayleigh(best, lam);
  }

  RhoEstimate r;
  r.rho = lam;
  r.certificate = lam;
  r.epsilon = d.epsilon();
  r.negative_control = opt.negative_control;
  r.positive = lam > 0.0;
  r.residual = res;
  r.iterations = iters;
  r.eigenvector = d.from_tilde(best);
  (void)theta;
  return r;
}

struct EpsilonScan {
  /// ‖S‖ at ε = 1; ‖S(ε)‖ = ε·s_norm_unit exactly.
  double s_norm_unit = 0.0;
  double largest_passing = 0.0;
  std::vector<std::pair<double, double>> norms;  // (ε, ‖S‖)
};

/// Largest ε in {0.1, …, 0.9} with ‖S‖ ≤ 1/2.
inline EpsilonScan scan_epsilon(const GridOperator& g) {
  EpsilonScan scan;
  for (int k = 1; k <= 9; ++k) {
    const double eps = 0.1 * k;
    const DMSOperators d(g, eps);
    scan.norms.emplace_back(eps, d.s_norm());
    if (d.s_norm() <= 0.5 + 1e-10) scan.largest_passing = eps;
    if (k == 5) scan.s_norm_unit = d.s_norm() / eps;
  }
  return scan;
}

struct DecayWitness {
  double t = 0.0;
  std::size_t index = 0;
  double ratio = 0.0;
};

struct DecayReport {
  double rho = 0.0;
  std::vector<double> times;
  /// max over f of ‖e^{tL}f‖_w / (√3 e^{−2ρt/3}‖f‖_w), per time.
  std::vector<double> envelope_ratio;
  /// max over f of ‖e^{tL}f‖_B / (e^{−2ρt/3}‖f‖_B), per time.
  std::vector<double> b_norm_ratio;
  /// max over f of 2⟨f_t,(L+SL)f_t⟩ / (−2ρ‖f_t‖²), must be ≥ 1 (reported as the minimum).
  std::vector<double> dissipation_ratio;
  bool pass = true;
  std::vector<DecayWitness> violations;
};

inline DecayReport decay_check_vectors(const DMSOperators& d, double rho, const std::vector<double>& times,
                                       const Mat& F, double rel_tol = 1e-8) {
  const auto& g = d.grid();
  DecayReport rep;
  rep.rho = rho;
  rep.times = times;
  const int n = static_cast<int>(F.cols());
  Vec norm0(n), bnorm0(n);
  for (int k = 0; k < n; ++k) {
    const Vec f = F.col(k);
    if (std::abs(g.mean(f)) > 1e-12 * std::max(1.0, g.norm(f)))
      throw UsageError("decay_check: test vectors must have w-mean zero");
    norm0[k] = g.norm(f);
    bnorm0[k] = std::sqrt(d.b_norm_sq(f));
  }
  Mat X = F;
  double t_prev = 0.0;
  for (double t : times) {
    X = expmv(g.L, t - t_prev, X);
    t_prev = t;
    const double env = std::sqrt(3.0) * std::exp(-2.0 * rho * t / 3.0);
    const double benv = std::exp(-2.0 * rho * t / 3.0);
    double worst = 0.0, bworst = 0.0, diss = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      const Vec ft = X.col(k);
      const double ratio = g.norm(ft) / (env * norm0[k]);
      const double bratio = std::sqrt(d.b_norm_sq(ft)) / (benv * bnorm0[k]);
      const Vec lf = g.L * ft;
      const double form = 2.0 * g.inner(ft, lf + d.apply_S(lf));
      const double dr = form / (-2.0 * rho * g.inner(ft, ft));
      worst = std::max(worst, ratio);
      bworst = std::max(bworst, bratio);
      diss = std::min(diss, dr);
      if (ratio > 1.0 + rel_tol || bratio > 1.0 + rel_tol || dr < 1.0 - rel_tol) {
        rep.pass = false;
        rep.violations.push_back({t, static_cast<std::size_t>(k), std::max(ratio, bratio)});
      }
    }
    rep.envelope_ratio.push_back(worst);
    rep.b_norm_ratio.push_back(bworst);
    rep.dissipation_ratio.push_back(diss);
  }
  return rep;
}

/// Checks ‖e^{tL}f‖ ≤ √3e^{−2ρt/3}‖f‖ and the B-norm dissipation for random mean-zero f.
inline DecayReport decay_check(const DMSOperators& d, double rho, std::vector<double> times, int n_random,
                               std::uint64_t seed, double rel_tol = 1e-8) {
  const auto& g = d.grid();
  const int N = g.size();
  std::sort(times.begin(), times.end());
  if (!times.empty() && times.front() < 0.0) throw UsageError("decay_check: times must be nonnegative");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Mat F(N, n_random);
  for (int k = 0; k < n_random; ++k) {
    Vec f(N);
    for (int a = 0; a < N; ++a) f[a] = nd(gen);
    F.col(k) = g.center(f);
  }
  return decay_check_vectors(d, rho, times, F, rel_tol);
}

struct PoincareConstants {
  /// Smallest nonzero eigenvalue of −Q on one slice (microscopic coercivity).
  double gap_u = 0.0;
  /// Smallest nonzero eigenvalue of f ↦ V′f′ − f″ in L²(e^{−V}) (macroscopic).
  double C_P = 0.0;
  /// min over mean-zero Π-range unit f of ‖TΠf‖²_w.
  double macroscopic_min = 0.0;
  /// Second moment of the velocity/angle factor of T: E cos²u = ½ on 𝕋, E v² = 1.
  double velocity_moment = 0.0;
  /// max over the ten smoothest modes φ of ‖(ỸᵀỸ − mK)φ‖/‖mKφ‖, m the moment above
  /// and K the discrete V′∂ₓ − ∂ₓ².
  double identity_defect = 0.0;
};

/// For the ℝ×𝕋 grid the position potential is V; for Langevin it is U (given).
inline PoincareConstants poincare_constants(const DMSOperators& d, const std::function<double(double)>& potential) {
  const auto& g = d.grid();
  const int nx = g.nx;
  const int nv = g.nv;
  PoincareConstants pc;

  const Vec& e = d.gamma_sqrt();
  Mat qt(nv, nv);
  for (int j = 0; j < nv; ++j)
    for (int k = 0; k < nv; ++k) qt(j, k) = e[j] * g.q_block(j, k) / e[k];
  qt = 0.5 * (qt + qt.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> qe(-qt, Eigen::EigenvaluesOnly);
  pc.gap_u = qe.eigenvalues()[1];

  // Weighted Sturm–Liouville operator, symmetrized with the slice masses.
  double pmin = potential(g.xc[0]);
  for (double x : g.xc) pmin = std::min(pmin, potential(x));
  Vec m(nx);
  for (int i = 0; i < nx; ++i) m[i] = std::exp(-(potential(g.xc[i]) - pmin)) * g.dx;
  Mat K = Mat::Zero(nx, nx);
  for (int i = 0; i + 1 < nx; ++i) {
    const double xf = g.xc[i] + 0.5 * g.dx;
    const double cond = std::exp(-(potential(xf) - pmin)) / g.dx;
    const double s = cond / std::sqrt(m[i] * m[i + 1]);
    K(i, i) += cond / m[i];
    K(i + 1, i + 1) += cond / m[i + 1];
    K(i, i + 1) -= s;
    K(i + 1, i) -= s;
  }
  Eigen::SelfAdjointEigenSolver<Mat> ke(K);
  pc.C_P = ke.eigenvalues()[1];

  // ỸᵀỸ on the complement of √m.
  const Mat YtY = d.macroscopic_matrix();
  const Vec sm = g.slice_mass.cwiseSqrt();
  const Mat P0 = Mat::Identity(nx, nx) - sm * sm.transpose() / sm.squaredNorm();
  Eigen::SelfAdjointEigenSolver<Mat> ye(P0 * YtY * P0, Eigen::EigenvaluesOnly);
  pc.macroscopic_min = ye.eigenvalues()[1];

  // Both matrices act on the orthonormal slice basis 1_i/√m_i; compare them on
  // the smooth end of the spectrum (first ten nonconstant Sturm–Liouville modes).
  pc.velocity_moment = g.kind == GridKind::RTorus ? 0.5 : 1.0;
  const double m2 = pc.velocity_moment;
  const Mat diff = YtY - m2 * K;
  double defect = 0.0;
  for (int k = 1; k <= std::min(10, nx - 1); ++k) {
    const Vec phi = ke.eigenvectors().col(k);
    defect = std::max(defect, (diff * phi).norm() / (m2 * ke.eigenvalues()[k]));
  }
  pc.identity_defect = defect;
  return pc;
}

struct ContractReport {
  double conservation = 0.0;      // ‖L1‖∞
  double invariance = 0.0;        // ‖wᵀL‖∞
  double tpit = 0.0;              // max ‖TΠTf‖_w/‖f‖_w over probes
  double pitpi = 0.0;             // max ‖ΠTΠf‖_w/‖f‖_w over probes
  double s_symmetry = 0.0;        // max |⟨f,Sg⟩ − ⟨Sf,g⟩| / (‖f‖‖g‖)
  double s_norm = 0.0;            // ‖S‖ on the mean-zero subspace
  double b_lower = 0.0;           // min ‖f‖²_B/‖f‖² over probes
  double b_upper = 0.0;           // max ‖f‖²_B/‖f‖² over probes
  double projection_idempotence = 0.0;
  double t_antisymmetry = 0.0;
};

/// Direct matrix assertions on random probes.
inline ContractReport check_contracts(const DMSOperators& d, int n_probes, std::uint64_t seed) {
  const auto& g = d.grid();
  const int N = g.size();
  ContractReport rep;
  rep.conservation = g.conservation_defect;
  rep.invariance = g.invariance_defect;
  rep.s_norm = d.s_norm();
  rep.b_lower = std::numeric_limits<double>::infinity();
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  const auto random_vec = [&] {
    Vec f(N);
    for (int a = 0; a < N; ++a) f[a] = nd(gen);
    return f;
  };
  for (int p = 0; p < n_probes; ++p) {
    const Vec f = random_vec();
    const Vec h = random_vec();
    const double nf = g.norm(f);
    const Vec tpit = g.T * g.project(g.T * f);
    const Vec pitpi = g.project(g.T * g.project(f));
    rep.tpit = std::max(rep.tpit, g.norm(tpit) / nf);
    rep.pitpi = std::max(rep.pitpi, g.norm(pitpi) / nf);
    const double sym = std::abs(g.inner(f, d.apply_S(h)) - g.inner(d.apply_S(f), h)) / (nf * g.norm(h));
    rep.s_symmetry = std::max(rep.s_symmetry, sym);
    const Vec pf = g.project(f);
    rep.projection_idempotence = std::max(rep.projection_idempotence, g.norm(g.project(pf) - pf) / nf);
    const double anti = std::abs(g.inner(f, g.T * h) + g.inner(g.T * f, h)) / (nf * g.norm(h));
    rep.t_antisymmetry = std::max(rep.t_antisymmetry, anti);
    const double q = d.b_norm_sq(f) / (nf * nf);
    rep.b_lower = std::min(rep.b_lower, q);
    rep.b_upper = std::max(rep.b_upper, q);
  }
  return rep;
}

}  // namespace hypoco

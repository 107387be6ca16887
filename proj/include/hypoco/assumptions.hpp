#pragma once

// Grid checks of the structural hypotheses: the uniform Hörmander bound for
// the ℝ×𝕋 fields and the three growth conditions on a Langevin potential.
// Results hold on the scanned grid only.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hypoco/errors.hpp"
#include "hypoco/parallel.hpp"
#include "hypoco/potential.hpp"

namespace hypoco {

/// A first-order field on ℝ×𝕋 as its coefficient pair (ξ_x, ξ_u).
using PlaneField = std::function<std::array<double, 2>(double, double)>;

struct WeightedField {
  std::string name;
  double weight = 1.0;
  PlaneField field;
};

/// Y₀ = cos u ∂ₓ + V′ sin u ∂_u, Y₁ = ∂_u and the brackets
/// Z₂ = [Y₁, Y₀] = −sin u ∂ₓ + V′ cos u ∂_u, Z₃ = [Y₁, Z₂] = −cos u ∂ₓ − V′ sin u ∂_u.
struct FieldFamily {
  static std::array<double, 2> Y0(double x, double u) { return {std::cos(u), vprime(x) * std::sin(u)}; }
  static std::array<double, 2> Y1(double, double) { return {0.0, 1.0}; }
  static std::array<double, 2> Z2(double x, double u) { return {-std::sin(u), vprime(x) * std::cos(u)}; }
  static std::array<double, 2> Z3(double x, double u) { return {-std::cos(u), -vprime(x) * std::sin(u)}; }

  static double a1() { return kVPrimeSup * kVPrimeSup + 0.5; }

  /// Z₁ = Y₁, Z₂, Z₃ with weights (a₁, 1, 1); `a1` overrides the first weight.
  static std::vector<WeightedField> weighted(double a1_value = a1()) {
    return {{"Z1", a1_value, Y1}, {"Z2", 1.0, Z2}, {"Z3", 1.0, Z3}};
  }
};

/// [X, Y] = (X·∇)Y − (Y·∇)X by central differences with step h.
inline std::array<double, 2> lie_bracket_fd(const PlaneField& X, const PlaneField& Y, double x, double u,
                                            double h = 1e-5) {
  const auto dx_Y = [&](int c) { return (Y(x + h, u)[c] - Y(x - h, u)[c]) / (2 * h); };
  const auto du_Y = [&](int c) { return (Y(x, u + h)[c] - Y(x, u - h)[c]) / (2 * h); };
  const auto dx_X = [&](int c) { return (X(x + h, u)[c] - X(x - h, u)[c]) / (2 * h); };
  const auto du_X = [&](int c) { return (X(x, u + h)[c] - X(x, u - h)[c]) / (2 * h); };
  const auto xv = X(x, u);
  const auto yv = Y(x, u);
  std::array<double, 2> out{};
  for (int c = 0; c < 2; ++c) out[c] = xv[0] * dx_Y(c) + xv[1] * du_Y(c) - (yv[0] * dx_X(c) + yv[1] * du_X(c));
  return out;
}

/// max over the grid of |closed form − finite-difference bracket| for Z₂ and Z₃.
inline double bracket_consistency(double X, int nx, int nu) {
  double worst = 0.0;
  const PlaneField y0 = FieldFamily::Y0, y1 = FieldFamily::Y1, z2 = FieldFamily::Z2;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nu; ++j) {
      const double x = -X + 2.0 * X * i / (nx - 1);
      const double u = 2.0 * std::numbers::pi * j / nu;
      const auto b2 = lie_bracket_fd(y1, y0, x, u);
      const auto b3 = lie_bracket_fd(y1, z2, x, u);
      const auto c2 = FieldFamily::Z2(x, u);
      const auto c3 = FieldFamily::Z3(x, u);
      for (int c = 0; c < 2; ++c) worst = std::max({worst, std::abs(b2[c] - c2[c]), std::abs(b3[c] - c3[c])});
    }
  return worst;
}

struct HormanderReport {
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  double argmin_x = 0.0;
  double argmin_u = 0.0;
  double alpha_target = 0.5;
  bool pass = false;
  int nx = 0, nu = 0;
  double X = 0.0;
};

/// Smallest eigenvalue of Σ a_j Z_j Z_jᵀ over [−X, X] × 𝕋 (nx points in x
/// including both ends, nu points in u).
inline HormanderReport hormander_check(const std::vector<WeightedField>& fields, double X, int nx, int nu,
                                       double alpha_target, unsigned workers = 1) {
  if (nx < 2 || nu < 1) throw UsageError("hormander_check: grid must be nonempty");
  std::vector<double> row_min(nx);
  std::vector<double> row_arg(nx);
  parallel_for(static_cast<std::size_t>(nx), workers, [&](std::size_t i) {
    const double x = -X + 2.0 * X * static_cast<double>(i) / (nx - 1);
    double best = std::numeric_limits<double>::infinity();
    double arg = 0.0;
    for (int j = 0; j < nu; ++j) {
      const double u = 2.0 * std::numbers::pi * j / nu;
      double a = 0.0, b = 0.0, c = 0.0;
      for (const auto& f : fields) {
        const auto z = f.field(x, u);
        a += f.weight * z[0] * z[0];
        b += f.weight * z[0] * z[1];
        c += f.weight * z[1] * z[1];
      }
      const double lam = 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
      if (lam < best) {
        best = lam;
        arg = u;
      }
    }
    row_min[i] = best;
    row_arg[i] = arg;
  });
  HormanderReport rep;
  rep.alpha_target = alpha_target;
  rep.nx = nx;
  rep.nu = nu;
  rep.X = X;
  for (int i = 0; i < nx; ++i)
    if (row_min[i] < rep.min_eigenvalue) {
      rep.min_eigenvalue = row_min[i];
      rep.argmin_x = -X + 2.0 * X * i / (nx - 1);
      rep.argmin_u = row_arg[i];
    }
  rep.pass = rep.min_eigenvalue >= alpha_target - 1e-6;
  return rep;
}

/// Potential U on ℝ^d with the derivatives the three conditions need.
struct PotentialEvaluator {
  int dim = 1;
  std::function<double(std::span<const double>)> grad_norm_sq;
  std::function<double(std::span<const double>)> laplacian;
  std::function<double(std::span<const double>)> hessian_norm;

  static PotentialEvaluator from(const SeparablePotential& U) {
    PotentialEvaluator p;
    p.dim = U.dim();
    p.grad_norm_sq = [U](std::span<const double> x) {
      double s = 0.0;
      for (double xi : x) {
        const double g = U.profile().derivative(xi, 1);
        s += g * g;
      }
      return s;
    };
    p.laplacian = [U](std::span<const double> x) { return U.laplacian(x); };
    p.hessian_norm = [U](std::span<const double> x) { return U.hessian_norm(x); };
    return p;
  }
};

struct LangevinConditionsReport {
  int dim = 1;
  double box = 0.0;
  int points_per_axis = 0;
  double ball_radius = 0.0;
  /// (i): min of |∇U|² − 2ΔU outside the ball, and where.
  double cond1_min = 0.0;
  std::vector<double> cond1_argmin;
  bool cond1 = false;
  /// (ii): smallest c₂ ∈ {0, 0.01, …, 0.99} whose c₁ = max(ΔU − c₂|∇U|²/2) is
  /// unchanged when the box is halved; c₁ at that c₂.
  bool cond2 = false;
  double c1 = 0.0;
  double c2 = 0.0;
  /// (iii): max |∇²U|/(1 + |∇U|).
  double c3 = 0.0;
  bool cond3 = false;
  bool pass = false;
};

namespace detail {

template <class Visit>
void scan_box(int dim, double box, int n, Visit&& visit) {
  std::vector<int> idx(dim, 0);
  std::vector<double> x(dim);
  for (;;) {
    for (int k = 0; k < dim; ++k) x[k] = -box + 2.0 * box * idx[k] / (n - 1);
    visit(std::span<const double>(x));
    int k = 0;
    while (k < dim && ++idx[k] == n) idx[k++] = 0;
    if (k == dim) break;
  }
}

}  // namespace detail

/// Scans [−box, box]^d with an odd number of points per axis (the origin is a node).
inline LangevinConditionsReport langevin_conditions(const PotentialEvaluator& U, double box, int points_per_axis,
                                                    double ball_radius) {
  if (points_per_axis < 3) throw UsageError("langevin_conditions: need at least 3 points per axis");
  if (points_per_axis % 2 == 0) ++points_per_axis;
  LangevinConditionsReport rep;
  rep.dim = U.dim;
  rep.box = box;
  rep.points_per_axis = points_per_axis;
  rep.ball_radius = ball_radius;
  rep.cond1_min = std::numeric_limits<double>::infinity();

  constexpr int kC2Steps = 100;
  std::vector<double> c1_full(kC2Steps, -std::numeric_limits<double>::infinity());
  std::vector<double> c1_half(kC2Steps, -std::numeric_limits<double>::infinity());
  const auto visit = [&](std::span<const double> x) {
    const double g2 = U.grad_norm_sq(x);
    const double lap = U.laplacian(x);
    const double hess = U.hessian_norm(x);
    if (!std::isfinite(g2) || !std::isfinite(lap) || !std::isfinite(hess))
      throw UsageError("langevin_conditions: potential evaluator returned a non-finite value");
    double r2 = 0.0, sup = 0.0;
    for (double xi : x) {
      r2 += xi * xi;
      sup = std::max(sup, std::abs(xi));
    }
    if (std::sqrt(r2) > ball_radius) {
      const double c = g2 - 2.0 * lap;
      if (c < rep.cond1_min) {
        rep.cond1_min = c;
        rep.cond1_argmin.assign(x.begin(), x.end());
      }
    }
    for (int k = 0; k < kC2Steps; ++k) {
      const double c2 = 0.01 * k;
      const double val = lap - 0.5 * c2 * g2;
      c1_full[k] = std::max(c1_full[k], val);
      if (sup <= 0.5 * box + 1e-12) c1_half[k] = std::max(c1_half[k], val);
    }
    rep.c3 = std::max(rep.c3, hess / (1.0 + std::sqrt(g2)));
  };
  detail::scan_box(U.dim, box, points_per_axis, visit);

  rep.cond1 = rep.cond1_min > 0.0;
  for (int k = 0; k < kC2Steps; ++k) {
    const double scale = std::max(1.0, std::abs(c1_full[k]));
    if (std::abs(c1_full[k] - c1_half[k]) <= 1e-9 * scale) {
      rep.cond2 = true;
      rep.c2 = 0.01 * k;
      rep.c1 = c1_full[k];
      break;
    }
  }
  rep.cond3 = std::isfinite(rep.c3);
  rep.pass = rep.cond1 && rep.cond2 && rep.cond3;
  return rep;
}

}  // namespace hypoco

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hypoco/errors.hpp"

namespace hypoco {

/// V(x) = x²/√(1+x²), the confining potential of the ℝ×𝕋 example.
inline double rtorus_potential(double x) noexcept { return x * x / std::sqrt(1.0 + x * x); }

/// V′(x) = x(x²+2)/(1+x²)^{3/2}.
inline double vprime(double x) noexcept {
  const double s = 1.0 + x * x;
  return x * (x * x + 2.0) / (s * std::sqrt(s));
}

/// V″(x) = (2 − x²)/(1+x²)^{5/2}.
inline double vsecond(double x) noexcept {
  const double s = 1.0 + x * x;
  return (2.0 - x * x) / (s * s * std::sqrt(s));
}

// V″ vanishes at x = √2, where V′ = 4√2/(3√3) = 4√6/9.
inline constexpr double kVPrimeArgmax = std::numbers::sqrt2;
inline constexpr double kVPrimeSup = 4.0 * std::numbers::sqrt2 * std::numbers::sqrt3 / 9.0;

/// Real polynomial c₀ + c₁x + … with derivatives.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }

  const std::vector<double>& coefficients() const noexcept { return c_; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }

  double operator()(double x) const noexcept { return derivative(x, 0); }

  double derivative(double x, int order) const noexcept {
    double acc = 0.0;
    for (int k = degree(); k >= order; --k) {
      double factor = 1.0;
      for (int m = 0; m < order; ++m) factor *= static_cast<double>(k - m);
      acc = acc * x + factor * c_[static_cast<std::size_t>(k)];
    }
    return acc;
  }

  /// e^{−P} is integrable iff the leading term is an even power with positive coefficient.
  bool confining() const noexcept { return degree() >= 2 && degree() % 2 == 0 && c_.back() > 0.0; }

  std::string to_string() const;

 private:
  std::vector<double> c_;
};

inline std::string Polynomial::to_string() const {
  if (c_.empty()) return "0";
  std::string s;
  for (std::size_t k = 0; k < c_.size(); ++k) {
    if (c_[k] == 0.0) continue;
    if (!s.empty()) s += " + ";
    s += std::to_string(c_[k]);
    if (k >= 1) s += "*x";
    if (k >= 2) s += "^" + std::to_string(k);
  }
  return s.empty() ? "0" : s;
}

/// U(x) = Σᵢ P(xᵢ) on ℝᵈ.
class SeparablePotential {
 public:
  SeparablePotential() = default;
  SeparablePotential(int dim, Polynomial profile) : dim_(dim), profile_(std::move(profile)) {
    if (dim_ < 1) throw UsageError("SeparablePotential: dimension must be positive");
  }

  int dim() const noexcept { return dim_; }
  const Polynomial& profile() const noexcept { return profile_; }

  double value(std::span<const double> x) const noexcept {
    double s = 0.0;
    for (double xi : x) s += profile_(xi);
    return s;
  }
  void gradient(std::span<const double> x, std::span<double> out) const noexcept {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = profile_.derivative(x[i], 1);
  }
  double laplacian(std::span<const double> x) const noexcept {
    double s = 0.0;
    for (double xi : x) s += profile_.derivative(xi, 2);
    return s;
  }
  /// Operator norm of the (diagonal) Hessian.
  double hessian_norm(std::span<const double> x) const noexcept {
    double m = 0.0;
    for (double xi : x) m = std::max(m, std::abs(profile_.derivative(xi, 2)));
    return m;
  }

 private:
  int dim_ = 1;
  Polynomial profile_{std::vector<double>{0.0, 0.0, 0.5}};
};

}  // namespace hypoco

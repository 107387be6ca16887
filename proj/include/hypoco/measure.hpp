#pragma once

// One-dimensional Gibbs marginals ∝ e^{−φ(x)} on a computed truncation
// [−R, R]: normalization by adaptive quadrature, CDF table, exact inversion.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hypoco/errors.hpp"

namespace hypoco {

class Marginal1D {
 public:
  static constexpr double kDefaultTailTolerance = 1e-8;

  /// `radius`, when given, is validated against `tail_tolerance` instead of searched for.
  explicit Marginal1D(std::function<double(double)> potential,
                      double tail_tolerance = kDefaultTailTolerance,
                      std::optional<double> radius = std::nullopt)
      : phi_(std::move(potential)) {
    shift_ = std::numeric_limits<double>::infinity();
    for (int k = -2000; k <= 2000; ++k) shift_ = std::min(shift_, phi_(0.025 * k));
    if (!std::isfinite(shift_)) throw ConfigurationError("Marginal1D: potential is not finite near the origin");

    const auto unnormalized = [this](double x) { return std::exp(-(phi_(x) - shift_)); };
    total_ = interval_integral(-1.0, 1.0) + right_tail(1.0) + left_tail(1.0);
    if (!(total_ > 0.0) || !std::isfinite(total_))
      throw ConfigurationError("Marginal1D: e^{-phi} is not integrable");

    if (radius) {
      radius_ = *radius;
      tail_ = (right_tail(radius_) + left_tail(radius_)) / total_;
      if (!(tail_ < tail_tolerance))
        throw ConfigurationError("Marginal1D: truncation radius " + std::to_string(radius_) +
                                 " leaves tail mass " + std::to_string(tail_) + " above tolerance");
    } else {
      radius_ = 0.5;
      for (;;) {
        tail_ = (right_tail(radius_) + left_tail(radius_)) / total_;
        if (tail_ < tail_tolerance) break;
        radius_ += 0.5;
        if (radius_ > 1e4) throw ConfigurationError("Marginal1D: no truncation radius found below 1e4");
      }
    }

    double err = 0.0;
    normalization_ = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        unnormalized, -radius_, radius_, 20, 1e-14, &err);
    quadrature_error_ = err / normalization_;
    if (quadrature_error_ > 1e-10)
      throw ConfigurationError("Marginal1D: normalization quadrature error above 1e-10");

    nodes_.resize(kTableCells + 1);
    cdf_.resize(kTableCells + 1);
    const double h = 2.0 * radius_ / kTableCells;
    cdf_[0] = 0.0;
    for (std::size_t k = 0; k <= kTableCells; ++k) nodes_[k] = -radius_ + h * static_cast<double>(k);
    for (std::size_t k = 0; k < kTableCells; ++k)
      cdf_[k + 1] = cdf_[k] + cell_integral(nodes_[k], nodes_[k + 1]);
    // Table and adaptive quadrature agree to ~1e-15; rescale so the CDF ends at exactly 1.
    table_sum_ = cdf_.back();
    for (double& c : cdf_) c /= table_sum_;
  }

  double radius() const noexcept { return radius_; }
  double tail_mass() const noexcept { return tail_; }
  double quadrature_error() const noexcept { return quadrature_error_; }

  /// ∫_{−R}^{R} e^{−φ}.
  double normalization() const noexcept { return normalization_ * std::exp(-shift_); }

  double potential(double x) const { return phi_(x); }

  /// Normalized density on [−R, R] (zero outside).
  double density(double x) const {
    if (std::abs(x) > radius_) return 0.0;
    return std::exp(-(phi_(x) - shift_)) / normalization_;
  }

  double cdf(double x) const {
    if (x <= -radius_) return 0.0;
    if (x >= radius_) return 1.0;
    const std::size_t k = cell_of(x);
    return cdf_[k] + cell_integral(nodes_[k], x) / cdf_scale();
  }

  /// Inverse CDF: table bracket then safeguarded Newton on the exact local integral.
  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw UsageError("Marginal1D::quantile: p must lie in (0,1)");
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), p);
    const std::size_t k = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        (it - cdf_.begin()) - 1, 0, static_cast<std::ptrdiff_t>(kTableCells) - 1));
    double lo = nodes_[k];
    double hi = nodes_[k + 1];
    const double target = (p - cdf_[k]) * cdf_scale();
    double x = lo + (hi - lo) * std::clamp(target / std::max(cell_integral(lo, hi), 1e-300), 0.0, 1.0);
    for (int iter = 0; iter < 60; ++iter) {
      const double g = cell_integral(nodes_[k], x) - target;
      if (g > 0)
        hi = x;
      else
        lo = x;
      const double dens = std::exp(-(phi_(x) - shift_));
      double next = dens > 0 ? x - g / dens : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x))) return next;
      x = next;
    }
    return x;
  }

  /// μ([a, b]) for the truncated, normalized marginal.
  double mass(double a, double b) const {
    a = std::max(a, -radius_);
    b = std::min(b, radius_);
    if (!(b > a)) return 0.0;
    return integrate([](double) { return 1.0; }, a, b);
  }

  /// ∫_a^b g e^{−φ}/Z over the truncated domain, adaptive Gauss–Kronrod at 1e−12.
  template <class G>
  double integrate(G&& g, double a, double b) const {
    const auto f = [&](double x) { return g(x) * std::exp(-(phi_(x) - shift_)); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-12) /
           normalization_;
  }

  template <class G>
  double expectation(G&& g) const {
    return integrate(std::forward<G>(g), -radius_, radius_);
  }

 private:
  static constexpr std::size_t kTableCells = 4096;

  double cdf_scale() const noexcept { return table_sum_; }

  std::size_t cell_of(double x) const noexcept {
    const double h = 2.0 * radius_ / kTableCells;
    const auto k = static_cast<std::ptrdiff_t>((x + radius_) / h);
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, kTableCells - 1));
  }

  double cell_integral(double a, double b) const {
    const auto f = [this](double x) { return std::exp(-(phi_(x) - shift_)); };
    return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
  }

  double interval_integral(double a, double b) const {
    const auto f = [this](double x) { return std::exp(-(phi_(x) - shift_)); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
  }

  double right_tail(double r) const {
    const auto f = [this](double x) { return std::exp(-(phi_(x) - shift_)); };
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(f, r, std::numeric_limits<double>::infinity());
  }

  double left_tail(double r) const {
    const auto f = [this](double x) { return std::exp(-(phi_(-x) - shift_)); };
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(f, r, std::numeric_limits<double>::infinity());
  }

  std::function<double(double)> phi_;
  double shift_ = 0.0;
  double total_ = 0.0;
  double radius_ = 0.0;
  double tail_ = 0.0;
  double normalization_ = 0.0;
  double quadrature_error_ = 0.0;
  double table_sum_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> cdf_;
};

}  // namespace hypoco

#pragma once

// Closed-form constants of L² hypocoercivity: the deviation rate h(r), the
// Feynman–Kac growth bound, its Legendre transform, the hitting-time moment
// bound and the decay envelope. Every function is a template over the scalar
// so the same code runs in double, in exact rationals (where the formula is
// rational) and in multiprecision floats.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "hypoco/errors.hpp"

namespace hypoco::bounds {

/// ρ, ‖V‖₂ (in L²(μ)), ‖V‖∞ and the initial-law prefactor ‖dν/dμ‖₂ (1 for ν = μ).
template <class Real>
struct BoundInputs {
  Real rho{1};
  Real v_l2{0};
  Real v_inf{0};
  Real prefactor{1};

  void validate() const {
    if (!(rho > 0)) throw UsageError("BoundInputs: rho must be positive");
    if (v_l2 < 0 || v_inf < 0) throw UsageError("BoundInputs: norms must be nonnegative");
    if (v_l2 > v_inf) throw UsageError("BoundInputs: ||V||_2 cannot exceed ||V||_inf under a probability measure");
    if (prefactor < 0) throw UsageError("BoundInputs: prefactor must be nonnegative");
  }
};

/// Nonnegative value or +∞, never a floating-point infinity.
template <class Real>
class Extended {
 public:
  static Extended infinity() { return Extended(true, Real{0}); }
  static Extended finite(Real v) { return Extended(false, v); }

  bool is_infinite() const noexcept { return infinite_; }
  const Real& value() const {
    if (infinite_) throw DomainError("Extended::value: quantity is +infinity");
    return value_;
  }

 private:
  Extended(bool inf, Real v) : infinite_(inf), value_(v) {}
  bool infinite_;
  Real value_;
};

/// h(r) = ρr² / (25‖V‖₂² + 6‖V‖∞ r).
template <class Real>
Real h_rate(const Real& r, const BoundInputs<Real>& in) {
  in.validate();
  if (r < 0) throw UsageError("h_rate: r must be nonnegative");
  if (r == 0) return Real{0};
  const Real denom = 25 * in.v_l2 * in.v_l2 + 6 * in.v_inf * r;
  if (denom == 0) throw DomainError("h_rate: degenerate observable");
  return in.rho * r * r / denom;
}

/// Upper bound on Λ(V): 25‖V‖₂²/(4ρ − 6‖V‖∞) when 3‖V‖∞ < 2ρ, +∞ otherwise.
template <class Real>
Extended<Real> lambda_upper(const BoundInputs<Real>& in) {
  in.validate();
  if (!(3 * in.v_inf < 2 * in.rho)) return Extended<Real>::infinity();
  return Extended<Real>::finite(25 * in.v_l2 * in.v_l2 / (4 * in.rho - 6 * in.v_inf));
}

/// λ₀ = 2ρ/(3‖V‖∞), +∞ for V ≡ 0.
template <class Real>
Extended<Real> lambda0(const BoundInputs<Real>& in) {
  in.validate();
  if (in.v_inf == 0) return Extended<Real>::infinity();
  return Extended<Real>::finite(2 * in.rho / (3 * in.v_inf));
}

/// β = 25‖V‖₂²/(6‖V‖∞).
template <class Real>
Real beta(const BoundInputs<Real>& in) {
  in.validate();
  if (in.v_inf == 0) throw DomainError("beta: degenerate observable");
  return 25 * in.v_l2 * in.v_l2 / (6 * in.v_inf);
}

/// sup over λ ∈ [0, λ₀) of λr − βλ²/(λ₀ − λ), in closed form.
template <class Real>
Real legendre_rate(const Real& r, const Real& lambda_0, const Real& beta_) {
  using std::sqrt;
  if (!(lambda_0 > 0) || !(beta_ > 0)) throw UsageError("legendre_rate: lambda0 and beta must be positive");
  if (r < 0) throw UsageError("legendre_rate: r must be nonnegative");
  if (r == 0) return Real{0};
  const Real s = 1 + sqrt(1 + r / beta_);
  return lambda_0 * r * r / (beta_ * s * s);
}

/// √2 · prefactor · e^{−t h(r)}; not clamped to 1.
template <class Real>
Real deviation_bound(const Real& t, const Real& r, const BoundInputs<Real>& in) {
  using std::exp;
  using std::sqrt;
  if (!(t > 0)) throw UsageError("deviation_bound: t must be positive");
  return sqrt(Real{2}) * in.prefactor * exp(-t * h_rate(r, in));
}

/// Inputs for the indicator observable V = −1_U: ‖V‖₂ = √μ(U), ‖V‖∞ = 1.
template <class Real>
BoundInputs<Real> indicator_inputs(const Real& rho, const Real& mu_U, const Real& prefactor = Real{1}) {
  using std::sqrt;
  if (!(mu_U > 0) || mu_U > 1) throw DomainError("indicator_inputs: mu(U) must lie in (0,1]");
  return {rho, sqrt(mu_U), Real{1}, prefactor};
}

/// h(μ(U)) for V = −1_U, computed without the square-root round trip: ρμ(U)/31.
template <class Real>
Real hitting_rate(const Real& rho, const Real& mu_U) {
  if (!(rho > 0)) throw UsageError("hitting_rate: rho must be positive");
  if (!(mu_U > 0) || mu_U > 1) throw DomainError("hitting_rate: mu(U) must lie in (0,1]");
  return rho * mu_U * mu_U / (25 * mu_U + 6 * mu_U);
}

/// 1 + √2 · prefactor · θ/(h(μ(U)) − θ) for 0 < θ < h(μ(U)).
template <class Real>
Real hitting_bound(const Real& theta, const Real& mu_U, const Real& rho, const Real& prefactor = Real{1}) {
  using std::sqrt;
  if (!(theta > 0)) throw UsageError("hitting_bound: theta must be positive");
  const Real h = hitting_rate(rho, mu_U);
  if (!(theta < h)) throw DomainError("hitting_bound: theta above admissible rate");
  return 1 + sqrt(Real{2}) * prefactor * theta / (h - theta);
}

/// Same bound with ρ and the prefactor taken from `in` (its norms are ignored:
/// the indicator convention fixes them).
template <class Real>
Real hitting_bound(const Real& theta, const Real& mu_U, const BoundInputs<Real>& in) {
  return hitting_bound(theta, mu_U, in.rho, in.prefactor);
}

/// √3 e^{−2ρt/3}.
template <class Real>
Real decay_envelope(const Real& t, const Real& rho) {
  using std::exp;
  using std::sqrt;
  if (t < 0) throw UsageError("decay_envelope: t must be nonnegative");
  if (!(rho > 0)) throw UsageError("decay_envelope: rho must be positive");
  return sqrt(Real{3}) * exp(-2 * rho * t / 3);
}

template <class Real>
struct BoundReport {
  Real r{0};
  Real h_of_r{0};
  Extended<Real> lambda0 = Extended<Real>::infinity();
  Real beta{0};
  Extended<Real> lambda_upper = Extended<Real>::infinity();
  Real decay_rate{0};
  Real decay_prefactor{0};
};

template <class Real>
BoundReport<Real> make_report(const Real& r, const BoundInputs<Real>& in) {
  using std::sqrt;
  BoundReport<Real> rep;
  rep.r = r;
  rep.h_of_r = h_rate(r, in);
  rep.lambda0 = lambda0(in);
  rep.beta = in.v_inf == 0 ? Real{0} : beta(in);
  rep.lambda_upper = lambda_upper(in);
  rep.decay_rate = 2 * in.rho / 3;
  rep.decay_prefactor = sqrt(Real{3});
  return rep;
}

enum class NormConvention { Uncentered, Centered };

struct ObservableNorms {
  double mean = 0.0;
  double l2 = 0.0;
  double sup = 0.0;
};

/// ‖V‖₂ and ‖V‖∞ of V (or of V − μV with `Centered`) from values on a weighted
/// discretization of μ (weights summing to one, e.g. quadrature or grid cells).
/// The sup is taken over points with positive weight.
inline ObservableNorms observable_norms(std::span<const double> values, std::span<const double> weights,
                                        NormConvention convention = NormConvention::Uncentered) {
  if (values.size() != weights.size() || values.empty())
    throw UsageError("observable_norms: values and weights must be nonempty and of equal size");
  double mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) mean += weights[i] * values[i];
  const double shift = convention == NormConvention::Centered ? mean : 0.0;
  double sq = 0.0;
  double sup = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i] - shift;
    sq += weights[i] * v * v;
    if (weights[i] > 0) sup = std::max(sup, std::abs(v));
  }
  return {mean, std::sqrt(sq), sup};
}

}  // namespace hypoco::bounds

#pragma once

// The three example diffusions: kinetic Langevin in ℝ^d × ℝ^d, the
// self-interacting diffusion on 𝕋^d × ℝ^n, and the ℝ × 𝕋 example. Each has an
// Euler–Maruyama step, a seeded path simulator and an exact invariant sampler.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hypoco/errors.hpp"
#include "hypoco/measure.hpp"
#include "hypoco/potential.hpp"
#include "hypoco/rng.hpp"
#include "hypoco/stats.hpp"

namespace hypoco {

enum class ProcessKind { KineticLangevin, SelfInteracting, RTorus };

inline std::string to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::KineticLangevin: return "kinetic-langevin";
    case ProcessKind::SelfInteracting: return "self-interacting";
    case ProcessKind::RTorus: return "rtorus";
  }
  return "unknown";
}

/// e(x) = cos(k·x) or sin(k·x) on 𝕋^d with interaction weight a > 0.
/// −Δe = |k|² e, and the invariant precision of the matching U-coordinate is a|k|².
struct FourierMode {
  std::vector<int> k;
  bool sine = false;
  double a = 1.0;

  double frequency_squared() const noexcept {
    double s = 0.0;
    for (int ki : k) s += static_cast<double>(ki) * ki;
    return s;
  }
  double phase(std::span<const double> x) const noexcept {
    double p = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) p += k[i] * x[i];
    return p;
  }
  double value(std::span<const double> x) const noexcept {
    const double p = phase(x);
    return sine ? std::sin(p) : std::cos(p);
  }
  /// ∇e = k·(−sin p) for cosine modes, k·cos p for sine modes.
  double gradient_factor(std::span<const double> x) const noexcept {
    const double p = phase(x);
    return sine ? std::cos(p) : -std::sin(p);
  }
  /// Variance 1/(a|k|²) of the U-marginal under μ.
  double invariant_variance() const noexcept { return 1.0 / (a * frequency_squared()); }
};

class ProcessSpec {
 public:
  static ProcessSpec kinetic_langevin(int dim, Polynomial profile) {
    if (!profile.confining())
      throw ConfigurationError("kinetic_langevin: potential profile " + profile.to_string() +
                               " is not confining (need even degree >= 2 and positive leading coefficient)");
    ProcessSpec s(ProcessKind::KineticLangevin, dim);
    s.potential_ = SeparablePotential(dim, std::move(profile));
    const Polynomial p = s.potential_.profile();
    s.marginal_ = std::make_shared<const Marginal1D>([p](double x) { return p(x); });
    return s;
  }

  static ProcessSpec self_interacting(int dim, std::vector<FourierMode> modes) {
    if (modes.empty()) throw ConfigurationError("self_interacting: at least one mode is required");
    for (const auto& m : modes) {
      if (static_cast<int>(m.k.size()) != dim)
        throw ConfigurationError("self_interacting: wavevector dimension does not match d");
      if (!(m.a > 0.0)) throw ConfigurationError("self_interacting: coefficients a_j must be positive");
      if (m.frequency_squared() == 0.0) throw ConfigurationError("self_interacting: zero wavevector");
    }
    ProcessSpec s(ProcessKind::SelfInteracting, dim);
    s.modes_ = std::move(modes);
    return s;
  }

  static ProcessSpec rtorus() {
    ProcessSpec s(ProcessKind::RTorus, 1);
    s.marginal_ = std::make_shared<const Marginal1D>([](double x) { return rtorus_potential(x); });
    return s;
  }

  ProcessKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  const SeparablePotential& potential() const noexcept { return potential_; }
  const std::vector<FourierMode>& modes() const noexcept { return modes_; }

  /// The e^{−V} (ℝ×𝕋) or e^{−U} (Langevin, per coordinate) position marginal.
  const Marginal1D& position_marginal() const {
    if (!marginal_) throw UsageError("position_marginal: process has no ℝ-valued position marginal");
    return *marginal_;
  }

  std::size_t state_dim() const noexcept {
    switch (kind_) {
      case ProcessKind::KineticLangevin: return 2 * static_cast<std::size_t>(dim_);
      case ProcessKind::SelfInteracting: return dim_ + modes_.size();
      case ProcessKind::RTorus: return 2;
    }
    return 0;
  }

  std::vector<bool> torus_mask() const {
    std::vector<bool> mask(state_dim(), false);
    if (kind_ == ProcessKind::SelfInteracting)
      for (int i = 0; i < dim_; ++i) mask[i] = true;
    if (kind_ == ProcessKind::RTorus) mask[1] = true;
    return mask;
  }

  std::size_t noise_dim() const noexcept {
    return kind_ == ProcessKind::RTorus ? 1 : static_cast<std::size_t>(dim_);
  }

  std::string describe_invariant() const {
    switch (kind_) {
      case ProcessKind::KineticLangevin:
        return "density proportional to exp(-U(x) - |v|^2/2), U(x) = sum_i " + potential_.profile().to_string();
      case ProcessKind::SelfInteracting:
        return "uniform on the torus times independent centred Gaussians with precision a_j|k_j|^2";
      case ProcessKind::RTorus:
        return "density proportional to exp(-V(x)) on R x T, V(x) = x^2/sqrt(1+x^2)";
    }
    return {};
  }

  std::vector<std::string> coordinate_names() const {
    std::vector<std::string> names;
    switch (kind_) {
      case ProcessKind::KineticLangevin:
        for (int i = 0; i < dim_; ++i) names.push_back("x" + std::to_string(i));
        for (int i = 0; i < dim_; ++i) names.push_back("v" + std::to_string(i));
        break;
      case ProcessKind::SelfInteracting:
        for (int i = 0; i < dim_; ++i) names.push_back("x" + std::to_string(i));
        for (std::size_t j = 0; j < modes_.size(); ++j) names.push_back("u" + std::to_string(j));
        break;
      case ProcessKind::RTorus:
        names = {"x", "u"};
        break;
    }
    return names;
  }

  /// Drift b(s); writes state_dim() entries.
  void drift(std::span<const double> s, std::span<double> out) const {
    switch (kind_) {
      case ProcessKind::KineticLangevin: {
        const std::size_t d = static_cast<std::size_t>(dim_);
        for (std::size_t i = 0; i < d; ++i) {
          out[i] = s[d + i];
          out[d + i] = -potential_.profile().derivative(s[i], 1) - s[d + i];
        }
        break;
      }
      case ProcessKind::SelfInteracting: {
        const std::size_t d = static_cast<std::size_t>(dim_);
        for (std::size_t i = 0; i < d; ++i) out[i] = 0.0;
        const auto x = s.first(d);
        for (std::size_t j = 0; j < modes_.size(); ++j) {
          const auto& m = modes_[j];
          const double g = m.gradient_factor(x) * m.a * s[d + j];
          for (std::size_t i = 0; i < d; ++i) out[i] -= g * m.k[i];
          out[d + j] = m.value(x);
        }
        break;
      }
      case ProcessKind::RTorus:
        out[0] = std::cos(s[1]);
        out[1] = vprime(s[0]) * std::sin(s[1]);
        break;
    }
  }

  /// Diffusion coefficient σ on the noise-driven coordinates (dY = … + σ dB).
  /// Langevin and ℝ×𝕋 use σ = √2 (generators with Δ_v and ∂_u²); the
  /// self-interacting X is driven by a standard Brownian motion.
  double noise_scale() const noexcept {
    return kind_ == ProcessKind::SelfInteracting ? 1.0 : std::numbers::sqrt2;
  }

  /// Index of the state coordinate driven by noise component `k`.
  std::size_t noise_target(std::size_t k) const noexcept {
    switch (kind_) {
      case ProcessKind::KineticLangevin: return static_cast<std::size_t>(dim_) + k;
      case ProcessKind::SelfInteracting: return k;
      case ProcessKind::RTorus: return 1;
    }
    return 0;
  }

 private:
  ProcessSpec(ProcessKind kind, int dim) : kind_(kind), dim_(dim) {
    if (dim < 1) throw ConfigurationError("process dimension must be positive");
  }

  ProcessKind kind_;
  int dim_;
  SeparablePotential potential_;
  std::vector<FourierMode> modes_;
  std::shared_ptr<const Marginal1D> marginal_;
};

inline double wrap_angle(double a) noexcept {
  constexpr double period = 2.0 * std::numbers::pi;
  double r = std::fmod(a, period);
  if (r < 0.0) r += period;
  if (r >= period) r = 0.0;
  return r;
}

/// One Euler–Maruyama step s + b(s)dt + σ√dt·ξ, with torus coordinates wrapped.
inline std::vector<double> step(const ProcessSpec& spec, std::span<const double> state, double dt,
                                std::span<const double> noise) {
  if (state.size() != spec.state_dim()) throw UsageError("step: state dimension does not match process");
  if (noise.size() != spec.noise_dim()) throw UsageError("step: noise dimension does not match process");
  if (!(dt > 0.0)) throw UsageError("step: dt must be positive");
  std::vector<double> b(state.size());
  spec.drift(state, b);
  std::vector<double> out(state.begin(), state.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(b[i])) throw IntegrationError("step: non-finite drift", out);
    out[i] += b[i] * dt;
  }
  const double amp = spec.noise_scale() * std::sqrt(dt);
  for (std::size_t k = 0; k < noise.size(); ++k) out[spec.noise_target(k)] += amp * noise[k];
  const auto mask = spec.torus_mask();
  for (std::size_t i = 0; i < out.size(); ++i)
    if (mask[i]) out[i] = wrap_angle(out[i]);
  return out;
}

/// Allocation-free stepper for one trajectory; draws the step-k noise from
/// counter k of the trajectory's stream.
class Stepper {
 public:
  Stepper(const ProcessSpec& spec, double dt)
      : spec_(&spec), dt_(dt), amp_(spec.noise_scale() * std::sqrt(dt)), mask_(spec.torus_mask()),
        drift_(spec.state_dim()), noise_(spec.noise_dim()) {
    if (!(dt > 0.0)) throw UsageError("Stepper: dt must be positive");
  }

  void advance(std::vector<double>& s, std::uint32_t step_index, const CounterRng& rng) {
    if (spec_->kind() == ProcessKind::RTorus) {
      const double xi = rng.normal2(step_index, 0)[0];
      const double x = s[0];
      const double u = s[1];
      const double bx = std::cos(u);
      const double bu = vprime(x) * std::sin(u);
      if (!std::isfinite(bu) || !std::isfinite(x)) throw IntegrationError("non-finite drift", s);
      s[0] = x + bx * dt_;
      s[1] = wrap_angle(u + bu * dt_ + amp_ * xi);
      return;
    }
    rng.normals(step_index, noise_);
    spec_->drift(s, drift_);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!std::isfinite(drift_[i])) throw IntegrationError("non-finite drift", s);
      s[i] += drift_[i] * dt_;
    }
    for (std::size_t k = 0; k < noise_.size(); ++k) s[spec_->noise_target(k)] += amp_ * noise_[k];
    for (std::size_t i = 0; i < s.size(); ++i)
      if (mask_[i]) s[i] = wrap_angle(s[i]);
  }

  double dt() const noexcept { return dt_; }

 private:
  const ProcessSpec* spec_;
  double dt_;
  double amp_;
  std::vector<bool> mask_;
  std::vector<double> drift_;
  std::vector<double> noise_;
};

/// Exact draw from μ for trajectory `stream` of experiment `seed`.
inline std::vector<double> sample_invariant(const ProcessSpec& spec, std::uint64_t seed, std::uint64_t stream) {
  const CounterRng rng(seed, stream);
  std::vector<double> s(spec.state_dim());
  constexpr double two_pi = 2.0 * std::numbers::pi;
  switch (spec.kind()) {
    case ProcessKind::RTorus: {
      const auto [p, q] = rng.uniform2(0, 0, Purpose::Initial);
      s[0] = spec.position_marginal().quantile(p);
      s[1] = wrap_angle(two_pi * q);
      break;
    }
    case ProcessKind::KineticLangevin: {
      const std::size_t d = static_cast<std::size_t>(spec.dim());
      for (std::size_t i = 0; i < d; i += 2) {
        const auto uv = rng.uniform2(0, static_cast<std::uint32_t>(i / 2), Purpose::Initial);
        s[i] = spec.position_marginal().quantile(uv[0]);
        if (i + 1 < d) s[i + 1] = spec.position_marginal().quantile(uv[1]);
      }
      rng.normals(1, std::span<double>(s).subspan(d), Purpose::Initial);
      break;
    }
    case ProcessKind::SelfInteracting: {
      const std::size_t d = static_cast<std::size_t>(spec.dim());
      for (std::size_t i = 0; i < d; i += 2) {
        const auto uv = rng.uniform2(0, static_cast<std::uint32_t>(i / 2), Purpose::Initial);
        s[i] = wrap_angle(two_pi * uv[0]);
        if (i + 1 < d) s[i + 1] = wrap_angle(two_pi * uv[1]);
      }
      auto u = std::span<double>(s).subspan(d);
      rng.normals(1, u, Purpose::Initial);
      for (std::size_t j = 0; j < u.size(); ++j) u[j] *= std::sqrt(spec.modes()[j].invariant_variance());
      break;
    }
  }
  return s;
}

/// Start from exact μ-samples.
struct FromInvariant {};
/// ℝ×𝕋 start at (x, u) with u uniform on 𝕋.
struct PositionUniformAngle {
  double x = 0.0;
};
using InitialCondition = std::variant<std::vector<double>, FromInvariant, PositionUniformAngle>;

inline std::vector<double> initial_state(const ProcessSpec& spec, const InitialCondition& init,
                                         std::uint64_t seed, std::uint64_t stream) {
  if (const auto* s = std::get_if<std::vector<double>>(&init)) {
    if (s->size() != spec.state_dim()) throw UsageError("initial state dimension does not match process");
    std::vector<double> out = *s;
    const auto mask = spec.torus_mask();
    for (std::size_t i = 0; i < out.size(); ++i)
      if (mask[i]) out[i] = wrap_angle(out[i]);
    return out;
  }
  if (std::holds_alternative<FromInvariant>(init)) return sample_invariant(spec, seed, stream);
  if (spec.kind() != ProcessKind::RTorus)
    throw UsageError("position-with-uniform-angle start applies to the rtorus process only");
  const CounterRng rng(seed, stream);
  const double q = rng.uniform2(0, 0, Purpose::Initial)[0];
  return {std::get<PositionUniformAngle>(init).x, wrap_angle(2.0 * std::numbers::pi * q)};
}

using StateFunction = std::function<double(std::span<const double>)>;

struct Observable {
  std::string name;
  StateFunction f;
};

/// Number of steps n with n·dt = t_end; t_end must be a whole number of steps.
inline std::uint32_t step_count(double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw UsageError("t_end and dt must be positive");
  if (dt > t_end) throw UsageError("dt must not exceed t_end");
  const double n = std::round(t_end / dt);
  if (std::abs(n * dt - t_end) > 1e-9 * t_end) throw UsageError("t_end must be an integer multiple of dt");
  if (n > 4.0e9) throw UsageError("too many steps");
  return static_cast<std::uint32_t>(n);
}

class Trajectory {
 public:
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::size_t state_dim = 0;
  std::vector<std::string> coordinate_names;
  std::vector<std::string> accumulator_names;
  /// Row k holds X_{t_k}; row-major, size() × state_dim.
  std::vector<double> states;
  /// Row k holds dt·Σ_{i<k} V(X_{t_i}) per observable.
  std::vector<double> accumulators;

  std::size_t size() const noexcept { return state_dim == 0 ? 0 : states.size() / state_dim; }
  double time(std::size_t k) const noexcept { return static_cast<double>(k) * dt; }
  std::span<const double> state(std::size_t k) const { return {states.data() + k * state_dim, state_dim}; }
  double accumulator(std::size_t k, std::size_t obs) const {
    return accumulators[k * accumulator_names.size() + obs];
  }
  double final_accumulator(std::size_t obs) const { return accumulator(size() - 1, obs); }

  void write_csv(std::ostream& os) const {
    os << "t";
    for (const auto& n : coordinate_names) os << ',' << n;
    for (const auto& n : accumulator_names) os << ',' << n;
    os << '\n';
    os.precision(17);
    for (std::size_t k = 0; k < size(); ++k) {
      os << time(k);
      for (double v : state(k)) os << ',' << v;
      for (std::size_t o = 0; o < accumulator_names.size(); ++o) os << ',' << accumulator(k, o);
      os << '\n';
    }
  }
};

/// Fixed-step path on [0, t_end] with left-endpoint accumulators. A pure
/// function of its arguments; trajectory `stream` uses its own counter range.
inline Trajectory simulate(const ProcessSpec& spec, const InitialCondition& initial, double t_end, double dt,
                           std::uint64_t seed, const std::vector<Observable>& observables = {},
                           std::uint64_t stream = 0) {
  const std::uint32_t n = step_count(t_end, dt);
  Trajectory tr;
  tr.dt = dt;
  tr.seed = seed;
  tr.stream = stream;
  tr.state_dim = spec.state_dim();
  tr.coordinate_names = spec.coordinate_names();
  for (const auto& o : observables) tr.accumulator_names.push_back(o.name);
  tr.states.reserve((n + 1) * tr.state_dim);
  tr.accumulators.reserve((n + 1) * observables.size());

  std::vector<double> s = initial_state(spec, initial, seed, stream);
  std::vector<CompensatedSum> sums(observables.size());
  const CounterRng rng(seed, stream);
  Stepper stepper(spec, dt);
  for (std::uint32_t k = 0;; ++k) {
    tr.states.insert(tr.states.end(), s.begin(), s.end());
    for (auto& acc : sums) tr.accumulators.push_back(acc.value() * dt);
    if (k == n) break;
    for (std::size_t o = 0; o < observables.size(); ++o) sums[o].add(observables[o].f(s));
    stepper.advance(s, k, rng);
  }
  return tr;
}

}  // namespace hypoco

#pragma once

// Monte Carlo estimators confronted with the deviation and hitting-time bounds:
// tail frequencies of time averages, grid first-entrance times, exponential
// moments and the pointwise growth profile x ↦ E_x e^{θT_U}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hypoco/errors.hpp"
#include "hypoco/parallel.hpp"
#include "hypoco/processes.hpp"
#include "hypoco/stats.hpp"

namespace hypoco {

/// Target set U: a slab lo ≤ s[coord] ≤ hi (times everything else), or the whole space.
struct Region {
  enum class Kind { Slab, Whole };
  Kind kind = Kind::Whole;
  std::size_t coord = 0;
  double lo = 0.0;
  double hi = 0.0;

  static Region slab(std::size_t coord, double lo, double hi) {
    if (!(hi >= lo)) throw UsageError("Region::slab: need lo <= hi");
    return {Kind::Slab, coord, lo, hi};
  }
  static Region whole() { return {}; }

  bool contains(std::span<const double> s) const noexcept {
    return kind == Kind::Whole || (s[coord] >= lo && s[coord] <= hi);
  }

  /// μ(U) by quadrature against the closed-form position marginal.
  double mass(const ProcessSpec& spec) const {
    if (kind == Kind::Whole) return 1.0;
    if (spec.kind() == ProcessKind::SelfInteracting)
      throw UsageError("Region::mass: slabs are supported for ℝ-valued position coordinates only");
    if (coord >= static_cast<std::size_t>(spec.dim()))
      throw UsageError("Region::mass: slab coordinate must be a position coordinate");
    return spec.position_marginal().mass(lo, hi);
  }

  std::string describe() const {
    if (kind == Kind::Whole) return "whole space";
    return "s[" + std::to_string(coord) + "] in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
  }
};

struct TailEstimate {
  std::size_t successes = 0;
  std::size_t complement = 0;
  std::size_t trials = 0;
  double point = 0.0;
  double ci_upper = 0.0;
  double level = 0.999;
  double r = 0.0;
};

struct TailRun {
  double t = 0.0;
  double mu_V = 0.0;
  /// (1/t)∫₀^t V(X_s)ds − μV per trajectory, indexed by trajectory.
  std::vector<double> centered_averages;

  TailEstimate estimate(double r, double level = 0.999) const {
    TailEstimate e;
    e.r = r;
    e.level = level;
    e.trials = centered_averages.size();
    for (double a : centered_averages) {
      if (a >= r)
        ++e.successes;
      else
        ++e.complement;
    }
    e.point = static_cast<double>(e.successes) / static_cast<double>(e.trials);
    e.ci_upper = clopper_pearson_upper(e.successes, e.trials, level);
    return e;
  }
};

struct McOptions {
  double dt = 0.01;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Simulates n_traj paths from the initial law (trajectory i uses stream i) and
/// records the centred time average of V over [0, t].
inline TailRun simulate_time_averages(const ProcessSpec& spec, const StateFunction& V, double mu_V, double t,
                                      std::size_t n_traj, const McOptions& opt,
                                      const InitialCondition& initial = FromInvariant{}) {
  if (n_traj == 0) throw UsageError("tail_probability: n_traj must be positive");
  const std::uint32_t n = step_count(t, opt.dt);
  TailRun run;
  run.t = t;
  run.mu_V = mu_V;
  run.centered_averages.assign(n_traj, 0.0);
  parallel_for(n_traj, opt.workers, [&](std::size_t i) {
    std::vector<double> s = initial_state(spec, initial, opt.seed, i);
    const CounterRng rng(opt.seed, i);
    Stepper stepper(spec, opt.dt);
    CompensatedSum acc;
    for (std::uint32_t k = 0; k < n; ++k) {
      acc.add(V(s));
      stepper.advance(s, k, rng);
    }
    run.centered_averages[i] = acc.value() * opt.dt / t - mu_V;
  });
  return run;
}

inline TailEstimate tail_probability(const ProcessSpec& spec, const StateFunction& V, double mu_V, double t,
                                     double r, std::size_t n_traj, const McOptions& opt, double level = 0.999) {
  return simulate_time_averages(spec, V, mu_V, t, n_traj, opt).estimate(r, level);
}

struct HittingSample {
  double time = 0.0;
  bool censored = false;
  double t_cap = 0.0;
};

/// First k with X_{t_k} ∈ U, reported as k·dt; censored at t_cap.
inline std::vector<HittingSample> hitting_times(const ProcessSpec& spec, const Region& U, std::size_t n_traj,
                                                double t_cap, const McOptions& opt,
                                                const InitialCondition& initial = FromInvariant{},
                                                std::uint64_t stream_offset = 0) {
  if (n_traj == 0) throw UsageError("hitting_times: n_traj must be positive");
  if (U.kind == Region::Kind::Slab && spec.kind() != ProcessKind::SelfInteracting && !(U.mass(spec) > 0.0))
    throw DomainError("hitting_times: target set has zero invariant mass");
  const std::uint32_t n = step_count(t_cap, opt.dt);
  std::vector<HittingSample> out(n_traj);
  parallel_for(n_traj, opt.workers, [&](std::size_t i) {
    const std::uint64_t stream = stream_offset + i;
    std::vector<double> s = initial_state(spec, initial, opt.seed, stream);
    const CounterRng rng(opt.seed, stream);
    Stepper stepper(spec, opt.dt);
    HittingSample h{0.0, true, t_cap};
    for (std::uint32_t k = 0;; ++k) {
      if (U.contains(s)) {
        h.time = static_cast<double>(k) * opt.dt;
        h.censored = false;
        break;
      }
      if (k == n) {
        h.time = t_cap;
        break;
      }
      stepper.advance(s, k, rng);
    }
    out[i] = h;
  });
  return out;
}

struct ExpMomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double censored_fraction = 0.0;
  double theta = 0.0;
  double t_cap = 0.0;
  /// censored_fraction·e^{θ t_cap}: mass that a censored surrogate may be missing.
  double censored_mass = 0.0;
  bool biased_low = false;

  /// True when the censored mass is at most `fraction` of `bound`.
  bool censoring_valid(double bound, double fraction = 0.01) const noexcept {
    return censored_mass <= fraction * bound;
  }
};

/// Mean and standard error of e^{θT}; censored samples contribute e^{θ t_cap}.
inline ExpMomentEstimate exp_moment(std::span<const HittingSample> samples, double theta) {
  if (samples.empty()) throw UsageError("exp_moment: no samples");
  if (!(theta >= 0.0)) throw UsageError("exp_moment: theta must be nonnegative");
  std::vector<double> values(samples.size());
  std::size_t censored = 0;
  double t_cap = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    values[i] = std::exp(theta * samples[i].time);
    if (samples[i].censored) ++censored;
    t_cap = std::max(t_cap, samples[i].t_cap);
  }
  const auto m = mean_and_error(values);
  ExpMomentEstimate e;
  e.mean = m.mean;
  e.std_error = m.std_error;
  e.theta = theta;
  e.t_cap = t_cap;
  e.censored_fraction = static_cast<double>(censored) / static_cast<double>(samples.size());
  e.censored_mass = e.censored_fraction * std::exp(theta * t_cap);
  e.biased_low = censored > 0;
  return e;
}

struct GrowthPoint {
  double x = 0.0;
  double W = 0.0;
  double std_error = 0.0;
  double censored_fraction = 0.0;
  /// Ŵ(x)/e^{V(x)/2} and its standard error.
  double ratio = 0.0;
  double ratio_error = 0.0;
};

struct GrowthProfile {
  double theta = 0.0;
  std::vector<GrowthPoint> points;
  std::size_t argmax = 0;
  double max_ratio = 0.0;
  /// Outermost ratio does not exceed the largest inner ratio by more than 3 combined SE.
  bool no_upward_trend = true;
  /// Ŵ nondecreasing in |x| within 3 combined SE (heuristic; a warning only).
  bool monotone = true;
};

/// Ŵ(x) = mean of e^{θT_U} from (x, u), u uniform; point p uses streams p·n_traj + i.
inline GrowthProfile growth_profile(const ProcessSpec& spec, const Region& U, double theta,
                                    std::span<const double> x_points, std::size_t n_traj, double t_cap,
                                    const McOptions& opt) {
  if (spec.kind() != ProcessKind::RTorus) throw UsageError("growth_profile: defined for the rtorus process");
  GrowthProfile g;
  g.theta = theta;
  for (std::size_t p = 0; p < x_points.size(); ++p) {
    const auto samples = hitting_times(spec, U, n_traj, t_cap, opt, PositionUniformAngle{x_points[p]},
                                       static_cast<std::uint64_t>(p) * n_traj);
    const auto e = exp_moment(samples, theta);
    GrowthPoint pt;
    pt.x = x_points[p];
    pt.W = e.mean;
    pt.std_error = e.std_error;
    pt.censored_fraction = e.censored_fraction;
    const double scale = std::exp(0.5 * rtorus_potential(pt.x));
    pt.ratio = e.mean / scale;
    pt.ratio_error = e.std_error / scale;
    g.points.push_back(pt);
  }
  if (g.points.empty()) return g;
  for (std::size_t p = 0; p < g.points.size(); ++p)
    if (g.points[p].ratio > g.max_ratio) {
      g.max_ratio = g.points[p].ratio;
      g.argmax = p;
    }
  std::vector<std::size_t> order(g.points.size());
  for (std::size_t p = 0; p < order.size(); ++p) order[p] = p;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(g.points[a].x) < std::abs(g.points[b].x); });
  const auto& outer = g.points[order.back()];
  if (order.size() > 1) {
    std::size_t best = order[0];
    for (std::size_t q = 1; q + 1 < order.size(); ++q)
      if (g.points[order[q]].ratio > g.points[best].ratio) best = order[q];
    const auto& inner = g.points[best];
    const double se = std::hypot(inner.ratio_error, outer.ratio_error);
    g.no_upward_trend = outer.ratio <= inner.ratio + 3.0 * se;
  }
  for (std::size_t q = 0; q + 1 < order.size(); ++q) {
    const auto& a = g.points[order[q]];
    const auto& b = g.points[order[q + 1]];
    if (U.contains(std::vector<double>{a.x, 0.0})) continue;
    if (b.W < a.W - 3.0 * std::hypot(a.std_error, b.std_error)) g.monotone = false;
  }
  return g;
}

}  // namespace hypoco

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hypoco/montecarlo.hpp"

using namespace hypoco;

TEST(Region, SlabMassAndContainment) {
  const auto spec = ProcessSpec::kinetic_langevin(1, Polynomial({0, 0, 0.5}));
  const auto U = Region::slab(0, -1.0, 1.0);
  EXPECT_NEAR(U.mass(spec), std::erf(1.0 / std::sqrt(2.0)), 2e-8);
  EXPECT_TRUE(U.contains(std::vector<double>{0.5, 9.0}));
  EXPECT_FALSE(U.contains(std::vector<double>{1.5, 0.0}));
  EXPECT_EQ(Region::whole().mass(spec), 1.0);
  EXPECT_THROW(Region::slab(0, 1.0, -1.0), UsageError);
  EXPECT_THROW(Region::slab(1, 0, 1).mass(spec), UsageError);
}

TEST(TailRun, EstimateCountsThresholdCrossings) {
  TailRun run;
  run.centered_averages = {0.1, 0.5, 0.7, -0.2};
  const auto e = run.estimate(0.5, 0.95);
  EXPECT_EQ(e.successes, 2u);
  EXPECT_EQ(e.complement, 2u);
  EXPECT_DOUBLE_EQ(e.point, 0.5);
  EXPECT_DOUBLE_EQ(e.ci_upper, clopper_pearson_upper(2, 4, 0.95));
}

// For dx = v dt, dv = (−x − v) dt + √2 dB the Poisson equation −Lg = x is
// solved by g = x + v, so t·Var((1/t)∫x) → 2 E[x g] = 2.
TEST(TimeAverages, OrnsteinUhlenbeckAsymptoticVariance) {
  const auto spec = ProcessSpec::kinetic_langevin(1, Polynomial({0, 0, 0.5}));
  const double t = 40.0;
  const auto run = simulate_time_averages(spec, [](std::span<const double> s) { return s[0]; }, 0.0, t, 3000,
                                          McOptions{0.01, 11, 2});
  const auto m = mean_and_error(run.centered_averages);
  double var = 0.0;
  for (double a : run.centered_averages) var += (a - m.mean) * (a - m.mean);
  var /= static_cast<double>(run.centered_averages.size() - 1);
  EXPECT_NEAR(m.mean, 0.0, 4 * m.std_error);
  // Finite-t correction is O(1/t); sampling error of the variance ≈ 2.6%.
  EXPECT_NEAR(t * var, 2.0, 0.25);
}

TEST(TimeAverages, IndependentOfWorkerCount) {
  const auto spec = ProcessSpec::rtorus();
  const StateFunction V = [](std::span<const double> s) { return std::cos(s[1]); };
  const auto a = simulate_time_averages(spec, V, 0.0, 1.0, 64, McOptions{0.01, 5, 1});
  const auto b = simulate_time_averages(spec, V, 0.0, 1.0, 64, McOptions{0.01, 5, 4});
  EXPECT_EQ(a.centered_averages, b.centered_averages);
  EXPECT_THROW(simulate_time_averages(spec, V, 0.0, 1.0, 0, McOptions{}), UsageError);
}

TEST(Hitting, StartInsideTargetHitsImmediately) {
  const auto spec = ProcessSpec::rtorus();
  const auto hs = hitting_times(spec, Region::slab(0, -1, 1), 20, 1.0, McOptions{0.01, 1, 1},
                                PositionUniformAngle{0.25});
  for (const auto& h : hs) {
    EXPECT_EQ(h.time, 0.0);
    EXPECT_FALSE(h.censored);
  }
}

// |dx/dt| = |cos u| ≤ 1, so from x₀ the slab [−1, 1] is not reached before x₀ − 1.
TEST(Hitting, RespectsSpeedLimitOfPosition) {
  const auto spec = ProcessSpec::rtorus();
  const auto hs = hitting_times(spec, Region::slab(0, -1, 1), 200, 200.0, McOptions{0.01, 2, 2},
                                PositionUniformAngle{3.0});
  for (const auto& h : hs) EXPECT_GE(h.time, 2.0 - 1e-9);
}

TEST(Hitting, UnreachableTargetIsCensored) {
  const auto spec = ProcessSpec::rtorus();
  const auto hs = hitting_times(spec, Region::slab(0, 5, 6), 10, 0.5, McOptions{0.01, 3, 1},
                                PositionUniformAngle{0.0});
  for (const auto& h : hs) {
    EXPECT_TRUE(h.censored);
    EXPECT_EQ(h.time, 0.5);
  }
  const auto e = exp_moment(hs, 2.0);
  EXPECT_DOUBLE_EQ(e.censored_fraction, 1.0);
  EXPECT_DOUBLE_EQ(e.censored_mass, std::exp(1.0));
  EXPECT_TRUE(e.biased_low);
  EXPECT_FALSE(e.censoring_valid(10.0));
}

TEST(Hitting, ZeroMassTargetIsRejected) {
  EXPECT_THROW(hitting_times(ProcessSpec::rtorus(), Region::slab(0, 1e3, 1e3 + 1), 1, 1.0, McOptions{}),
               DomainError);
}

TEST(ExpMoment, ArithmeticOnHandSamples) {
  const std::vector<HittingSample> s = {{0.0, false, 4.0}, {1.0, false, 4.0}, {2.0, false, 4.0}, {4.0, true, 4.0}};
  const auto e = exp_moment(s, 0.5);
  const std::vector<double> v = {1.0, std::exp(0.5), std::exp(1.0), std::exp(2.0)};
  const auto m = mean_and_error(v);
  EXPECT_DOUBLE_EQ(e.mean, m.mean);
  EXPECT_DOUBLE_EQ(e.std_error, m.std_error);
  EXPECT_DOUBLE_EQ(e.censored_fraction, 0.25);
  EXPECT_DOUBLE_EQ(e.censored_mass, 0.25 * std::exp(2.0));
  EXPECT_TRUE(e.censoring_valid(0.25 * std::exp(2.0) / 0.01));
  EXPECT_DOUBLE_EQ(exp_moment(s, 0.0).mean, 1.0);
  EXPECT_THROW(exp_moment(s, -1.0), UsageError);
  EXPECT_THROW(exp_moment(std::vector<HittingSample>{}, 1.0), UsageError);
}

TEST(Growth, RatioIsNormalizedByHalfPotential) {
  const auto spec = ProcessSpec::rtorus();
  const std::vector<double> xs = {1.5, 3.0};
  const auto g = growth_profile(spec, Region::slab(0, -1, 1), 1e-3, xs, 200, 100.0, McOptions{0.01, 4, 2});
  ASSERT_EQ(g.points.size(), 2u);
  for (const auto& p : g.points) {
    EXPECT_NEAR(p.ratio, p.W / std::exp(rtorus_potential(p.x) / 2), 1e-12);
    EXPECT_GE(p.W, 1.0);
  }
  EXPECT_THROW(growth_profile(ProcessSpec::kinetic_langevin(1, Polynomial({0, 0, 1})), Region::slab(0, -1, 1), 1e-3,
                              xs, 10, 1.0, McOptions{}),
               UsageError);
}

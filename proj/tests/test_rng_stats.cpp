#include <gtest/gtest.h>

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hypoco/parallel.hpp"
#include "hypoco/rng.hpp"
#include "hypoco/stats.hpp"

using namespace hypoco;

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswers) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterRng, DrawsArePureFunctionsOfTheirCoordinates) {
  const CounterRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  EXPECT_EQ(a.uniform2(5, 0), b.uniform2(5, 0));
  EXPECT_NE(a.uniform2(5, 0), c.uniform2(5, 0));
  EXPECT_NE(a.uniform2(5, 0), d.uniform2(5, 0));
  EXPECT_NE(a.uniform2(5, 0), a.uniform2(6, 0));
  EXPECT_NE(a.uniform2(5, 0), a.uniform2(5, 1));
  EXPECT_NE(a.uniform2(5, 0, Purpose::Noise), a.uniform2(5, 0, Purpose::Initial));
  // Streams beyond 2^32 are distinct.
  EXPECT_NE(CounterRng(1, 1).uniform2(0, 0), CounterRng(1, (1ULL << 32) + 1).uniform2(0, 0));
}

TEST(CounterRng, UniformsAreInOpenUnitIntervalWithRightMoments) {
  const CounterRng rng(9, 0);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int k = 0; k < n / 2; ++k) {
    for (double u : rng.uniform2(k, 0)) {
      ASSERT_GT(u, 0.0);
      ASSERT_LT(u, 1.0);
      s += u;
      s2 += u * u;
    }
  }
  EXPECT_NEAR(s / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(s2 / n, 1.0 / 3, 4 * std::sqrt(4.0 / 45 / n));
}

TEST(CounterRng, NormalsHaveUnitVarianceAndAreUncorrelated) {
  const CounterRng rng(3, 1);
  const int n = 100000;
  double m = 0, v = 0, cov = 0, k4 = 0;
  for (int k = 0; k < n; ++k) {
    const auto z = rng.normal2(k, 0);
    m += z[0];
    v += z[0] * z[0];
    cov += z[0] * z[1];
    k4 += std::pow(z[0], 4);
  }
  EXPECT_NEAR(m / n, 0.0, 4 / std::sqrt(n));
  EXPECT_NEAR(v / n, 1.0, 4 * std::sqrt(2.0 / n));
  EXPECT_NEAR(cov / n, 0.0, 4 / std::sqrt(n));
  EXPECT_NEAR(k4 / n, 3.0, 4 * std::sqrt(96.0 / n));
}

TEST(CounterRng, NormalsFillOddSpans) {
  const CounterRng rng(1, 2);
  std::vector<double> out(3);
  rng.normals(4, out);
  EXPECT_EQ(out[0], rng.normal2(4, 0)[0]);
  EXPECT_EQ(out[1], rng.normal2(4, 0)[1]);
  EXPECT_EQ(out[2], rng.normal2(4, 1)[0]);
}

TEST(Stats, MeanAndErrorSmallSample) {
  const std::vector<double> xs = {1, 2, 3, 4};
  const auto m = mean_and_error(xs);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_THROW(mean_and_error(std::vector<double>{}), UsageError);
}

TEST(Stats, CompensatedSumRecoversCancelledTerms) {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  EXPECT_DOUBLE_EQ(s.value(), 1000.0);
}

// The upper limit solves P(Bin(n, p) <= k) = 1 − level; check it with the
// binomial CDF directly, and check exact coverage ≥ level by enumeration.
TEST(Stats, ClopperPearsonUpperSolvesBinomialTailEquation) {
  for (int n : {1, 5, 20, 137}) {
    for (int k = 0; k < n; ++k) {
      const double p = clopper_pearson_upper(k, n, 0.95);
      const boost::math::binomial_distribution<double> bin(n, p);
      EXPECT_NEAR(boost::math::cdf(bin, k), 0.05, 1e-10) << n << ' ' << k;
    }
    EXPECT_EQ(clopper_pearson_upper(n, n, 0.95), 1.0);
  }
}

TEST(Stats, ClopperPearsonCoverageIsExhaustivelyConservative) {
  const double level = 0.9;
  for (int n : {1, 2, 7, 25, 60}) {
    std::vector<double> upper(n + 1);
    for (int k = 0; k <= n; ++k) upper[k] = clopper_pearson_upper(k, n, level);
    for (int g = 1; g < 400; ++g) {
      const double p = g / 400.0;
      const boost::math::binomial_distribution<double> bin(n, p);
      double coverage = 0.0;
      for (int k = 0; k <= n; ++k)
        if (upper[k] >= p) coverage += boost::math::pdf(bin, k);
      EXPECT_GE(coverage, level - 1e-12) << n << ' ' << p;
    }
  }
}

TEST(Stats, ClopperPearsonLowerMirrorsUpper) {
  EXPECT_EQ(clopper_pearson_lower(0, 10, 0.95), 0.0);
  EXPECT_NEAR(clopper_pearson_lower(3, 10, 0.95), 1.0 - clopper_pearson_upper(7, 10, 0.95), 1e-13);
  EXPECT_THROW(clopper_pearson_upper(3, 2, 0.9), UsageError);
  EXPECT_THROW(clopper_pearson_upper(1, 2, 1.0), UsageError);
}

TEST(Stats, KsStatisticOfPerfectQuantilesIsHalfStep) {
  const int n = 100;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = (i + 0.5) / n;
  EXPECT_NEAR(ks_statistic(xs, [](double x) { return x; }), 0.5 / n, 1e-15);
  EXPECT_NEAR(ks_critical(100, 0.05), 1.358 / 10, 1e-3);
}

TEST(Parallel, ResultsDoNotDependOnWorkerCount) {
  const auto run = [](unsigned w) {
    std::vector<double> out(1000);
    parallel_for(out.size(), w, [&](std::size_t i) { out[i] = CounterRng(5, i).normal2(0, 0)[0]; });
    return out;
  };
  const auto ref = run(1);
  EXPECT_EQ(ref, run(3));
  EXPECT_EQ(ref, run(8));
}

TEST(Parallel, ExceptionsPropagate) {
  EXPECT_THROW(parallel_for(10, 4,
                            [](std::size_t i) {
                              if (i == 7) throw SolveError("boom");
                            }),
               SolveError);
}

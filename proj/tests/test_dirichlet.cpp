#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hypoco/dirichlet.hpp"
#include "hypoco/grid.hpp"

using namespace hypoco;

namespace {

// Full dense system: W = 1 on U, (L + θ)W = 0 elsewhere.
Vec dense_dirichlet(const GridOperator& g, double lo, double hi, double theta) {
  const int N = g.size();
  Mat A = Mat(g.L) + theta * Mat::Identity(N, N);
  Vec b = Vec::Zero(N);
  for (int i = 0; i < g.nx; ++i) {
    if (g.xc[i] < lo || g.xc[i] > hi) continue;
    for (int j = 0; j < g.nv; ++j) {
      const int a = g.index(i, j);
      A.row(a).setZero();
      A(a, a) = 1.0;
      b[a] = 1.0;
    }
  }
  return A.fullPivLu().solve(b);
}

}  // namespace

TEST(Dirichlet, ZeroRateGivesExactlyOne) {
  const auto g = build_rtorus_generator(32, 16, 24.0, Scheme::Upwind);
  const auto sol = solve_dirichlet(g, -1, 1, 0.0);
  for (int a = 0; a < g.size(); ++a) EXPECT_EQ(sol.W[a], 1.0);
  EXPECT_LT(sol.residual, 1e-12);  // rounding in L·1 only
  EXPECT_EQ(sol.averaged_at(10.0), 1.0);
}

TEST(Dirichlet, MatchesDenseSolve) {
  const auto g = build_rtorus_generator(32, 16, 24.0, Scheme::Upwind);
  const double theta = 2e-3;
  const auto sol = solve_dirichlet(g, -1, 1, theta);
  const Vec ref = dense_dirichlet(g, -1, 1, theta);
  EXPECT_LT((sol.W - ref).cwiseAbs().maxCoeff(), 1e-10 * ref.cwiseAbs().maxCoeff());
  EXPECT_LT(sol.residual, 1e-10);
  EXPECT_GE(sol.min_W, 1.0);
  EXPECT_EQ(sol.U_cells.size(), 2u * 16u);
  // Outside U the equation holds, so C bounds the whole-space defect.
  const Vec lw = g.L * sol.W + theta * sol.W;
  EXPECT_LE(lw.maxCoeff(), sol.lyapunov_C + 1e-12);
  EXPECT_TRUE(std::isfinite(sol.lyapunov_C));
}

TEST(Dirichlet, AveragesInterpolateBetweenSlices) {
  const auto g = build_rtorus_generator(32, 16, 24.0, Scheme::Upwind);
  const auto sol = solve_dirichlet(g, -1, 1, 2e-3);
  const double a = sol.slice_average(20), b = sol.slice_average(21);
  EXPECT_NEAR(sol.averaged_at(0.5 * (g.xc[20] + g.xc[21])), 0.5 * (a + b), 1e-14);
  EXPECT_EQ(sol.averaged_at(0.3), 1.0);
  EXPECT_GT(sol.slice_average(31), 1.0);
  const auto [ratio, where] = sol.max_growth_ratio();
  EXPECT_GT(ratio, 0.0);
  EXPECT_LE(std::abs(where), 24.0);
}

TEST(Dirichlet, WarningsAndErrors) {
  const auto skew = build_rtorus_generator(32, 16, 24.0);
  EXPECT_FALSE(solve_dirichlet(skew, -1, 1, 1e-3).warnings.empty());
  const auto g = build_rtorus_generator(32, 16, 24.0, Scheme::Upwind);
  const auto w = solve_dirichlet(g, -1, 1, 1e-3, 5e-4).warnings;
  EXPECT_TRUE(std::any_of(w.begin(), w.end(), [](const std::string& s) { return s.find("admissible") != std::string::npos; }));
  EXPECT_THROW(solve_dirichlet(g, 0.1, 0.2, 1e-3), UsageError);
  EXPECT_THROW(solve_dirichlet(g, -1, 1, -1.0), UsageError);
  EXPECT_THROW(solve_dirichlet(g, -1, 1, 5.0), SolveError);
}

TEST(Dirichlet, CrossValidationRejectsMismatchedRates) {
  const auto g = build_rtorus_generator(32, 16, 24.0, Scheme::Upwind);
  const auto a = solve_dirichlet(g, -1, 1, 1e-3);
  GrowthProfile mc;
  mc.theta = 2e-3;
  EXPECT_THROW(crossvalidate(a, a, mc), UsageError);
  mc.theta = 1e-3;
  mc.points.push_back({6.0, a.averaged_at(6.0) + 0.01, 0.004});
  const auto cv = crossvalidate(a, a, mc);
  EXPECT_TRUE(cv.pass);
  mc.points[0].std_error = 0.001;
  EXPECT_FALSE(crossvalidate(a, a, mc).pass);
}

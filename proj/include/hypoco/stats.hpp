#pragma once

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "hypoco/errors.hpp"

namespace hypoco {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

/// Sample mean and standard error (n - 1 denominator), summed in index order.
inline MeanEstimate mean_and_error(std::span<const double> xs) {
  if (xs.empty()) throw UsageError("mean_and_error: empty sample");
  CompensatedSum s;
  for (double x : xs) s.add(x);
  const double n = static_cast<double>(xs.size());
  const double mean = s.value() / n;
  CompensatedSum ss;
  for (double x : xs) ss.add((x - mean) * (x - mean));
  const double var = xs.size() > 1 ? ss.value() / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n), xs.size()};
}

/// One-sided Clopper–Pearson upper limit: the p with P(Bin(n, p) <= k) = 1 - level.
inline double clopper_pearson_upper(std::size_t successes, std::size_t trials, double level) {
  if (trials == 0) throw UsageError("clopper_pearson_upper: zero trials");
  if (successes > trials) throw UsageError("clopper_pearson_upper: successes > trials");
  if (!(level > 0.0 && level < 1.0)) throw UsageError("clopper_pearson_upper: level must lie in (0,1)");
  if (successes == trials) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(successes + 1),
                                static_cast<double>(trials - successes), level);
}

/// One-sided Clopper–Pearson lower limit at the same level.
inline double clopper_pearson_lower(std::size_t successes, std::size_t trials, double level) {
  if (trials == 0) throw UsageError("clopper_pearson_lower: zero trials");
  if (successes > trials) throw UsageError("clopper_pearson_lower: successes > trials");
  if (successes == 0) return 0.0;
  return boost::math::ibeta_inv(static_cast<double>(successes),
                                static_cast<double>(trials - successes + 1), 1.0 - level);
}

/// Two-sample Kolmogorov–Smirnov-style statistic of `sorted` against a CDF.
template <class Cdf>
double ks_statistic(std::span<const double> sorted, Cdf&& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic critical value of the one-sample KS statistic at significance `alpha`.
inline double ks_critical(std::size_t n, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

}  // namespace hypoco

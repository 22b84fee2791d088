#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace cusplab {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// 1.96 * standard error of the slope
  double half_width = 0.0;
};

/// Least squares of ln(error) on ln(eps). Needs >= 3 points, all positive.
RateFit fit_rate(std::span<const double> epsilons, std::span<const double> mean_abs_errors);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b| over the pooled
/// sample. Throws DomainError on an empty sample.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// One-sample statistic sup |F_a - cdf|.
double ks_statistic_cdf(std::span<const double> a, const std::function<double(double)>& cdf);

struct MomentComparison {
  double mean_a = 0.0;
  double mean_b = 0.0;
  /// sqrt(var_a / n_a + var_b / n_b) of the |x|^p values
  double pooled_se = 0.0;
  /// mean_a - mean_b > 2 pooled_se
  bool significant = false;
};

/// Empirical E|x|^p of both samples and whether a exceeds b by > 2 SE.
MomentComparison moment_compare(std::span<const double> a, std::span<const double> b, double p);

double mean(std::span<const double> x);
/// Unbiased sample variance (0 for fewer than two values).
double variance(std::span<const double> x);
double median(std::span<const double> x);
/// Pearson correlation; 0 when either sample is constant.
double correlation(std::span<const double> x, std::span<const double> y);
double normal_cdf(double x, double mean = 0.0, double sd = 1.0);

}  // namespace cusplab

#include "cusplab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cusplab/errors.hpp"

namespace cusplab {

namespace {

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

RateFit fit_rate(std::span<const double> epsilons, std::span<const double> mean_abs_errors) {
  detail::require(epsilons.size() == mean_abs_errors.size(),
                  "rate fit needs one error per epsilon");
  detail::require(epsilons.size() >= 3, "rate fit needs at least three points");
  const std::size_t n = epsilons.size();
  std::vector<double> x(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    detail::require(std::isfinite(epsilons[i]) && epsilons[i] > 0.0 &&
                        std::isfinite(mean_abs_errors[i]) && mean_abs_errors[i] > 0.0,
                    "rate fit inputs must be positive and finite");
    x[i] = std::log(epsilons[i]);
    y[i] = std::log(mean_abs_errors[i]);
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  detail::require(sxx > 0.0, "rate fit needs at least two distinct epsilons");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    sse += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.half_width = 1.96 * std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  return fit;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  detail::require(!a.empty() && !b.empty(), "KS statistic needs two non-empty samples");
  detail::require(all_finite(a) && all_finite(b), "KS statistic needs finite samples");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  // Step through the pooled order statistics; ties advance both samples.
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_statistic_cdf(std::span<const double> a, const std::function<double(double)>& cdf) {
  detail::require(!a.empty(), "KS statistic needs a non-empty sample");
  detail::require(all_finite(a), "KS statistic needs finite samples");
  std::vector<double> s(a.begin(), a.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

MomentComparison moment_compare(std::span<const double> a, std::span<const double> b, double p) {
  detail::require(std::isfinite(p) && p > 0.0, "moment order p must be positive");
  detail::require(!a.empty() && !b.empty(), "moment comparison needs non-empty samples");
  auto powers = [p](std::span<const double> x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::pow(std::abs(x[i]), p);
    return out;
  };
  const auto pa = powers(a);
  const auto pb = powers(b);
  MomentComparison m;
  m.mean_a = mean(pa);
  m.mean_b = mean(pb);
  m.pooled_se = std::sqrt(variance(pa) / static_cast<double>(pa.size()) +
                          variance(pb) / static_cast<double>(pb.size()));
  m.significant = m.mean_a - m.mean_b > 2.0 * m.pooled_se;
  return m;
}

double mean(std::span<const double> x) {
  detail::require(!x.empty(), "mean of an empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double median(std::span<const double> x) {
  detail::require(!x.empty(), "median of an empty sample");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  return n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

double correlation(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size() && !x.empty(), "correlation needs equal-length samples");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

}  // namespace cusplab

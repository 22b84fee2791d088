#pragma once

#include <Eigen/Core>
#include <limits>
#include <span>

namespace cusplab::detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using ConstArrayMap = Eigen::Map<const Eigen::ArrayXd>;
using ArrayMap = Eigen::Map<Eigen::ArrayXd>;

inline ConstArrayMap as_array(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}
inline ArrayMap as_array(std::span<double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

/// out_i = ln|t_i - theta|; -inf where t_i == theta.
inline void log_distance(double theta, std::span<const double> times, std::span<double> out) {
  as_array(out) = (as_array(times) - theta).abs().log();
}

/// out_i = scale * exp(kappa * log_dist_i), with an exact 0 where log_dist_i = -inf.
/// The vectorized exp saturates near 1e-308 instead of reaching 0, hence the select.
inline void scaled_power_from_log(double scale, double kappa, std::span<const double> log_dist,
                                  std::span<double> out) {
  const auto l = as_array(log_dist);
  as_array(out) = (l == kNegInf).select(0.0, scale * (kappa * l).exp());
}

/// out_i += scale * exp(kappa * log_dist_i)
inline void add_scaled_power_from_log(double scale, double kappa, std::span<const double> log_dist,
                                      std::span<double> out) {
  const auto l = as_array(log_dist);
  as_array(out) += (l == kNegInf).select(0.0, scale * (kappa * l).exp());
}

}  // namespace cusplab::detail

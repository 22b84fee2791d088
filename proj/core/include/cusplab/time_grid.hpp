#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cusplab {

/// Uniform grid t_i = i T / n, i = 0..n, on [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const { return horizon_; }
  std::size_t steps() const { return steps_; }
  double dt() const { return dt_; }

  double node(std::size_t i) const { return nodes_[i]; }
  /// All n+1 nodes.
  std::span<const double> nodes() const { return nodes_; }
  /// Left endpoints t_0..t_{n-1}, the Ito evaluation points of the increments.
  std::span<const double> left_nodes() const { return {nodes_.data(), steps_}; }

 private:
  double horizon_;
  std::size_t steps_;
  double dt_;
  std::vector<double> nodes_;
};

}  // namespace cusplab

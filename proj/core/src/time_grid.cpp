#include "cusplab/time_grid.hpp"

#include <cmath>
#include <string>

#include "cusplab/errors.hpp"

namespace cusplab {

TimeGrid::TimeGrid(double horizon, std::size_t steps)
    : horizon_(horizon), steps_(steps), dt_(horizon / static_cast<double>(steps)) {
  detail::require(std::isfinite(horizon) && horizon > 0.0,
                  "time grid horizon must be positive, got " + std::to_string(horizon));
  detail::require(steps >= 2, "time grid needs at least 2 steps, got " + std::to_string(steps));
  nodes_.resize(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    nodes_[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
  }
  nodes_.back() = horizon;
}

}  // namespace cusplab

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cusplab/random.hpp"
#include "cusplab/signal_models.hpp"
#include "cusplab/time_grid.hpp"

namespace cusplab {

enum class NoiseMode {
  kGaussian,
  /// dX_i = S(theta0, t_{i-1}) dt exactly; used by noiseless checks.
  kZeroNoise,
};

/// Discretized realization of dX_t = S(theta0, t) dt + eps dW_t with X_0 = 0.
/// Only the n increments are stored.
struct ObservationPath {
  TimeGrid grid;
  std::vector<double> increments;
  double epsilon = 1.0;
  double theta_true = 0.0;
  std::uint64_t seed = 0;
  NoiseMode noise = NoiseMode::kGaussian;

  /// X_0 = 0, X_1, ..., X_n.
  std::vector<double> cumulative() const;
};

/// Left-endpoint Euler-Maruyama step, exact for a deterministic drift:
///   dX_i = S(theta0, t_{i-1}) dt + eps sqrt(dt) Z_i.
/// Requires theta0 strictly inside the parameter set, eps in (0, 1] and the
/// grid horizon equal to the signal horizon.
ObservationPath simulate_path(const SignalModel& signal, double theta0, double epsilon,
                              const TimeGrid& grid, Rng& rng,
                              NoiseMode noise = NoiseMode::kGaussian, std::uint64_t seed = 0);

/// i.i.d. N(0, dt) Wiener increments.
std::vector<double> simulate_wiener(const TimeGrid& grid, Rng& rng);

/// dt^{kappa + 1/2} / eps: the drift discretization error relative to the
/// noise level. Values above kDiscretizationWarnRatio deserve a warning.
double discretization_ratio(double dt, double kappa, double epsilon);
inline constexpr double kDiscretizationWarnRatio = 0.25;

/// CSV with header "t,X" and one row per grid node; creates missing parent
/// directories.
void write_path_csv(const ObservationPath& path, const std::filesystem::path& file);

}  // namespace cusplab

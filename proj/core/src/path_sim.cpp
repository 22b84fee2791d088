#include "cusplab/path_sim.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "cusplab/errors.hpp"

namespace cusplab {

std::vector<double> ObservationPath::cumulative() const {
  std::vector<double> x(increments.size() + 1, 0.0);
  for (std::size_t i = 0; i < increments.size(); ++i) x[i + 1] = x[i] + increments[i];
  return x;
}

ObservationPath simulate_path(const SignalModel& signal, double theta0, double epsilon,
                              const TimeGrid& grid, Rng& rng, NoiseMode noise,
                              std::uint64_t seed) {
  const ThetaBounds bounds = signal.theta_bounds();
  detail::require(theta0 > bounds.lower && theta0 < bounds.upper,
                  "theta0 must lie strictly inside the parameter set");
  detail::require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon <= 1.0,
                  "noise level epsilon must lie in (0, 1]");
  detail::require(std::abs(grid.horizon() - signal.horizon()) <= 1e-12 * signal.horizon(),
                  "time grid and signal horizons differ");

  const std::size_t n = grid.steps();
  ObservationPath path{grid, std::vector<double>(n), epsilon, theta0, seed, noise};
  signal.eval_into(theta0, grid.left_nodes(), path.increments);
  const double dt = grid.dt();
  for (double& dx : path.increments) dx *= dt;

  if (noise == NoiseMode::kGaussian) {
    std::normal_distribution<double> normal;
    const double scale = epsilon * std::sqrt(dt);
    for (double& dx : path.increments) dx += scale * normal(rng);
  }
  return path;
}

std::vector<double> simulate_wiener(const TimeGrid& grid, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(grid.dt()));
  std::vector<double> dw(grid.steps());
  for (double& w : dw) w = normal(rng);
  return dw;
}

double discretization_ratio(double dt, double kappa, double epsilon) {
  return std::pow(dt, kappa + 0.5) / epsilon;
}

void write_path_csv(const ObservationPath& path, const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw DomainError("cannot open path file " + file.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "t,X\n";
  const auto x = path.cumulative();
  for (std::size_t i = 0; i < x.size(); ++i) out << path.grid.node(i) << ',' << x[i] << '\n';
}

}  // namespace cusplab

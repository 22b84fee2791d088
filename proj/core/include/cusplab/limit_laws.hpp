#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cusplab/fbm.hpp"
#include "cusplab/random.hpp"

namespace cusplab {

/// H = kappa + 1/2
double hurst_index(double kappa);

/// Gamma^2 = a^2 int (|v - 1|^kappa - |v|^kappa)^2 dv over the real line.
/// Adaptive quadrature on |v - 1/2| <= window plus a two-term tail expansion.
double gamma_squared(double a, double kappa, double window = 50.0);

/// int_0^x s^{2 kappa} ln^2 s ds in closed form.
double log_square_moment(double x, double kappa);

/// I(kappa) = a^2 int_0^T |t - rho|^{2 kappa} ln^2 |t - rho| dt, closed form.
double fisher_info_kappa(double a, double rho, double horizon, double kappa);

struct LimitConstants {
  double gamma_sq = 0.0;
  double fisher_kappa = 0.0;
  std::optional<double> curvature;
};

/// Truncation of the limit processes to [-U, U] with U = multiplier * scale
/// (or an explicit window) and du = U / half_nodes.
struct WindowConfig {
  double multiplier = 30.0;
  std::optional<double> window;
  std::size_t half_nodes = 2000;
  FbmMethod method = FbmMethod::kCholesky;

  double resolve(double scale) const;
};

/// Edge flag threshold as a fraction of U.
inline constexpr double kEdgeFraction = 0.9;

struct LimitLawSample {
  /// argmax of Z (cusp case)
  double xi_hat = 0.0;
  /// int u Z / int Z (cusp case)
  double xi_tilde = 0.0;
  /// argmax of the misspecified limit process
  double zeta_hat = 0.0;
  double window = 0.0;
  double step = 0.0;
  std::uint64_t seed = 0;
  bool edge_flag = false;
};

/// Gamma^{-1/H}: the scale of xi_hat.
double xi_scale(double gamma_sq, double hurst);

/// r = (2 Gamma_bar / gamma)^{1/(2 - H)}: the scale of zeta_hat.
double zeta_scale(double noise_scale, double curvature, double hurst);

/// xi_hat and xi_tilde of ln Z(u) = Gamma W(u) - Gamma^2 |u|^{2H} / 2 on the
/// path grid. Ties go to the smaller u.
LimitLawSample xi_from_path(const FbmPath& path, double gamma_sq);

/// zeta_hat of ln Z(u) = noise_scale W(u) - curvature u^2 / 4 on the path grid.
LimitLawSample zeta_from_path(const FbmPath& path, double noise_scale, double curvature);

LimitLawSample sample_xi(double gamma_sq, double hurst, const WindowConfig& window, Rng& rng);

/// The noise coefficient of the misspecified limit is Gamma_bar; callers pass
/// sqrt(gamma_squared(a, kappa)) unless overridden.
LimitLawSample sample_zeta(double noise_scale, double curvature, double hurst,
                           const WindowConfig& window, Rng& rng);

/// Delta / I with Delta ~ N(0, I): the argmax of v Delta - v^2 I / 2.
double sample_kappa_limit(double fisher, Rng& rng);

/// Independent samples, stream i seeded by derive_seed(master_seed, i).
std::vector<LimitLawSample> sample_xi_batch(double gamma_sq, double hurst,
                                            const WindowConfig& window, std::uint64_t master_seed,
                                            std::size_t count, unsigned threads = 1);
std::vector<LimitLawSample> sample_zeta_batch(double noise_scale, double curvature, double hurst,
                                              const WindowConfig& window,
                                              std::uint64_t master_seed, std::size_t count,
                                              unsigned threads = 1);

}  // namespace cusplab

#include "cusplab/limit_laws.hpp"

#include <cmath>
#include <random>
#include <string>

#include "cusplab/errors.hpp"
#include "cusplab/parallel.hpp"
#include "cusplab/quadrature.hpp"

namespace cusplab {
namespace {

void check_kappa(double kappa) {
  detail::require(std::isfinite(kappa) && kappa > 0.0 && kappa < 0.5,
                  "kappa must lie strictly inside (0, 1/2), got " + std::to_string(kappa));
}

void check_positive(double value, const char* what) {
  detail::require(std::isfinite(value) && value > 0.0,
                  std::string(what) + " must be positive, got " + std::to_string(value));
}

}  // namespace

double hurst_index(double kappa) { return kappa + 0.5; }

double gamma_squared(double a, double kappa, double window) {
  check_positive(a, "amplitude a");
  check_kappa(kappa);
  detail::require(std::isfinite(window) && window >= 10.0,
                  "Gamma^2 quadrature window must be at least 10");

  auto f = [kappa](double v) {
    const double d = std::pow(std::abs(v - 1.0), kappa) - std::pow(std::abs(v), kappa);
    return d * d;
  };
  QuadratureOptions options;
  options.rel_tol = 1e-13;
  options.abs_tol = 1e-16;

  // The integrand is symmetric about v = 1/2; integrate the right half.
  double half = -integrate_singular_at(f, 1.0, 0.5, options).value;
  half += integrate_singular_at(f, 1.0, 2.0, options).value;
  const double upper = window + 0.5;
  for (double lo = 2.0; lo < upper; lo *= 2.0) {
    half += integrate(f, lo, std::min(2.0 * lo, upper), options).value;
  }

  // With w = v - 1/2 the integrand is k^2 w^{2k-2} (1 + c / w^2 + O(w^-4)).
  const double k2 = kappa * kappa;
  const double c = (kappa - 1.0) * (kappa - 2.0) / 12.0;
  const double tail = k2 * (std::pow(window, 2.0 * kappa - 1.0) / (1.0 - 2.0 * kappa) +
                            c * std::pow(window, 2.0 * kappa - 3.0) / (3.0 - 2.0 * kappa));
  return a * a * 2.0 * (half + tail);
}

double log_square_moment(double x, double kappa) {
  detail::require(std::isfinite(x) && x >= 0.0, "upper limit must be non-negative");
  detail::require(std::isfinite(kappa) && kappa > -0.5, "kappa must exceed -1/2");
  if (x == 0.0) return 0.0;
  const double p = 2.0 * kappa + 1.0;
  const double l = std::log(x);
  return std::pow(x, p) * (l * l / p - 2.0 * l / (p * p) + 2.0 / (p * p * p));
}

double fisher_info_kappa(double a, double rho, double horizon, double kappa) {
  check_positive(a, "amplitude a");
  check_positive(horizon, "horizon T");
  detail::require(std::isfinite(rho) && rho > 0.0 && rho < horizon,
                  "rho must lie strictly inside (0, T), got " + std::to_string(rho));
  check_positive(kappa, "kappa");
  return a * a * (log_square_moment(rho, kappa) + log_square_moment(horizon - rho, kappa));
}

double WindowConfig::resolve(double scale) const {
  const double u = window ? *window : multiplier * scale;
  detail::require(std::isfinite(u) && u > 0.0, "limit-law window must be positive");
  detail::require(half_nodes >= 1, "limit-law window needs at least one node per side");
  return u;
}

double xi_scale(double gamma_sq, double hurst) {
  check_positive(gamma_sq, "Gamma^2");
  return std::pow(gamma_sq, -0.5 / hurst);
}

double zeta_scale(double noise_scale, double curvature, double hurst) {
  check_positive(noise_scale, "noise coefficient");
  check_positive(curvature, "curvature gamma");
  return std::pow(2.0 * noise_scale / curvature, 1.0 / (2.0 - hurst));
}

namespace {

std::size_t first_argmax(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

bool near_edge(double x, double window) { return std::abs(x) > kEdgeFraction * window; }

}  // namespace

LimitLawSample xi_from_path(const FbmPath& path, double gamma_sq) {
  check_positive(gamma_sq, "Gamma^2");
  const double gamma = std::sqrt(gamma_sq);
  const double two_h = 2.0 * path.hurst;
  const std::size_t m = path.u.size();
  std::vector<double> log_z(m);
  for (std::size_t i = 0; i < m; ++i) {
    log_z[i] = gamma * path.values[i] - 0.5 * gamma_sq * std::pow(std::abs(path.u[i]), two_h);
  }
  const std::size_t best = first_argmax(log_z);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double w = std::exp(log_z[i] - log_z[best]) * ((i == 0 || i + 1 == m) ? 0.5 : 1.0);
    num += w * path.u[i];
    den += w;
  }
  LimitLawSample sample;
  sample.xi_hat = path.u[best];
  sample.xi_tilde = num / den;
  sample.window = path.window;
  sample.step = path.step;
  sample.edge_flag = near_edge(sample.xi_hat, path.window) || near_edge(sample.xi_tilde, path.window);
  return sample;
}

LimitLawSample zeta_from_path(const FbmPath& path, double noise_scale, double curvature) {
  check_positive(noise_scale, "noise coefficient");
  check_positive(curvature, "curvature gamma");
  const std::size_t m = path.u.size();
  std::vector<double> log_z(m);
  for (std::size_t i = 0; i < m; ++i) {
    log_z[i] = noise_scale * path.values[i] - 0.25 * curvature * path.u[i] * path.u[i];
  }
  LimitLawSample sample;
  sample.zeta_hat = path.u[first_argmax(log_z)];
  sample.window = path.window;
  sample.step = path.step;
  sample.edge_flag = near_edge(sample.zeta_hat, path.window);
  return sample;
}

LimitLawSample sample_xi(double gamma_sq, double hurst, const WindowConfig& window, Rng& rng) {
  const double u = window.resolve(xi_scale(gamma_sq, hurst));
  const double du = u / static_cast<double>(window.half_nodes);
  const auto sampler = shared_fbm_sampler(hurst, window.half_nodes, du, window.method);
  return xi_from_path(sampler->sample(rng), gamma_sq);
}

LimitLawSample sample_zeta(double noise_scale, double curvature, double hurst,
                           const WindowConfig& window, Rng& rng) {
  const double u = window.resolve(zeta_scale(noise_scale, curvature, hurst));
  const double du = u / static_cast<double>(window.half_nodes);
  const auto sampler = shared_fbm_sampler(hurst, window.half_nodes, du, window.method);
  return zeta_from_path(sampler->sample(rng), noise_scale, curvature);
}

double sample_kappa_limit(double fisher, Rng& rng) {
  check_positive(fisher, "Fisher information");
  std::normal_distribution<double> normal(0.0, std::sqrt(fisher));
  return normal(rng) / fisher;
}

std::vector<LimitLawSample> sample_xi_batch(double gamma_sq, double hurst,
                                            const WindowConfig& window, std::uint64_t master_seed,
                                            std::size_t count, unsigned threads) {
  std::vector<LimitLawSample> out(count);
  // Build the shared factor once before fanning out.
  const double u = window.resolve(xi_scale(gamma_sq, hurst));
  shared_fbm_sampler(hurst, window.half_nodes, u / static_cast<double>(window.half_nodes),
                     window.method);
  parallel_for(count, threads, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(master_seed, i);
    Rng rng(seed);
    out[i] = sample_xi(gamma_sq, hurst, window, rng);
    out[i].seed = seed;
  });
  return out;
}

std::vector<LimitLawSample> sample_zeta_batch(double noise_scale, double curvature, double hurst,
                                              const WindowConfig& window,
                                              std::uint64_t master_seed, std::size_t count,
                                              unsigned threads) {
  std::vector<LimitLawSample> out(count);
  const double u = window.resolve(zeta_scale(noise_scale, curvature, hurst));
  shared_fbm_sampler(hurst, window.half_nodes, u / static_cast<double>(window.half_nodes),
                     window.method);
  parallel_for(count, threads, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(master_seed, i);
    Rng rng(seed);
    out[i] = sample_zeta(noise_scale, curvature, hurst, window, rng);
    out[i].seed = seed;
  });
  return out;
}

}  // namespace cusplab

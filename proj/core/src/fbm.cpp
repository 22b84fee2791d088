#include "cusplab/fbm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <random>
#include <tuple>
#include <unsupported/Eigen/FFT>

#include "cusplab/errors.hpp"

namespace cusplab {

double fbm_covariance(double hurst, double u, double v) {
  const double two_h = 2.0 * hurst;
  return 0.5 * (std::pow(std::abs(u), two_h) + std::pow(std::abs(v), two_h) -
                std::pow(std::abs(u - v), two_h));
}

struct FbmSampler::Factor {
  // Cholesky: lower factor of the covariance of the non-centre nodes.
  Eigen::MatrixXd lower;
  // Circulant: sqrt(eigenvalue / (2N)) of the embedded fGn covariance.
  std::vector<double> spectrum_root;
  mutable Eigen::FFT<double> fft;
};

namespace {

Eigen::MatrixXd cholesky_factor(double hurst, const std::vector<double>& grid,
                                std::size_t half_nodes) {
  const auto d = static_cast<Eigen::Index>(2 * half_nodes);
  std::vector<double> nodes;
  nodes.reserve(2 * half_nodes);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i != half_nodes) nodes.push_back(grid[i]);
  }
  Eigen::MatrixXd cov(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = j; i < d; ++i) {
      cov(i, j) = fbm_covariance(hurst, nodes[i], nodes[j]);
    }
  }
  Eigen::MatrixXd work = cov;
  Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(work);
  if (llt.info() != Eigen::Success) {
    // one retry with a diagonal jitter
    work = cov;
    work.diagonal().array() += 1e-12 * cov.diagonal().maxCoeff();
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> retry(work);
    if (retry.info() != Eigen::Success) {
      throw NumericalError("fBm covariance is not numerically positive definite (H=" +
                           std::to_string(hurst) + ", nodes=" + std::to_string(d) + ")");
    }
  }
  return work;
}

std::vector<double> circulant_root(double hurst, std::size_t increments, double step,
                                   Eigen::FFT<double>& fft) {
  const std::size_t n = increments;
  const double two_h = 2.0 * hurst;
  const double scale = 0.5 * std::pow(step, two_h);
  auto autocov = [&](double k) {
    return scale * (std::pow(std::abs(k + 1.0), two_h) - 2.0 * std::pow(std::abs(k), two_h) +
                    std::pow(std::abs(k - 1.0), two_h));
  };
  std::vector<std::complex<double>> row(2 * n);
  for (std::size_t k = 0; k <= n; ++k) row[k] = autocov(static_cast<double>(k));
  for (std::size_t k = n + 1; k < 2 * n; ++k) row[k] = autocov(static_cast<double>(2 * n - k));
  std::vector<std::complex<double>> eig;
  fft.fwd(eig, row);
  double largest = 0.0;
  for (const auto& e : eig) largest = std::max(largest, e.real());
  std::vector<double> root(2 * n);
  for (std::size_t k = 0; k < 2 * n; ++k) {
    const double lambda = eig[k].real();
    if (lambda < -1e-10 * largest) {
      throw NumericalError("circulant embedding has a negative eigenvalue (H=" +
                           std::to_string(hurst) + ")");
    }
    root[k] = std::sqrt(std::max(lambda, 0.0) / static_cast<double>(2 * n));
  }
  return root;
}

}  // namespace

FbmSampler::FbmSampler(double hurst, std::size_t half_nodes, double step, FbmMethod method)
    : hurst_(hurst), half_nodes_(half_nodes), step_(step), method_(method) {
  detail::require(std::isfinite(hurst) && hurst > 0.0 && hurst < 1.0,
                  "Hurst index must lie in (0, 1), got " + std::to_string(hurst));
  detail::require(half_nodes >= 1, "fBm grid needs at least one node per side");
  detail::require(std::isfinite(step) && step > 0.0, "fBm grid step must be positive");
  if (method == FbmMethod::kCholesky) {
    detail::require(2 * half_nodes + 1 <= kMaxCholeskyNodes,
                    "Cholesky fBm route supports at most " + std::to_string(kMaxCholeskyNodes) +
                        " nodes; use the circulant method for larger grids");
  }
  grid_.resize(2 * half_nodes + 1);
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    grid_[i] = (static_cast<double>(i) - static_cast<double>(half_nodes)) * step;
  }
  factor_ = std::make_unique<Factor>();
  if (method == FbmMethod::kCholesky) {
    factor_->lower = cholesky_factor(hurst, grid_, half_nodes);
  } else {
    factor_->spectrum_root = circulant_root(hurst, 2 * half_nodes, step, factor_->fft);
  }
}

FbmSampler::~FbmSampler() = default;
FbmSampler::FbmSampler(FbmSampler&&) noexcept = default;
FbmSampler& FbmSampler::operator=(FbmSampler&&) noexcept = default;

void FbmSampler::sample_into(Rng& rng, std::span<double> out) const {
  detail::require(out.size() == grid_.size(), "fBm output span has the wrong length");
  std::normal_distribution<double> normal;
  const std::size_t m = half_nodes_;
  if (method_ == FbmMethod::kCholesky) {
    const auto d = factor_->lower.rows();
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < d; ++i) z[i] = normal(rng);
    const Eigen::VectorXd x = factor_->lower.triangularView<Eigen::Lower>() * z;
    for (std::size_t i = 0; i < m; ++i) out[i] = x[static_cast<Eigen::Index>(i)];
    out[m] = 0.0;
    for (std::size_t i = m + 1; i < out.size(); ++i) out[i] = x[static_cast<Eigen::Index>(i - 1)];
    return;
  }
  // Davies-Harte: real part of FFT(root * complex white noise) is fGn.
  const std::size_t size = factor_->spectrum_root.size();
  std::vector<std::complex<double>> noise(size);
  for (std::size_t k = 0; k < size; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    noise[k] = factor_->spectrum_root[k] * std::complex<double>(re, im);
  }
  std::vector<std::complex<double>> spectrum;
  factor_->fft.fwd(spectrum, noise);
  // B(0) = 0, B(k du) = sum of the first k increments; W(u_i) = B(i du) - B(M du).
  const std::size_t n = 2 * m;
  std::vector<double> level(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) level[k + 1] = level[k] + spectrum[k].real();
  const double anchor = level[m];
  for (std::size_t i = 0; i <= n; ++i) out[i] = level[i] - anchor;
  out[m] = 0.0;
}

FbmPath FbmSampler::sample(Rng& rng) const {
  FbmPath path;
  path.hurst = hurst_;
  path.step = step_;
  path.window = step_ * static_cast<double>(half_nodes_);
  path.u = grid_;
  path.values.resize(grid_.size());
  sample_into(rng, path.values);
  return path;
}

std::shared_ptr<const FbmSampler> shared_fbm_sampler(double hurst, std::size_t half_nodes,
                                                     double step, FbmMethod method) {
  using Key = std::tuple<double, std::size_t, double, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const FbmSampler>> cache;
  const Key key{hurst, half_nodes, step, static_cast<int>(method)};
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto sampler = std::make_shared<const FbmSampler>(hurst, half_nodes, step, method);
  // Dense factors are large; keep only a handful alive.
  if (cache.size() >= 4) cache.erase(cache.begin());
  cache.emplace(key, sampler);
  return sampler;
}

FbmPath sample_fbm(double hurst, double window, double step, Rng& rng, FbmMethod method) {
  detail::require(std::isfinite(window) && window > 0.0, "fBm window U must be positive");
  detail::require(std::isfinite(step) && step > 0.0 && step <= window,
                  "fBm step du must lie in (0, U]");
  const double ratio = window / step;
  const auto half = static_cast<std::size_t>(std::llround(ratio));
  detail::require(std::abs(ratio - static_cast<double>(half)) <= 1e-9 * ratio,
                  "fBm window U must be a multiple of the step du");
  return shared_fbm_sampler(hurst, half, step, method)->sample(rng);
}

}  // namespace cusplab

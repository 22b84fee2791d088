#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "cusplab/random.hpp"

namespace cusplab {

/// 1/2 (|u|^{2H} + |v|^{2H} - |u - v|^{2H})
double fbm_covariance(double hurst, double u, double v);

/// Double-sided fBm sampled on u_i = (i - M) du, i = 0..2M, with W(0) = 0.
struct FbmPath {
  double hurst = 0.75;
  double window = 0.0;  // U = M du
  double step = 0.0;    // du
  std::vector<double> u;
  std::vector<double> values;

  std::size_t centre() const { return u.size() / 2; }
};

enum class FbmMethod {
  /// Dense Cholesky factor of the covariance of the 2M non-centre nodes.
  kCholesky,
  /// Davies-Harte circulant embedding of fractional Gaussian noise on
  /// [-U, U]; W(u) = B(U + u) - B(U).
  kCirculant,
};

/// Gaussian sampler for one (H, M, du) grid. Construction does the
/// factorization; sample() is const and safe to call from several threads
/// with distinct generators.
class FbmSampler {
 public:
  /// Cholesky route requires 2M + 1 <= kMaxCholeskyNodes.
  FbmSampler(double hurst, std::size_t half_nodes, double step,
             FbmMethod method = FbmMethod::kCholesky);
  ~FbmSampler();
  FbmSampler(FbmSampler&&) noexcept;
  FbmSampler& operator=(FbmSampler&&) noexcept;

  static constexpr std::size_t kMaxCholeskyNodes = 4097;

  double hurst() const { return hurst_; }
  double step() const { return step_; }
  std::size_t half_nodes() const { return half_nodes_; }
  FbmMethod method() const { return method_; }
  const std::vector<double>& grid() const { return grid_; }

  FbmPath sample(Rng& rng) const;
  /// Writes the 2M + 1 path values into `out`.
  void sample_into(Rng& rng, std::span<double> out) const;

 private:
  struct Factor;

  double hurst_;
  std::size_t half_nodes_;
  double step_;
  FbmMethod method_;
  std::vector<double> grid_;
  std::unique_ptr<Factor> factor_;
};

/// Process-wide cache of samplers keyed by (H, M, du, method); factors are
/// built once and then shared read-only.
std::shared_ptr<const FbmSampler> shared_fbm_sampler(double hurst, std::size_t half_nodes,
                                                     double step,
                                                     FbmMethod method = FbmMethod::kCholesky);

/// One path on [-U, U] with step du (U must be a multiple of du up to
/// rounding), using the cached sampler.
FbmPath sample_fbm(double hurst, double window, double step, Rng& rng,
                   FbmMethod method = FbmMethod::kCholesky);

}  // namespace cusplab

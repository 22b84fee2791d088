#include "cusplab/estimators.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <unsupported/Eigen/FFT>

#include "cusplab/errors.hpp"
#include "kernels.hpp"

namespace cusplab {
namespace {

constexpr std::size_t kMaxCoarseNodes = 20001;
constexpr std::size_t kMaxLatticeSubdivisions = 16;

std::size_t next_pow2(std::size_t x) {
  std::size_t p = 1;
  while (p < x) p <<= 1;
  return p;
}

void check_epsilon(double epsilon) {
  detail::require(std::isfinite(epsilon) && epsilon > 0.0,
                  "noise level eps must be positive, got " + std::to_string(epsilon));
}

// Contrast values sorted by theta, with duplicates (within tol) dropped.
struct NodeSet {
  std::vector<double> theta;
  std::vector<double> values;

  void sort_unique(double tol) {
    std::vector<std::size_t> order(theta.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return theta[a] < theta[b]; });
    std::vector<double> t;
    std::vector<double> v;
    t.reserve(order.size());
    v.reserve(order.size());
    for (std::size_t i : order) {
      if (!t.empty() && theta[i] - t.back() <= tol) continue;
      t.push_back(theta[i]);
      v.push_back(values[i]);
    }
    theta = std::move(t);
    values = std::move(v);
  }

  bool contains(double x, double tol) const {
    auto it = std::lower_bound(theta.begin(), theta.end(), x - tol);
    return it != theta.end() && *it <= x + tol;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Likelihood evaluation

LikelihoodField field_from_contrast(std::vector<double> theta, std::span<const double> contrast,
                                    double epsilon) {
  check_epsilon(epsilon);
  detail::require(theta.size() == contrast.size() && !theta.empty(),
                  "likelihood field needs matching, non-empty theta and value arrays");
  for (double r : contrast) {
    if (std::isnan(r)) throw NumericalError("likelihood contrast contains NaN");
  }
  const std::size_t best = first_argmax(contrast);
  const double top = contrast[best];
  LikelihoodField field;
  field.theta = std::move(theta);
  field.log_values.resize(contrast.size());
  for (std::size_t i = 0; i < contrast.size(); ++i) {
    const double diff = contrast[i] - top;
    field.log_values[i] = diff == 0.0 ? 0.0 : diff / epsilon / epsilon;
  }
  field.shift = top / epsilon / epsilon;
  return field;
}

struct LikelihoodEvaluator::Spectrum {
  std::size_t size = 0;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> increments_hat;
};

LikelihoodEvaluator::LikelihoodEvaluator(const ObservationPath& path, const SignalModel& signal)
    : path_(path), signal_(signal) {
  check_epsilon(path.epsilon);
  const double t = path.grid.horizon();
  if (std::abs(t - signal.horizon()) > 1e-12 * t) {
    std::ostringstream msg;
    msg << "path horizon " << t << " does not match signal horizon " << signal.horizon();
    throw DomainError(msg.str());
  }
  detail::require(path.increments.size() == path.grid.steps(),
                  "path increments do not match its grid");
  buffer_.resize(path.grid.steps());
}

LikelihoodEvaluator::~LikelihoodEvaluator() = default;

double LikelihoodEvaluator::contrast(double theta) const {
  ++evaluations_;
  signal_.eval_into(theta, path_.grid.left_nodes(), buffer_);
  const auto s = detail::as_array(std::span<const double>(buffer_));
  const auto dx = detail::as_array(std::span<const double>(path_.increments));
  return (s * dx).sum() - 0.5 * path_.grid.dt() * s.square().sum();
}

double LikelihoodEvaluator::log_likelihood(double theta) const {
  const double eps = path_.epsilon;
  return contrast(theta) / eps / eps;
}

void LikelihoodEvaluator::lattice(std::size_t subdivisions, double lo, double hi,
                                  std::vector<double>& theta, std::vector<double>& values) const {
  detail::require(has_lattice(), std::string(signal_.family()) +
                                     ": lattice likelihood needs a translation-invariant signal");
  detail::require(subdivisions >= 1, "lattice needs at least one subdivision");
  const std::size_t n = path_.grid.steps();
  const double dt = path_.grid.dt();

  if (!spectrum_) {
    spectrum_ = std::make_unique<Spectrum>();
    spectrum_->size = next_pow2(3 * n);
    spectrum_->fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    std::vector<double> padded(spectrum_->size, 0.0);
    std::copy(path_.increments.begin(), path_.increments.end(), padded.begin());
    spectrum_->fft.fwd(spectrum_->increments_hat, padded);
  }
  const std::size_t size = spectrum_->size;

  // With theta = t_k + delta, S(theta, t_i) = f((i - k) dt - delta) = g_{i-k}.
  // The correlation c_k = sum_i dX_{i+1} g_{i-k} is a linear convolution of
  // the increments with K_m = g_{n-1-m}, read off at index n - 1 + k.
  std::vector<double> offsets(2 * n);
  std::vector<double> kernel(size, 0.0);
  std::vector<double> squares_prefix(2 * n + 1);
  std::vector<std::complex<double>> product;
  std::vector<double> correlation;

  theta.clear();
  values.clear();
  for (std::size_t j = 0; j < subdivisions; ++j) {
    const double delta = dt * static_cast<double>(j) / static_cast<double>(subdivisions);
    const double k_lo_real = std::ceil((lo - delta) / dt - 1e-9);
    const double k_hi_real = std::floor((hi - delta) / dt + 1e-9);
    const auto k_lo = static_cast<std::ptrdiff_t>(std::max(0.0, k_lo_real));
    const auto k_hi = static_cast<std::ptrdiff_t>(std::min(static_cast<double>(n), k_hi_real));
    if (k_lo > k_hi) continue;

    for (std::size_t m = 0; m < 2 * n; ++m) {
      const double l = static_cast<double>(n) - 1.0 - static_cast<double>(m);
      offsets[m] = l * dt - delta;
    }
    std::fill(kernel.begin(), kernel.end(), 0.0);
    signal_.profile_into(offsets, std::span<double>(kernel.data(), 2 * n));

    // g_l = kernel[n - 1 - l]; prefix sums of g_l^2 in order l = -n .. n-1.
    long double acc = 0.0L;
    squares_prefix[0] = 0.0;
    for (std::size_t idx = 0; idx < 2 * n; ++idx) {
      const double g = kernel[2 * n - 1 - idx];
      acc += static_cast<long double>(g) * g;
      squares_prefix[idx + 1] = static_cast<double>(acc);
    }

    spectrum_->fft.fwd(product, kernel);
    for (std::size_t b = 0; b < product.size(); ++b) product[b] *= spectrum_->increments_hat[b];
    spectrum_->fft.inv(correlation, product, static_cast<Eigen::Index>(size));

    for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      const double c = correlation[n - 1 + uk];
      // sum over l = -k .. n-1-k of g_l^2
      const double q = squares_prefix[2 * n - uk] - squares_prefix[n - uk];
      theta.push_back(path_.grid.node(uk) + delta);
      values.push_back(c - 0.5 * dt * q);
    }
  }
  evaluations_ += theta.size();

  NodeSet nodes{std::move(theta), std::move(values)};
  nodes.sort_unique(0.0);
  theta = std::move(nodes.theta);
  values = std::move(nodes.values);
}

LikelihoodField log_likelihood_field(const ObservationPath& path, const SignalModel& signal,
                                     std::span<const double> theta_grid) {
  detail::require(!theta_grid.empty(), "empty theta grid");
  const ThetaBounds bounds = signal.theta_bounds();
  for (double theta : theta_grid) {
    if (!std::isfinite(theta) || !bounds.contains(theta)) {
      std::ostringstream msg;
      msg << "theta node " << theta << " outside [" << bounds.lower << ", " << bounds.upper << "]";
      throw DomainError(msg.str());
    }
  }
  LikelihoodEvaluator evaluator(path, signal);
  std::vector<double> contrast(theta_grid.size());
  for (std::size_t i = 0; i < theta_grid.size(); ++i) contrast[i] = evaluator.contrast(theta_grid[i]);
  return field_from_contrast({theta_grid.begin(), theta_grid.end()}, contrast, path.epsilon);
}

// ---------------------------------------------------------------------------
// Search

std::size_t first_argmax(std::span<const double> values) {
  detail::require(!values.empty(), "argmax of an empty sequence");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

SearchResult nested_grid_search(const std::function<double(double)>& f, double lower,
                                double upper, double rate, double initial_step,
                                const SearchConfig& config, std::vector<double> seed_theta,
                                std::vector<double> seed_values) {
  detail::require(std::isfinite(lower) && std::isfinite(upper) && lower < upper,
                  "search interval must satisfy lower < upper");
  detail::require(std::isfinite(initial_step) && initial_step > 0.0,
                  "search step must be positive");
  detail::require(config.shrink > 1.0, "search shrink factor must exceed 1");
  detail::require(config.candidates >= 1, "search needs at least one candidate");
  detail::require(seed_theta.size() == seed_values.size(), "seed nodes and values differ in size");

  SearchResult result;
  NodeSet nodes;
  double step = initial_step;
  if (seed_theta.empty()) {
    const double width = upper - lower;
    const auto count = static_cast<std::size_t>(
        std::min<double>(static_cast<double>(kMaxCoarseNodes), std::ceil(width / step - 1e-9) + 1.0));
    const std::size_t nodes_count = std::max<std::size_t>(count, 2);
    step = width / static_cast<double>(nodes_count - 1);
    nodes.theta.resize(nodes_count);
    nodes.values.resize(nodes_count);
    for (std::size_t i = 0; i < nodes_count; ++i) {
      const double theta = i + 1 == nodes_count ? upper : lower + static_cast<double>(i) * step;
      nodes.theta[i] = theta;
      nodes.values[i] = f(theta);
    }
    result.evaluations += nodes_count;
  } else {
    nodes.theta = std::move(seed_theta);
    nodes.values = std::move(seed_values);
    nodes.sort_unique(0.0);
  }

  const double target = rate * config.final_rate_fraction;
  const auto half_width =
      static_cast<std::ptrdiff_t>(std::ceil(config.window_steps * config.shrink - 1e-9));
  while (step > target && result.levels < config.max_levels) {
    const std::size_t count = nodes.theta.size();
    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < count; ++i) {
      const double v = nodes.values[i];
      const bool left_ok = i == 0 || v >= nodes.values[i - 1];
      const bool right_ok = i + 1 == count || v >= nodes.values[i + 1];
      if (left_ok && right_ok) peaks.push_back(i);
    }
    // Highest first; equal values keep the smaller theta first.
    std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) {
      return nodes.values[a] > nodes.values[b];
    });
    if (peaks.size() > config.candidates) peaks.resize(config.candidates);

    const double next = step / config.shrink;
    const double tol = 1e-6 * next;
    std::vector<double> fresh;
    for (std::size_t p : peaks) {
      const double centre = nodes.theta[p];
      for (std::ptrdiff_t j = -half_width; j <= half_width; ++j) {
        const double theta = centre + static_cast<double>(j) * next;
        if (theta < lower - tol || theta > upper + tol) continue;
        fresh.push_back(std::clamp(theta, lower, upper));
      }
    }
    std::sort(fresh.begin(), fresh.end());
    NodeSet added;
    for (double theta : fresh) {
      if (!added.theta.empty() && theta - added.theta.back() <= tol) continue;
      if (nodes.contains(theta, tol)) continue;
      added.theta.push_back(theta);
      added.values.push_back(f(theta));
    }
    result.evaluations += added.theta.size();
    nodes.theta.insert(nodes.theta.end(), added.theta.begin(), added.theta.end());
    nodes.values.insert(nodes.values.end(), added.values.begin(), added.values.end());
    nodes.sort_unique(0.0);
    step = next;
    ++result.levels;
  }

  const std::size_t best = first_argmax(nodes.values);
  result.argmax = nodes.theta[best];
  result.value = nodes.values[best];
  result.final_step = step;
  result.theta = std::move(nodes.theta);
  result.values = std::move(nodes.values);
  return result;
}

// ---------------------------------------------------------------------------
// Priors and posterior mean

Prior Prior::uniform(ThetaBounds bounds) { return Prior(Kind::kUniform, 0.0, 1.0, bounds); }

Prior Prior::truncated_normal(double mean, double sd, ThetaBounds bounds) {
  detail::require(std::isfinite(mean), "prior mean must be finite");
  detail::require(std::isfinite(sd) && sd > 0.0, "prior sd must be positive");
  return Prior(Kind::kTruncatedNormal, mean, sd, bounds);
}

double Prior::density(double theta) const {
  if (!bounds_.contains(theta)) return 0.0;
  if (kind_ == Kind::kUniform) return 1.0;
  const double z = (theta - mean_) / sd_;
  return std::exp(-0.5 * z * z);
}

std::string Prior::name() const {
  return kind_ == Kind::kUniform ? "uniform" : "truncated-normal";
}

namespace {

struct PosteriorSummary {
  double mean = 0.0;
  double boundary_mass = 0.0;
};

PosteriorSummary posterior_summary(const LikelihoodField& field, const Prior& prior,
                                   double strip) {
  const std::size_t m = field.theta.size();
  detail::require(m == field.log_values.size() && m > 0,
                  "likelihood field needs matching, non-empty arrays");
  for (std::size_t i = 1; i < m; ++i) {
    detail::require(field.theta[i] > field.theta[i - 1], "field nodes must increase strictly");
  }
  if (m == 1) return {field.theta[0], 0.0};
  const ThetaBounds b = prior.bounds();
  const double strip_width = strip * b.width();
  double num = 0.0;
  double den = 0.0;
  double edge = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double left = i == 0 ? field.theta[0] : field.theta[i - 1];
    const double right = i + 1 == m ? field.theta[m - 1] : field.theta[i + 1];
    const double w = 0.5 * (right - left) * prior.density(field.theta[i]) *
                     std::exp(field.log_values[i]);
    num += w * field.theta[i];
    den += w;
    if (field.theta[i] - b.lower <= strip_width || b.upper - field.theta[i] <= strip_width) {
      edge += w;
    }
  }
  if (!std::isfinite(num) || !std::isfinite(den) || !(den > 0.0)) {
    std::ostringstream msg;
    msg << "posterior is numerically degenerate: denominator=" << den << ", numerator=" << num
        << ", nodes=" << m << ", shift=" << field.shift;
    throw NumericalError(msg.str());
  }
  return {num / den, edge / den};
}

}  // namespace

double posterior_mean(const LikelihoodField& field, const Prior& prior) {
  return posterior_summary(field, prior, 0.0).mean;
}

// ---------------------------------------------------------------------------
// Location estimators

double cusp_rate(double epsilon, double kappa) {
  return std::pow(epsilon, 1.0 / (kappa + 0.5));
}

double misspec_rate(double epsilon, double kappa) {
  return std::pow(epsilon, 2.0 / (3.0 - 2.0 * kappa));
}

double normalize_error(double diff, double rate) {
  // exact hits stay 0 when the rate underflows at vanishing noise
  return diff == 0.0 ? 0.0 : diff / rate;
}

double search_rate(const SignalModel& signal, double epsilon) {
  const auto kappa = signal.cusp_exponent();
  return kappa ? cusp_rate(epsilon, *kappa) : epsilon;
}

namespace {

std::size_t lattice_subdivisions(double dt, double spacing) {
  if (!(spacing > 0.0)) return kMaxLatticeSubdivisions;
  const double m = std::ceil(dt / spacing);
  return static_cast<std::size_t>(std::clamp(m, 1.0, static_cast<double>(kMaxLatticeSubdivisions)));
}

// Lattice nodes plus the two bounds, evaluated directly.
NodeSet lattice_nodes(const LikelihoodEvaluator& evaluator, ThetaBounds bounds,
                      std::size_t subdivisions) {
  NodeSet nodes;
  evaluator.lattice(subdivisions, bounds.lower, bounds.upper, nodes.theta, nodes.values);
  const double dt = evaluator.path().grid.dt();
  const double tol = 1e-9 * dt;
  for (double edge : {bounds.lower, bounds.upper}) {
    if (!nodes.contains(edge, tol)) {
      nodes.theta.push_back(edge);
      nodes.values.push_back(evaluator.contrast(edge));
    }
  }
  nodes.sort_unique(tol);
  return nodes;
}

struct LocationSearch {
  SearchResult search;
  double initial_step = 0.0;
};

LocationSearch search_location(const LikelihoodEvaluator& evaluator, ThetaBounds bounds,
                               double rate, const SearchConfig& config,
                               std::size_t lattice_subdiv = 0) {
  auto f = [&](double theta) { return evaluator.contrast(theta); };
  const double width = bounds.width();
  double coarse = width / static_cast<double>(std::max<std::size_t>(config.coarse_nodes, 2) - 1);
  if (rate > 0.0) coarse = std::min(coarse, config.coarse_rate_fraction * rate);
  coarse = std::max(coarse, width / static_cast<double>(kMaxCoarseNodes - 1));

  LocationSearch out;
  if (config.use_lattice && evaluator.has_lattice()) {
    const double dt = evaluator.path().grid.dt();
    const std::size_t m =
        lattice_subdiv > 0 ? lattice_subdiv : lattice_subdivisions(dt, coarse);
    NodeSet seed = lattice_nodes(evaluator, bounds, m);
    out.initial_step = dt / static_cast<double>(m);
    out.search = nested_grid_search(f, bounds.lower, bounds.upper, rate, out.initial_step, config,
                                    std::move(seed.theta), std::move(seed.values));
    out.search.evaluations = evaluator.evaluations();
    return out;
  }
  out.initial_step = coarse;
  out.search = nested_grid_search(f, bounds.lower, bounds.upper, rate, coarse, config);
  out.search.evaluations = evaluator.evaluations();
  return out;
}

EstimationResult finish_location(const std::string& name, const SearchResult& search,
                                 ThetaBounds bounds, double target, double rate) {
  EstimationResult r;
  r.estimator = name;
  r.estimate = search.argmax;
  r.target = target;
  r.rate = rate;
  r.normalized_error = normalize_error(r.estimate - target, rate);
  r.diagnostics.grid_step = search.final_step;
  r.diagnostics.refinement_levels = search.levels;
  r.diagnostics.evaluations = search.evaluations;
  const double reach = std::max(search.final_step, 1e-12 * bounds.width());
  r.diagnostics.boundary_hit =
      r.estimate - bounds.lower <= reach || bounds.upper - r.estimate <= reach;
  return r;
}

}  // namespace

EstimationResult mle(const ObservationPath& path, const SignalModel& signal,
                     const SearchConfig& config, std::optional<double> target) {
  LikelihoodEvaluator evaluator(path, signal);
  const double rate = search_rate(signal, path.epsilon);
  const auto found = search_location(evaluator, signal.theta_bounds(), rate, config);
  return finish_location("mle", found.search, signal.theta_bounds(),
                         target.value_or(path.theta_true), rate);
}

MleBayesResult mle_and_bayes(const ObservationPath& path, const SignalModel& signal,
                             const Prior& prior, const BayesConfig& config,
                             std::optional<double> target) {
  LikelihoodEvaluator evaluator(path, signal);
  const ThetaBounds bounds = signal.theta_bounds();
  const double rate = search_rate(signal, path.epsilon);
  const double eps = path.epsilon;
  const double truth = target.value_or(path.theta_true);
  const double spacing = config.rate_fraction * rate;

  MleBayesResult out;
  NodeSet posterior_nodes;
  if (config.search.use_lattice && evaluator.has_lattice()) {
    // Uniform lattice over the whole parameter set at spacing <= spacing.
    const double dt = path.grid.dt();
    std::size_t m = lattice_subdivisions(dt, spacing);
    m = std::min(m, config.max_subdivisions);
    posterior_nodes = lattice_nodes(evaluator, bounds, m);
    auto f = [&](double theta) { return evaluator.contrast(theta); };
    SearchResult search =
        nested_grid_search(f, bounds.lower, bounds.upper, rate, dt / static_cast<double>(m),
                           config.search, posterior_nodes.theta, posterior_nodes.values);
    search.evaluations = evaluator.evaluations();
    out.mle = finish_location("mle", search, bounds, truth, rate);
  } else {
    const auto found = search_location(evaluator, bounds, rate, config.search);
    out.mle = finish_location("mle", found.search, bounds, truth, rate);
    posterior_nodes.theta = found.search.theta;
    posterior_nodes.values = found.search.values;

    // Fine panel around the MLE until ln V has dropped by drop_nats.
    const double h = std::max(spacing, bounds.width() / static_cast<double>(kMaxCoarseNodes - 1));
    const double top = found.search.value;
    const double floor_value = top - config.drop_nats * eps * eps;
    for (double direction : {-1.0, 1.0}) {
      for (std::size_t j = 1; j < kMaxCoarseNodes; ++j) {
        const double theta = out.mle.estimate + direction * static_cast<double>(j) * h;
        if (theta < bounds.lower || theta > bounds.upper) break;
        const double v = evaluator.contrast(theta);
        posterior_nodes.theta.push_back(theta);
        posterior_nodes.values.push_back(v);
        if (v < floor_value) break;
      }
    }
    posterior_nodes.sort_unique(1e-9 * h);
  }

  const LikelihoodField field =
      field_from_contrast(posterior_nodes.theta, posterior_nodes.values, eps);
  const PosteriorSummary summary = posterior_summary(field, prior, config.boundary_strip);
  EstimationResult& b = out.bayes;
  b.estimator = "bayes";
  b.estimate = summary.mean;
  b.target = truth;
  b.rate = rate;
  b.normalized_error = normalize_error(b.estimate - truth, rate);
  b.diagnostics.grid_step = field.theta.size() > 1 ? field.theta[1] - field.theta[0] : 0.0;
  b.diagnostics.evaluations = evaluator.evaluations();
  b.diagnostics.boundary_mass = summary.boundary_mass;
  b.diagnostics.boundary_hit = summary.boundary_mass > 0.5;
  return out;
}

EstimationResult bayes(const ObservationPath& path, const SignalModel& signal, const Prior& prior,
                       const BayesConfig& config, std::optional<double> target) {
  return mle_and_bayes(path, signal, prior, config, target).bayes;
}

EstimationResult pseudo_mle(const ObservationPath& path, const CuspSignal& theoretical,
                            double theta_hat, const SearchConfig& config) {
  LikelihoodEvaluator evaluator(path, theoretical);
  const double rate = misspec_rate(path.epsilon, theoretical.kappa());
  const auto found = search_location(evaluator, theoretical.theta_bounds(), rate, config);
  return finish_location("pseudo-mle", found.search, theoretical.theta_bounds(), theta_hat, rate);
}

// ---------------------------------------------------------------------------
// kappa and joint estimation

namespace {

void check_kappa_bounds(KappaBounds bounds) {
  detail::require(std::isfinite(bounds.lower) && std::isfinite(bounds.upper) &&
                      bounds.lower > 0.0 && bounds.lower < bounds.upper,
                  "kappa bounds must satisfy 0 < k < K");
}

// Contrast in kappa for a |t - rho|^kappa with the log-distances cached.
class KappaContrast {
 public:
  KappaContrast(const ObservationPath& path, double a, double rho)
      : path_(path), a_(a), log_dist_(path.grid.steps()), power_(path.grid.steps()) {
    detail::log_distance(rho, path.grid.left_nodes(), log_dist_);
  }

  double operator()(double kappa) {
    detail::scaled_power_from_log(a_, kappa, log_dist_, power_);
    const auto s = detail::as_array(std::span<const double>(power_));
    const auto dx = detail::as_array(std::span<const double>(path_.increments));
    ++evaluations_;
    return (s * dx).sum() - 0.5 * path_.grid.dt() * s.square().sum();
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  const ObservationPath& path_;
  double a_;
  std::vector<double> log_dist_;
  std::vector<double> power_;
  std::size_t evaluations_ = 0;
};

struct KappaFit {
  double estimate = 0.0;
  double value = 0.0;
  SearchResult search;
};

// Vertex of the parabola through three points, if it is a maximum inside
// [x0, x2].
std::optional<double> parabola_vertex(double x0, double f0, double x1, double f1, double x2,
                                      double f2) {
  const double d01 = (f1 - f0) / (x1 - x0);
  const double d12 = (f2 - f1) / (x2 - x1);
  const double curvature = (d12 - d01) / (x2 - x0);
  if (!(curvature < 0.0)) return std::nullopt;
  const double vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
  if (!(vertex >= x0 && vertex <= x2)) return std::nullopt;
  return vertex;
}

KappaFit fit_kappa(const ObservationPath& path, double a, double rho, KappaBounds bounds,
                   const KappaSearchConfig& config) {
  KappaContrast contrast(path, a, rho);
  auto f = [&](double kappa) { return contrast(kappa); };
  SearchConfig search;
  search.candidates = config.candidates;
  search.shrink = config.shrink;
  search.final_rate_fraction = config.final_rate_fraction;
  search.window_steps = 1.0;
  const double step =
      (bounds.upper - bounds.lower) /
      static_cast<double>(std::max<std::size_t>(config.coarse_nodes, 2) - 1);
  KappaFit fit;
  fit.search = nested_grid_search(f, bounds.lower, bounds.upper, path.epsilon, step, search);
  fit.estimate = fit.search.argmax;
  fit.value = fit.search.value;
  if (config.parabolic) {
    const auto& t = fit.search.theta;
    const auto& v = fit.search.values;
    const auto it = std::lower_bound(t.begin(), t.end(), fit.estimate);
    const auto i = static_cast<std::size_t>(it - t.begin());
    if (i > 0 && i + 1 < t.size()) {
      if (auto vertex = parabola_vertex(t[i - 1], v[i - 1], t[i], v[i], t[i + 1], v[i + 1])) {
        const double value = contrast(*vertex);
        if (value >= fit.value) {
          fit.estimate = *vertex;
          fit.value = value;
        }
      }
    }
  }
  fit.search.evaluations = contrast.evaluations();
  return fit;
}

}  // namespace

EstimationResult kappa_mle(const ObservationPath& path, double a, double rho, KappaBounds bounds,
                           double kappa_target, const KappaSearchConfig& config) {
  check_epsilon(path.epsilon);
  detail::require(std::isfinite(a) && a > 0.0, "amplitude a must be positive");
  detail::require(std::isfinite(rho) && rho > 0.0 && rho < path.grid.horizon(),
                  "rho must lie strictly inside (0, T)");
  check_kappa_bounds(bounds);
  const KappaFit fit = fit_kappa(path, a, rho, bounds, config);
  EstimationResult r;
  r.estimator = "kappa-mle";
  r.estimate = fit.estimate;
  r.target = kappa_target;
  r.rate = path.epsilon;
  r.normalized_error = normalize_error(r.estimate - kappa_target, r.rate);
  r.diagnostics.grid_step = fit.search.final_step;
  r.diagnostics.refinement_levels = fit.search.levels;
  r.diagnostics.evaluations = fit.search.evaluations;
  const double reach = std::max(fit.search.final_step, 1e-12);
  r.diagnostics.boundary_hit =
      r.estimate - bounds.lower <= reach || bounds.upper - r.estimate <= reach;
  return r;
}

JointEstimationResult joint_mle(const ObservationPath& path, double a, ThetaBounds rho_bounds,
                                KappaBounds kappa_bounds, double rho_target, double kappa_target,
                                const JointSearchConfig& config) {
  check_epsilon(path.epsilon);
  check_kappa_bounds(kappa_bounds);
  detail::require(kappa_bounds.upper < 0.5,
                  "joint estimation needs kappa bounds inside (0, 1/2)");
  const double horizon = path.grid.horizon();
  const double eps = path.epsilon;
  std::size_t evaluations = 0;

  // Coarse kappa sweep, each with the full rho lattice.
  const std::size_t nk = std::max<std::size_t>(config.kappa_coarse_nodes, 2);
  double best_value = -std::numeric_limits<double>::infinity();
  double rho = rho_bounds.lower;
  double kappa = kappa_bounds.lower;
  for (std::size_t j = 0; j < nk; ++j) {
    const double k = kappa_bounds.lower + (kappa_bounds.upper - kappa_bounds.lower) *
                                              static_cast<double>(j) / static_cast<double>(nk - 1);
    const CuspSignal signal(a, k, horizon, rho_bounds);
    LikelihoodEvaluator evaluator(path, signal);
    std::vector<double> theta;
    std::vector<double> values;
    evaluator.lattice(1, rho_bounds.lower, rho_bounds.upper, theta, values);
    evaluations += evaluator.evaluations();
    if (theta.empty()) continue;
    const std::size_t b = first_argmax(values);
    if (values[b] > best_value) {
      best_value = values[b];
      rho = theta[b];
      kappa = k;
    }
  }

  // Coordinate ascent: rho by nested search at fixed kappa, then kappa at fixed rho.
  SearchResult rho_search;
  KappaFit kappa_fit;
  for (int cycle = 0; cycle < std::max(config.cycles, 1); ++cycle) {
    const CuspSignal signal(a, kappa, horizon, rho_bounds);
    LikelihoodEvaluator evaluator(path, signal);
    rho_search =
        search_location(evaluator, rho_bounds, cusp_rate(eps, kappa), config.rho).search;
    evaluations += rho_search.evaluations;
    const double new_rho = rho_search.argmax;
    kappa_fit = fit_kappa(path, a, new_rho, kappa_bounds, config.kappa);
    evaluations += kappa_fit.search.evaluations;
    const bool settled = new_rho == rho && kappa_fit.estimate == kappa;
    rho = new_rho;
    kappa = kappa_fit.estimate;
    if (settled) break;
  }

  JointEstimationResult out;
  out.rho = finish_location("joint-rho", rho_search, rho_bounds, rho_target,
                            cusp_rate(eps, kappa_target));
  out.rho.estimate = rho;
  out.rho.normalized_error = normalize_error(rho - rho_target, out.rho.rate);
  out.rho.diagnostics.evaluations = evaluations;

  EstimationResult& k = out.kappa;
  k.estimator = "joint-kappa";
  k.estimate = kappa;
  k.target = kappa_target;
  k.rate = eps;
  k.normalized_error = normalize_error(kappa - kappa_target, eps);
  k.diagnostics.grid_step = kappa_fit.search.final_step;
  k.diagnostics.refinement_levels = kappa_fit.search.levels;
  k.diagnostics.evaluations = evaluations;
  const double reach = std::max(kappa_fit.search.final_step, 1e-12);
  k.diagnostics.boundary_hit =
      kappa - kappa_bounds.lower <= reach || kappa_bounds.upper - kappa <= reach;
  return out;
}

}  // namespace cusplab

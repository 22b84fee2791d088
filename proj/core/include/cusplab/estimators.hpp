#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cusplab/path_sim.hpp"
#include "cusplab/signal_models.hpp"

namespace cusplab {

/// ln V(theta, X) on a set of theta nodes, shifted so that the maximum is 0.
struct LikelihoodField {
  std::vector<double> theta;
  std::vector<double> log_values;
  /// The subtracted maximum of ln V (may be +inf for vanishing eps).
  double shift = 0.0;
};

/// Builds a field from contrast values R(theta) = ln V * eps^2. The shift is
/// applied to R before dividing by eps^2, so tiny eps gives a point mass
/// instead of NaN.
LikelihoodField field_from_contrast(std::vector<double> theta, std::span<const double> contrast,
                                    double epsilon);

/// Evaluates the contrast
///   R(theta) = sum_i S(theta, t_{i-1}) dX_i - dt/2 sum_i S(theta, t_{i-1})^2,
/// so that ln V = R / eps^2. One evaluator per path; not thread-safe.
class LikelihoodEvaluator {
 public:
  /// Throws DomainError when the path and signal horizons differ.
  LikelihoodEvaluator(const ObservationPath& path, const SignalModel& signal);
  ~LikelihoodEvaluator();
  LikelihoodEvaluator(const LikelihoodEvaluator&) = delete;
  LikelihoodEvaluator& operator=(const LikelihoodEvaluator&) = delete;

  double contrast(double theta) const;
  double log_likelihood(double theta) const;
  double epsilon() const { return path_.epsilon; }
  const SignalModel& signal() const { return signal_; }
  const ObservationPath& path() const { return path_; }

  /// Lattice route: available for translation-invariant signals.
  bool has_lattice() const { return signal_.translation_invariant(); }

  /// Contrast at every theta = t_k + j dt / subdivisions inside [lo, hi],
  /// computed by FFT correlation (one transform pair per offset j). Output is
  /// sorted by theta.
  void lattice(std::size_t subdivisions, double lo, double hi, std::vector<double>& theta,
               std::vector<double>& values) const;

  std::size_t evaluations() const { return evaluations_; }

 private:
  struct Spectrum;

  const ObservationPath& path_;
  const SignalModel& signal_;
  mutable std::vector<double> buffer_;
  mutable std::unique_ptr<Spectrum> spectrum_;
  mutable std::size_t evaluations_ = 0;
};

/// ln V on the given nodes (inside the closed parameter set), max-shifted.
LikelihoodField log_likelihood_field(const ObservationPath& path, const SignalModel& signal,
                                     std::span<const double> theta_grid);

struct SearchConfig {
  /// Coarse uniform grid over [alpha, beta] for signals without a lattice.
  std::size_t coarse_nodes = 201;
  /// The coarse step is further capped at coarse_rate_fraction * rate.
  double coarse_rate_fraction = 1.0;
  /// Local maxima refined per level.
  std::size_t candidates = 3;
  /// Half-width of each refinement window in units of the current step.
  double window_steps = 1.0;
  double shrink = 10.0;
  /// Stop once the step is below final_rate_fraction * rate.
  double final_rate_fraction = 1.0 / 50.0;
  int max_levels = 12;
  /// Seed the search with the FFT lattice when the signal allows it.
  bool use_lattice = true;
};

struct SearchResult {
  double argmax = 0.0;
  double value = 0.0;
  double final_step = 0.0;
  int levels = 0;
  std::size_t evaluations = 0;
  /// Every evaluated node, sorted by theta.
  std::vector<double> theta;
  std::vector<double> values;
};

/// Derivative-free nested grid search of max f over [lower, upper]: starting
/// from `seed_theta` (sorted, with values) or a uniform grid of step
/// `initial_step`, the top `candidates` local maxima are refined on windows
/// of +-window_steps * step with the step shrunk by `shrink`, until the step
/// is below final_rate_fraction * rate. Equal maxima resolve to the smallest
/// theta.
SearchResult nested_grid_search(const std::function<double(double)>& f, double lower,
                                double upper, double rate, double initial_step,
                                const SearchConfig& config,
                                std::vector<double> seed_theta = {},
                                std::vector<double> seed_values = {});

/// Index of the first maximum.
std::size_t first_argmax(std::span<const double> values);

/// Prior density (unnormalized) on the parameter set.
class Prior {
 public:
  static Prior uniform(ThetaBounds bounds);
  static Prior truncated_normal(double mean, double sd, ThetaBounds bounds);

  double density(double theta) const;
  std::string name() const;
  ThetaBounds bounds() const { return bounds_; }

 private:
  enum class Kind { kUniform, kTruncatedNormal };
  Prior(Kind kind, double mean, double sd, ThetaBounds bounds)
      : kind_(kind), mean_(mean), sd_(sd), bounds_(bounds) {}

  Kind kind_;
  double mean_;
  double sd_;
  ThetaBounds bounds_;
};

/// int theta p V / int p V by the trapezoid rule on the field nodes.
/// Throws NumericalError when the field carries no finite mass.
double posterior_mean(const LikelihoodField& field, const Prior& prior);

struct BayesConfig {
  /// Node spacing near the mode as a fraction of the rate.
  double rate_fraction = 1.0 / 10.0;
  /// Fine panel extends until ln V has dropped by this much (no-lattice route).
  double drop_nats = 30.0;
  std::size_t max_subdivisions = 64;
  /// Width of the boundary strip (fraction of beta - alpha) for boundary_mass.
  double boundary_strip = 0.01;
  SearchConfig search;
};

struct EstimationDiagnostics {
  double grid_step = 0.0;
  int refinement_levels = 0;
  std::size_t evaluations = 0;
  bool boundary_hit = false;
  /// Posterior mass near the bounds (Bayes only).
  double boundary_mass = 0.0;
};

struct EstimationResult {
  std::string estimator;
  double estimate = 0.0;
  double target = 0.0;
  double rate = 1.0;
  /// (estimate - target) / rate
  double normalized_error = 0.0;
  EstimationDiagnostics diagnostics;
};

struct JointEstimationResult {
  EstimationResult rho;
  EstimationResult kappa;
};

/// eps^{1/H}, H = kappa + 1/2
double cusp_rate(double epsilon, double kappa);
/// eps^{2/(3 - 2 kappa)}
double misspec_rate(double epsilon, double kappa);
/// diff / rate, but exactly 0 for diff == 0 (also when the rate underflows).
double normalize_error(double diff, double rate);
/// Rate used to size the location search: eps^{1/H} for cusp families, eps
/// for regular signals.
double search_rate(const SignalModel& signal, double epsilon);

/// MLE of the location. The target defaults to the path's theta_true.
EstimationResult mle(const ObservationPath& path, const SignalModel& signal,
                     const SearchConfig& config = {}, std::optional<double> target = {});

/// Bayes estimator under quadratic loss.
EstimationResult bayes(const ObservationPath& path, const SignalModel& signal, const Prior& prior,
                       const BayesConfig& config = {}, std::optional<double> target = {});

/// MLE and Bayes from one likelihood evaluation pass (shares the lattice).
struct MleBayesResult {
  EstimationResult mle;
  EstimationResult bayes;
};
MleBayesResult mle_and_bayes(const ObservationPath& path, const SignalModel& signal,
                             const Prior& prior, const BayesConfig& config = {},
                             std::optional<double> target = {});

/// Pseudo-MLE with the pure-cusp theoretical model; the error is normalized
/// against the KL minimizer theta_hat at rate eps^{2/(3 - 2 kappa)}.
EstimationResult pseudo_mle(const ObservationPath& path, const CuspSignal& theoretical,
                            double theta_hat, const SearchConfig& config = {});

struct KappaBounds {
  double lower = 0.05;
  double upper = 0.45;
};

struct KappaSearchConfig {
  std::size_t coarse_nodes = 41;
  std::size_t candidates = 2;
  double shrink = 10.0;
  double final_rate_fraction = 1.0 / 50.0;
  /// Final three-point parabolic step on the log-field.
  bool parabolic = true;
};

/// MLE of kappa in a |t - rho|^kappa with a and rho known; rate eps.
EstimationResult kappa_mle(const ObservationPath& path, double a, double rho, KappaBounds bounds,
                           double kappa_target, const KappaSearchConfig& config = {});

struct JointSearchConfig {
  std::size_t kappa_coarse_nodes = 17;
  int cycles = 3;
  SearchConfig rho;
  KappaSearchConfig kappa;
};

/// Joint MLE of (rho, kappa) with a known.
JointEstimationResult joint_mle(const ObservationPath& path, double a, ThetaBounds rho_bounds,
                                KappaBounds kappa_bounds, double rho_target, double kappa_target,
                                const JointSearchConfig& config = {});

}  // namespace cusplab

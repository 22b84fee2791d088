#pragma once

#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <utility>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cusplab/experiment_config.hpp"
#include "cusplab/limit_laws.hpp"
#include "cusplab/statistics.hpp"

namespace cusplab {

struct ReplicationRecord {
  std::size_t replication = 0;
  double epsilon = 0.0;
  std::string estimator;
  double estimate = 0.0;
  double normalized_error = 0.0;
  bool boundary = false;
  bool failed = false;
  std::string failure;
};

struct EstimatorSummary {
  std::string estimator;
  std::size_t count = 0;
  std::size_t failures = 0;
  std::size_t boundary_hits = 0;
  double mean_abs_error = 0.0;
  /// standard error of mean_abs_error
  double se_abs_error = 0.0;
  double mean_sq_error = 0.0;
  double mean_abs_normalized = 0.0;
  double mean_sq_normalized = 0.0;
};

struct CellSummary {
  double epsilon = 0.0;
  double rate = 0.0;
  std::vector<EstimatorSummary> estimators;
};

struct KsResult {
  std::string estimator;
  double epsilon = 0.0;
  /// "xi_hat", "xi_tilde", "zeta_hat" or "normal"
  std::string reference;
  double statistic = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

struct MomentResult {
  std::string a;
  std::string b;
  double epsilon = 0.0;
  double p = 2.0;
  MomentComparison comparison;
};

struct RateResult {
  std::string estimator;
  double expected_slope = 0.0;
  RateFit fit;
};

struct ExperimentChecks {
  bool failures_ok = true;
  bool boundary_ok = true;
  bool monotone = true;
  /// Only evaluated where a limit-law scale is available.
  std::optional<bool> scale_ok;
  std::vector<std::string> messages;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ReplicationRecord> records;
  std::vector<CellSummary> cells;
  std::vector<RateResult> rate_fits;
  std::vector<KsResult> ks_results;
  std::vector<MomentResult> moments;
  std::vector<LimitLawSample> limit_samples;
  /// Scenario constants (Gamma^2, H, I(kappa), theta_hat, curvature, ...).
  nlohmann::json constants;
  /// Extra per-scenario statistics (variance ratios, correlations).
  nlohmann::json extras;
  ExperimentChecks checks;
  /// Estimand per estimator name.
  std::map<std::string, double> targets;

  /// Normalized errors of successful replications, ordered by replication.
  std::vector<double> normalized_errors(std::string_view estimator, double epsilon) const;
  std::vector<double> raw_errors(std::string_view estimator, double epsilon) const;
  const RateResult* rate_fit(std::string_view estimator) const;
  const KsResult* ks(std::string_view estimator, std::string_view reference) const;

  nlohmann::json to_json() const;
};

/// Gamma^2 of the limit process for cusp and multi-cusp signals (leading
/// term for the latter); nullopt for other families.
std::optional<double> limit_gamma_sq(const SignalModel& signal);

using Logger = std::function<void(std::string_view)>;

/// Runs every (eps, replication) cell: simulate, estimate, normalize by the
/// scenario's theoretical rate, then aggregate. Replication r uses the
/// stream derive_seed(seed, r) in every eps cell. Estimator failures are
/// recorded, not thrown.
ExperimentReport run_experiment(const ExperimentConfig& config, const Logger& log = {});

/// Writes the per-replication CSV and the report JSON into config.output.dir
/// (created if needed). Returns the two paths.
std::pair<std::filesystem::path, std::filesystem::path> write_report(const ExperimentReport& report);

/// Writes "replication,epsilon,estimator,estimate,normalized_error,
/// boundary_flag,failed_flag" rows.
void write_records_csv(const std::vector<ReplicationRecord>& records,
                       const std::filesystem::path& file);

// Lemma checks on the cusp likelihood.

struct LowerBoundCheck {
  /// min over theta != theta0 of Phi(theta) / |theta - theta0|^{2H}
  double mu_hat = 0.0;
  std::vector<double> theta;
  /// Phi(theta) = -2 eps^2 ln(V(theta) / V(theta0)) on a zero-noise path
  std::vector<double> phi;
};

/// Fits mu in Phi(theta) >= mu |theta - theta0|^{2H} over `nodes` theta values
/// spanning the parameter set, from the noiseless likelihood field.
LowerBoundCheck lower_bound_check(const SignalModel& signal, double theta0,
                                  std::size_t grid_steps, std::size_t nodes = 401);

struct TailBoundCheck {
  /// min over u of -ln(E Z^{1/2}(u)) / |u|^{2H}
  double c_hat = 0.0;
  std::vector<double> u;
  std::vector<double> mean_sqrt_z;
  std::vector<double> se_sqrt_z;
};

/// Monte Carlo E[Z_eps(u)^{1/2}], Z_eps(u) = V(theta0 + phi u) / V(theta0),
/// phi = eps^{1/H}, over the given u values; fits c in E Z^{1/2} <= exp(-c |u|^{2H}).
TailBoundCheck tail_bound_check(const SignalModel& signal, double theta0, double epsilon,
                                std::span<const double> u, std::size_t replications,
                                std::size_t grid_steps, std::uint64_t seed, unsigned threads = 0);

}  // namespace cusplab

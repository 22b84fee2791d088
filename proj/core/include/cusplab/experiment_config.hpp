#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "cusplab/estimators.hpp"
#include "cusplab/limit_laws.hpp"
#include "cusplab/misspec_analysis.hpp"
#include "cusplab/path_sim.hpp"

namespace cusplab {

inline constexpr int kSchemaVersion = 1;

enum class Scenario { kCuspMle, kCuspBayes, kMultiCusp, kMisspec, kKappa, kJoint };

std::string scenario_name(Scenario scenario);
/// Throws DomainError listing the valid names.
Scenario scenario_from_name(const std::string& name);

struct PriorConfig {
  std::string name = "uniform";
  double mean = 0.5;
  double sd = 0.1;
};

struct LimitLawConfig {
  std::size_t samples = 2000;
  WindowConfig window;
  /// Noise coefficient of the misspecified limit; sqrt(Gamma^2) when unset.
  std::optional<double> noise_scale;
};

struct OutputConfig {
  std::filesystem::path dir = "out";
  /// File names relative to dir.
  std::string csv = "replications.csv";
  std::string report = "report.json";
  bool dump_paths = false;
};

/// Everything a run needs; see config_from_json for the file format.
struct ExperimentConfig {
  Scenario scenario = Scenario::kCuspMle;
  /// Signal description (the theoretical cusp in the misspec scenario).
  nlohmann::json signal;
  /// Smooth real signal (misspec scenario only).
  nlohmann::json real_signal;
  /// True location (rho for kappa/joint, centre of the real signal for misspec).
  double theta0 = 0.5;
  std::vector<double> epsilons{0.05, 0.02, 0.01, 0.005};
  std::size_t replications = 500;
  std::uint64_t seed = 1;
  std::size_t grid_steps = 10000;
  NoiseMode noise = NoiseMode::kGaussian;
  unsigned threads = 0;

  SearchConfig search;
  BayesConfig bayes;
  PriorConfig prior;
  KappaBounds kappa_bounds;
  KappaSearchConfig kappa_search;
  JointSearchConfig joint;
  LimitLawConfig limit_law;
  SolveConfig misspec;
  OutputConfig output;
};

/// Parses a config object. Unknown keys, a wrong schema_version, unknown
/// scenario or signal names raise DomainError. Missing keys take defaults.
ExperimentConfig config_from_json(const nlohmann::json& spec);

/// Full effective config (every field, defaults included).
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Reads and parses a JSON file; a missing file raises DomainError naming
/// the path.
ExperimentConfig load_config(const std::filesystem::path& file);

/// Checks the invariants: eps strictly decreasing in (0, 1], N >= 1 (N >= 100
/// when a rate is fitted), grid steps >= 2, output names relative and free
/// of "..". Throws DomainError.
void validate_config(const ExperimentConfig& config);

}  // namespace cusplab

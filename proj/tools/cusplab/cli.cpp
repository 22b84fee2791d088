#include "cusplab/cli.hpp"

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

#include "cusplab/errors.hpp"
#include "cusplab/experiments.hpp"
#include "cusplab/signal_catalog.hpp"

namespace cusplab::cli {
namespace {

using nlohmann::json;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
  bool zero_noise = false;
  std::vector<double> epsilons;
  std::optional<std::size_t> replications;
  int verbosity = 0;
};

void add_common(CLI::App* sub, Overrides& o, bool needs_config = true) {
  auto* config = sub->add_option("--config", o.config, "Experiment config (JSON)");
  if (needs_config) config->required();
  sub->add_option("--seed", o.seed, "Master seed");
  sub->add_option("--out", o.out_dir, "Output directory");
  sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  sub->add_flag("--zero-noise", o.zero_noise, "Simulate noiseless paths");
  sub->add_option("--epsilon", o.epsilons, "Comma-separated noise levels")->delimiter(',');
  sub->add_option("--replications", o.replications, "Replications per noise level");
  sub->add_flag("-v,--verbose", o.verbosity, "Progress messages on stderr");
}

ExperimentConfig effective_config(const Overrides& o) {
  ExperimentConfig c = load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.out_dir) c.output.dir = *o.out_dir;
  if (o.threads) c.threads = *o.threads;
  if (o.zero_noise) c.noise = NoiseMode::kZeroNoise;
  if (!o.epsilons.empty()) c.epsilons = o.epsilons;
  if (o.replications) c.replications = *o.replications;
  return c;
}

Logger make_logger(std::ostream& err, int verbosity) {
  return [&err, verbosity](std::string_view msg) {
    // per-cell progress lines are verbose-only; warnings and check messages always show
    if (verbosity > 0 || msg.rfind("eps=", 0) != 0) err << msg << "\n";
  };
}

void write_json(const std::filesystem::path& file, const json& value) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw DomainError("cannot write " + file.string());
  out << value.dump(2) << "\n";
}

int experiment_status(const ExperimentReport& report, std::ostream& err) {
  if (!report.checks.failures_ok) {
    err << "error: more than 1% of replications failed\n";
    return kNumericalFailure;
  }
  if (!report.checks.boundary_ok) {
    err << "error: too many estimates on the parameter boundary; widen theta_bounds "
           "(or kappa bounds) in the config\n";
    return kDomainFailure;
  }
  return kOk;
}

int run_rate(const Overrides& o, std::optional<Scenario> force, std::ostream& out,
             std::ostream& err) {
  ExperimentConfig config = effective_config(o);
  if (force) config.scenario = *force;
  const ExperimentReport report = run_experiment(config, make_logger(err, o.verbosity));
  const auto [csv, report_path] = write_report(report);
  json summary = {{"csv", csv.string()}, {"report", report_path.string()}};
  const json full = report.to_json();
  summary["rate_fit"] = full["rate_fit"];
  summary["checks"] = full["checks"];
  out << summary.dump(2) << "\n";
  return experiment_status(report, err);
}

int run_simulate(const Overrides& o, std::size_t paths, std::ostream& out) {
  const ExperimentConfig config = effective_config(o);
  validate_config(config);
  const SignalPtr signal = config.scenario == Scenario::kMisspec
                               ? SignalPtr(smooth_signal_from_json(config.real_signal))
                               : signal_from_json(config.signal);
  const TimeGrid grid(signal->horizon(), config.grid_steps);
  json files = json::array();
  for (std::size_t c = 0; c < config.epsilons.size(); ++c) {
    for (std::size_t r = 0; r < paths; ++r) {
      const std::uint64_t seed = derive_seed(config.seed, r);
      Rng rng(seed);
      const ObservationPath path = simulate_path(*signal, config.theta0, config.epsilons[c], grid,
                                                 rng, config.noise, seed);
      char name[64];
      std::snprintf(name, sizeof name, "eps%zu_rep%zu.csv", c, r);
      const auto file = config.output.dir / "paths" / name;
      write_path_csv(path, file);
      files.push_back(file.string());
    }
  }
  out << json{{"paths", files}}.dump(2) << "\n";
  return kOk;
}

int run_estimate(const Overrides& o, std::size_t paths, std::ostream& out, std::ostream& err) {
  const ExperimentConfig base = effective_config(o);
  std::vector<ReplicationRecord> records;
  for (double eps : base.epsilons) {
    ExperimentConfig c = base;
    c.epsilons = {eps};
    c.replications = paths;
    c.limit_law.samples = 0;
    const ExperimentReport report = run_experiment(c, make_logger(err, o.verbosity));
    records.insert(records.end(), report.records.begin(), report.records.end());
  }
  std::filesystem::create_directories(base.output.dir);
  const auto file = base.output.dir / "estimates.csv";
  write_records_csv(records, file);
  json rows = json::array();
  bool failed = false;
  for (const auto& r : records) {
    json row = {{"replication", r.replication},
                {"epsilon", r.epsilon},
                {"estimator", r.estimator},
                {"boundary", r.boundary}};
    if (r.failed) {
      row["failure"] = r.failure;
      failed = true;
    } else {
      row["estimate"] = r.estimate;
      row["normalized_error"] = r.normalized_error;
    }
    rows.push_back(row);
  }
  out << json{{"csv", file.string()}, {"estimates", rows}}.dump(2) << "\n";
  return failed ? kNumericalFailure : kOk;
}

int run_limit_law(const Overrides& o, std::optional<std::size_t> samples, std::ostream& out,
                  std::ostream& err) {
  const ExperimentConfig config = effective_config(o);
  const std::size_t count = samples.value_or(config.limit_law.samples);
  detail::require(count >= 1, "limit-law needs at least one sample");
  const std::uint64_t seed = config.seed;
  std::vector<LimitLawSample> draws;
  json summary = {{"samples", count}, {"seed", seed}};
  const bool misspec = config.scenario == Scenario::kMisspec;
  if (misspec) {
    auto cusp = cusp_signal_from_json(config.signal);
    const auto problem =
        make_misspec_problem(cusp, smooth_signal_from_json(config.real_signal), config.theta0);
    const MisspecSolution sol = solve_theta_hat(problem, config.misspec);
    const double hurst = hurst_index(cusp->kappa());
    const double noise = config.limit_law.noise_scale.value_or(
        std::sqrt(gamma_squared(cusp->amplitude(), cusp->kappa())));
    draws = sample_zeta_batch(noise, sol.curvature_closed, hurst, config.limit_law.window, seed,
                              count, config.threads);
    summary["process"] = "zeta";
    summary["noise_scale"] = noise;
    summary["curvature"] = sol.curvature_closed;
    summary["hurst"] = hurst;
  } else {
    const SignalPtr signal = signal_from_json(config.signal);
    const auto gamma_sq = limit_gamma_sq(*signal);
    if (!gamma_sq) {
      throw DomainError("no limit process is available for signal family '" +
                        std::string(signal->family()) + "'");
    }
    const double hurst = hurst_index(require_cusp_exponent(*signal));
    draws = sample_xi_batch(*gamma_sq, hurst, config.limit_law.window, seed, count,
                            config.threads);
    summary["process"] = "xi";
    summary["gamma_sq"] = *gamma_sq;
    summary["hurst"] = hurst;
  }
  std::filesystem::create_directories(config.output.dir);
  const auto csv = config.output.dir / "limit_law.csv";
  std::ofstream file(csv);
  if (!file) throw DomainError("cannot write " + csv.string());
  file << (misspec ? "sample_id,zeta_hat,edge_flag\n" : "sample_id,xi_hat,xi_tilde,edge_flag\n");
  std::vector<double> a;
  std::vector<double> b;
  std::size_t edges = 0;
  char line[128];
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const auto& d = draws[i];
    if (misspec) {
      std::snprintf(line, sizeof line, "%zu,%.17g,%d\n", i, d.zeta_hat, d.edge_flag ? 1 : 0);
      a.push_back(d.zeta_hat);
    } else {
      std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%d\n", i, d.xi_hat, d.xi_tilde,
                    d.edge_flag ? 1 : 0);
      a.push_back(d.xi_hat);
      b.push_back(d.xi_tilde);
    }
    file << line;
    edges += d.edge_flag ? 1 : 0;
  }
  auto moments = [](const std::vector<double>& x) {
    std::vector<double> sq;
    for (double v : x) sq.push_back(v * v);
    return json{{"mean", mean(x)}, {"variance", variance(x)}, {"mean_sq", mean(sq)}};
  };
  if (misspec) {
    summary["zeta_hat"] = moments(a);
  } else {
    summary["xi_hat"] = moments(a);
    summary["xi_tilde"] = moments(b);
  }
  summary["edge_flags"] = edges;
  summary["window"] = {{"U", draws.front().window},
                       {"du", draws.front().step},
                       {"multiplier", config.limit_law.window.multiplier},
                       {"half_nodes", config.limit_law.window.half_nodes},
                       {"method", config.limit_law.window.method == FbmMethod::kCholesky
                                      ? "cholesky"
                                      : "circulant"}};
  const auto json_path = config.output.dir / "limit_law.json";
  write_json(json_path, summary);
  if (edges > 0) err << "warning: " << edges << " samples have their argmax near the window edge\n";
  out << json{{"csv", csv.string()}, {"summary", json_path.string()}}.dump(2) << "\n";
  return kOk;
}

int run_misspec(const Overrides& o, std::ostream& out) {
  const ExperimentConfig config = effective_config(o);
  detail::require(!config.real_signal.is_null(), "misspec needs a 'real_signal' in the config");
  auto cusp = cusp_signal_from_json(config.signal);
  const auto problem =
      make_misspec_problem(cusp, smooth_signal_from_json(config.real_signal), config.theta0);
  const MisspecSolution sol = solve_theta_hat(problem, config.misspec);
  const json record = {
      {"schema_version", kSchemaVersion},
      {"theta0", config.theta0},
      {"theta_hat", sol.theta_hat},
      {"min_gap", sol.min_gap},
      {"min_distance", sol.min_distance},
      {"uniqueness_certificate", sol.uniqueness_certificate},
      {"curvature_closed", sol.curvature_closed},
      {"curvature_fd", sol.curvature_fd},
      {"curvature_relative_difference",
       std::abs(sol.curvature_closed - sol.curvature_fd) / std::abs(sol.curvature_fd)},
      {"curvature_shifted_expansion", sol.curvature_shifted_expansion},
      {"rate_exponent", 2.0 / (3.0 - 2.0 * cusp->kappa())},
      {"signal", config.signal},
      {"real_signal", config.real_signal}};
  const auto file = config.output.dir / "misspec_solution.json";
  write_json(file, record);
  json printed = record;
  printed["file"] = file.string();
  out << printed.dump(2) << "\n";
  return kOk;
}

int run_constants(double kappa, double a, double rho, double horizon, std::ostream& out) {
  const double gamma_sq = gamma_squared(a, kappa);
  const double hurst = hurst_index(kappa);
  const json result = {{"kappa", kappa},
                       {"a", a},
                       {"rho", rho},
                       {"T", horizon},
                       {"hurst", hurst},
                       {"gamma_sq", gamma_sq},
                       {"xi_scale", xi_scale(gamma_sq, hurst)},
                       {"fisher_kappa", fisher_info_kappa(a, rho, horizon, kappa)}};
  out << result.dump(2) << "\n";
  return kOk;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cusp-signal estimation experiments", "cusplab"};
  app.require_subcommand(1, 1);

  Overrides o;
  std::size_t paths = 1;
  std::optional<std::size_t> samples;
  double kappa = 0.25;
  double a = 1.0;
  double rho = 0.5;
  double horizon = 1.0;

  auto* simulate = app.add_subcommand("simulate", "Write observation paths as CSV");
  add_common(simulate, o);
  simulate->add_option("--paths", paths, "Paths per noise level")->check(CLI::PositiveNumber);

  auto* estimate = app.add_subcommand("estimate", "Estimate on simulated paths");
  add_common(estimate, o);
  estimate->add_option("--paths", paths, "Paths per noise level")->check(CLI::PositiveNumber);

  auto* limit = app.add_subcommand("limit-law", "Sample the limit law of the scenario");
  add_common(limit, o);
  limit->add_option("--samples", samples, "Number of samples (config value by default)");

  auto* rate = app.add_subcommand("rate", "Run the configured Monte Carlo experiment");
  add_common(rate, o);
  auto* misspec = app.add_subcommand("misspec", "Solve the misspecified minimization problem");
  add_common(misspec, o);
  auto* kappa_cmd = app.add_subcommand("kappa", "Run the kappa-estimation experiment");
  add_common(kappa_cmd, o);
  auto* joint = app.add_subcommand("joint", "Run the joint (rho, kappa) experiment");
  add_common(joint, o);

  auto* constants = app.add_subcommand("constants", "Print Gamma^2 and I(kappa) as JSON");
  constants->add_option("--kappa", kappa, "Cusp exponent")->check(CLI::Range(0.0, 0.5));
  constants->add_option("--a", a, "Cusp amplitude");
  constants->add_option("--rho", rho, "Cusp location");
  constants->add_option("--T", horizon, "Observation horizon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kDomainFailure;
  }

  try {
    if (*simulate) return run_simulate(o, paths, out);
    if (*estimate) return run_estimate(o, paths, out, err);
    if (*limit) return run_limit_law(o, samples, out, err);
    if (*rate) return run_rate(o, std::nullopt, out, err);
    if (*misspec) return run_misspec(o, out);
    if (*kappa_cmd) return run_rate(o, Scenario::kKappa, out, err);
    if (*joint) return run_rate(o, Scenario::kJoint, out, err);
    if (*constants) return run_constants(kappa, a, rho, horizon, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kDomainFailure;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed config: " << e.what() << "\n";
    return kDomainFailure;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kDomainFailure;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"cusplab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace cusplab::cli

#include "cusplab/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "cusplab/errors.hpp"
#include "cusplab/parallel.hpp"
#include "cusplab/signal_catalog.hpp"

namespace cusplab {
namespace {

using nlohmann::json;

// Stream index of the limit-law samples; replication streams use 0..N-1.
constexpr std::uint64_t kLimitStream = 0x4C494D4954ULL;

struct Setup {
  SignalPtr data_signal;
  SignalPtr model_signal;
  std::shared_ptr<const CuspSignal> cusp;  // misspec theoretical / kappa, joint model
  double kappa = 0.25;
  double hurst = 0.75;
  double target = 0.5;
  std::optional<double> gamma_sq;
  std::optional<double> fisher;
  std::optional<MisspecSolution> misspec;
  double zeta_noise = 0.0;
  struct Estimator {
    std::string name;
    double slope;
    double target;
  };
  std::vector<Estimator> estimators;
  json constants = json::object();
};

Setup make_setup(const ExperimentConfig& config) {
  Setup s;
  const double horizon_theta0 = config.theta0;
  switch (config.scenario) {
    case Scenario::kCuspMle:
    case Scenario::kCuspBayes:
    case Scenario::kMultiCusp: {
      s.data_signal = signal_from_json(config.signal);
      if (config.scenario == Scenario::kMultiCusp) {
        detail::require(s.data_signal->family() == "multi-cusp",
                        "multi-cusp scenario needs a multi-cusp signal");
      }
      s.model_signal = s.data_signal;
      s.kappa = require_cusp_exponent(*s.data_signal);
      s.hurst = hurst_index(s.kappa);
      s.target = horizon_theta0;
      s.gamma_sq = limit_gamma_sq(*s.data_signal);
      const double slope = 1.0 / s.hurst;
      s.estimators.push_back({"mle", slope, s.target});
      if (config.scenario == Scenario::kCuspBayes) s.estimators.push_back({"bayes", slope, s.target});
      break;
    }
    case Scenario::kMisspec: {
      s.cusp = cusp_signal_from_json(config.signal);
      auto real = smooth_signal_from_json(config.real_signal);
      s.data_signal = real;
      s.model_signal = s.cusp;
      s.kappa = s.cusp->kappa();
      s.hurst = hurst_index(s.kappa);
      const MisspecProblem problem = make_misspec_problem(s.cusp, real, horizon_theta0);
      s.misspec = solve_theta_hat(problem, config.misspec);
      s.target = s.misspec->theta_hat;
      s.gamma_sq = gamma_squared(s.cusp->amplitude(), s.kappa);
      s.zeta_noise = config.limit_law.noise_scale.value_or(std::sqrt(*s.gamma_sq));
      s.estimators.push_back({"pseudo-mle", 2.0 / (3.0 - 2.0 * s.kappa), s.target});
      s.constants["theta_hat"] = s.misspec->theta_hat;
      s.constants["min_distance"] = s.misspec->min_distance;
      s.constants["uniqueness_certificate"] = s.misspec->uniqueness_certificate;
      s.constants["curvature_closed"] = s.misspec->curvature_closed;
      s.constants["curvature_fd"] = s.misspec->curvature_fd;
      s.constants["curvature_shifted_expansion"] = s.misspec->curvature_shifted_expansion;
      s.constants["zeta_noise_scale"] = s.zeta_noise;
      s.constants["zeta_scale"] =
          zeta_scale(s.zeta_noise, s.misspec->curvature_closed, s.hurst);
      break;
    }
    case Scenario::kKappa:
    case Scenario::kJoint: {
      s.cusp = cusp_signal_from_json(config.signal);
      detail::require(s.cusp->nuisance().is_zero(),
                      "kappa and joint scenarios need a pure cusp signal");
      s.data_signal = s.cusp;
      s.model_signal = s.cusp;
      s.kappa = s.cusp->kappa();
      s.hurst = hurst_index(s.kappa);
      s.target = horizon_theta0;
      s.fisher = fisher_info_kappa(s.cusp->amplitude(), horizon_theta0, s.cusp->horizon(), s.kappa);
      s.constants["fisher_kappa"] = *s.fisher;
      if (config.scenario == Scenario::kKappa) {
        s.target = s.kappa;
        s.estimators.push_back({"kappa-mle", 1.0, s.kappa});
      } else {
        s.gamma_sq = gamma_squared(s.cusp->amplitude(), s.kappa);
        s.estimators.push_back({"joint-rho", 1.0 / s.hurst, horizon_theta0});
        s.estimators.push_back({"joint-kappa", 1.0, s.kappa});
      }
      break;
    }
  }
  s.constants["kappa"] = s.kappa;
  s.constants["hurst"] = s.hurst;
  if (s.gamma_sq) s.constants["gamma_sq"] = *s.gamma_sq;
  return s;
}

Prior make_prior(const ExperimentConfig& config, ThetaBounds bounds) {
  if (config.prior.name == "truncated-normal") {
    return Prior::truncated_normal(config.prior.mean, config.prior.sd, bounds);
  }
  return Prior::uniform(bounds);
}

ReplicationRecord record_from(const EstimationResult& r, std::size_t replication, double epsilon) {
  ReplicationRecord rec;
  rec.replication = replication;
  rec.epsilon = epsilon;
  rec.estimator = r.estimator;
  rec.estimate = r.estimate;
  rec.normalized_error = r.normalized_error;
  rec.boundary = r.diagnostics.boundary_hit;
  return rec;
}

// One replication in one eps cell; failures become flagged records.
std::vector<ReplicationRecord> run_replication(const ExperimentConfig& config, const Setup& s,
                                               const TimeGrid& grid, double epsilon,
                                               std::size_t cell, std::size_t replication) {
  const std::uint64_t seed = derive_seed(config.seed, replication);
  Rng rng(seed);
  std::vector<ReplicationRecord> out;
  try {
    const ObservationPath path =
        simulate_path(*s.data_signal, config.theta0, epsilon, grid, rng, config.noise, seed);
    if (config.output.dump_paths) {
      char name[64];
      std::snprintf(name, sizeof name, "eps%zu_rep%zu.csv", cell, replication);
      write_path_csv(path, config.output.dir / "paths" / name);
    }
    switch (config.scenario) {
      case Scenario::kCuspMle:
      case Scenario::kMultiCusp:
        out.push_back(record_from(mle(path, *s.model_signal, config.search, s.target), replication,
                                  epsilon));
        break;
      case Scenario::kCuspBayes: {
        const auto both = mle_and_bayes(path, *s.model_signal,
                                        make_prior(config, s.model_signal->theta_bounds()),
                                        config.bayes, s.target);
        out.push_back(record_from(both.mle, replication, epsilon));
        out.push_back(record_from(both.bayes, replication, epsilon));
        break;
      }
      case Scenario::kMisspec:
        out.push_back(record_from(pseudo_mle(path, *s.cusp, s.target, config.search), replication,
                                  epsilon));
        break;
      case Scenario::kKappa:
        out.push_back(record_from(kappa_mle(path, s.cusp->amplitude(), config.theta0,
                                            config.kappa_bounds, s.cusp->kappa(), config.kappa_search),
                                  replication, epsilon));
        break;
      case Scenario::kJoint: {
        const auto joint = joint_mle(path, s.cusp->amplitude(), s.cusp->theta_bounds(),
                                     config.kappa_bounds, config.theta0, s.kappa, config.joint);
        out.push_back(record_from(joint.rho, replication, epsilon));
        out.push_back(record_from(joint.kappa, replication, epsilon));
        break;
      }
    }
  } catch (const std::exception& e) {
    out.clear();
    for (const auto& est : s.estimators) {
      ReplicationRecord rec;
      rec.replication = replication;
      rec.epsilon = epsilon;
      rec.estimator = est.name;
      rec.failed = true;
      rec.failure = e.what();
      rec.estimate = std::numeric_limits<double>::quiet_NaN();
      rec.normalized_error = std::numeric_limits<double>::quiet_NaN();
      out.push_back(rec);
    }
  }
  return out;
}

double cell_rate(const Setup& s, Scenario scenario, double epsilon, const std::string& estimator) {
  switch (scenario) {
    case Scenario::kMisspec:
      return misspec_rate(epsilon, s.kappa);
    case Scenario::kKappa:
      return epsilon;
    case Scenario::kJoint:
      return estimator == "joint-kappa" ? epsilon : cusp_rate(epsilon, s.kappa);
    default:
      return cusp_rate(epsilon, s.kappa);
  }
}

EstimatorSummary summarize(const std::vector<ReplicationRecord>& records, const std::string& name,
                           double epsilon, double target) {
  EstimatorSummary sum;
  sum.estimator = name;
  std::vector<double> abs_err;
  double sq = 0.0;
  double abs_norm = 0.0;
  double sq_norm = 0.0;
  for (const auto& r : records) {
    if (r.estimator != name || r.epsilon != epsilon) continue;
    if (r.failed) {
      ++sum.failures;
      continue;
    }
    ++sum.count;
    if (r.boundary) ++sum.boundary_hits;
    const double e = r.estimate - target;
    abs_err.push_back(std::abs(e));
    sq += e * e;
    abs_norm += std::abs(r.normalized_error);
    sq_norm += r.normalized_error * r.normalized_error;
  }
  if (sum.count > 0) {
    const double n = static_cast<double>(sum.count);
    sum.mean_abs_error = mean(abs_err);
    sum.se_abs_error = std::sqrt(variance(abs_err) / n);
    sum.mean_sq_error = sq / n;
    sum.mean_abs_normalized = abs_norm / n;
    sum.mean_sq_normalized = sq_norm / n;
  }
  return sum;
}

json summary_json(const EstimatorSummary& s) {
  return {{"estimator", s.estimator},
          {"count", s.count},
          {"failures", s.failures},
          {"boundary_hits", s.boundary_hits},
          {"mean_abs_error", s.mean_abs_error},
          {"se_abs_error", s.se_abs_error},
          {"mean_sq_error", s.mean_sq_error},
          {"mean_abs_normalized", s.mean_abs_normalized},
          {"mean_sq_normalized", s.mean_sq_normalized}};
}

std::string target_field(Scenario scenario) {
  switch (scenario) {
    case Scenario::kMisspec:
      return "theta_hat";
    case Scenario::kKappa:
      return "kappa0";
    default:
      return "theta0";
  }
}

}  // namespace

std::optional<double> limit_gamma_sq(const SignalModel& signal) {
  if (const auto* c = dynamic_cast<const CuspSignal*>(&signal)) {
    return gamma_squared(c->amplitude(), c->kappa());
  }
  if (const auto* m = dynamic_cast<const MultiCuspSignal*>(&signal)) {
    return gamma_squared(m->leading_amplitude(), m->kappa_effective());
  }
  return std::nullopt;
}

std::vector<double> ExperimentReport::normalized_errors(std::string_view estimator,
                                                        double epsilon) const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (!r.failed && r.estimator == estimator && r.epsilon == epsilon) {
      out.push_back(r.normalized_error);
    }
  }
  return out;
}

std::vector<double> ExperimentReport::raw_errors(std::string_view estimator,
                                                 double epsilon) const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (!r.failed && r.estimator == estimator && r.epsilon == epsilon) {
      out.push_back(r.estimate - targets.at(std::string(estimator)));
    }
  }
  return out;
}

const RateResult* ExperimentReport::rate_fit(std::string_view estimator) const {
  for (const auto& r : rate_fits) {
    if (r.estimator == estimator) return &r;
  }
  return nullptr;
}

const KsResult* ExperimentReport::ks(std::string_view estimator, std::string_view reference) const {
  const KsResult* found = nullptr;
  for (const auto& k : ks_results) {
    // the last match is the smallest eps
    if (k.estimator == estimator && k.reference == reference) found = &k;
  }
  return found;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const Logger& log) {
  validate_config(config);
  auto say = [&](const std::string& msg) {
    if (log) log(msg);
  };
  const Setup setup = make_setup(config);
  const TimeGrid grid(setup.data_signal->horizon(), config.grid_steps);

  ExperimentReport report;
  report.config = config;
  report.constants = setup.constants;
  report.constants[target_field(config.scenario)] = setup.target;
  for (const auto& est : setup.estimators) report.targets[est.name] = est.target;

  for (double eps : config.epsilons) {
    const double ratio = discretization_ratio(grid.dt(), setup.kappa, eps);
    if (ratio > kDiscretizationWarnRatio) {
      std::ostringstream msg;
      msg << "warning: dt^(kappa+1/2)/eps = " << ratio << " at eps=" << eps
          << "; increase grid_steps for a discretization error well below the noise";
      say(msg.str());
    }
  }

  // Replications, cell by cell; slots indexed by replication keep the order.
  const std::size_t n = config.replications;
  for (std::size_t c = 0; c < config.epsilons.size(); ++c) {
    const double eps = config.epsilons[c];
    std::vector<std::vector<ReplicationRecord>> slots(n);
    parallel_for(n, config.threads, [&](std::size_t r) {
      slots[r] = run_replication(config, setup, grid, eps, c, r);
    });
    CellSummary cell;
    cell.epsilon = eps;
    for (auto& slot : slots) {
      for (auto& rec : slot) report.records.push_back(std::move(rec));
    }
    for (const auto& est : setup.estimators) {
      cell.estimators.push_back(summarize(report.records, est.name, eps, est.target));
    }
    cell.rate = cell_rate(setup, config.scenario, eps, setup.estimators.front().name);
    std::ostringstream msg;
    msg << "eps=" << eps << ":";
    for (const auto& e : cell.estimators) {
      msg << " " << e.estimator << " mean|err|=" << e.mean_abs_error
          << " failures=" << e.failures << " boundary=" << e.boundary_hits;
    }
    say(msg.str());
    report.cells.push_back(std::move(cell));
  }

  // Rate fits.
  if (config.epsilons.size() >= 3) {
    for (std::size_t k = 0; k < setup.estimators.size(); ++k) {
      const auto& name = setup.estimators[k].name;
      const double slope = setup.estimators[k].slope;
      std::vector<double> errs;
      bool positive = true;
      for (const auto& cell : report.cells) {
        const double e = cell.estimators[k].mean_abs_error;
        positive = positive && e > 0.0 && std::isfinite(e);
        errs.push_back(e);
      }
      if (!positive) {
        report.checks.messages.push_back("rate fit for " + name +
                                         " skipped: a cell has zero mean error");
        continue;
      }
      report.rate_fits.push_back({name, slope, fit_rate(config.epsilons, errs)});
    }
  }

  // Limit-law reference samples.
  const unsigned threads = config.threads;
  const std::uint64_t limit_seed = derive_seed(config.seed, kLimitStream);
  const bool want_xi = setup.gamma_sq && config.scenario != Scenario::kMisspec &&
                       config.scenario != Scenario::kKappa;
  if (config.limit_law.samples > 0) {
    if (want_xi) {
      report.limit_samples = sample_xi_batch(*setup.gamma_sq, setup.hurst, config.limit_law.window,
                                             limit_seed, config.limit_law.samples, threads);
    } else if (config.scenario == Scenario::kMisspec) {
      report.limit_samples =
          sample_zeta_batch(setup.zeta_noise, setup.misspec->curvature_closed, setup.hurst,
                            config.limit_law.window, limit_seed, config.limit_law.samples, threads);
    }
  }
  std::vector<double> xi_hat;
  std::vector<double> xi_tilde;
  std::vector<double> zeta_hat;
  std::size_t edge_flags = 0;
  for (const auto& s : report.limit_samples) {
    xi_hat.push_back(s.xi_hat);
    xi_tilde.push_back(s.xi_tilde);
    zeta_hat.push_back(s.zeta_hat);
    edge_flags += s.edge_flag ? 1 : 0;
  }
  if (!report.limit_samples.empty()) {
    json summary = {{"samples", report.limit_samples.size()},
                    {"edge_flags", edge_flags},
                    {"window", report.limit_samples.front().window},
                    {"step", report.limit_samples.front().step}};
    std::vector<double> abs_vals;
    if (config.scenario == Scenario::kMisspec) {
      for (double z : zeta_hat) abs_vals.push_back(std::abs(z));
      summary["mean_abs_zeta_hat"] = mean(abs_vals);
      summary["mean_zeta_hat"] = mean(zeta_hat);
    } else {
      for (double x : xi_hat) abs_vals.push_back(std::abs(x));
      summary["mean_abs_xi_hat"] = mean(abs_vals);
      const auto m = moment_compare(xi_hat, xi_tilde, 2.0);
      summary["mean_sq_xi_hat"] = m.mean_a;
      summary["mean_sq_xi_tilde"] = m.mean_b;
      report.moments.push_back({"xi_hat", "xi_tilde", 0.0, 2.0, m});
    }
    report.extras["limit_law"] = summary;
  }

  // Distributional comparisons and moments per eps.
  for (const auto& cell : report.cells) {
    const double eps = cell.epsilon;
    // an underflowed rate (vanishing eps) leaves infinite normalized errors
    auto finite_sample = [&](const std::string& est, const std::vector<double>& errs) {
      const bool ok = std::all_of(errs.begin(), errs.end(), [](double v) { return std::isfinite(v); });
      if (!ok) {
        std::ostringstream msg;
        msg << "KS skipped for " << est << " at eps=" << eps << ": non-finite normalized errors";
        report.checks.messages.push_back(msg.str());
      }
      return ok;
    };
    auto add_ks = [&](const std::string& est, const std::string& ref,
                      const std::vector<double>& reference) {
      const auto errs = report.normalized_errors(est, eps);
      if (errs.empty() || reference.empty() || !finite_sample(est, errs)) return;
      report.ks_results.push_back(
          {est, eps, ref, ks_statistic(errs, reference), errs.size(), reference.size()});
    };
    auto add_ks_normal = [&](const std::string& est) {
      const auto errs = report.normalized_errors(est, eps);
      if (errs.empty() || !setup.fisher || !finite_sample(est, errs)) return;
      const double sd = 1.0 / std::sqrt(*setup.fisher);
      report.ks_results.push_back({est, eps, "normal",
                                   ks_statistic_cdf(errs, [sd](double x) {
                                     return normal_cdf(x, 0.0, sd);
                                   }),
                                   errs.size(), 0});
    };
    switch (config.scenario) {
      case Scenario::kCuspMle:
      case Scenario::kMultiCusp:
        add_ks("mle", "xi_hat", xi_hat);
        break;
      case Scenario::kCuspBayes: {
        add_ks("mle", "xi_hat", xi_hat);
        add_ks("bayes", "xi_tilde", xi_tilde);
        const auto a = report.normalized_errors("mle", eps);
        const auto b = report.normalized_errors("bayes", eps);
        if (!a.empty() && !b.empty()) {
          report.moments.push_back({"mle", "bayes", eps, 2.0, moment_compare(a, b, 2.0)});
        }
        break;
      }
      case Scenario::kMisspec:
        add_ks("pseudo-mle", "zeta_hat", zeta_hat);
        break;
      case Scenario::kKappa:
        add_ks_normal("kappa-mle");
        break;
      case Scenario::kJoint:
        add_ks("joint-rho", "xi_hat", xi_hat);
        add_ks_normal("joint-kappa");
        break;
    }
    if (setup.fisher) {
      const std::string est = config.scenario == Scenario::kKappa ? "kappa-mle" : "joint-kappa";
      const auto errs = report.normalized_errors(est, eps);
      if (errs.size() > 1) {
        json row = {{"epsilon", eps},
                    {"variance", variance(errs)},
                    {"inverse_fisher", 1.0 / *setup.fisher},
                    {"variance_ratio", variance(errs) * *setup.fisher}};
        if (config.scenario == Scenario::kJoint) {
          // pair the two components replication by replication
          std::vector<double> rho;
          std::vector<double> kap;
          std::map<std::size_t, double> rho_by_rep;
          for (const auto& r : report.records) {
            if (!r.failed && r.epsilon == eps && r.estimator == "joint-rho") {
              rho_by_rep[r.replication] = r.normalized_error;
            }
          }
          for (const auto& r : report.records) {
            if (!r.failed && r.epsilon == eps && r.estimator == "joint-kappa" &&
                rho_by_rep.count(r.replication)) {
              rho.push_back(rho_by_rep[r.replication]);
              kap.push_back(r.normalized_error);
            }
          }
          if (rho.size() > 1) row["correlation"] = correlation(rho, kap);
        }
        report.extras["kappa_cells"].push_back(row);
      }
    }
  }

  // Checks.
  ExperimentChecks& checks = report.checks;
  const double nd = static_cast<double>(n);
  for (const auto& cell : report.cells) {
    for (const auto& e : cell.estimators) {
      if (static_cast<double>(e.failures) > 0.01 * nd) {
        checks.failures_ok = false;
        std::ostringstream msg;
        msg << e.estimator << " at eps=" << cell.epsilon << ": " << e.failures << " of " << n
            << " replications failed (> 1%)";
        checks.messages.push_back(msg.str());
      }
    }
  }
  const CellSummary& last = report.cells.back();
  for (const auto& e : last.estimators) {
    if (!(static_cast<double>(e.boundary_hits) < 0.01 * nd)) {
      checks.boundary_ok = false;
      std::ostringstream msg;
      msg << e.estimator << " at eps=" << last.epsilon << ": " << e.boundary_hits
          << " boundary hits (>= 1%); widen the parameter bounds";
      checks.messages.push_back(msg.str());
    }
  }
  for (std::size_t c = 1; c < report.cells.size(); ++c) {
    for (std::size_t k = 0; k < setup.estimators.size(); ++k) {
      const auto& prev = report.cells[c - 1].estimators[k];
      const auto& cur = report.cells[c].estimators[k];
      const double allowance = 2.0 * std::hypot(prev.se_abs_error, cur.se_abs_error);
      if (cur.mean_abs_error > prev.mean_abs_error + allowance) {
        checks.monotone = false;
        std::ostringstream msg;
        msg << cur.estimator << ": mean |error| rises from " << prev.mean_abs_error << " at eps="
            << report.cells[c - 1].epsilon << " to " << cur.mean_abs_error << " at eps="
            << report.cells[c].epsilon;
        checks.messages.push_back(msg.str());
      }
    }
  }
  if (want_xi && !xi_hat.empty() && config.noise == NoiseMode::kGaussian) {
    std::vector<double> abs_xi;
    for (double x : xi_hat) abs_xi.push_back(std::abs(x));
    const double scale = mean(abs_xi);
    const double observed = last.estimators.front().mean_abs_normalized;
    checks.scale_ok = observed <= 3.0 * scale && observed >= scale / 3.0;
    if (!*checks.scale_ok) {
      std::ostringstream msg;
      msg << "mean |normalized error| " << observed << " is not within a factor 3 of E|xi_hat| "
          << scale;
      checks.messages.push_back(msg.str());
    }
  }
  for (const auto& m : checks.messages) say(m);
  return report;
}

json ExperimentReport::to_json() const {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["scenario"] = scenario_name(config.scenario);
  out["config"] = config_to_json(config);
  out["constants"] = constants;
  json cells_json = json::array();
  for (const auto& c : cells) {
    json row = {{"epsilon", c.epsilon}, {"rate", c.rate}, {"estimators", json::array()}};
    for (const auto& e : c.estimators) row["estimators"].push_back(summary_json(e));
    cells_json.push_back(row);
  }
  out["cells"] = cells_json;
  json rates = json::array();
  for (const auto& r : rate_fits) {
    rates.push_back({{"estimator", r.estimator},
                     {"expected_slope", r.expected_slope},
                     {"slope", r.fit.slope},
                     {"intercept", r.fit.intercept},
                     {"r2", r.fit.r2},
                     {"half_width", r.fit.half_width}});
  }
  out["rate_fit"] = rates;
  json ks = json::array();
  for (const auto& k : ks_results) {
    ks.push_back({{"estimator", k.estimator},
                  {"epsilon", k.epsilon},
                  {"reference", k.reference},
                  {"statistic", k.statistic},
                  {"n_a", k.n_a},
                  {"n_b", k.n_b}});
  }
  out["ks_results"] = ks;
  json moments_json = json::array();
  for (const auto& m : moments) {
    moments_json.push_back({{"a", m.a},
                            {"b", m.b},
                            {"epsilon", m.epsilon},
                            {"p", m.p},
                            {"mean_a", m.comparison.mean_a},
                            {"mean_b", m.comparison.mean_b},
                            {"pooled_se", m.comparison.pooled_se},
                            {"significant", m.comparison.significant}});
  }
  out["moment_comparison"] = moments_json;
  out["extras"] = extras;
  json c = {{"failures_ok", checks.failures_ok},
            {"boundary_ok", checks.boundary_ok},
            {"monotone", checks.monotone},
            {"messages", checks.messages}};
  c["scale_ok"] = checks.scale_ok ? json(*checks.scale_ok) : json(nullptr);
  out["checks"] = c;
  return out;
}

void write_records_csv(const std::vector<ReplicationRecord>& records,
                       const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw DomainError("cannot write " + file.string());
  out << "replication,epsilon,estimator,estimate,normalized_error,boundary_flag,failed_flag\n";
  char line[256];
  for (const auto& r : records) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%s,%.17g,%.17g,%d,%d\n", r.replication, r.epsilon,
                  r.estimator.c_str(), r.estimate, r.normalized_error, r.boundary ? 1 : 0,
                  r.failed ? 1 : 0);
    out << line;
  }
}

std::pair<std::filesystem::path, std::filesystem::path> write_report(
    const ExperimentReport& report) {
  const auto& o = report.config.output;
  std::filesystem::create_directories(o.dir);
  const auto csv = o.dir / o.csv;
  const auto json_path = o.dir / o.report;
  if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
  if (json_path.has_parent_path()) std::filesystem::create_directories(json_path.parent_path());
  write_records_csv(report.records, csv);
  std::ofstream out(json_path);
  if (!out) throw DomainError("cannot write " + json_path.string());
  out << report.to_json().dump(2) << "\n";
  return {csv, json_path};
}

// ---------------------------------------------------------------------------
// Lemma checks

LowerBoundCheck lower_bound_check(const SignalModel& signal, double theta0,
                                  std::size_t grid_steps, std::size_t nodes) {
  const double kappa = require_cusp_exponent(signal);
  const double two_h = 2.0 * hurst_index(kappa);
  detail::require(nodes >= 3, "lower-bound check needs at least three nodes");
  const TimeGrid grid(signal.horizon(), grid_steps);
  Rng rng(0);
  const ObservationPath path =
      simulate_path(signal, theta0, 1.0, grid, rng, NoiseMode::kZeroNoise);
  LikelihoodEvaluator evaluator(path, signal);
  const double r0 = evaluator.contrast(theta0);
  const ThetaBounds b = signal.theta_bounds();
  LowerBoundCheck check;
  check.mu_hat = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes; ++i) {
    const double theta =
        b.lower + b.width() * static_cast<double>(i) / static_cast<double>(nodes - 1);
    if (theta == theta0) continue;
    // eps = 1, so -2 eps^2 ln(V / V0) = -2 (R - R0)
    const double phi = -2.0 * (evaluator.contrast(theta) - r0);
    check.theta.push_back(theta);
    check.phi.push_back(phi);
    check.mu_hat = std::min(check.mu_hat, phi / std::pow(std::abs(theta - theta0), two_h));
  }
  return check;
}

TailBoundCheck tail_bound_check(const SignalModel& signal, double theta0, double epsilon,
                                std::span<const double> u, std::size_t replications,
                                std::size_t grid_steps, std::uint64_t seed, unsigned threads) {
  const double kappa = require_cusp_exponent(signal);
  const double two_h = 2.0 * hurst_index(kappa);
  const double phi = cusp_rate(epsilon, kappa);
  detail::require(replications >= 2, "tail check needs at least two replications");
  const ThetaBounds b = signal.theta_bounds();
  for (double v : u) {
    detail::require(b.contains(theta0 + phi * v), "u value leaves the parameter set");
  }
  const TimeGrid grid(signal.horizon(), grid_steps);
  std::vector<std::vector<double>> roots(replications);
  parallel_for(replications, threads, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    const ObservationPath path = simulate_path(signal, theta0, epsilon, grid, rng);
    LikelihoodEvaluator evaluator(path, signal);
    const double r0 = evaluator.contrast(theta0);
    roots[r].resize(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double log_z = (evaluator.contrast(theta0 + phi * u[j]) - r0) / epsilon / epsilon;
      roots[r][j] = std::exp(0.5 * log_z);
    }
  });
  TailBoundCheck check;
  check.u.assign(u.begin(), u.end());
  check.c_hat = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < u.size(); ++j) {
    std::vector<double> column(replications);
    for (std::size_t r = 0; r < replications; ++r) column[r] = roots[r][j];
    const double m = mean(column);
    check.mean_sqrt_z.push_back(m);
    check.se_sqrt_z.push_back(std::sqrt(variance(column) / static_cast<double>(replications)));
    if (u[j] != 0.0) {
      check.c_hat = std::min(check.c_hat, -std::log(m) / std::pow(std::abs(u[j]), two_h));
    }
  }
  return check;
}

}  // namespace cusplab

#include "cusplab/experiment_config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cusplab/errors.hpp"
#include "cusplab/signal_catalog.hpp"

namespace cusplab {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<Scenario, const char*>, 6> kScenarios{{
    {Scenario::kCuspMle, "cusp-mle"},
    {Scenario::kCuspBayes, "cusp-bayes"},
    {Scenario::kMultiCusp, "multi-cusp"},
    {Scenario::kMisspec, "misspec"},
    {Scenario::kKappa, "kappa"},
    {Scenario::kJoint, "joint"},
}};

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  detail::require(obj.is_object(), where + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!ok.count(item.key())) {
      throw DomainError("unknown key '" + item.key() + "' in " + where + " (valid: " +
                        join({ok.begin(), ok.end()}) + ")");
    }
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DomainError(where + "." + key + ": " + e.what());
  }
}

void read_search(const json& obj, SearchConfig& s, const std::string& where) {
  reject_unknown(obj, where,
                 {"coarse_nodes", "coarse_rate_fraction", "candidates", "window_steps", "shrink",
                  "final_rate_fraction", "max_levels", "use_lattice"});
  read(obj, "coarse_nodes", s.coarse_nodes, where);
  read(obj, "coarse_rate_fraction", s.coarse_rate_fraction, where);
  read(obj, "candidates", s.candidates, where);
  read(obj, "window_steps", s.window_steps, where);
  read(obj, "shrink", s.shrink, where);
  read(obj, "final_rate_fraction", s.final_rate_fraction, where);
  read(obj, "max_levels", s.max_levels, where);
  read(obj, "use_lattice", s.use_lattice, where);
}

json search_to_json(const SearchConfig& s) {
  return {{"coarse_nodes", s.coarse_nodes},
          {"coarse_rate_fraction", s.coarse_rate_fraction},
          {"candidates", s.candidates},
          {"window_steps", s.window_steps},
          {"shrink", s.shrink},
          {"final_rate_fraction", s.final_rate_fraction},
          {"max_levels", s.max_levels},
          {"use_lattice", s.use_lattice}};
}

void read_kappa_search(const json& obj, KappaSearchConfig& k, const std::string& where) {
  read(obj, "coarse_nodes", k.coarse_nodes, where);
  read(obj, "candidates", k.candidates, where);
  read(obj, "shrink", k.shrink, where);
  read(obj, "final_rate_fraction", k.final_rate_fraction, where);
  read(obj, "parabolic", k.parabolic, where);
}

std::string method_name(FbmMethod m) { return m == FbmMethod::kCholesky ? "cholesky" : "circulant"; }

FbmMethod method_from_name(const std::string& name) {
  if (name == "cholesky") return FbmMethod::kCholesky;
  if (name == "circulant") return FbmMethod::kCirculant;
  throw DomainError("unknown fBm method '" + name + "' (valid: cholesky, circulant)");
}

bool is_plain_relative(const std::string& name) {
  const std::filesystem::path p(name);
  if (name.empty() || p.is_absolute()) return false;
  return std::none_of(p.begin(), p.end(), [](const auto& part) { return part == ".."; });
}

}  // namespace

std::string scenario_name(Scenario scenario) {
  for (const auto& [s, name] : kScenarios) {
    if (s == scenario) return name;
  }
  return "cusp-mle";
}

Scenario scenario_from_name(const std::string& name) {
  std::vector<std::string> valid;
  for (const auto& [s, n] : kScenarios) {
    if (name == n) return s;
    valid.emplace_back(n);
  }
  throw DomainError("unknown scenario '" + name + "' (valid: " + join(valid) + ")");
}

ExperimentConfig config_from_json(const json& spec) {
  reject_unknown(spec, "config",
                 {"schema_version", "scenario", "signal", "real_signal", "theta0", "epsilons",
                  "replications", "seed", "grid_steps", "zero_noise", "threads", "search", "bayes",
                  "kappa", "joint", "limit_law", "misspec", "output"});
  ExperimentConfig c;
  int version = kSchemaVersion;
  read(spec, "schema_version", version, "config");
  if (version != kSchemaVersion) {
    throw DomainError("unsupported schema_version " + std::to_string(version) + " (expected " +
                      std::to_string(kSchemaVersion) + ")");
  }
  detail::require(spec.contains("scenario"), "config needs a 'scenario'");
  c.scenario = scenario_from_name(spec.at("scenario").get<std::string>());
  detail::require(spec.contains("signal"), "config needs a 'signal' description");
  c.signal = spec.at("signal");
  if (spec.contains("real_signal")) c.real_signal = spec.at("real_signal");
  read(spec, "theta0", c.theta0, "config");
  read(spec, "epsilons", c.epsilons, "config");
  read(spec, "replications", c.replications, "config");
  read(spec, "seed", c.seed, "config");
  read(spec, "grid_steps", c.grid_steps, "config");
  bool zero_noise = false;
  read(spec, "zero_noise", zero_noise, "config");
  c.noise = zero_noise ? NoiseMode::kZeroNoise : NoiseMode::kGaussian;
  read(spec, "threads", c.threads, "config");

  if (spec.contains("search")) read_search(spec.at("search"), c.search, "search");

  if (spec.contains("bayes")) {
    const json& b = spec.at("bayes");
    reject_unknown(b, "bayes",
                   {"prior", "rate_fraction", "drop_nats", "max_subdivisions", "boundary_strip",
                    "search"});
    if (b.contains("prior")) {
      const json& p = b.at("prior");
      reject_unknown(p, "bayes.prior", {"name", "mean", "sd"});
      read(p, "name", c.prior.name, "bayes.prior");
      read(p, "mean", c.prior.mean, "bayes.prior");
      read(p, "sd", c.prior.sd, "bayes.prior");
    }
    read(b, "rate_fraction", c.bayes.rate_fraction, "bayes");
    read(b, "drop_nats", c.bayes.drop_nats, "bayes");
    read(b, "max_subdivisions", c.bayes.max_subdivisions, "bayes");
    read(b, "boundary_strip", c.bayes.boundary_strip, "bayes");
    if (b.contains("search")) read_search(b.at("search"), c.bayes.search, "bayes.search");
  }

  if (spec.contains("kappa")) {
    const json& k = spec.at("kappa");
    reject_unknown(k, "kappa",
                   {"bounds", "coarse_nodes", "candidates", "shrink", "final_rate_fraction",
                    "parabolic"});
    if (k.contains("bounds")) {
      const auto b = k.at("bounds").get<std::vector<double>>();
      detail::require(b.size() == 2, "kappa.bounds must be [k, K]");
      c.kappa_bounds = {b[0], b[1]};
    }
    read_kappa_search(k, c.kappa_search, "kappa");
  }

  if (spec.contains("joint")) {
    const json& j = spec.at("joint");
    reject_unknown(j, "joint", {"kappa_coarse_nodes", "cycles", "search"});
    read(j, "kappa_coarse_nodes", c.joint.kappa_coarse_nodes, "joint");
    read(j, "cycles", c.joint.cycles, "joint");
    if (j.contains("search")) read_search(j.at("search"), c.joint.rho, "joint.search");
  }
  c.joint.kappa = c.kappa_search;

  if (spec.contains("limit_law")) {
    const json& l = spec.at("limit_law");
    reject_unknown(l, "limit_law",
                   {"samples", "multiplier", "window", "half_nodes", "method", "noise_scale"});
    read(l, "samples", c.limit_law.samples, "limit_law");
    read(l, "multiplier", c.limit_law.window.multiplier, "limit_law");
    if (l.contains("window") && !l.at("window").is_null()) {
      c.limit_law.window.window = l.at("window").get<double>();
    }
    read(l, "half_nodes", c.limit_law.window.half_nodes, "limit_law");
    if (l.contains("method")) c.limit_law.window.method = method_from_name(l.at("method"));
    if (l.contains("noise_scale") && !l.at("noise_scale").is_null()) {
      c.limit_law.noise_scale = l.at("noise_scale").get<double>();
    }
  }

  if (spec.contains("misspec")) {
    const json& m = spec.at("misspec");
    reject_unknown(m, "misspec",
                   {"scan_intervals", "golden_tol", "certificate_threshold", "fd_step"});
    read(m, "scan_intervals", c.misspec.scan_intervals, "misspec");
    read(m, "golden_tol", c.misspec.golden_tol, "misspec");
    read(m, "certificate_threshold", c.misspec.certificate_threshold, "misspec");
    read(m, "fd_step", c.misspec.fd_step, "misspec");
  }

  if (spec.contains("output")) {
    const json& o = spec.at("output");
    reject_unknown(o, "output", {"dir", "csv", "report", "dump_paths"});
    std::string dir = c.output.dir.string();
    read(o, "dir", dir, "output");
    c.output.dir = dir;
    read(o, "csv", c.output.csv, "output");
    read(o, "report", c.output.report, "output");
    read(o, "dump_paths", c.output.dump_paths, "output");
  }

  // Build the signals once so that catalog errors surface at load time.
  signal_from_json(c.signal);
  if (c.scenario == Scenario::kMisspec) smooth_signal_from_json(c.real_signal);
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["scenario"] = scenario_name(c.scenario);
  out["signal"] = c.signal;
  if (!c.real_signal.is_null()) out["real_signal"] = c.real_signal;
  out["theta0"] = c.theta0;
  out["epsilons"] = c.epsilons;
  out["replications"] = c.replications;
  out["seed"] = c.seed;
  out["grid_steps"] = c.grid_steps;
  out["zero_noise"] = c.noise == NoiseMode::kZeroNoise;
  out["threads"] = c.threads;
  out["search"] = search_to_json(c.search);
  out["bayes"] = {{"prior", {{"name", c.prior.name}, {"mean", c.prior.mean}, {"sd", c.prior.sd}}},
                  {"rate_fraction", c.bayes.rate_fraction},
                  {"drop_nats", c.bayes.drop_nats},
                  {"max_subdivisions", c.bayes.max_subdivisions},
                  {"boundary_strip", c.bayes.boundary_strip},
                  {"search", search_to_json(c.bayes.search)}};
  out["kappa"] = {{"bounds", {c.kappa_bounds.lower, c.kappa_bounds.upper}},
                  {"coarse_nodes", c.kappa_search.coarse_nodes},
                  {"candidates", c.kappa_search.candidates},
                  {"shrink", c.kappa_search.shrink},
                  {"final_rate_fraction", c.kappa_search.final_rate_fraction},
                  {"parabolic", c.kappa_search.parabolic}};
  out["joint"] = {{"kappa_coarse_nodes", c.joint.kappa_coarse_nodes},
                  {"cycles", c.joint.cycles},
                  {"search", search_to_json(c.joint.rho)}};
  json window = nullptr;
  if (c.limit_law.window.window) window = *c.limit_law.window.window;
  json noise = nullptr;
  if (c.limit_law.noise_scale) noise = *c.limit_law.noise_scale;
  out["limit_law"] = {{"samples", c.limit_law.samples},
                      {"multiplier", c.limit_law.window.multiplier},
                      {"window", window},
                      {"half_nodes", c.limit_law.window.half_nodes},
                      {"method", method_name(c.limit_law.window.method)},
                      {"noise_scale", noise}};
  out["misspec"] = {{"scan_intervals", c.misspec.scan_intervals},
                    {"golden_tol", c.misspec.golden_tol},
                    {"certificate_threshold", c.misspec.certificate_threshold},
                    {"fd_step", c.misspec.fd_step}};
  out["output"] = {{"dir", c.output.dir.string()},
                   {"csv", c.output.csv},
                   {"report", c.output.report},
                   {"dump_paths", c.output.dump_paths}};
  return out;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DomainError("cannot open config file " + file.string());
  json spec;
  try {
    in >> spec;
  } catch (const json::exception& e) {
    throw DomainError("config file " + file.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(spec);
}

void validate_config(const ExperimentConfig& c) {
  detail::require(!c.epsilons.empty(), "epsilon list must not be empty");
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
    const double e = c.epsilons[i];
    detail::require(std::isfinite(e) && e > 0.0 && e <= 1.0,
                    "every epsilon must lie in (0, 1], got " + std::to_string(e));
    if (i > 0) {
      detail::require(e < c.epsilons[i - 1], "epsilon list must be strictly decreasing");
    }
  }
  detail::require(c.replications >= 1, "replications must be at least 1");
  if (c.epsilons.size() >= 3) {
    detail::require(c.replications >= 100,
                    "rate fits need at least 100 replications per epsilon");
  }
  detail::require(c.grid_steps >= 2, "grid_steps must be at least 2");
  detail::require(is_plain_relative(c.output.csv) && is_plain_relative(c.output.report),
                  "output file names must be relative to the output directory without '..'");
  detail::require(c.prior.name == "uniform" || c.prior.name == "truncated-normal",
                  "unknown prior '" + c.prior.name + "' (valid: truncated-normal, uniform)");
  if (c.scenario == Scenario::kMisspec) {
    detail::require(!c.real_signal.is_null(), "misspec scenario needs a 'real_signal'");
  }
}

}  // namespace cusplab

// Runs the twelve acceptance criteria and prints one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cusplab/experiments.hpp"
#include "cusplab/fbm.hpp"
#include "cusplab/limit_laws.hpp"
#include "cusplab/signal_models.hpp"
#include "../unit/oracles.hpp"

using namespace cusplab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

ExperimentConfig load(const std::string& name) {
  return load_config(std::string(CUSPLAB_CONFIG_DIR) + "/" + name);
}

const KsResult& require_ks(const ExperimentReport& r, const std::string& est,
                           const std::string& ref) {
  const KsResult* ks = r.ks(est, ref);
  if (ks == nullptr) throw std::runtime_error("no KS result for " + est + " vs " + ref);
  return *ks;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome cusp_mle_rate() {
  const auto report = run_experiment(load("cusp_mle.json"));
  const RateResult* fit = report.rate_fit("mle");
  if (fit == nullptr) return {false, "no rate fit"};
  const double s = fit->fit.slope;
  return {s >= 1.18 && s <= 1.48 && report.checks.failures_ok,
          fmt("slope %.4f +- %.4f (accept [1.18, 1.48], target 4/3)", s, fit->fit.half_width)};
}

// Criteria 2 and 3 share the eps = 0.005, N = 1000 run.
const ExperimentReport& bayes_report() {
  static const ExperimentReport report = run_experiment(load("cusp_bayes.json"));
  return report;
}

Outcome bayes_beats_mle() {
  const auto& r = bayes_report();
  const double eps = r.config.epsilons.back();
  const auto mle = r.raw_errors("mle", eps);
  const auto be = r.raw_errors("bayes", eps);
  const auto m = moment_compare(mle, be, 2.0);
  return {m.significant,
          fmt("E(mle err)^2 = %.4g, E(bayes err)^2 = %.4g, gap = %.2f pooled SE", m.mean_a,
              m.mean_b, (m.mean_a - m.mean_b) / m.pooled_se)};
}

Outcome limit_law_match() {
  const auto& r = bayes_report();
  const auto& a = require_ks(r, "mle", "xi_hat");
  const auto& b = require_ks(r, "bayes", "xi_tilde");
  return {a.statistic < 0.1 && b.statistic < 0.1,
          fmt("KS mle vs xi_hat %.4f, bayes vs xi_tilde %.4f (accept < 0.1; n = %.0f vs %.0f)",
              a.statistic, b.statistic, static_cast<double>(a.n_a), static_cast<double>(a.n_b))};
}

Outcome fbm_correctness() {
  double worst = 0.0;
  const std::size_t paths = 2000;
  for (FbmMethod method : {FbmMethod::kCholesky, FbmMethod::kCirculant}) {
    for (double h : {0.6, 0.75, 0.9}) {
      const FbmSampler sampler(h, 32, 1.0 / 16.0, method);
      const auto& u = sampler.grid();
      const std::size_t m = u.size();
      std::vector<double> acc(m * m, 0.0);
      std::vector<double> x(m);
      for (std::size_t p = 0; p < paths; ++p) {
        Rng rng = make_rng(404, p);
        sampler.sample_into(rng, x);
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = i; j < m; ++j) acc[i * m + j] += x[i] * x[j];
        }
      }
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
          const double sii = fbm_covariance(h, u[i], u[i]);
          const double sjj = fbm_covariance(h, u[j], u[j]);
          const double sij = fbm_covariance(h, u[i], u[j]);
          if (sii == 0.0 || sjj == 0.0) continue;
          const double se = std::sqrt((sii * sjj + sij * sij) / static_cast<double>(paths));
          worst = std::max(worst, std::abs(acc[i * m + j] / static_cast<double>(paths) - sij) / se);
        }
      }
    }
  }
  bool wiener = true;
  for (double a = -3.0; a <= 3.0; a += 0.25) {
    for (double b = -3.0; b <= 3.0; b += 0.25) {
      const double expected = a * b > 0.0 ? std::min(std::abs(a), std::abs(b)) : 0.0;
      wiener = wiener && std::abs(fbm_covariance(0.5, a, b) - expected) <= 1e-15;
    }
  }
  return {worst < 5.0 && wiener,
          fmt("worst covariance deviation %.2f SE over 65-node grids (accept < 5); H = 1/2 "
              "closed form ",
              worst) +
              (wiener ? "exact" : "MISMATCH")};
}

Outcome scaling_identity() {
  const double gamma_sq = gamma_squared(1.0, 0.25);
  const double h = 0.75;
  const double c = xi_scale(gamma_sq, h);
  const FbmSampler sampler(h, 1000, 0.01);
  double worst = 0.0;
  for (std::uint64_t p = 0; p < 200; ++p) {
    Rng rng = make_rng(55, p);
    const FbmPath base = sampler.sample(rng);
    FbmPath scaled = base;
    scaled.window *= c;
    scaled.step *= c;
    for (auto& u : scaled.u) u *= c;
    for (auto& v : scaled.values) v *= std::pow(c, h);
    const double d = std::abs(xi_from_path(scaled, gamma_sq).xi_hat - c * xi_from_path(base, 1.0).xi_hat);
    worst = std::max(worst, d / scaled.step);
  }
  WindowConfig w;
  w.half_nodes = 1000;
  const auto general = sample_xi_batch(gamma_sq, h, w, 77, 2000, 0);
  const auto unit = sample_xi_batch(1.0, h, w, 77, 2000, 0);
  std::vector<double> a;
  std::vector<double> b;
  for (std::size_t i = 0; i < general.size(); ++i) {
    a.push_back(general[i].xi_hat);
    b.push_back(c * unit[i].xi_hat);
  }
  const double ks = ks_statistic(a, b);
  return {worst <= 1.0 && ks < 0.05,
          fmt("per-path worst deviation %.3g grid steps (accept <= 1); KS %.4f over 2000 paired "
              "samples (accept < 0.05)",
              worst, ks)};
}

Outcome quadrature_constants() {
  double worst_gamma = 0.0;
  double worst_closed = 0.0;
  double worst_fisher = 0.0;
  for (double k : {0.1, 0.25, 0.4}) {
    const double g = gamma_squared(1.0, k);
    const double brute = oracle::gamma_sq_midpoint(1.0, k, 1e4, 4000000);
    worst_gamma = std::max(worst_gamma, std::abs(g - brute) / brute);
    worst_closed = std::max(worst_closed, std::abs(g - oracle::gamma_sq_closed(1.0, k)) / g);
    for (double rho : {0.3, 0.5}) {
      const double f = fisher_info_kappa(1.0, rho, 1.0, k);
      const double ref = oracle::fisher_closed(1.0, rho, 1.0, k);
      worst_fisher = std::max(worst_fisher, std::abs(f - ref) / ref);
    }
  }
  return {worst_gamma < 1e-4 && worst_fisher < 1e-8,
          fmt("Gamma^2 vs midpoint oracle %.2e (accept 1e-4), vs closed form %.2e; I(kappa) vs "
              "antiderivative %.2e (accept 1e-8)",
              worst_gamma, worst_closed, worst_fisher)};
}

const ExperimentReport& misspec_report() {
  static const ExperimentReport report = run_experiment(load("misspec.json"));
  return report;
}

Outcome misspec_rate_and_law() {
  const auto& r = misspec_report();
  const RateResult* fit = r.rate_fit("pseudo-mle");
  if (fit == nullptr) return {false, "no rate fit"};
  const auto& ks = require_ks(r, "pseudo-mle", "zeta_hat");
  const double s = fit->fit.slope;
  return {s >= 0.68 && s <= 0.92 && ks.statistic < 0.12,
          fmt("slope %.4f +- %.4f (accept [0.68, 0.92]); KS vs zeta_hat %.4f at eps = %.4g "
              "(accept < 0.12)",
              s, fit->fit.half_width, ks.statistic, ks.epsilon)};
}

Outcome curvature_cross_check() {
  const auto& c = misspec_report().constants;
  const double closed = c.at("curvature_closed").get<double>();
  const double fd = c.at("curvature_fd").get<double>();
  const double rel = std::abs(closed - fd) / std::abs(closed);
  return {rel < 1e-3, fmt("closed %.10f, finite difference %.10f, relative %.2e (accept 1e-3)",
                          closed, fd, rel)};
}

Outcome kappa_regularity() {
  const auto r = run_experiment(load("kappa.json"));
  const double eps = r.config.epsilons.back();
  const auto errs = r.normalized_errors("kappa-mle", eps);
  const double fisher = r.constants.at("fisher_kappa").get<double>();
  const double ratio = variance(errs) * fisher;
  const auto& ks = require_ks(r, "kappa-mle", "normal");
  return {std::abs(ratio - 1.0) <= 0.2 && ks.statistic < 0.1,
          fmt("Var * I = %.4f (accept within 20%% of 1); KS vs N(0, 1/I) %.4f (accept < 0.1)",
              ratio, ks.statistic)};
}

Outcome joint_estimation() {
  const auto r = run_experiment(load("joint.json"));
  const double eps = r.config.epsilons.back();
  const auto rho = r.normalized_errors("joint-rho", eps);
  const auto kap = r.normalized_errors("joint-kappa", eps);
  if (rho.size() != kap.size()) return {false, "unpaired joint components"};
  const double corr = correlation(rho, kap);
  const auto& ks = require_ks(r, "joint-rho", "xi_hat");
  return {std::abs(corr) < 0.1 && ks.statistic < 0.12,
          fmt("corr %.4f (accept |corr| < 0.1); rho KS vs xi_hat %.4f (accept < 0.12)", corr,
              ks.statistic)};
}

Outcome multi_cusp_rate() {
  const auto r = run_experiment(load("multi_cusp.json"));
  const RateResult* fit = r.rate_fit("mle");
  if (fit == nullptr) return {false, "no rate fit"};
  const double s = fit->fit.slope;
  return {s >= 1.28 && s <= 1.58,
          fmt("slope %.4f +- %.4f (accept [1.28, 1.58], target 1/0.7)", s, fit->fit.half_width)};
}

Outcome lemma_bounds() {
  const CuspSignal s(1.0, 0.25, 1.0, {0.1, 0.9});
  const auto lower = lower_bound_check(s, 0.5, 10000);
  const std::vector<double> u{0.25, 0.5, 1.0, 2.0, 4.0};
  const auto tail = tail_bound_check(s, 0.5, 0.01, u, 2000, 10000, 12);
  return {lower.mu_hat > 0.0 && tail.c_hat > 0.0,
          fmt("mu_hat %.4f (accept > 0); c_hat %.4f (accept > 0)", lower.mu_hat, tail.c_hat)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "cusp MLE rate", cusp_mle_rate},
      {2, "Bayes beats MLE", bayes_beats_mle},
      {3, "limit-law match", limit_law_match},
      {4, "fBm covariance", fbm_correctness},
      {5, "scaling identity", scaling_identity},
      {6, "Gamma^2 and I(kappa) quadrature", quadrature_constants},
      {7, "misspecification rate", misspec_rate_and_law},
      {8, "curvature cross-check", curvature_cross_check},
      {9, "kappa regularity", kappa_regularity},
      {10, "joint estimation", joint_estimation},
      {11, "multi-cusp rate", multi_cusp_rate},
      {12, "lemma bounds", lemma_bounds},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  [%2d] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed;
}

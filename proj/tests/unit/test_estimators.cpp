#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "cusplab/errors.hpp"
#include "cusplab/estimators.hpp"
#include "cusplab/limit_laws.hpp"
#include "cusplab/statistics.hpp"
#include "oracles.hpp"

using namespace cusplab;

namespace {

const ThetaBounds kBounds{0.1, 0.9};

ObservationPath noisy_path(const SignalModel& s, double theta0, double eps, std::size_t steps,
                           std::uint64_t seed) {
  Rng rng(seed);
  return simulate_path(s, theta0, eps, TimeGrid(s.horizon(), steps), rng);
}

ObservationPath clean_path(const SignalModel& s, double theta0, double eps, std::size_t steps) {
  Rng rng(0);
  return simulate_path(s, theta0, eps, TimeGrid(s.horizon(), steps), rng, NoiseMode::kZeroNoise);
}

}  // namespace

TEST(Contrast, MatchesDirectSum) {
  const CuspSignal pure(1.0, 0.25, 1.0, kBounds);
  const CuspSignal nuisance(1.0, 0.3, 1.0, kBounds, Nuisance::sine(0.5, 4.0));
  for (const CuspSignal* s : {&pure, &nuisance}) {
    const auto path = noisy_path(*s, 0.5, 0.05, 2000, 1);
    LikelihoodEvaluator ev(path, *s);
    for (double theta : {0.1, 0.3337, 0.5, 0.71, 0.9}) {
      auto signal = [&](double t) { return s->eval(theta, t); };
      const double direct = oracle::contrast(signal, path.increments, path.grid.dt());
      EXPECT_NEAR(ev.contrast(theta), direct, 1e-12 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST(Contrast, HorizonMismatchIsDomainError) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds);
  const CuspSignal other(1.0, 0.25, 2.0, {0.1, 1.9});
  const auto path = noisy_path(s, 0.5, 0.1, 100, 1);
  EXPECT_THROW(LikelihoodEvaluator(path, other), DomainError);
}

TEST(Lattice, MatchesDirectContrastOnEveryNode) {
  const CuspSignal cusp(1.3, 0.2, 1.0, kBounds);
  const MultiCuspSignal multi({{1.0, 0.2}, {1.0, 0.4}}, 1.0, kBounds);
  const SignumSignal signum(1.0, 1.0, kBounds);
  const SignalModel* signals[] = {&cusp, &multi, &signum};
  for (const SignalModel* s : signals) {
    const auto path = noisy_path(*s, 0.47, 0.02, 1000, 2);
    LikelihoodEvaluator ev(path, *s);
    ASSERT_TRUE(ev.has_lattice());
    std::vector<double> theta;
    std::vector<double> values;
    ev.lattice(3, 0.3, 0.6, theta, values);
    ASSERT_GE(theta.size(), 890u);
    EXPECT_TRUE(std::is_sorted(theta.begin(), theta.end()));
    EXPECT_GE(theta.front(), 0.3 - 1e-12);
    EXPECT_LE(theta.back(), 0.6 + 1e-12);
    for (std::size_t i = 0; i < theta.size(); i += 7) {
      // k dt - theta rounds to ~1e-17 instead of 0 on grid nodes, and
      // |1e-17|^kappa is not small; snap to the exact zero offset
      const double th = theta[i];
      auto signal = [&](double t) {
        return s->eval(th, std::abs(t - th) < 1e-12 ? th : t);
      };
      const double direct = oracle::contrast(signal, path.increments, path.grid.dt());
      EXPECT_NEAR(values[i], direct, 1e-10) << s->family() << " theta=" << th;
    }
  }
}

TEST(Lattice, RefusedForNonInvariantSignal) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds, Nuisance::linear(1.0));
  const auto path = noisy_path(s, 0.5, 0.1, 100, 1);
  LikelihoodEvaluator ev(path, s);
  std::vector<double> theta;
  std::vector<double> values;
  EXPECT_FALSE(ev.has_lattice());
  EXPECT_THROW(ev.lattice(1, 0.2, 0.8, theta, values), DomainError);
}

TEST(LikelihoodField, NoiselessIdentity) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds);
  const double eps = 0.1;
  const auto path = clean_path(s, 0.5, eps, 1000);
  LikelihoodEvaluator ev(path, s);
  const double at_truth = ev.log_likelihood(0.5);
  for (int i = 0; i <= 80; ++i) {
    const double theta = 0.1 + 0.01 * i;
    double dist = 0.0;
    for (std::size_t k = 0; k < path.grid.steps(); ++k) {
      const double t = path.grid.node(k);
      const double d = oracle::cusp(1.0, 0.25, theta, t) - oracle::cusp(1.0, 0.25, 0.5, t);
      dist += d * d * path.grid.dt();
    }
    const double diff = ev.log_likelihood(theta) - at_truth;
    EXPECT_NEAR(diff, -dist / (2.0 * eps * eps), 1e-9);
    if (std::abs(theta - 0.5) > 1e-12) {
      EXPECT_LT(diff, 0.0);
    } else {
      EXPECT_EQ(diff, 0.0);
    }
  }
}

TEST(LikelihoodField, ZeroSignalGivesFlatField) {
  const auto zero = SmoothSignal::constant(0.0, 1.0, kBounds);
  const auto path = noisy_path(zero, 0.5, 0.3, 500, 4);
  const std::vector<double> grid{0.2, 0.4, 0.6, 0.8};
  const auto field = log_likelihood_field(path, zero, grid);
  for (double v : field.log_values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(field.shift, 0.0);
}

TEST(LikelihoodField, MaximumIsShiftedToZeroAndTruthRatioIsOne) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds);
  const auto path = noisy_path(s, 0.5, 0.05, 1000, 5);
  const std::vector<double> grid{0.5, 0.3, 0.7};
  const auto field = log_likelihood_field(path, s, grid);
  EXPECT_EQ(*std::max_element(field.log_values.begin(), field.log_values.end()), 0.0);
  LikelihoodEvaluator ev(path, s);
  EXPECT_EQ(ev.log_likelihood(0.5) - ev.log_likelihood(0.5), 0.0);
  EXPECT_THROW(log_likelihood_field(path, s, std::vector<double>{0.95}), DomainError);
}

TEST(LikelihoodField, VanishingNoiseGivesPointMassWithoutNan) {
  const auto field = field_from_contrast({0.1, 0.2, 0.3}, std::vector<double>{-1.0, 0.0, -1e-9},
                                         1e-300);
  EXPECT_EQ(field.log_values[1], 0.0);
  EXPECT_TRUE(std::isinf(field.log_values[0]) && field.log_values[0] < 0);
  EXPECT_DOUBLE_EQ(posterior_mean(field, Prior::uniform({0.1, 0.3})), 0.2);
}

TEST(NestedGridSearch, TieBreaksTowardSmallerTheta) {
  auto f = [](double t) { return -std::min(std::abs(t - 0.4), std::abs(t - 0.6)); };
  SearchConfig cfg;
  const auto r = nested_grid_search(f, 0.1, 0.9, 0.01, 0.1, cfg);
  EXPECT_DOUBLE_EQ(r.argmax, 0.4);
  EXPECT_EQ(first_argmax(std::vector<double>{1.0, 3.0, 3.0}), 1u);
}

TEST(NestedGridSearch, InvariantUnderConstantShift) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CuspSignal s(1.0, 0.25, 1.0, kBounds);
    const auto path = noisy_path(s, 0.5, 0.05, 1000, 100 + seed);
    LikelihoodEvaluator ev(path, s);
    auto f = [&](double t) { return ev.contrast(t); };
    auto g = [&](double t) { return ev.contrast(t) + 123.0; };
    SearchConfig cfg;
    const auto a = nested_grid_search(f, 0.1, 0.9, 0.02, 0.004, cfg);
    const auto b = nested_grid_search(g, 0.1, 0.9, 0.02, 0.004, cfg);
    EXPECT_EQ(a.argmax, b.argmax);
  }
}

TEST(NestedGridSearch, RefinementNeverLowersTheMaximum) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CuspSignal s(1.0, 0.25, 1.0, kBounds);
    const auto path = noisy_path(s, 0.5, 0.05, 1000, 200 + seed);
    LikelihoodEvaluator ev(path, s);
    auto f = [&](double t) { return ev.contrast(t); };
    std::vector<double> theta;
    std::vector<double> values;
    for (int i = 0; i <= 200; ++i) {
      theta.push_back(0.1 + 0.004 * i);
      values.push_back(f(theta.back()));
    }
    const double coarse_max = *std::max_element(values.begin(), values.end());
    SearchConfig cfg;
    const auto r = nested_grid_search(f, 0.1, 0.9, 0.02, 0.004, cfg, theta, values);
    EXPECT_GE(r.value, coarse_max);
    EXPECT_LE(r.final_step, 0.02 / 50.0);
  }
}

TEST(Mle, NoiselessPathRecoversTruth) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds);
  for (double eps : {1e-300, 0.01}) {
    const auto r = mle(clean_path(s, 0.5, eps, 10000), s);
    EXPECT_NEAR(r.estimate, 0.5, r.diagnostics.grid_step) << eps;
    EXPECT_FALSE(r.diagnostics.boundary_hit);
  }
  const auto exact = mle(clean_path(s, 0.5, 1e-300, 10000), s);
  EXPECT_EQ(exact.normalized_error, 0.0);
}

TEST(Mle, LatticeRouteNeverLosesToGenericRoute) {
  // the lattice seeds the search with every grid offset, so its maximum is
  // at least as high as the coarse generic search
  const CuspSignal s(1.0, 0.25, 1.0, kBounds);
  SearchConfig generic;
  generic.use_lattice = false;
  int close = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto path = noisy_path(s, 0.5, 0.02, 4000, 300 + seed);
    LikelihoodEvaluator ev(path, s);
    const auto a = mle(path, s);
    const auto b = mle(path, s, generic);
    EXPECT_GE(ev.contrast(a.estimate), ev.contrast(b.estimate) - 1e-12) << seed;
    close += std::abs(a.estimate - b.estimate) <= a.rate;
  }
  EXPECT_GE(close, 10);
}

TEST(Mle, NuisanceSignalUsesGenericRoute) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds, Nuisance::linear(0.5));
  const auto r = mle(clean_path(s, 0.43, 0.01, 4000), s);
  EXPECT_NEAR(r.estimate, 0.43, 1e-3);
}

TEST(Mle, BoundaryFlagWhenTruthSitsOnTheEdge) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds);
  const auto edge = mle(clean_path(s, 0.1000001, 0.01, 10000), s);
  EXPECT_TRUE(edge.diagnostics.boundary_hit) << edge.estimate;
  const auto inside = mle(clean_path(s, 0.2, 0.01, 10000), s);
  EXPECT_FALSE(inside.diagnostics.boundary_hit);
}

TEST(Mle, MedianErrorMatchesLimitScale) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds);
  const double eps = 0.01;
  std::vector<double> err;
  for (std::uint64_t r = 0; r < 500; ++r) {
    err.push_back(std::abs(mle(noisy_path(s, 0.5, eps, 10000, derive_seed(9, r)), s).normalized_error));
  }
  WindowConfig w;
  w.half_nodes = 1000;
  std::vector<double> xi;
  for (const auto& d : sample_xi_batch(gamma_squared(1.0, 0.25), 0.75, w, 10, 2000)) {
    xi.push_back(std::abs(d.xi_hat));
  }
  const double ratio = median(err) / median(xi);
  EXPECT_GT(ratio, 0.75);
  EXPECT_LT(ratio, 1.33);
}

TEST(Bayes, SymmetricFieldGivesCentre) {
  LikelihoodField field;
  for (int i = 0; i <= 100; ++i) {
    const double t = 0.3 + 0.004 * i;
    field.theta.push_back(t);
    field.log_values.push_back(-std::pow(std::abs(t - 0.5), 1.5) * 50.0);
  }
  EXPECT_NEAR(posterior_mean(field, Prior::uniform({0.3, 0.7})), 0.5, 1e-14);
}

TEST(Bayes, DominantNodeIsPointMass) {
  LikelihoodField field{{0.2, 0.3, 0.4, 0.5}, {-800.0, 0.0, -750.0, -900.0}, 0.0};
  EXPECT_DOUBLE_EQ(posterior_mean(field, Prior::uniform({0.2, 0.5})), 0.3);
}

TEST(Bayes, DegenerateFieldIsNumericalError) {
  const double inf = std::numeric_limits<double>::infinity();
  LikelihoodField field{{0.2, 0.3}, {-inf, -inf}, 0.0};
  EXPECT_THROW(posterior_mean(field, Prior::uniform({0.2, 0.3})), NumericalError);
}

TEST(Bayes, EstimateStaysInsideTheNodes) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto path = noisy_path(s, 0.15, 0.2, 1000, 500 + seed);
    const auto both = mle_and_bayes(path, s, Prior::uniform(kBounds));
    EXPECT_GE(both.bayes.estimate, kBounds.lower);
    EXPECT_LE(both.bayes.estimate, kBounds.upper);
  }
}

TEST(Bayes, LatticeAndGenericRoutesAgree) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds);
  BayesConfig generic;
  generic.search.use_lattice = false;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto path = noisy_path(s, 0.5, 0.02, 4000, 600 + seed);
    const auto a = bayes(path, s, Prior::uniform(kBounds));
    const auto b = bayes(path, s, Prior::uniform(kBounds), generic);
    EXPECT_NEAR(a.estimate, b.estimate, 0.02 * a.rate) << seed;
  }
}

TEST(Prior, TruncatedNormalVanishesOutside) {
  const auto p = Prior::truncated_normal(0.5, 0.1, kBounds);
  EXPECT_EQ(p.density(0.05), 0.0);
  EXPECT_GT(p.density(0.5), p.density(0.7));
  EXPECT_THROW(Prior::truncated_normal(0.5, 0.0, kBounds), DomainError);
}

TEST(PseudoMle, WellSpecifiedNoiselessCaseRecoversTruth) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds);
  const auto r = pseudo_mle(clean_path(s, 0.5, 0.01, 10000), s, 0.5);
  EXPECT_NEAR(r.estimate, 0.5, r.diagnostics.grid_step);
  EXPECT_DOUBLE_EQ(r.rate, std::pow(0.01, 0.8));
}

TEST(KappaMle, NoiselessPathRecoversKappa) {
  for (double k0 : {0.15, 0.25, 0.35}) {
    const CuspSignal s(1.0, k0, 1.0, kBounds);
    const auto r = kappa_mle(clean_path(s, 0.5, 0.01, 10000), 1.0, 0.5, {0.05, 0.45}, k0);
    EXPECT_NEAR(r.estimate, k0, 1e-4);
    EXPECT_FALSE(r.diagnostics.boundary_hit);
  }
}

TEST(KappaMle, RejectsBadBounds) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds);
  EXPECT_THROW(kappa_mle(clean_path(s, 0.5, 0.01, 100), 1.0, 0.5, {0.3, 0.2}, 0.25), DomainError);
}

TEST(JointMle, NoiselessPathRecoversBoth) {
  const CuspSignal s(1.0, 0.3, 1.0, kBounds);
  const double eps = 0.01;
  const auto r = joint_mle(clean_path(s, 0.45, eps, 10000), 1.0, kBounds, {0.05, 0.45}, 0.45, 0.3);
  EXPECT_NEAR(r.rho.estimate, 0.45, 2.0 * cusp_rate(eps, 0.3) / 50.0);
  EXPECT_NEAR(r.kappa.estimate, 0.3, 1e-4);
}

TEST(Rates, TheoryExponents) {
  EXPECT_NEAR(cusp_rate(0.01, 0.25), std::pow(0.01, 4.0 / 3.0), 1e-18);
  EXPECT_NEAR(misspec_rate(0.01, 0.25), std::pow(0.01, 0.8), 1e-18);
  const SignumSignal sg(1.0, 1.0, kBounds);
  EXPECT_EQ(search_rate(sg, 0.02), 0.02);
}

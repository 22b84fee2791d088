#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "cusplab/errors.hpp"
#include "cusplab/misspec_analysis.hpp"
#include "oracles.hpp"

using namespace cusplab;

namespace {

const ThetaBounds kBounds{0.1, 0.9};

std::shared_ptr<const CuspSignal> cusp_model(double a = 1.0, double kappa = 0.25) {
  return std::make_shared<const CuspSignal>(a, kappa, 1.0, kBounds);
}

std::shared_ptr<const SmoothSignal> smoothed(double delta, double a = 1.0, double kappa = 0.25) {
  return std::make_shared<const SmoothSignal>(
      SmoothSignal::smoothed_cusp(a, kappa, delta, 1.0, kBounds));
}

// Gap by tanh-sinh with panels split at theta and at the smoothed core.
double oracle_gap(const MisspecProblem& p, double theta) {
  auto f = [&](double t) {
    const double d = p.theoretical->eval(theta, t) - p.real->eval(p.theta0, t);
    return d * d;
  };
  std::vector<double> cuts{0.0, theta, p.theta0, 1.0};
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) sum += oracle::tanh_sinh(f, cuts[i], cuts[i + 1]);
  }
  return sum;
}

}  // namespace

TEST(L2Gap, ZeroRealSignalIsClosedForm) {
  const auto zero = std::make_shared<const SmoothSignal>(SmoothSignal::constant(0.0, 1.0, kBounds));
  const auto p = make_misspec_problem(cusp_model(1.5, 0.3), zero, 0.5);
  const double q = 2.0 * 0.3 + 1.0;
  for (double theta : {0.1, 0.37, 0.5, 0.9}) {
    const double expected = 2.25 * (std::pow(theta, q) + std::pow(1.0 - theta, q)) / q;
    EXPECT_NEAR(l2_gap(p, theta), expected, 1e-13) << theta;
  }
}

TEST(L2Gap, SmoothedCuspMatchesMidpointOracle) {
  const auto p = make_misspec_problem(cusp_model(), smoothed(0.05), 0.5);
  for (double theta : {0.3, 0.48, 0.5, 0.61}) {
    auto f = [&](double t) {
      const double d = oracle::cusp(1.0, 0.25, theta, t) -
                       std::pow(0.05 * 0.05 + (t - 0.5) * (t - 0.5), 0.125);
      return d * d;
    };
    const double mid = oracle::midpoint(f, 0.0, theta, 500000) +
                       oracle::midpoint(f, theta, 1.0, 500000);
    EXPECT_NEAR(l2_gap(p, theta), mid, 1e-6) << theta;
  }
}

TEST(SolveThetaHat, SymmetricRealSignalGivesCentre) {
  const auto p = make_misspec_problem(cusp_model(), smoothed(0.05), 0.5);
  const auto sol = solve_theta_hat(p);
  EXPECT_NEAR(sol.theta_hat, 0.5, 1e-8);
  EXPECT_GT(sol.uniqueness_certificate, 0.0);
  EXPECT_NEAR(sol.min_distance * sol.min_distance, sol.min_gap, 1e-15);
}

TEST(SolveThetaHat, MatchesDenseScanOracle) {
  const auto p = make_misspec_problem(cusp_model(), smoothed(0.08), 0.4);
  const auto sol = solve_theta_hat(p);
  double best = 0.0;
  double best_gap = 1e300;
  for (int i = 0; i <= 400; ++i) {
    const double th = 0.2 + 0.0005 * i;
    const double g = oracle_gap(p, th);
    if (g < best_gap) best_gap = g, best = th;
  }
  const double lo = best - 0.0005;
  for (int i = 0; i <= 1000; ++i) {
    const double th = lo + 1e-6 * i;
    const double g = oracle_gap(p, th);
    if (g < best_gap) best_gap = g, best = th;
  }
  EXPECT_NEAR(sol.theta_hat, best, 2e-6);
  EXPECT_NEAR(sol.min_gap, best_gap, 1e-10);
}

TEST(SolveThetaHat, WellSpecifiedLimitHasZeroDistance) {
  // a vanishing core reduces the smoothed cusp to the model itself
  const auto p = make_misspec_problem(cusp_model(), smoothed(1e-9), 0.45);
  const auto sol = solve_theta_hat(p);
  EXPECT_NEAR(sol.theta_hat, 0.45, 1e-6);
  EXPECT_LT(sol.min_distance, 1e-5);
}

TEST(Curvature, ConstantRealSignalBoundaryFormula) {
  const double c = 0.7;
  const double a = 1.2;
  const double k = 0.25;
  const auto real = std::make_shared<const SmoothSignal>(SmoothSignal::constant(c, 1.0, kBounds));
  const auto p = make_misspec_problem(cusp_model(a, k), real, 0.5);
  for (double th : {0.3, 0.5, 0.66}) {
    const double expected = 2.0 * a * k * std::pow(th, k - 1.0) * (a * std::pow(th, k) - c) +
                            2.0 * a * k * std::pow(1.0 - th, k - 1.0) *
                                (a * std::pow(1.0 - th, k) - c);
    EXPECT_NEAR(curvature_closed(p, th), expected, 1e-12) << th;
    EXPECT_NEAR(curvature_shifted_expansion(p, th), expected, 1e-10) << th;
    EXPECT_NEAR(curvature_fd(p, th), expected, 1e-5 * std::max(1.0, std::abs(expected))) << th;
  }
}

TEST(Curvature, ClosedFormAgreesWithFiniteDifferences) {
  for (double delta : {0.05, 0.1, 0.2}) {
    const auto p = make_misspec_problem(cusp_model(), smoothed(delta), 0.5);
    const auto sol = solve_theta_hat(p);
    EXPECT_GT(sol.curvature_closed, 0.0);
    EXPECT_LT(std::abs(sol.curvature_closed - sol.curvature_fd) / sol.curvature_closed, 1e-3)
        << delta;
  }
}

TEST(Curvature, ClosedFormAgreesForCosine) {
  const auto real =
      std::make_shared<const SmoothSignal>(SmoothSignal::cosine(1.0, 0.5, 3.0, 1.0, kBounds));
  const auto p = make_misspec_problem(cusp_model(), real, 0.5);
  for (double th : {0.25, 0.5, 0.8}) {
    const double closed = curvature_closed(p, th);
    EXPECT_NEAR(closed, curvature_fd(p, th), 1e-5 * std::max(1.0, std::abs(closed))) << th;
  }
}

TEST(PhiGap, NonNegativeAndQuadraticNearMinimizer) {
  const auto p = make_misspec_problem(cusp_model(), smoothed(0.05), 0.5);
  const auto sol = solve_theta_hat(p);
  for (int i = 0; i <= 80; ++i) {
    EXPECT_GE(phi_gap(p, sol, 0.1 + 0.01 * i), -1e-14);
  }
  for (double d : {1e-3, -1e-3}) {
    const double ratio = phi_gap(p, sol, sol.theta_hat + d) / (d * d);
    EXPECT_NEAR(ratio, sol.curvature_closed / 2.0, 1e-2 * sol.curvature_closed);
  }
}

TEST(MisspecProblem, RejectsInvalidPairings) {
  const auto with_nuisance =
      std::make_shared<const CuspSignal>(1.0, 0.25, 1.0, kBounds, Nuisance::linear(1.0));
  EXPECT_THROW(make_misspec_problem(with_nuisance, smoothed(0.05), 0.5), DomainError);
  const auto long_real = std::make_shared<const SmoothSignal>(
      SmoothSignal::smoothed_cusp(1.0, 0.25, 0.05, 2.0, {0.1, 1.9}));
  EXPECT_THROW(make_misspec_problem(cusp_model(), long_real, 0.5), DomainError);
  EXPECT_THROW(make_misspec_problem(cusp_model(), smoothed(0.05), 0.95), DomainError);
}

TEST(SolveThetaHat, BoundaryMinimizerIsRejected) {
  // a steep ramp pulls the best cusp location onto the upper bound
  const auto ramp = std::make_shared<const SmoothSignal>(
      SmoothSignal::quadratic(0.0, 0.0, 40.0, 1.0, kBounds));
  const auto p = make_misspec_problem(cusp_model(), ramp, 0.5);
  EXPECT_THROW(solve_theta_hat(p), DomainError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cusplab/errors.hpp"
#include "cusplab/signal_catalog.hpp"
#include "cusplab/signal_models.hpp"
#include "oracles.hpp"

using namespace cusplab;

namespace {
const ThetaBounds kBounds{0.1, 0.9};
}

TEST(CuspSignal, VanishesAtTheCusp) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds);
  EXPECT_EQ(s.eval(0.5, 0.5), 0.0);
}

TEST(CuspSignal, ExactPowerValue) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds);
  EXPECT_DOUBLE_EQ(s.eval(0.5, 0.5625), 0.5);
}

TEST(CuspSignal, GridValuesAreSymmetric) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds);
  const std::vector<double> t{0.0, 0.5, 1.0};
  const auto v = s.eval_grid(0.5, t);
  EXPECT_DOUBLE_EQ(v[0], std::pow(0.5, 0.25));
  EXPECT_EQ(v[1], 0.0);
  EXPECT_DOUBLE_EQ(v[2], std::pow(0.5, 0.25));
}

TEST(CuspSignal, RejectsExponentOutsideRange) {
  EXPECT_THROW(CuspSignal(1.0, 0.5, 1.0, kBounds), DomainError);
  EXPECT_THROW(CuspSignal(1.0, 0.0, 1.0, kBounds), DomainError);
}

TEST(CuspSignal, RejectsThetaOutsideBounds) {
  const CuspSignal s(1.0, 0.25, 1.0, kBounds);
  EXPECT_THROW(s.eval(0.95, 0.5), DomainError);
}

TEST(CuspSignal, SymmetryAndAmplitudeScalingProperty) {
  const CuspSignal unit(1.0, 0.3, 1.0, kBounds);
  const CuspSignal scaled(2.5, 0.3, 1.0, kBounds);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> theta(0.1, 0.9);
  for (int i = 0; i < 500; ++i) {
    const double th = theta(rng);
    const double reach = std::min(th, 1.0 - th);
    const double d = std::uniform_real_distribution<double>(0.0, reach)(rng);
    EXPECT_DOUBLE_EQ(unit.eval(th, th + d), unit.eval(th, th - d));
    EXPECT_NEAR(scaled.eval(th, th + d), 2.5 * unit.eval(th, th + d), 1e-15);
  }
}

TEST(CuspSignal, BulkFillMatchesScalarEvaluation) {
  const CuspSignal s(1.3, 0.17, 2.0, {0.2, 1.8}, Nuisance::sine(0.4, 3.0));
  std::vector<double> t(997);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 2.0 * static_cast<double>(i) / 996.0;
  const auto v = s.eval_grid(0.77, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double expected = oracle::cusp(1.3, 0.17, 0.77, t[i]) + 0.4 * std::sin(3.0 * t[i] + 0.77);
    EXPECT_NEAR(v[i], expected, 1e-14 * std::max(1.0, std::abs(expected)));
  }
}

TEST(CuspSignal, TranslationInvariantOnlyWithoutNuisance) {
  EXPECT_TRUE(CuspSignal(1.0, 0.25, 1.0, kBounds).translation_invariant());
  EXPECT_FALSE(CuspSignal(1.0, 0.25, 1.0, kBounds, Nuisance::linear(1.0)).translation_invariant());
}

TEST(MultiCuspSignal, VanishesAtCuspAndReportsSmallestExponent) {
  const MultiCuspSignal s({{1.0, 0.3}, {2.0, 0.45}}, 1.0, kBounds);
  EXPECT_EQ(s.eval(0.5, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(s.kappa_effective(), 0.3);
  EXPECT_DOUBLE_EQ(*s.cusp_exponent(), 0.3);
  EXPECT_DOUBLE_EQ(s.leading_amplitude(), 1.0);
}

TEST(MultiCuspSignal, IsSumOfTerms) {
  const MultiCuspSignal s({{1.0, 0.2}, {0.5, 0.4}}, 1.0, kBounds);
  for (double t : {0.0, 0.13, 0.49, 0.77, 1.0}) {
    EXPECT_NEAR(s.eval(0.45, t),
                oracle::cusp(1.0, 0.2, 0.45, t) + oracle::cusp(0.5, 0.4, 0.45, t), 1e-15);
  }
}

TEST(TwoSidedCuspSignal, EqualCoefficientsMatchCusp) {
  const TwoSidedCuspSignal two(1.7, 1.7, 0.35, 1.0, kBounds);
  const CuspSignal one(1.7, 0.35, 1.0, kBounds);
  for (int i = 0; i <= 200; ++i) {
    const double t = i / 200.0;
    EXPECT_DOUBLE_EQ(two.eval(0.42, t), one.eval(0.42, t));
  }
}

TEST(TwoSidedCuspSignal, UsesSideCoefficients) {
  const TwoSidedCuspSignal s(1.0, 3.0, 0.25, 1.0, kBounds);
  EXPECT_DOUBLE_EQ(s.eval(0.5, 0.5 - 0.0625), 0.5);
  EXPECT_DOUBLE_EQ(s.eval(0.5, 0.5 + 0.0625), 1.5);
}

TEST(SmoothSignal, ConstantEntry) {
  const auto s = SmoothSignal::constant(2.0, 1.0, kBounds);
  const TimeGrid grid(1.0, 50);
  for (double v : s.eval_grid(0.5, grid)) EXPECT_EQ(v, 2.0);
}

TEST(SmoothSignal, StoredDerivativesMatchCentralDifferences) {
  const std::vector<SmoothSignal> catalog{
      SmoothSignal::quadratic(0.3, -1.2, 0.7, 1.0, kBounds),
      SmoothSignal::cosine(0.1, 0.8, 5.0, 1.0, kBounds),
      SmoothSignal::smoothed_cusp(1.0, 0.25, 0.05, 1.0, kBounds),
  };
  const double h = 1e-5;
  for (const auto& s : catalog) {
    for (double t = 0.05; t < 0.96; t += 0.0137) {
      const double f0 = s.eval(0.5, t);
      const double fp = s.eval(0.5, t + h);
      const double fm = s.eval(0.5, t - h);
      const double d1 = (fp - fm) / (2.0 * h);
      const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
      EXPECT_NEAR(s.d1(0.5, t), d1, 1e-6 * std::max(1.0, std::abs(d1))) << s.entry() << " t=" << t;
      // the second difference loses ~eps/h^2 to rounding
      EXPECT_NEAR(s.d2(0.5, t), d2, 1e-6 * std::max(1.0, std::abs(d2)) + 1e-4)
          << s.entry() << " t=" << t;
    }
  }
}

TEST(SignumSignal, SignCases) {
  const SignumSignal s(1.0, 1.0, kBounds);
  const auto v = s.eval_grid(0.5, std::vector<double>{0.25, 0.75});
  EXPECT_EQ(v[0], -1.0);
  EXPECT_EQ(v[1], 1.0);
}

TEST(SignalCatalog, ParsesEveryFamily) {
  using nlohmann::json;
  const json bounds = {0.1, 0.9};
  EXPECT_EQ(signal_from_json({{"family", "cusp"}, {"a", 1}, {"kappa", 0.25}, {"T", 1},
                              {"theta_bounds", bounds}})
                ->family(),
            "cusp");
  EXPECT_EQ(signal_from_json({{"family", "multi-cusp"},
                              {"terms", json::array({{{"a", 1}, {"kappa", 0.2}}})},
                              {"T", 1},
                              {"theta_bounds", bounds}})
                ->family(),
            "multi-cusp");
  EXPECT_EQ(signal_from_json({{"family", "smooth"}, {"entry", "constant"}, {"c", 1}, {"T", 1},
                              {"theta_bounds", bounds}})
                ->family(),
            "smooth");
  EXPECT_EQ(signal_from_json({{"family", "signum"}, {"a", 1}, {"T", 1}, {"theta_bounds", bounds}})
                ->family(),
            "signum");
}

TEST(SignalCatalog, UnknownFamilyIsDomainError) {
  EXPECT_THROW(signal_from_json({{"family", "ramp"}, {"T", 1}, {"theta_bounds", {0.1, 0.9}}}),
               DomainError);
  EXPECT_THROW(signal_from_json({{"family", "cusp"}, {"a", 1}, {"T", 1}, {"theta_bounds", {0.1, 0.9}}}),
               DomainError);
}

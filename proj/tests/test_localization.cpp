#include <gtest/gtest.h>

#include "common.hpp"
#include "equiloc/localization.hpp"
#include "equiloc/parallel.hpp"
#include "oracles.hpp"

using namespace testing_support;

namespace {

/// 2 pi times the integral of exp(-c cos t) sin t over [0, pi].
complex dh_oracle(complex c) {
  return 2 * kPi * oracle::simpson_complex([c](double t) { return std::exp(-c * std::cos(t)) * std::sin(t); }, 0, kPi);
}

double rel(complex a, complex b) { return std::abs(a - b) / (1 + std::abs(b)); }

const LoadedScenario& loaded(const std::string& id) {
  static std::map<std::string, LoadedScenario> cache;
  auto it = cache.find(id);
  if (it == cache.end()) it = cache.emplace(id, load_scenario(builtin_scenario(id), false)).first;
  return it->second;
}

}  // namespace

TEST(Localization, RealDuistermaatHeckmanAgainstOracle) {
  const complex ref = dh_oracle(1.0);
  EXPECT_NEAR(ref.real(), 4 * kPi * std::sinh(1.0), 1e-10);
  const Report r = verify_theorem1(loaded("s2-dh-a1-b0"));
  ASSERT_TRUE(r.lhs && r.rhs);
  EXPECT_LT(rel(*r.lhs, ref), 1e-6);
  EXPECT_LT(rel(*r.rhs, ref), 1e-6);
  EXPECT_TRUE(r.passed());
}

TEST(Localization, PoleContributionsOfRealDuistermaatHeckman) {
  const Report r = verify_theorem1(loaded("s2-dh-a1-b0"));
  ASSERT_EQ(r.components.size(), 2u);
  std::map<std::string, complex> got;
  for (const auto& c : r.components) got[c.id] = c.value.value();
  EXPECT_NEAR(std::abs(got["north-pole"] + 2 * kPi * std::exp(-1.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(got["south-pole"] - 2 * kPi * std::exp(1.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(got["north-pole"] + got["south-pole"] - *r.rhs), 0.0, 1e-14);
}

TEST(Localization, ComplexCaseBothSidesAgreeWithOracle) {
  const complex c(1.0, 2.0);
  const Report r = verify_theorem1(loaded("s2-dh-a1-b2"));
  ASSERT_TRUE(r.lhs && r.rhs);
  EXPECT_LT(std::abs(*r.lhs - *r.rhs), 1e-6 * (1 + std::abs(*r.lhs)));
  EXPECT_LT(rel(*r.lhs, dh_oracle(c)), 1e-6);
  EXPECT_TRUE(r.passed());
}

TEST(Localization, MetricScalingAndConformalChangeLeaveIntegralsInvariant) {
  const Report base = verify_theorem1(loaded("s2-dh-a1-b2"));
  for (const char* id : {"s2-dh-a1-b2-scaled", "s2-dh-a1-b2-conformal"}) {
    const Report r = verify_theorem1(loaded(id));
    EXPECT_TRUE(r.passed()) << id;
    EXPECT_LT(rel(*r.lhs, *base.lhs), 1e-9) << id;
    EXPECT_LT(rel(*r.rhs, *base.rhs), 1e-9) << id;
  }
}

TEST(Localization, EulerCharacteristicOfTheSphere) {
  for (const char* id : {"s2-euler-a1-b0", "s2-euler-a1-b2", "s2-euler-a0-b0"}) {
    const Report r = verify_theorem1(loaded(id));
    EXPECT_TRUE(r.passed()) << id;
    EXPECT_NEAR(std::abs(*r.lhs - 2.0), 0.0, 1e-6) << id;
    EXPECT_NEAR(std::abs(*r.rhs - 2.0), 0.0, 1e-6) << id;
  }
}

TEST(Localization, CorollaryOneOnTheRealSphere) {
  const Report r = verify_corollary1(loaded("s2-euler-a1-b0"));
  EXPECT_TRUE(r.passed());
  EXPECT_TRUE(r.preconditions.at("y_zero"));
  const Report complex_case = verify_corollary1(loaded("s2-euler-a1-b2"));
  EXPECT_FALSE(complex_case.preconditions.at("y_zero"));
  EXPECT_FALSE(complex_case.passed());
}

TEST(Localization, TorusScenariosAreExactlyZero) {
  for (const char* id : {"t2-empty", "t2-degenerate"}) {
    const Report r = verify_theorem1(loaded(id));
    EXPECT_TRUE(r.passed()) << id;
    EXPECT_EQ(*r.lhs, complex(0.0)) << id;
    EXPECT_EQ(*r.rhs, complex(0.0)) << id;
  }
  EXPECT_TRUE(verify_theorem1(loaded("t2-empty")).components.empty());
}

TEST(Localization, TheoremTwoOnSphereScenarios) {
  for (const char* id : {"s2-dh-a1-b2", "s2-euler-a0-b0"}) {
    for (int k = 0; k <= 2; ++k) {
      const Report r = verify_theorem2(loaded(id), Polynomial::monomial(k));
      EXPECT_TRUE(r.passed()) << id << " x^" << k;
      ASSERT_TRUE(r.lhs && r.rhs);
      if (k == 1) {
        EXPECT_LT(std::abs(*r.lhs), 1e-12);
        EXPECT_LT(std::abs(*r.rhs), 1e-12);
      }
    }
  }
}

TEST(Localization, LemmaFourScanAtZeroIsTheLeftHandSide) {
  const LoadedScenario& ls = loaded("s2-dh-a1-b0");
  const ChartModel& main = ls.model.main();
  const auto grid = QuadratureGrid::for_chart(main.chart, {128});
  const auto scan = lemma4_scan(main, ls.model.eta("main"), {0.0, 0.5, 1.0, 2.0}, grid);
  const complex lhs = integrate_top(main.chart, ls.model.eta("main"), grid);
  EXPECT_EQ(scan.front().second, lhs);
  EXPECT_LT(scan_spread(scan), 1e-6);
}

TEST(Localization, ScanSpreadIsRelative) {
  EXPECT_EQ(scan_spread({{0.0, 1000.0}, {1.0, 1000.0}}), 0.0);
  EXPECT_NEAR(scan_spread({{0.0, 1000.0}, {1.0, 1001.0}}), 1.0 / 1001.0, 1e-15);
  EXPECT_NEAR(scan_spread({{0.0, 0.0}, {1.0, 0.5}}), 0.5, 1e-15);
}

TEST(Localization, NegativeControlsFailWithNamedResiduals) {
  const Report closed = verify_theorem1(loaded("broken-closedness"));
  EXPECT_FALSE(closed.passed());
  const auto f1 = closed.failed_residuals();
  EXPECT_NE(std::find(f1.begin(), f1.end(), "eta_closedness"), f1.end());
  EXPECT_NE(std::find(f1.begin(), f1.end(), "lhs_rhs"), f1.end());
  const Report comm = verify_theorem1(loaded("broken-commutator"));
  EXPECT_FALSE(comm.passed());
  EXPECT_FALSE(comm.preconditions.at("commuting"));
  const auto f2 = comm.failed_residuals();
  EXPECT_NE(std::find(f2.begin(), f2.end(), "commutator"), f2.end());
  EXPECT_FALSE(comm.rhs.has_value());
}

TEST(Localization, ComponentContributionRequiresConfirmation) {
  const LoadedScenario& ls = loaded("broken-commutator");
  const ZeroComponent& z = ls.validation.components.front();
  ASSERT_FALSE(z.confirmed);
  EXPECT_THROW(component_contribution(ls.model.chart(z.decl.chart), z, ls.model.eta(z.decl.chart), {64}), DomainError);
}

TEST(Localization, ProductDuistermaatHeckmanAgainstOracle) {
  const complex c(1.0, 0.5);
  const complex ref = 4 * kPi * dh_oracle(c);
  EXPECT_LT(rel(ref, 16 * kPi * kPi * std::sinh(c) / c), 1e-10);
  const Report r = verify_theorem1(loaded("s2xs2-dh-a1-b0.5"));
  EXPECT_TRUE(r.passed());
  EXPECT_LT(rel(*r.lhs, ref), 1e-6);
  EXPECT_LT(rel(*r.rhs, ref), 1e-6);
  for (const auto& comp : r.components) EXPECT_EQ(comp.kind, "declared_submanifold");
}

TEST(Localization, ResultsDoNotDependOnThreadCount) {
  const LoadedScenario& ls = loaded("s2-dh-a1-b2");
  set_thread_count(1);
  const Report one = verify_theorem1(ls);
  set_thread_count(3);
  const Report three = verify_theorem1(ls);
  set_thread_count(0);
  EXPECT_EQ(*one.lhs, *three.lhs);
  EXPECT_EQ(*one.rhs, *three.rhs);
}

TEST(Localization, ResolutionPrecedence) {
  ScenarioSpec s = builtin_scenario("s2xs2-dh-a1-b0.5");
  VerifyConfig cfg;
  EXPECT_EQ(effective_resolution(s, cfg), (std::vector<int>{16, 8, 16, 8}));
  cfg.resolution = {32};
  EXPECT_EQ(effective_resolution(s, cfg), std::vector<int>{32});
  EXPECT_EQ(effective_resolution(builtin_scenario("s2-dh-a1-b0"), VerifyConfig{}), std::vector<int>{kDefaultResolution});
}

TEST(Localization, ResidualBounds) {
  EXPECT_TRUE((Residual{1e-12, 1e-10}).ok());
  EXPECT_FALSE((Residual{1e-9, 1e-10}).ok());
  EXPECT_TRUE((Residual{0.5, 0.1, true}).ok());
  EXPECT_FALSE((Residual{0.05, 0.1, true}).ok());
  EXPECT_FALSE((Residual{std::nan(""), 1.0}).ok());
}

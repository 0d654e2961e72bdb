#include <random>

#include <gtest/gtest.h>

#include "common.hpp"
#include "oracles.hpp"

using namespace testing_support;

namespace {

/// A non-diagonal 3-dimensional metric and its plain-double twin.
const std::vector<std::vector<std::string>> kWarped{
    {"2 + sin(x)*cos(y)", "0.3*cos(z)", "0.1*x*y"},
    {"0.3*cos(z)", "1.5 + x^2", "0.2*sin(y)"},
    {"0.1*x*y", "0.2*sin(y)", "1 + exp(0.3*z)"}};

std::vector<double> warped(const oracle::Vec& p) {
  const double x = p[0], y = p[1], z = p[2];
  const double a = 2 + std::sin(x) * std::cos(y), b = 0.3 * std::cos(z), c = 0.1 * x * y;
  const double d = 1.5 + x * x, e = 0.2 * std::sin(y), f = 1 + std::exp(0.3 * z);
  return {a, b, c, b, d, e, c, e, f};
}

Chart box3() { return Chart{"box", {"x", "y", "z"}, {-1, -1, -1}, {1, 1, 1}, {false, false, false}, 1, ""}; }

}  // namespace

TEST(Geometry, SphereChristoffelClosedForm) {
  const Chart c = sphere_chart();
  const ConnectionField G = christoffel(round_sphere(c));
  for (const auto& p : c.samples(20, 3)) {
    const Christoffel g = G.at(p);
    const double t = p[0];
    EXPECT_NEAR(g(0, 1, 1).value().real(), -std::sin(t) * std::cos(t), 1e-14);
    EXPECT_NEAR(g(1, 0, 1).value().real(), std::cos(t) / std::sin(t), 1e-12);
    EXPECT_NEAR(g(1, 1, 0).value().real(), std::cos(t) / std::sin(t), 1e-12);
    EXPECT_NEAR(std::abs(g(0, 0, 0).value()) + std::abs(g(1, 1, 1).value()), 0.0, 1e-14);
  }
}

TEST(Geometry, SphereCurvatureIsOne) {
  const Chart c = sphere_chart();
  const CurvatureField R = riemann(christoffel(round_sphere(c)));
  for (const auto& p : c.samples(20, 4)) {
    const FormMatrix r = R.at(p);
    const double s2 = std::pow(std::sin(p[0]), 2);
    EXPECT_NEAR(riemann_component(r, 0, 1, 0, 1).value().real(), s2, 1e-12);
    EXPECT_NEAR(riemann_component(r, 1, 0, 0, 1).value().real(), -1.0, 1e-12);
    EXPECT_NEAR(riemann_component(r, 0, 1, 1, 0).value().real(), -s2, 1e-12);
  }
}

TEST(Geometry, ChristoffelMatchesFiniteDifferenceOracle) {
  const Chart c = box3();
  const ConnectionField G = christoffel(metric(c, kWarped));
  for (const auto& p : c.samples(10, 5)) {
    const auto ref = oracle::christoffel(warped, p, 3);
    const Christoffel g = G.at(p);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(g(k, i, j).value().real(), ref[k * 9 + i * 3 + j], 1e-8);
  }
}

TEST(Geometry, RiemannMatchesFiniteDifferenceOracle) {
  const Chart c = box3();
  const CurvatureField R = riemann(christoffel(metric(c, kWarped)));
  for (const auto& p : c.samples(4, 6)) {
    const auto ref = oracle::riemann(warped, p, 3);
    const FormMatrix r = R.at(p);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            EXPECT_NEAR(riemann_component(r, i, j, k, l).value().real(), ref[((i * 3 + j) * 3 + k) * 3 + l], 5e-6);
  }
}

TEST(Geometry, LeviCivitaConnectionIsMetricCompatible) {
  const Chart c = box3();
  const MetricField g = metric(c, kWarped);
  EXPECT_LT(metric_compatibility_residual(g, christoffel(g), c.samples(20, 7)), 1e-12);
}

TEST(Geometry, KillingResiduals) {
  const Chart c = sphere_chart();
  const MetricField g = round_sphere(c);
  const auto pts = c.samples(50, 8);
  EXPECT_LT(killing_residual(field(c, {"0", "1"}), g, pts), 1e-14);
  EXPECT_GT(killing_residual(field(c, {"1", "0"}), g, pts), 0.1);
  const Chart t = torus_chart();
  const MetricField flat = metric(t, {{"1", "0"}, {"0", "1"}});
  EXPECT_LT(killing_residual(field(t, {"1", "0"}), flat, t.samples(50, 9)), 1e-15);
  EXPECT_GT(killing_residual(field(t, {"sin(y)", "0"}), flat, t.samples(50, 9)), 0.1);
}

TEST(Geometry, MusicalFlatLowersIndex) {
  const Chart c = sphere_chart();
  const MixedForm w = musical_flat(field(c, {"1", "2"}), round_sphere(c));
  const std::vector<double> p{0.6, 1.1};
  const FormJet v = w.at(p);
  EXPECT_NEAR(v[1].value().real(), 1.0, 1e-15);
  EXPECT_NEAR(v[2].value().real(), 2.0 * std::pow(std::sin(0.6), 2), 1e-15);
}

TEST(Geometry, VolumeFormAndOrientation) {
  const Chart c = sphere_chart();
  const std::vector<double> p{0.6, 1.1};
  EXPECT_NEAR(volume_form(round_sphere(c), 1).at(p)[3].value().real(), std::sin(0.6), 1e-15);
  EXPECT_NEAR(volume_form(round_sphere(c), -1).at(p)[3].value().real(), -std::sin(0.6), 1e-15);
  const MetricField bad = metric(c, {{"-1", "0"}, {"0", "1"}});
  EXPECT_THROW(volume_form(bad, 1).at(p), SingularMatrix);
}

TEST(Geometry, InverseAndDeterminantAgreeWithLuOracle) {
  const Chart c = box3();
  const MetricField g = metric(c, kWarped);
  for (const auto& p : c.samples(5, 10)) {
    const JetMatrix m = g.at(p);
    const auto ref = warped(p);
    EXPECT_NEAR(determinant(m).value().real(), oracle::det(ref, 3), 1e-12);
    const auto inv = oracle::inverse(ref, 3);
    const JetMatrix mi = inverse(m);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_NEAR(mi(i, j).value().real(), inv[i * 3 + j], 1e-12);
  }
  JetMatrix singular(2);
  singular(0, 0) = Jet(0, 0, 1.0);
  singular(0, 1) = Jet(0, 0, 2.0);
  singular(1, 0) = Jet(0, 0, 2.0);
  singular(1, 1) = Jet(0, 0, 4.0);
  EXPECT_THROW(inverse(singular), SingularMatrix);
}

TEST(Geometry, ChartValidation) {
  Chart c = sphere_chart();
  EXPECT_NO_THROW(c.check());
  c.upper[0] = c.lower[0];
  EXPECT_THROW(c.check(), SchemaError);
  c = sphere_chart();
  c.orientation = 0;
  EXPECT_THROW(c.check(), SchemaError);
  c = sphere_chart();
  c.periodic.pop_back();
  EXPECT_THROW(c.check(), SchemaError);
}

TEST(Geometry, SamplesStayInsideTheBoxAndAreDeterministic) {
  const Chart c = sphere_chart();
  const auto a = c.samples(100, 11), b = c.samples(100, 11);
  EXPECT_EQ(a, b);
  for (const auto& p : a) {
    EXPECT_GT(p[0], 0.05 * kPi - 1e-12);
    EXPECT_LT(p[0], 0.95 * kPi + 1e-12);
    EXPECT_GE(p[1], 0.0);
    EXPECT_LT(p[1], 2 * kPi);
  }
}

#include <gtest/gtest.h>

#include "common.hpp"
#include "equiloc/quadrature.hpp"
#include "oracles.hpp"

using namespace testing_support;

namespace {

MixedForm top_form(const Chart& c, std::function<Jet(const Seed&)> density) {
  const int n = c.dim();
  return {c.id, n, 0, [density, n](const Seed& s) {
            FormJet w(n);
            w[(1u << n) - 1u] = density(s);
            return w;
          }};
}

}  // namespace

TEST(Quadrature, GaussLegendreIsExactForPolynomials) {
  for (int n : {1, 2, 5, 16, 64}) {
    const Rule1D r = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : r.weights) wsum += w;
    EXPECT_NEAR(wsum, 2.0, 1e-14);
    for (int k = 0; k <= 2 * n - 1 && k <= 40; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      EXPECT_NEAR(s, k % 2 ? 0.0 : 2.0 / (k + 1), 1e-13) << "n=" << n << " k=" << k;
    }
  }
  EXPECT_THROW(gauss_legendre(0), DomainError);
}

TEST(Quadrature, PeriodicAxisUsesUniformTrapezoid) {
  const Rule1D r = axis_rule(0.0, 2 * kPi, true, 8);
  ASSERT_EQ(r.nodes.size(), 8u);
  for (std::size_t k = 0; k < 8; ++k) {
    EXPECT_NEAR(r.nodes[k], k * kPi / 4, 1e-15);
    EXPECT_NEAR(r.weights[k], kPi / 4, 1e-15);
  }
  double s = 0.0;
  for (std::size_t k = 0; k < 8; ++k) s += r.weights[k] * std::pow(std::cos(r.nodes[k]), 6);
  EXPECT_NEAR(s, 2 * kPi * 10.0 / 32.0, 1e-14);
}

TEST(Quadrature, SphereArea) {
  const Chart c = sphere_chart();
  const complex area = integrate_top(c, volume_form(round_sphere(c), 1), QuadratureGrid::for_chart(c, {64}));
  EXPECT_NEAR(area.real(), 4 * kPi, 1e-10);
  EXPECT_EQ(area.imag(), 0.0);
}

TEST(Quadrature, ExponentialDensityAgainstSimpsonOracle) {
  const Chart c = sphere_chart();
  const MixedForm w = top_form(c, [](const Seed& s) { return exp(-cos(s.coordinate(0))) * sin(s.coordinate(0)); });
  const double ref = 2 * kPi * oracle::simpson([](double t) { return std::exp(-std::cos(t)) * std::sin(t); }, 0, kPi);
  EXPECT_NEAR(ref, 4 * kPi * std::sinh(1.0), 1e-10);
  EXPECT_NEAR(std::abs(integrate_top(c, w, QuadratureGrid::for_chart(c, {128})) - ref), 0.0, 1e-10);
}

TEST(Quadrature, ComplexDensityAgainstSimpsonOracle) {
  const Chart c = sphere_chart();
  const complex k(1.0, 2.0);
  const MixedForm w = top_form(c, [k](const Seed& s) {
    return exp(-k * cos(s.coordinate(0))) * sin(s.coordinate(0)) * (1.0 + 0.5 * cos(s.coordinate(1)));
  });
  const complex ref =
      2 * kPi * oracle::simpson_complex([k](double t) { return std::exp(-k * std::cos(t)) * std::sin(t); }, 0, kPi);
  const complex got = integrate_top(c, w, QuadratureGrid::for_chart(c, {128, 64}));
  EXPECT_LT(std::abs(got - ref), 1e-10 * (1 + std::abs(ref)));
}

TEST(Quadrature, LowerDegreePartsDoNotContribute) {
  const Chart c = sphere_chart();
  const MixedForm w{c.id, 2, 0, [](const Seed& s) {
                      FormJet f(2);
                      f[0] = s.constant(5.0);
                      f[1] = cos(s.coordinate(1));
                      f[2] = s.constant(3.0);
                      return f;
                    }};
  EXPECT_EQ(integrate_top(c, w, QuadratureGrid::for_chart(c, {16})), complex(0.0));
}

TEST(Quadrature, OrientationFlipsTheSign) {
  Chart c = sphere_chart();
  const auto grid = QuadratureGrid::for_chart(c, {32});
  const complex plus = integrate_top(c, volume_form(round_sphere(c), 1), grid);
  c.orientation = -1;
  EXPECT_EQ(integrate_top(c, volume_form(round_sphere(c), 1), grid), -plus);
}

TEST(Quadrature, StokesOnTheTorus) {
  const Chart t = torus_chart();
  const MixedForm alpha{t.id, 2, 0, [](const Seed& s) {
                          FormJet f(2);
                          f[1] = sin(s.coordinate(1)) * exp(cos(s.coordinate(0)));
                          f[2] = cos(s.coordinate(0) + 2.0 * s.coordinate(1));
                          return f;
                        }};
  EXPECT_LT(std::abs(integrate_top(t, exterior_derivative(alpha), QuadratureGrid::for_chart(t, {32}))), 1e-13);
  const MixedForm area = top_form(t, [](const Seed& s) { return s.constant(1.0); });
  EXPECT_NEAR(integrate_top(t, area, QuadratureGrid::for_chart(t, {8})).real(), 4 * kPi * kPi, 1e-12);
}

TEST(Quadrature, ConvergesWithResolution) {
  const Chart c = sphere_chart();
  const MixedForm w = top_form(c, [](const Seed& s) { return exp(2.0 * cos(s.coordinate(0))) * sin(s.coordinate(0)); });
  const double ref = 4 * kPi * std::sinh(2.0) / 2.0;
  double prev = 1e300;
  for (int n : {4, 8, 16}) {
    const double err = std::abs(integrate_top(c, w, QuadratureGrid::for_chart(c, {n})).real() - ref);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-10);
}

TEST(Quadrature, MismatchedGridOrChartIsRejected) {
  const Chart c = sphere_chart();
  const MixedForm w = volume_form(round_sphere(c), 1);
  EXPECT_THROW(integrate_top(c, w, QuadratureGrid({axis_rule(0.0, 1.0, false, 4)})), DomainError);
  Chart other = c;
  other.id = "other";
  EXPECT_THROW(integrate_top(other, w, QuadratureGrid::for_chart(c, {8})), ChartMismatch);
}

TEST(Quadrature, ResolutionBroadcastAndGridSize) {
  EXPECT_EQ(QuadratureGrid::pick({}, 3), kDefaultResolution);
  EXPECT_EQ(QuadratureGrid::pick({16}, 3), 16);
  EXPECT_EQ(QuadratureGrid::pick({16, 8}, 1), 8);
  EXPECT_EQ(QuadratureGrid::for_chart(sphere_chart(), {16, 8}).size(), 128u);
}

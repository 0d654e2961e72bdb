#include <random>

#include <gtest/gtest.h>

#include "common.hpp"
#include "equiloc/forms.hpp"
#include "oracles.hpp"

using namespace equiloc;
using namespace testing_support;

namespace {

/// Random polynomial-times-exponential form with jets at order 3.
FormJet random_form(int n, const Seed& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FormJet w(n);
  for (unsigned m = 0; m < w.size(); ++m) {
    Jet lin = s.constant(complex(u(rng), u(rng)));
    for (int i = 0; i < n; ++i) lin += u(rng) * s.coordinate(i);
    w[m] = exp(0.3 * lin) + lin * lin;
  }
  return w;
}

double gap(const FormJet& a, const FormJet& b) { return (a - b).max_abs(); }

}  // namespace

TEST(Forms, WedgeOfCoordinateDifferentialsIsAntisymmetric) {
  const Seed s(std::vector<double>{0.1, 0.2, 0.3}, 0);
  FormJet dx(3), dy(3);
  dx[1] = s.constant(1.0);
  dy[2] = s.constant(1.0);
  const FormJet a = wedge(dx, dy), b = wedge(dy, dx);
  EXPECT_EQ(a[3].value(), complex(1.0));
  EXPECT_EQ(b[3].value(), complex(-1.0));
  EXPECT_EQ(wedge(dx, dx).max_abs(), 0.0);
}

TEST(Forms, ExteriorDerivativeSquaresToZero) {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 4; ++n) {
    const Seed s(std::vector<double>(n, 0.25), 3);
    const FormJet w = random_form(n, s, rng);
    EXPECT_LT(exterior_derivative(exterior_derivative(w)).max_abs(), 1e-13) << "dim " << n;
  }
}

TEST(Forms, GradedLeibnizRule) {
  std::mt19937_64 rng(6);
  const int n = 3;
  const Seed s(std::vector<double>{0.1, -0.3, 0.7}, 3);
  for (int da = 0; da <= n; ++da) {
    const FormJet a = random_form(n, s, rng).part(da), b = random_form(n, s, rng);
    const FormJet lhs = exterior_derivative(wedge(a, b));
    const FormJet rhs = wedge(exterior_derivative(a), b) + (da % 2 ? -1.0 : 1.0) * wedge(a, exterior_derivative(b));
    EXPECT_LT(gap(lhs, rhs), 1e-12);
  }
}

TEST(Forms, InteriorProductIsAGradedDerivationAndNilpotent) {
  std::mt19937_64 rng(7);
  const int n = 4;
  const Seed s(std::vector<double>{0.1, 0.2, 0.3, 0.4}, 3);
  const JetVector V{s.coordinate(1), s.constant(complex(0.0, 1.0)), s.coordinate(0) * s.coordinate(3), s.constant(2.0)};
  const FormJet a = random_form(n, s, rng).part(1), b = random_form(n, s, rng);
  EXPECT_LT(interior_product(V, interior_product(V, b)).max_abs(), 1e-13);
  const FormJet lhs = interior_product(V, wedge(a, b));
  const FormJet rhs = wedge(interior_product(V, a), b) - wedge(a, interior_product(V, b));
  EXPECT_LT(gap(lhs, rhs), 1e-12);
}

TEST(Forms, LieDerivativeOfFunctionIsDirectionalDerivative) {
  const Chart c = torus_chart();
  const auto f = [](const oracle::Vec& p) { return std::sin(p[0]) * std::exp(0.5 * p[1]); };
  const std::vector<double> p{0.8, -0.3};
  const Seed s(p, 2);
  const FormJet w = FormJet::scalar(2, sin(s.coordinate(0)) * exp(0.5 * s.coordinate(1)));
  const JetVector V{s.constant(1.5), s.coordinate(0)};
  const complex got = lie_derivative(V, w)[0].value();
  const double expect = 1.5 * oracle::d1(f, p, 0) + p[0] * oracle::d1(f, p, 1);
  EXPECT_NEAR(std::abs(got - expect), 0.0, 1e-9);
}

TEST(Forms, LieDerivativeCommutesWithExteriorDerivative) {
  std::mt19937_64 rng(8);
  const Seed s(std::vector<double>{0.3, 0.6, 0.9}, 3);
  const JetVector V{sin(s.coordinate(1)), s.coordinate(0) * s.coordinate(2), s.constant(0.5)};
  const FormJet w = random_form(3, s, rng);
  EXPECT_LT(gap(exterior_derivative(lie_derivative(V, w)), lie_derivative(V, exterior_derivative(w))), 1e-11);
}

TEST(Forms, ExponentialOfEvenFormsIsMultiplicative) {
  std::mt19937_64 rng(9);
  const Seed s(std::vector<double>{0.2, 0.1, 0.4, 0.3}, 1);
  const FormJet a = random_form(4, s, rng).part(0) + random_form(4, s, rng).part(2);
  const FormJet b = random_form(4, s, rng).part(2) + random_form(4, s, rng).part(4);
  EXPECT_LT(gap(exp(a + b), wedge(exp(a), exp(b))), 1e-12);
}

TEST(Forms, ExponentialOfTwoFormIsTruncatedSeries) {
  const Seed s(std::vector<double>{0.0, 0.0}, 0);
  FormJet u(2);
  u[0] = s.constant(0.5);
  u[3] = s.constant(2.0);
  const FormJet e = exp(u);
  EXPECT_NEAR(std::abs(e[0].value() - std::exp(0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e[3].value() - 2.0 * std::exp(0.5)), 0.0, 1e-14);
}

TEST(Forms, DimensionMismatchThrows) {
  EXPECT_THROW(FormJet(2) + FormJet(3), DomainError);
  const Seed s(std::vector<double>{0.0, 0.0}, 1);
  const JetVector V{s.constant(1.0)};
  EXPECT_THROW(interior_product(V, FormJet(2)), DomainError);
  EXPECT_THROW(Seed(std::vector<double>{0.0}, 4), DomainError);
}

TEST(Forms, FieldsOnDifferentChartsDoNotMix) {
  const MixedForm a = constant_form("a", 2, 1.0), b = constant_form("b", 2, 1.0);
  EXPECT_THROW(a + b, ChartMismatch);
  EXPECT_THROW(wedge(a, b), ChartMismatch);
}

TEST(Expressions, EvaluateAgainstPlainArithmetic) {
  const std::vector<std::string> vars{"t", "p"};
  const std::map<std::string, complex> params{{"a", 2.0}, {"b", complex(0.0, 1.0)}};
  const Expression e = Expression::parse("a*sin(t)^2 - cos(p)/3 + b*exp(t*p) + atan2(p, t) + pi", vars, params);
  const std::vector<double> p{0.7, 1.3};
  const complex got = e.eval(Seed(p, 0)).value();
  const complex expect = 2.0 * std::pow(std::sin(0.7), 2) - std::cos(1.3) / 3.0 + complex(0, 1) * std::exp(0.7 * 1.3) +
                         std::atan2(1.3, 0.7) + std::numbers::pi;
  EXPECT_NEAR(std::abs(got - expect), 0.0, 1e-14);
}

TEST(Expressions, DerivativesMatchFiniteDifferences) {
  const Expression e = Expression::parse("sqrt(1 - u^2 - v^2) * exp(u*v)", {"u", "v"});
  const auto f = [](const oracle::Vec& q) { return std::sqrt(1 - q[0] * q[0] - q[1] * q[1]) * std::exp(q[0] * q[1]); };
  const std::vector<double> p{0.2, -0.35};
  const Jet j = e.eval(Seed(p, 2));
  EXPECT_NEAR(j.derivative({1, 0, 0, 0}).real(), oracle::d1(f, p, 0), 1e-8);
  EXPECT_NEAR(j.derivative({0, 1, 0, 0}).real(), oracle::d1(f, p, 1), 1e-8);
  EXPECT_NEAR(j.derivative({1, 1, 0, 0}).real(), oracle::d2(f, p, 0, 1), 1e-6);
}

TEST(Expressions, RejectsUnknownNamesAndSyntaxErrors) {
  EXPECT_THROW(Expression::parse("sin(q)", {"t"}), SchemaError);
  EXPECT_THROW(Expression::parse("t +", {"t"}), SchemaError);
  EXPECT_THROW(Expression::parse("frob(t)", {"t"}), SchemaError);
  EXPECT_THROW(Expression::parse("(t", {"t"}), SchemaError);
}

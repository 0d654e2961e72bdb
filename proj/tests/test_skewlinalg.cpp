#include <random>

#include <gtest/gtest.h>

#include "common.hpp"
#include "equiloc/skewlinalg.hpp"
#include "oracles.hpp"

using namespace testing_support;

namespace {

std::vector<complex> random_skew(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<complex> a(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      a[i * n + j] = complex(d(rng), d(rng));
      a[j * n + i] = -a[i * n + j];
    }
  return a;
}

std::vector<complex> random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<complex> b(static_cast<std::size_t>(n * n));
  for (auto& x : b) x = complex(d(rng), d(rng));
  return b;
}

}  // namespace

TEST(Pfaffian, SmallClosedForms) {
  EXPECT_EQ(pfaffian(SkewMatrix(0, {})), complex(1.0));
  EXPECT_EQ(pfaffian(SkewMatrix(2, {0, 3.0, -3.0, 0})), complex(3.0));
  const complex a = 1.0, b = 2.0, c = complex(0, 1), d = 4.0, e = -1.0, f = 0.5;
  const SkewMatrix m(4, {0, a, b, c, -a, 0, d, e, -b, -d, 0, f, -c, -e, -f, 0});
  EXPECT_NEAR(std::abs(pfaffian(m) - (a * f - b * e + c * d)), 0.0, 1e-15);
}

TEST(Pfaffian, SquareIsDeterminantOnRandomMatrices) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 * (1 + trial % 4);
    const auto a = random_skew(n, rng);
    const complex pf = pfaffian(SkewMatrix(n, a));
    const complex det = oracle::det(a, n);
    EXPECT_LT(std::abs(pf * pf - det), 1e-9 * std::max(1.0, std::abs(det))) << "n = " << n;
  }
}

TEST(Pfaffian, MatchesPermutationSum) {
  std::mt19937_64 rng(32);
  for (int n : {2, 4, 6}) {
    const auto a = random_skew(n, rng);
    EXPECT_LT(std::abs(pfaffian(SkewMatrix(n, a)) - oracle::pfaffian_permutations(a, n)), 1e-12);
  }
}

TEST(Pfaffian, CongruenceCovariance) {
  std::mt19937_64 rng(33);
  for (int n : {2, 4, 6, 8}) {
    const auto a = random_skew(n, rng);
    const auto b = random_matrix(n, rng);
    std::vector<complex> bab(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) bab[i * n + j] += b[i * n + k] * a[k * n + l] * b[j * n + l];
    const complex lhs = pfaffian(SkewMatrix(n, bab));
    const complex rhs = oracle::det(b, n) * pfaffian(SkewMatrix(n, a));
    EXPECT_LT(std::abs(lhs - rhs), 1e-9 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Pfaffian, SwappingAnIndexPairFlipsTheSign) {
  std::mt19937_64 rng(34);
  const int n = 6;
  const auto a = random_skew(n, rng);
  std::vector<complex> s(a.size());
  const int perm[] = {0, 3, 2, 1, 4, 5};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s[i * n + j] = a[perm[i] * n + perm[j]];
  EXPECT_LT(std::abs(pfaffian(SkewMatrix(n, s)) + pfaffian(SkewMatrix(n, a))), 1e-12);
}

TEST(Pfaffian, RejectsOddAndNonSkewInput) {
  EXPECT_THROW(SkewMatrix(3, std::vector<complex>(9, 0.0)), DomainError);
  EXPECT_THROW(SkewMatrix(2, {0, 1.0, 1.0, 0}), DomainError);
  EXPECT_THROW(SkewMatrix(2, {0, 1.0, -1.0}), DomainError);
  EXPECT_NO_THROW(SkewMatrix(2, {0, 1.0, -1.0 + 1e-12, 0}));
}

TEST(Pfaffian, FormMatrixPfaffianOfConstantBlockAndNormalization) {
  FormMatrix B(2, 2);
  B(0, 1)[0] = Jet(0, 0, complex(0, 3));
  B(1, 0)[0] = Jet(0, 0, complex(0, -3));
  B(0, 1)[3] = Jet(0, 0, 1.0);
  B(1, 0)[3] = Jet(0, 0, -1.0);
  const FormJet pf = pfaffian_of_form_matrix(B, 2 * kPi);
  EXPECT_NEAR(std::abs(pf[0].value() - complex(0, 3) / (2 * kPi)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(pf[3].value() - 1.0 / (2 * kPi)), 0.0, 1e-15);
  const FormJet empty = pfaffian_of_form_matrix(FormMatrix(0, 2), 2 * kPi, 2);
  EXPECT_EQ(empty[0].value(), complex(1.0));
  EXPECT_THROW(pfaffian_of_form_matrix(FormMatrix(3, 2), 1.0), DomainError);
  B(1, 0)[0] = Jet(0, 0, 1.0);
  EXPECT_THROW(pfaffian_of_form_matrix(B, 1.0), DomainError);
}

TEST(Pfaffian, FourByFourFormPfaffianMatchesWedgeExpansion) {
  std::mt19937_64 rng(35);
  std::normal_distribution<double> d(0.0, 1.0);
  const int dim = 4;
  FormMatrix B(4, dim);
  std::vector<complex> c0(16, 0.0), c2(16 * 16, 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const complex v(d(rng), d(rng));
      B(i, j)[0] = Jet(0, 0, v);
      B(j, i)[0] = Jet(0, 0, -v);
      for (unsigned m : {3u, 5u, 12u}) {
        const complex w(d(rng), d(rng));
        B(i, j)[m] = Jet(0, 0, w);
        B(j, i)[m] = Jet(0, 0, -w);
      }
    }
  const FormJet pf = pfaffian_of_form_matrix(B, 1.0);
  auto entry = [&](int i, int j) { return B(i, j); };
  const FormJet ref = wedge(entry(0, 1), entry(2, 3)) - wedge(entry(0, 2), entry(1, 3)) + wedge(entry(0, 3), entry(1, 2));
  EXPECT_LT((pf - ref).max_abs(), 1e-13);
}

TEST(MixedFormInverse, ProductWithInverseIsOne) {
  std::mt19937_64 rng(36);
  std::normal_distribution<double> d(0.0, 1.0);
  for (int dim : {2, 4}) {
    FormJet u(dim);
    for (unsigned m = 0; m < u.size(); ++m)
      if (std::popcount(m) % 2 == 0) u[m] = Jet(0, 0, complex(d(rng), d(rng)));
    u[0] = Jet(0, 0, complex(1.5, -0.5));
    const FormJet v = inverse_of_mixed_form(u);
    FormJet one(dim);
    one[0] = Jet(0, 0, 1.0);
    EXPECT_LT((wedge(u, v) - one).max_abs(), 1e-13);
    EXPECT_LT((wedge(v, u) - one).max_abs(), 1e-13);
  }
  FormJet degenerate(2);
  degenerate[3] = Jet(0, 0, 1.0);
  EXPECT_THROW(inverse_of_mixed_form(degenerate), DomainError);
}

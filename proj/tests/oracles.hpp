#pragma once

// Reference computations for the tests, written independently of the library:
// finite differences on plain functions, dense LU determinants, Pfaffians by
// permutation sums and adaptive Simpson quadrature.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using Vec = std::vector<double>;
using Metric = std::function<std::vector<double>(const Vec&)>;

template <class F>
auto d1(F f, Vec p, int i, double h = 1e-5) {
  Vec a = p, b = p;
  a[i] += h;
  b[i] -= h;
  return (f(a) - f(b)) / (2.0 * h);
}

template <class F>
auto d2(F f, Vec p, int i, int j, double h = 1e-4) {
  auto fi = [&](const Vec& q) { return d1(f, q, i, h); };
  return d1(fi, p, j, h);
}

inline cd det(std::vector<cd> a, int n) {
  cd d = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (std::abs(a[piv * n + c]) == 0.0) return 0.0;
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      d = -d;
    }
    d *= a[c * n + c];
    for (int r = c + 1; r < n; ++r) {
      const cd f = a[r * n + c] / a[c * n + c];
      for (int k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
    }
  }
  return d;
}

inline double det(const std::vector<double>& a, int n) {
  std::vector<cd> c(a.begin(), a.end());
  return det(c, n).real();
}

inline std::vector<double> inverse(std::vector<double> a, int n) {
  std::vector<double> inv(n * n, 0.0);
  for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    for (int k = 0; k < n; ++k) {
      std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(inv[c * n + k], inv[piv * n + k]);
    }
    const double p = a[c * n + c];
    for (int k = 0; k < n; ++k) {
      a[c * n + k] /= p;
      inv[c * n + k] /= p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r * n + c];
      for (int k = 0; k < n; ++k) {
        a[r * n + k] -= f * a[c * n + k];
        inv[r * n + k] -= f * inv[c * n + k];
      }
    }
  }
  return inv;
}

/// Pf(A) = 1/(2^m m!) sum over permutations of sgn(s) prod a(s(2k), s(2k+1)).
inline cd pfaffian_permutations(const std::vector<cd>& a, int n) {
  if (n == 0) return 1.0;
  std::vector<int> s(n);
  std::iota(s.begin(), s.end(), 0);
  cd sum = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) inversions += s[i] > s[j];
    cd term = (inversions % 2) ? -1.0 : 1.0;
    for (int k = 0; k < n; k += 2) term *= a[s[k] * n + s[k + 1]];
    sum += term;
  } while (std::next_permutation(s.begin(), s.end()));
  double norm = 1.0;
  for (int k = 1; k <= n / 2; ++k) norm *= 2.0 * k;
  return sum / norm;
}

namespace detail {
template <class F>
double simpson_rec(F& f, double a, double b, double fa, double fm, double fb, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm), right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps) return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson quadrature of a real function on [a, b].
template <class F>
double simpson(F f, double a, double b, double eps = 1e-13) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return detail::simpson_rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, 50);
}

template <class F>
cd simpson_complex(F f, double a, double b, double eps = 1e-13) {
  return {simpson([&](double x) { return f(x).real(); }, a, b, eps),
          simpson([&](double x) { return f(x).imag(); }, a, b, eps)};
}

/// Christoffel symbols Gamma^k_ij by central differences of g, index k*n*n + i*n + j.
inline std::vector<double> christoffel(const Metric& g, const Vec& p, int n, double h = 1e-5) {
  const auto gi = inverse(g(p), n);
  std::vector<double> dg(n * n * n);
  for (int l = 0; l < n; ++l) {
    Vec a = p, b = p;
    a[l] += h;
    b[l] -= h;
    const auto ga = g(a), gb = g(b);
    for (int i = 0; i < n * n; ++i) dg[l * n * n + i] = (ga[i] - gb[i]) / (2 * h);
  }
  auto D = [&](int l, int i, int j) { return dg[l * n * n + i * n + j]; };
  std::vector<double> G(n * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += gi[k * n + l] * (D(i, j, l) + D(j, i, l) - D(l, i, j));
        G[k * n * n + i * n + j] = 0.5 * s;
      }
  return G;
}

/// R^i_{jkl} = d_k G^i_lj - d_l G^i_kj + G^i_km G^m_lj - G^i_lm G^m_kj, index ((i*n + j)*n + k)*n + l.
inline std::vector<double> riemann(const Metric& g, const Vec& p, int n, double h = 1e-4) {
  const auto G = christoffel(g, p, n);
  std::vector<std::vector<double>> dG(n);
  for (int k = 0; k < n; ++k) {
    Vec a = p, b = p;
    a[k] += h;
    b[k] -= h;
    const auto Ga = christoffel(g, a, n), Gb = christoffel(g, b, n);
    dG[k].resize(G.size());
    for (std::size_t m = 0; m < G.size(); ++m) dG[k][m] = (Ga[m] - Gb[m]) / (2 * h);
  }
  auto g3 = [&](int k, int i, int j) { return G[k * n * n + i * n + j]; };
  std::vector<double> R(n * n * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = dG[k][i * n * n + l * n + j] - dG[l][i * n * n + k * n + j];
          for (int m = 0; m < n; ++m) s += g3(i, k, m) * g3(m, l, j) - g3(i, l, m) * g3(m, k, j);
          R[((i * n + j) * n + k) * n + l] = s;
        }
  return R;
}

}  // namespace oracle

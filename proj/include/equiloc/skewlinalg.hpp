#pragma once

// Pfaffians of complex skew-symmetric matrices and of skew matrices whose
// entries are even-degree mixed forms, plus inversion of mixed forms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "equiloc/error.hpp"
#include "equiloc/forms.hpp"

namespace equiloc {

/// Complex skew-symmetric matrix of even size, stored row-major.
class SkewMatrix {
 public:
  static constexpr double kAsymmetryGuard = 1e-9;

  SkewMatrix() = default;

  /// Skew-symmetrizes `entries` (n x n, row-major). Rejects odd n and inputs
  /// whose symmetric part exceeds the guard.
  SkewMatrix(int n, std::vector<complex> entries) : n_(n), a_(std::move(entries)) {
    if (n < 0 || n % 2 != 0) throw DomainError("Pfaffian needs an even-sized matrix, got " + std::to_string(n));
    if (a_.size() != static_cast<std::size_t>(n * n)) throw DomainError("skew matrix entry count mismatch");
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const complex s = at(i, j) + at(j, i);
        if (std::abs(s) > kAsymmetryGuard)
          throw DomainError("matrix is not skew-symmetric: |A + A^T| = " + std::to_string(std::abs(s)));
        const complex v = 0.5 * (at(i, j) - at(j, i));
        at(i, j) = v;
        at(j, i) = -v;
      }
  }

  int size() const noexcept { return n_; }
  complex operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }
  const std::vector<complex>& entries() const noexcept { return a_; }

 private:
  complex& at(int i, int j) { return a_[static_cast<std::size_t>(i * n_ + j)]; }

  int n_ = 0;
  std::vector<complex> a_;
};

namespace detail {

/// Matching-sum Pfaffian by expansion along the first remaining index:
/// Pf = sum_k (-1)^(k-1) a(l0, lk) Pf(rest without l0, lk).
template <class T, class Entry, class Mul>
T pfaffian_rec(std::vector<int>& idx, const Entry& entry, const Mul& mul, const T& one) {
  if (idx.empty()) return one;
  const int first = idx[0];
  T sum{};
  bool have = false;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    const int other = idx[k];
    std::vector<int> rest;
    rest.reserve(idx.size() - 2);
    for (std::size_t m = 1; m < idx.size(); ++m)
      if (m != k) rest.push_back(idx[m]);
    T term = mul(entry(first, other), pfaffian_rec(rest, entry, mul, one));
    if (k % 2 == 0) term = -term;
    if (have) {
      sum = sum + term;
    } else {
      sum = term;
      have = true;
    }
  }
  return sum;
}

}  // namespace detail

inline complex pfaffian(const SkewMatrix& A) {
  std::vector<int> idx(static_cast<std::size_t>(A.size()));
  for (int i = 0; i < A.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
  return detail::pfaffian_rec<complex>(
      idx, [&](int i, int j) { return A(i, j); }, [](complex a, complex b) { return a * b; }, complex(1.0));
}

/// Pfaffian of a skew matrix of mixed forms, products taken as wedges (the
/// entries are of even degree, so they commute), divided by normalization^m.
/// `dim` is the form dimension used for the empty (rank 0) case.
inline FormJet pfaffian_of_form_matrix(const FormMatrix& B, double normalization, int dim = -1) {
  const int n = B.size();
  if (n % 2 != 0) throw DomainError("odd normal rank " + std::to_string(n) + ": Pfaffian undefined");
  const int fd = n > 0 ? B.dim() : std::max(dim, 0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double r = (B(i, j) + B(j, i)).max_abs();
      if (r > SkewMatrix::kAsymmetryGuard)
        throw DomainError("form matrix is not skew: residual " + std::to_string(r));
    }
  const FormJet one = FormJet::scalar(fd, Jet(0, kMaxOrder, 1.0));
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  FormJet pf = detail::pfaffian_rec<FormJet>(
      idx, [&](int i, int j) { return B(i, j); }, [](const FormJet& a, const FormJet& b) { return wedge(a, b); },
      one);
  return pf * complex(std::pow(normalization, -n / 2));
}

/// u^{-1} = u0^{-1} sum_k (-N/u0)^k where N is the positive-degree part of u.
inline FormJet inverse_of_mixed_form(const FormJet& u) {
  const Jet u0 = u[0];
  if (std::abs(u0.value()) == 0.0)
    throw DomainError("mixed form has vanishing 0-form part: degenerate localization denominator");
  const Jet inv0 = inverse(u0);
  FormJet m = u * inv0;
  m[0] = Jet();
  m *= complex(-1.0);
  FormJet sum = FormJet::scalar(u.dim(), Jet(0, kMaxOrder, 1.0));
  FormJet term = sum;
  for (int k = 1; k <= u.dim(); ++k) {
    term = wedge(term, m);
    sum += term;
  }
  return sum * inv0;
}

/// Pointwise version on fields.
inline MixedForm inverse_of_mixed_form(const MixedForm& u) {
  return {u.chart(), u.dim(), u.depth(), [u](const Seed& s) { return inverse_of_mixed_form(u.eval(s)); }};
}

}  // namespace equiloc

#pragma once

// Truncated multivariate Taylor expansions ("jets") with complex coefficients.
//
// A Jet in n variables stores the coefficients of every monomial x^a with
// |a| <= 3, i.e. the Taylor coefficients d^a f / a!. Each jet also carries a
// working order o <= 3: coefficients of total degree above o are zero and carry
// no information. Differentiation lowers the working order by one, binary
// operations take the smaller order of their operands.

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "equiloc/error.hpp"

namespace equiloc {

using complex = std::complex<double>;

inline constexpr int kMaxVars = 4;
inline constexpr int kMaxOrder = 3;
inline constexpr int kMaxTerms = 35;  // C(4 + 3, 3)

namespace detail {

struct ProductTerm {
  std::uint8_t lhs, rhs, out;
};

struct DerivTerm {
  std::uint8_t src, dst, factor;
};

class MonomialTable {
 public:
  explicit MonomialTable(int nvars) : nvars_(nvars) {
    lookup_.fill(-1);
    for (int deg = 0; deg <= kMaxOrder; ++deg) {
      std::array<std::uint8_t, kMaxVars> e{};
      enumerate(deg, 0, e);
      count_upto_[deg] = static_cast<int>(exps_.size());
    }
    for (int deg = 0; deg <= kMaxOrder; ++deg) {
      for (int i = 0; i < count_upto_[deg]; ++i) {
        for (int j = 0; j < count_upto_[deg]; ++j) {
          if (degree(i) + degree(j) != deg) continue;
          std::array<std::uint8_t, kMaxVars> e{};
          for (int v = 0; v < nvars_; ++v) e[v] = exps_[i][v] + exps_[j][v];
          products_.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j),
                               static_cast<std::uint8_t>(index_of(e))});
        }
      }
      products_upto_[deg] = static_cast<int>(products_.size());
    }
    for (int v = 0; v < nvars_; ++v) {
      for (int k = 0; k < size(); ++k) {
        if (exps_[k][v] == 0) continue;
        auto e = exps_[k];
        const auto f = e[v];
        --e[v];
        deriv_[v].push_back({static_cast<std::uint8_t>(k), static_cast<std::uint8_t>(index_of(e)), f});
      }
    }
  }

  int nvars() const noexcept { return nvars_; }
  int size() const noexcept { return count_upto_[kMaxOrder]; }
  int count_upto(int order) const noexcept { return count_upto_[order]; }
  int degree(int idx) const noexcept {
    int d = 0;
    for (int v = 0; v < nvars_; ++v) d += exps_[idx][v];
    return d;
  }
  const std::array<std::uint8_t, kMaxVars>& exponents(int idx) const noexcept { return exps_[idx]; }

  int index_of(const std::array<std::uint8_t, kMaxVars>& e) const {
    int key = 0;
    int deg = 0;
    for (int v = kMaxVars - 1; v >= 0; --v) {
      key = key * 4 + e[v];
      deg += e[v];
    }
    if (deg > kMaxOrder) return -1;
    return lookup_[key];
  }

  // Product terms whose output has total degree <= order.
  const ProductTerm* products_begin() const noexcept { return products_.data(); }
  int products_upto(int order) const noexcept { return products_upto_[order]; }
  const std::vector<DerivTerm>& deriv(int var) const noexcept { return deriv_[var]; }

 private:
  void enumerate(int remaining, int var, std::array<std::uint8_t, kMaxVars>& e) {
    if (var == nvars_ - 1 || nvars_ == 0) {
      if (nvars_ == 0) {
        if (remaining != 0) return;
      } else {
        e[var] = static_cast<std::uint8_t>(remaining);
      }
      int key = 0;
      for (int v = kMaxVars - 1; v >= 0; --v) key = key * 4 + e[v];
      lookup_[key] = static_cast<int>(exps_.size());
      exps_.push_back(e);
      if (nvars_ > 0) e[var] = 0;
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      e[var] = static_cast<std::uint8_t>(k);
      enumerate(remaining - k, var + 1, e);
    }
    e[var] = 0;
  }

  int nvars_;
  std::vector<std::array<std::uint8_t, kMaxVars>> exps_;
  std::array<int, kMaxOrder + 1> count_upto_{};
  std::array<int, kMaxOrder + 1> products_upto_{};
  std::vector<ProductTerm> products_;
  std::array<std::vector<DerivTerm>, kMaxVars> deriv_;
  std::array<int, 256> lookup_{};
};

inline const MonomialTable& monomials(int nvars) {
  static const std::array<MonomialTable, kMaxVars + 1> tables{MonomialTable(0), MonomialTable(1), MonomialTable(2),
                                                              MonomialTable(3), MonomialTable(4)};
  return tables[nvars];
}

}  // namespace detail

class Jet {
 public:
  /// The zero jet in zero variables. Combines with jets of any arity as a constant.
  Jet() = default;

  Jet(int nvars, int order, complex value) : nvars_(check_vars(nvars)), order_(check_order(order)) { c_[0] = value; }

  static Jet constant(int nvars, int order, complex value) { return Jet(nvars, order, value); }

  /// The coordinate function x_var expanded around `value`.
  static Jet variable(int nvars, int order, int var, double value) {
    Jet j(nvars, order, value);
    if (var < 0 || var >= nvars) throw DomainError("jet variable index out of range");
    if (order >= 1) {
      std::array<std::uint8_t, kMaxVars> e{};
      e[var] = 1;
      j.c_[detail::monomials(nvars).index_of(e)] = 1.0;
    }
    return j;
  }

  int nvars() const noexcept { return nvars_; }
  int order() const noexcept { return order_; }
  int size() const noexcept { return table().count_upto(order_); }
  complex value() const noexcept { return c_[0]; }

  /// Raw Taylor coefficient by monomial index (graded ordering of the monomial table).
  complex coeff(int idx) const noexcept { return c_[idx]; }
  complex& coeff(int idx) noexcept { return c_[idx]; }

  /// Taylor coefficient of x^exps.
  complex taylor(std::array<int, kMaxVars> exps) const {
    std::array<std::uint8_t, kMaxVars> e{};
    int deg = 0;
    for (int v = 0; v < kMaxVars; ++v) {
      if (exps[v] < 0 || (v >= nvars_ && exps[v] != 0)) return 0.0;
      e[v] = static_cast<std::uint8_t>(exps[v]);
      deg += exps[v];
    }
    if (deg > order_) throw DomainError("requested jet coefficient beyond working order");
    return c_[table().index_of(e)];
  }

  /// Partial derivative d^exps f (Taylor coefficient times exps!).
  complex derivative(std::array<int, kMaxVars> exps) const {
    double fact = 1.0;
    for (int e : exps)
      for (int k = 2; k <= e; ++k) fact *= k;
    return taylor(exps) * fact;
  }

  /// d/dx_var. Lowers the working order by one.
  Jet partial(int var) const {
    if (order_ == 0) throw DomainError("jet order exhausted: derivative requested beyond available order");
    Jet r;
    r.nvars_ = nvars_;
    r.order_ = order_ - 1;
    if (var < 0 || var >= nvars_) return r;
    const int limit = size();
    for (const auto& t : table().deriv(var))
      if (t.src < limit) r.c_[t.dst] += static_cast<double>(t.factor) * c_[t.src];
    return r;
  }

  /// Drop all coefficients above `order`.
  Jet truncated(int order) const {
    Jet r = *this;
    r.order_ = static_cast<std::uint8_t>(std::min<int>(order_, check_order(order)));
    for (int k = r.size(); k < kMaxTerms; ++k) r.c_[k] = 0.0;
    return r;
  }

  bool is_constant() const noexcept {
    for (int k = 1; k < size(); ++k)
      if (c_[k] != 0.0) return false;
    return true;
  }

  Jet& operator+=(const Jet& o) {
    merge_shape(o);
    for (int k = 0; k < size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    merge_shape(o);
    for (int k = 0; k < size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(complex s) {
    for (int k = 0; k < size(); ++k) c_[k] *= s;
    return *this;
  }
  Jet& operator/=(complex s) {
    for (int k = 0; k < size(); ++k) c_[k] /= s;
    return *this;
  }
  Jet& operator+=(complex s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(complex s) {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator-(Jet a) {
    for (int k = 0; k < a.size(); ++k) a.c_[k] = -a.c_[k];
    return a;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, complex s) { return a += s; }
  friend Jet operator+(complex s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, complex s) { return a -= s; }
  friend Jet operator-(complex s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, complex s) { return a *= s; }
  friend Jet operator*(complex s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, complex s) { return a /= s; }

  /// Truncated Cauchy product.
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.nvars_ = joint_vars(a, b);
    r.order_ = std::min(a.order_, b.order_);
    const auto& tab = detail::monomials(r.nvars_);
    const auto* terms = tab.products_begin();
    const int n = tab.products_upto(r.order_);
    for (int t = 0; t < n; ++t) r.c_[terms[t].out] += a.c_[terms[t].lhs] * b.c_[terms[t].rhs];
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * inverse(b); }
  friend Jet operator/(complex s, const Jet& b) { return inverse(b) * s; }

  /// Compose with a scalar function given its scaled derivatives t[k] = f^(k)(a0) / k!.
  friend Jet compose(const Jet& a, const std::array<complex, kMaxOrder + 1>& t) {
    Jet h = a;
    h.c_[0] = 0.0;
    Jet r = h * t[kMaxOrder];
    for (int k = kMaxOrder - 1; k >= 1; --k) {
      r += t[k];
      r = r * h;
    }
    r += t[0];
    r.nvars_ = a.nvars_;
    r.order_ = a.order_;
    return r;
  }

  friend Jet inverse(const Jet& a) {
    const complex x = a.value();
    if (x == 0.0) throw DomainError("jet inverse of a function vanishing at the expansion point");
    const complex r = 1.0 / x;
    return compose(a, {r, -r * r, r * r * r, -r * r * r * r});
  }

  friend Jet exp(const Jet& a) {
    const complex e = std::exp(a.value());
    return compose(a, {e, e, e / 2.0, e / 6.0});
  }
  friend Jet log(const Jet& a) {
    const complex x = a.value();
    return compose(a, {std::log(x), 1.0 / x, -1.0 / (2.0 * x * x), 1.0 / (3.0 * x * x * x)});
  }
  friend Jet sin(const Jet& a) {
    const complex s = std::sin(a.value()), c = std::cos(a.value());
    return compose(a, {s, c, -s / 2.0, -c / 6.0});
  }
  friend Jet cos(const Jet& a) {
    const complex s = std::sin(a.value()), c = std::cos(a.value());
    return compose(a, {c, -s, -c / 2.0, s / 6.0});
  }
  friend Jet tan(const Jet& a) { return sin(a) / cos(a); }
  friend Jet sinh(const Jet& a) {
    const complex s = std::sinh(a.value()), c = std::cosh(a.value());
    return compose(a, {s, c, s / 2.0, c / 6.0});
  }
  friend Jet cosh(const Jet& a) {
    const complex s = std::sinh(a.value()), c = std::cosh(a.value());
    return compose(a, {c, s, c / 2.0, s / 6.0});
  }

  /// a^p for a complex exponent, principal branch at the expansion point.
  friend Jet pow(const Jet& a, complex p) {
    const complex x = a.value();
    if (x == 0.0) throw DomainError("non-integer power of a jet vanishing at the expansion point");
    const complex x0 = std::pow(x, p);
    return compose(a, {x0, p * x0 / x, p * (p - 1.0) / 2.0 * x0 / (x * x),
                       p * (p - 1.0) * (p - 2.0) / 6.0 * x0 / (x * x * x)});
  }
  friend Jet pow(const Jet& a, int p) {
    if (p < 0) return inverse(pow(a, -p));
    Jet r(a.nvars_, a.order_, 1.0);
    Jet base = a;
    while (p > 0) {
      if (p & 1) r = r * base;
      p >>= 1;
      if (p > 0) base = base * base;
    }
    return r;
  }
  friend Jet pow(const Jet& a, const Jet& b) {
    if (b.is_constant()) {
      const complex p = b.value();
      if (p.imag() == 0.0 && p.real() == std::round(p.real()) && std::abs(p.real()) < 64.0)
        return pow(a, static_cast<int>(p.real()));
      return pow(a, p);
    }
    return exp(b * log(a));
  }
  friend Jet sqrt(const Jet& a) { return pow(a, complex(0.5)); }

  friend Jet asin(const Jet& a) {
    const complex x = a.value();
    const complex s = 1.0 / std::sqrt(1.0 - x * x);
    const complex s3 = s * s * s;
    return compose(a, {std::asin(x), s, x * s3 / 2.0, (s3 + 3.0 * x * x * s3 * s * s) / 6.0});
  }
  friend Jet acos(const Jet& a) {
    Jet r = -asin(a);
    r.c_[0] = std::acos(a.value());
    return r;
  }
  friend Jet atan(const Jet& a) {
    const complex x = a.value();
    const complex q = 1.0 / (1.0 + x * x);
    return compose(a, {std::atan(x), q, -x * q * q, (6.0 * x * x - 2.0) * q * q * q / 6.0});
  }
  /// Two-argument arctangent of real-valued jets.
  friend Jet atan2(const Jet& y, const Jet& x) {
    const double y0 = y.value().real(), x0 = x.value().real();
    if (x0 == 0.0 && y0 == 0.0) throw DomainError("atan2 at the origin");
    // atan2(y, x) = atan2(y0, x0) + atan((x0 y - y0 x) / (x0 x + y0 y)); the ratio vanishes at the base point.
    Jet r = atan((y * x0 - x * y0) / (x * x0 + y * y0));
    r.c_[0] = std::atan2(y0, x0);
    return r;
  }

 private:
  static int check_vars(int n) {
    if (n < 0 || n > kMaxVars) throw DomainError("jet arity must be in [0, 4]");
    return n;
  }
  static int check_order(int o) {
    if (o < 0 || o > kMaxOrder) throw DomainError("jet order must be in [0, 3]");
    return o;
  }
  static int joint_vars(const Jet& a, const Jet& b) {
    if (a.nvars_ == b.nvars_ || b.nvars_ == 0) return a.nvars_;
    if (a.nvars_ == 0) return b.nvars_;
    throw DomainError("jets over different numbers of variables");
  }
  void merge_shape(const Jet& o) {
    const int prev = size();
    nvars_ = joint_vars(*this, o);
    order_ = std::min(order_, o.order_);
    for (int k = size(); k < prev; ++k) c_[k] = 0.0;
  }
  const detail::MonomialTable& table() const { return detail::monomials(nvars_); }

  std::uint8_t nvars_ = 0;
  std::uint8_t order_ = kMaxOrder;
  std::array<complex, kMaxTerms> c_{};
};

}  // namespace equiloc

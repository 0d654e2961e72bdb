#pragma once

// Complex exterior algebra on a single coordinate chart.
//
// Pointwise objects (FormJet, JetVector, JetMatrix, FormMatrix) hold jets at one
// expansion point. Field<T> wraps a pure function from an expansion point to one
// of those, so operators such as d or i_K compose lazily and are evaluated on
// demand. Every field records how many derivative levels its evaluation consumes
// (its depth); evaluation seeds coordinate jets with exactly that order.

#include <bit>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "equiloc/error.hpp"
#include "equiloc/jet.hpp"

namespace equiloc {

using Point = std::vector<double>;

/// Expansion point plus requested jet order.
class Seed {
 public:
  Seed(std::span<const double> point, int order) : dim_(static_cast<int>(point.size())), order_(order) {
    if (dim_ > kMaxVars) throw DomainError("chart dimension above 4 is not supported");
    if (order < 0 || order > kMaxOrder)
      throw DomainError("evaluation needs jet order " + std::to_string(order) + ", maximum is 3");
    for (int i = 0; i < dim_; ++i) p_[i] = point[i];
  }

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  double operator[](int i) const noexcept { return p_[i]; }
  std::span<const double> point() const noexcept { return {p_.data(), static_cast<std::size_t>(dim_)}; }

  Jet coordinate(int i) const { return Jet::variable(dim_, order_, i, p_[i]); }
  Jet constant(complex v) const { return Jet(dim_, order_, v); }

 private:
  int dim_;
  int order_;
  std::array<double, kMaxVars> p_{};
};

namespace detail {

/// Sign of dx^I ^ dx^J relative to dx^(I|J) in increasing order; 0 if I and J overlap.
inline int wedge_sign(unsigned I, unsigned J) noexcept {
  if (I & J) return 0;
  int swaps = 0;
  for (unsigned j = J; j != 0; j &= j - 1) {
    const int bit = std::countr_zero(j);
    swaps += std::popcount(I >> (bit + 1));
  }
  return (swaps & 1) ? -1 : 1;
}

/// (-1)^(number of elements of I below v).
inline int position_sign(unsigned I, int v) noexcept {
  return (std::popcount(I & ((1u << v) - 1u)) & 1) ? -1 : 1;
}

}  // namespace detail

/// An inhomogeneous complex differential form at one point, coefficients as jets.
/// Component index = bitmask of the increasing index tuple (bit i <-> dx^i).
class FormJet {
 public:
  FormJet() : dim_(0), c_(1) {}
  explicit FormJet(int dim) : dim_(dim), c_(std::size_t{1} << dim) {}

  static FormJet scalar(int dim, const Jet& f) {
    FormJet w(dim);
    w.c_[0] = f;
    return w;
  }

  int dim() const noexcept { return dim_; }
  unsigned size() const noexcept { return static_cast<unsigned>(c_.size()); }
  unsigned top_mask() const noexcept { return size() - 1; }
  static int degree(unsigned mask) noexcept { return std::popcount(mask); }

  Jet& operator[](unsigned mask) { return c_[mask]; }
  const Jet& operator[](unsigned mask) const { return c_[mask]; }

  /// Homogeneous component of the given degree.
  FormJet part(int deg) const {
    FormJet r(dim_);
    for (unsigned m = 0; m < size(); ++m)
      if (degree(m) == deg) r.c_[m] = c_[m];
    return r;
  }

  /// Largest |value| over all components (the order-0 Taylor coefficient).
  double max_abs() const {
    double r = 0.0;
    for (const auto& j : c_) r = std::max(r, std::abs(j.value()));
    return r;
  }

  FormJet& operator+=(const FormJet& o) {
    check_dim(o);
    for (unsigned m = 0; m < size(); ++m) c_[m] += o.c_[m];
    return *this;
  }
  FormJet& operator-=(const FormJet& o) {
    check_dim(o);
    for (unsigned m = 0; m < size(); ++m) c_[m] -= o.c_[m];
    return *this;
  }
  FormJet& operator*=(complex s) {
    for (auto& j : c_) j *= s;
    return *this;
  }
  FormJet& operator*=(const Jet& f) {
    for (auto& j : c_) j = j * f;
    return *this;
  }

  friend FormJet operator+(FormJet a, const FormJet& b) { return a += b; }
  friend FormJet operator-(FormJet a, const FormJet& b) { return a -= b; }
  friend FormJet operator-(FormJet a) { return a *= -1.0; }
  friend FormJet operator*(FormJet a, complex s) { return a *= s; }
  friend FormJet operator*(complex s, FormJet a) { return a *= s; }
  friend FormJet operator*(FormJet a, const Jet& f) { return a *= f; }
  friend FormJet operator*(const Jet& f, FormJet a) { return a *= f; }

  /// Exterior product.
  friend FormJet wedge(const FormJet& a, const FormJet& b) {
    a.check_dim(b);
    FormJet r(a.dim_);
    for (unsigned I = 0; I < a.size(); ++I) {
      if (is_zero(a.c_[I])) continue;
      for (unsigned J = 0; J < b.size(); ++J) {
        const int s = detail::wedge_sign(I, J);
        if (s == 0 || is_zero(b.c_[J])) continue;
        Jet t = a.c_[I] * b.c_[J];
        if (s < 0) r.c_[I | J] -= t;
        else r.c_[I | J] += t;
      }
    }
    return r;
  }
  friend FormJet operator*(const FormJet& a, const FormJet& b) { return wedge(a, b); }

  friend FormJet exterior_derivative(const FormJet& w) {
    FormJet r(w.dim_);
    for (unsigned I = 0; I < w.size(); ++I) {
      if (is_zero(w.c_[I])) continue;
      for (int v = 0; v < w.dim_; ++v) {
        if (I & (1u << v)) continue;
        const Jet dv = w.c_[I].partial(v);
        if (detail::position_sign(I, v) < 0) r.c_[I | (1u << v)] -= dv;
        else r.c_[I | (1u << v)] += dv;
      }
    }
    return r;
  }

  /// Contraction in the first slot with a complex vector (complex-bilinear).
  friend FormJet interior_product(std::span<const Jet> V, const FormJet& w) {
    if (static_cast<int>(V.size()) != w.dim_) throw DomainError("vector/form dimension mismatch");
    FormJet r(w.dim_);
    for (unsigned I = 1; I < w.size(); ++I) {
      if (is_zero(w.c_[I])) continue;
      for (unsigned b = I; b != 0; b &= b - 1) {
        const int v = std::countr_zero(b);
        Jet t = V[v] * w.c_[I];
        if (detail::position_sign(I, v) < 0) r.c_[I & ~(1u << v)] -= t;
        else r.c_[I & ~(1u << v)] += t;
      }
    }
    return r;
  }

 private:
  static bool is_zero(const Jet& j) noexcept { return j.nvars() == 0 && j.value() == 0.0; }
  void check_dim(const FormJet& o) const {
    if (o.dim_ != dim_) throw DomainError("form dimension mismatch");
  }

  int dim_;
  std::vector<Jet> c_;
};

inline FormJet lie_derivative(std::span<const Jet> V, const FormJet& w) {
  return exterior_derivative(interior_product(V, w)) + interior_product(V, exterior_derivative(w));
}

/// Power series exp(u) = e^{u_0} sum_k N^k / k!, N the positive-degree part (nilpotent).
inline FormJet exp(const FormJet& u) {
  const Jet u0 = u[0];
  FormJet nil = u;
  nil[0] = Jet();
  FormJet sum = FormJet::scalar(u.dim(), Jet(u0.nvars(), u0.order(), 1.0));
  FormJet term = sum;
  for (int k = 1; k <= u.dim(); ++k) {
    term = wedge(term, nil) * complex(1.0 / k);
    sum += term;
  }
  return exp(u0) * sum;
}

using JetVector = std::vector<Jet>;

/// Square matrix of jets, row-major.
class JetMatrix {
 public:
  JetMatrix() = default;
  explicit JetMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n * n)) {}

  int size() const noexcept { return n_; }
  Jet& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * n_ + j)]; }
  const Jet& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }

  friend JetMatrix operator*(const JetMatrix& a, const JetMatrix& b) {
    JetMatrix r(a.n_);
    for (int i = 0; i < a.n_; ++i)
      for (int j = 0; j < a.n_; ++j)
        for (int k = 0; k < a.n_; ++k) r(i, j) += a(i, k) * b(k, j);
    return r;
  }
  friend JetMatrix operator+(JetMatrix a, const JetMatrix& b) {
    for (std::size_t k = 0; k < a.a_.size(); ++k) a.a_[k] += b.a_[k];
    return a;
  }
  friend JetMatrix operator-(JetMatrix a, const JetMatrix& b) {
    for (std::size_t k = 0; k < a.a_.size(); ++k) a.a_[k] -= b.a_[k];
    return a;
  }
  friend JetMatrix operator*(JetMatrix a, complex s) {
    for (auto& x : a.a_) x *= s;
    return a;
  }

  double max_abs() const {
    double r = 0.0;
    for (const auto& x : a_) r = std::max(r, std::abs(x.value()));
    return r;
  }

 private:
  int n_ = 0;
  std::vector<Jet> a_;
};

/// Square matrix of mixed forms (an End(TM)-valued form in a coordinate frame).
class FormMatrix {
 public:
  FormMatrix() = default;
  FormMatrix(int n, int dim) : n_(n), a_(static_cast<std::size_t>(n * n), FormJet(dim)) {}

  int size() const noexcept { return n_; }
  FormJet& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * n_ + j)]; }
  const FormJet& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }

  /// Matrix product with wedge on entries.
  friend FormMatrix operator*(const FormMatrix& a, const FormMatrix& b) {
    FormMatrix r = zero_like(a);
    for (int i = 0; i < a.n_; ++i)
      for (int j = 0; j < a.n_; ++j)
        for (int k = 0; k < a.n_; ++k) r(i, j) += wedge(a(i, k), b(k, j));
    return r;
  }
  friend FormMatrix operator+(FormMatrix a, const FormMatrix& b) {
    for (std::size_t k = 0; k < a.a_.size(); ++k) a.a_[k] += b.a_[k];
    return a;
  }
  friend FormMatrix operator-(FormMatrix a, const FormMatrix& b) {
    for (std::size_t k = 0; k < a.a_.size(); ++k) a.a_[k] -= b.a_[k];
    return a;
  }
  friend FormMatrix operator*(FormMatrix a, complex s) {
    for (auto& x : a.a_) x *= s;
    return a;
  }

  FormJet trace() const {
    FormJet t(dim());
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }
  int dim() const { return a_.empty() ? 0 : a_.front().dim(); }

  double max_abs() const {
    double r = 0.0;
    for (const auto& x : a_) r = std::max(r, x.max_abs());
    return r;
  }

  static FormMatrix zero_like(const FormMatrix& m) { return FormMatrix(m.n_, m.dim()); }
  static FormMatrix identity(int n, int dim, const Seed& s) {
    FormMatrix r(n, dim);
    for (int i = 0; i < n; ++i) r(i, i)[0] = s.constant(1.0);
    return r;
  }
  static FormMatrix from_scalars(const JetMatrix& m, int dim) {
    FormMatrix r(m.size(), dim);
    for (int i = 0; i < m.size(); ++i)
      for (int j = 0; j < m.size(); ++j) r(i, j)[0] = m(i, j);
    return r;
  }

 private:
  int n_ = 0;
  std::vector<FormJet> a_;
};

/// A lazily evaluated quantity on one chart.
template <class T>
class Field {
 public:
  using Fn = std::function<T(const Seed&)>;

  Field() = default;
  Field(std::string chart, int dim, int depth, Fn fn)
      : chart_(std::move(chart)), dim_(dim), depth_(depth), fn_(std::make_shared<const Fn>(std::move(fn))) {}

  const std::string& chart() const noexcept { return chart_; }
  int dim() const noexcept { return dim_; }
  /// Number of derivative levels consumed by evaluation.
  int depth() const noexcept { return depth_; }
  explicit operator bool() const noexcept { return static_cast<bool>(fn_); }

  /// Evaluate with a caller-provided seed; its order must cover depth().
  T eval(const Seed& s) const { return (*fn_)(s); }

  /// Evaluate at a point with the minimal jet order.
  T at(std::span<const double> p) const { return at(p, depth_); }
  T at(std::span<const double> p, int order) const {
    if (static_cast<int>(p.size()) != dim_) throw DomainError("point dimension does not match chart");
    if (order < depth_) throw DomainError("evaluation order below field depth");
    return (*fn_)(Seed(p, order));
  }

 private:
  std::string chart_;
  int dim_ = 0;
  int depth_ = 0;
  std::shared_ptr<const Fn> fn_;
};

using ScalarField = Field<Jet>;
using MixedForm = Field<FormJet>;
/// Chart components of a complex vector field X + sqrt(-1) Y.
using VectorField = Field<JetVector>;
using MatrixField = Field<JetMatrix>;
using FormMatrixField = Field<FormMatrix>;

template <class A, class B>
void require_same_chart(const Field<A>& a, const Field<B>& b) {
  if (a.chart() != b.chart()) throw ChartMismatch(a.chart(), b.chart());
  if (a.dim() != b.dim()) throw DomainError("fields of different dimension on chart " + a.chart());
}

inline MixedForm as_form(const ScalarField& f) {
  return {f.chart(), f.dim(), f.depth(), [f](const Seed& s) { return FormJet::scalar(s.dim(), f.eval(s)); }};
}

inline MixedForm constant_form(const std::string& chart, int dim, complex c) {
  return {chart, dim, 0, [c](const Seed& s) { return FormJet::scalar(s.dim(), s.constant(c)); }};
}

inline MixedForm operator+(const MixedForm& a, const MixedForm& b) {
  require_same_chart(a, b);
  return {a.chart(), a.dim(), std::max(a.depth(), b.depth()),
          [a, b](const Seed& s) { return a.eval(s) + b.eval(s); }};
}
inline MixedForm operator-(const MixedForm& a, const MixedForm& b) {
  require_same_chart(a, b);
  return {a.chart(), a.dim(), std::max(a.depth(), b.depth()),
          [a, b](const Seed& s) { return a.eval(s) - b.eval(s); }};
}
inline MixedForm operator*(complex c, const MixedForm& a) {
  return {a.chart(), a.dim(), a.depth(), [a, c](const Seed& s) { return a.eval(s) * c; }};
}

inline MixedForm wedge(const MixedForm& a, const MixedForm& b) {
  require_same_chart(a, b);
  return {a.chart(), a.dim(), std::max(a.depth(), b.depth()),
          [a, b](const Seed& s) { return wedge(a.eval(s), b.eval(s)); }};
}

inline MixedForm exterior_derivative(const MixedForm& w) {
  return {w.chart(), w.dim(), w.depth() + 1, [w](const Seed& s) { return exterior_derivative(w.eval(s)); }};
}

inline MixedForm interior_product(const VectorField& K, const MixedForm& w) {
  require_same_chart(K, w);
  return {w.chart(), w.dim(), std::max(K.depth(), w.depth()),
          [K, w](const Seed& s) { return interior_product(K.eval(s), w.eval(s)); }};
}

/// Cartan formula L_V = d i_V + i_V d.
inline MixedForm lie_derivative(const VectorField& V, const MixedForm& w) {
  require_same_chart(V, w);
  return {w.chart(), w.dim(), std::max(V.depth(), w.depth()) + 1,
          [V, w](const Seed& s) { return lie_derivative(V.eval(s), w.eval(s)); }};
}

inline MixedForm exp(const MixedForm& u) {
  return {u.chart(), u.dim(), u.depth(), [u](const Seed& s) { return exp(u.eval(s)); }};
}

/// X + sqrt(-1) Y from two real vector fields.
inline VectorField complexify(const VectorField& X, const VectorField& Y) {
  require_same_chart(X, Y);
  return {X.chart(), X.dim(), std::max(X.depth(), Y.depth()), [X, Y](const Seed& s) {
            JetVector x = X.eval(s);
            const JetVector y = Y.eval(s);
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i] * complex(0.0, 1.0);
            return x;
          }};
}

inline VectorField scale(const VectorField& V, complex c) {
  return {V.chart(), V.dim(), V.depth(), [V, c](const Seed& s) {
            JetVector v = V.eval(s);
            for (auto& x : v) x *= c;
            return v;
          }};
}

/// Lie bracket [V, W]^i = V^k d_k W^i - W^k d_k V^i.
inline VectorField lie_bracket(const VectorField& V, const VectorField& W) {
  require_same_chart(V, W);
  return {V.chart(), V.dim(), std::max(V.depth(), W.depth()) + 1, [V, W](const Seed& s) {
            const JetVector v = V.eval(s), w = W.eval(s);
            const int n = s.dim();
            JetVector r(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
              for (int k = 0; k < n; ++k) r[i] += v[k] * w[i].partial(k) - w[k] * v[i].partial(k);
            return r;
          }};
}

}  // namespace equiloc

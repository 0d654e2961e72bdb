#pragma once

// Chart-level Riemannian data: metric, Levi-Civita connection, curvature,
// index lowering, Killing-field checks and the volume form.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "equiloc/error.hpp"
#include "equiloc/expression.hpp"
#include "equiloc/forms.hpp"
#include "equiloc/parallel.hpp"

namespace equiloc {

/// A coordinate box presenting (an open dense part of) the manifold.
struct Chart {
  std::string id;
  std::vector<std::string> coords;
  Point lower;
  Point upper;
  std::vector<bool> periodic;
  /// +1 if the coordinate order is positively oriented on M, -1 otherwise.
  int orientation = 1;
  /// Measure-zero locus where the coordinates degenerate (e.g. sphere poles).
  std::string excluded;
  /// Evaluation points are kept this far from non-periodic box faces.
  double margin = 1e-6;

  int dim() const noexcept { return static_cast<int>(coords.size()); }
  double period(int axis) const { return upper[axis] - lower[axis]; }

  void check() const {
    const auto n = coords.size();
    if (n == 0 || n > kMaxVars) throw SchemaError("chart '" + id + "': dimension must be 1..4");
    if (lower.size() != n || upper.size() != n || periodic.size() != n)
      throw SchemaError("chart '" + id + "': bounds/periodicity arity mismatch");
    for (std::size_t i = 0; i < n; ++i)
      if (!(upper[i] > lower[i])) throw SchemaError("chart '" + id + "': empty coordinate range on axis " + coords[i]);
    if (orientation != 1 && orientation != -1) throw SchemaError("chart '" + id + "': orientation must be +1 or -1");
  }

  Point clamp(Point p) const {
    for (int i = 0; i < dim(); ++i) {
      if (periodic[i]) continue;
      p[i] = std::clamp(p[i], lower[i] + margin, upper[i] - margin);
    }
    return p;
  }

  /// Deterministic pseudo-random interior points. Non-periodic axes stay a
  /// fraction `inset` of their span away from the box faces.
  std::vector<Point> samples(std::size_t count, std::uint64_t seed, double inset = 0.05) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Point> out(count, Point(static_cast<std::size_t>(dim())));
    for (auto& p : out) {
      for (int i = 0; i < dim(); ++i) {
        const double t = unit(rng);
        const double pad = periodic[i] ? 0.0 : inset * period(i);
        p[i] = lower[i] + pad + t * (period(i) - 2.0 * pad);
      }
      p = clamp(p);
    }
    return out;
  }
};

inline double residual_norm(const Jet& j) { return std::abs(j.value()); }
inline double residual_norm(const JetVector& v) {
  double r = 0.0;
  for (const auto& x : v) r = std::max(r, std::abs(x.value()));
  return r;
}
inline double residual_norm(const FormJet& w) { return w.max_abs(); }
inline double residual_norm(const JetMatrix& m) { return m.max_abs(); }
inline double residual_norm(const FormMatrix& m) { return m.max_abs(); }

/// max over samples of the largest |value| of a field that should vanish.
template <class T>
double max_residual(const Field<T>& f, std::span<const Point> samples) {
  return parallel_max(samples.size(), [&](std::size_t i) { return residual_norm(f.at(samples[i])); });
}

// ---------------------------------------------------------------------------
// Jet linear algebra

/// Gauss-Jordan inverse over jets, pivoting on the magnitude of the value.
inline JetMatrix inverse(const JetMatrix& m) {
  const int n = m.size();
  JetMatrix a = m;
  JetMatrix inv(n);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    inv(i, i) = a(i, i) * 0.0 + 1.0;
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j).value()));
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col).value()) > std::abs(a(piv, col).value())) piv = r;
    if (std::abs(a(piv, col).value()) <= 1e-14 * std::max(scale, 1e-300))
      throw SingularMatrix("singular matrix at evaluation point");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const Jet p = inverse(a(col, col));
    for (int j = 0; j < n; ++j) {
      a(col, j) = a(col, j) * p;
      inv(col, j) = inv(col, j) * p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const Jet f = a(r, col);
      for (int j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

inline Jet determinant(const JetMatrix& m) {
  const int n = m.size();
  JetMatrix a = m;
  Jet det = n > 0 ? a(0, 0) * 0.0 + 1.0 : Jet(0, kMaxOrder, 1.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col).value()) > std::abs(a(piv, col).value())) piv = r;
    if (a(piv, col).value() == 0.0) return det * 0.0;
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      det = -det;
    }
    det = det * a(col, col);
    const Jet p = inverse(a(col, col));
    for (int r = col + 1; r < n; ++r) {
      const Jet f = a(r, col) * p;
      for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
    }
  }
  return det;
}

// ---------------------------------------------------------------------------
// Metric and connection

/// Symmetric n x n matrix of scalar fields g_ij.
using MetricField = MatrixField;

/// Metric from component expressions; only the upper triangle is read, so the
/// result is exactly symmetric.
inline MetricField metric_from_expressions(const Chart& chart, const std::vector<std::vector<Expression>>& g) {
  const int n = chart.dim();
  if (static_cast<int>(g.size()) != n) throw SchemaError("metric arity mismatch on chart " + chart.id);
  for (const auto& row : g)
    if (static_cast<int>(row.size()) != n) throw SchemaError("metric arity mismatch on chart " + chart.id);
  return {chart.id, n, 0, [g, n](const Seed& s) {
            JetMatrix m(n);
            for (int i = 0; i < n; ++i)
              for (int j = i; j < n; ++j) {
                m(i, j) = g[i][j].eval(s);
                if (j != i) m(j, i) = m(i, j);
              }
            return m;
          }};
}

inline VectorField vector_from_expressions(const Chart& chart, const std::vector<Expression>& v) {
  const int n = chart.dim();
  if (static_cast<int>(v.size()) != n) throw SchemaError("vector field arity mismatch on chart " + chart.id);
  return {chart.id, n, 0, [v](const Seed& s) {
            JetVector r;
            r.reserve(v.size());
            for (const auto& e : v) r.push_back(e.eval(s));
            return r;
          }};
}

inline VectorField zero_vector_field(const std::string& chart, int dim) {
  return {chart, dim, 0, [](const Seed& s) { return JetVector(static_cast<std::size_t>(s.dim()), s.constant(0.0)); }};
}

/// Christoffel symbols of the second kind, stored as gamma(k, i, j) = Gamma^k_ij.
class Christoffel {
 public:
  Christoffel() = default;
  explicit Christoffel(int n) : n_(n), c_(static_cast<std::size_t>(n * n * n)) {}
  int size() const noexcept { return n_; }
  Jet& operator()(int k, int i, int j) { return c_[static_cast<std::size_t>((k * n_ + i) * n_ + j)]; }
  const Jet& operator()(int k, int i, int j) const { return c_[static_cast<std::size_t>((k * n_ + i) * n_ + j)]; }
  double max_abs() const {
    double r = 0.0;
    for (const auto& x : c_) r = std::max(r, std::abs(x.value()));
    return r;
  }

 private:
  int n_ = 0;
  std::vector<Jet> c_;
};

inline double residual_norm(const Christoffel& c) { return c.max_abs(); }

using ConnectionField = Field<Christoffel>;
/// End(TM)-valued 2-form: entry (i, j) is sum_{k<l} R^i_{j,kl} dx^k ^ dx^l.
using CurvatureField = FormMatrixField;

inline Christoffel christoffel_at(const JetMatrix& g, int n) {
  const JetMatrix ginv = inverse(g);
  std::vector<Jet> dg(static_cast<std::size_t>(n * n * n));  // dg[(a*n+i)*n+j] = d_a g_ij
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dg[static_cast<std::size_t>((a * n + i) * n + j)] = g(i, j).partial(a);
  auto D = [&](int a, int i, int j) -> const Jet& { return dg[static_cast<std::size_t>((a * n + i) * n + j)]; };
  Christoffel G(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        Jet sum;
        for (int l = 0; l < n; ++l) sum += ginv(k, l) * (D(i, j, l) + D(j, i, l) - D(l, i, j));
        G(k, i, j) = sum * 0.5;
        G(k, j, i) = G(k, i, j);
      }
    }
  return G;
}

/// Levi-Civita connection: Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
inline ConnectionField christoffel(const MetricField& g) {
  const int n = g.dim();
  return {g.chart(), n, g.depth() + 1, [g, n](const Seed& s) { return christoffel_at(g.eval(s), n); }};
}

inline FormMatrix riemann_at(const Christoffel& G, int n) {
  FormMatrix R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          Jet r = G(i, l, j).partial(k) - G(i, k, j).partial(l);
          for (int m = 0; m < n; ++m) r += G(i, k, m) * G(m, l, j) - G(i, l, m) * G(m, k, j);
          R(i, j)[(1u << k) | (1u << l)] = r;
        }
  return R;
}

/// R^i_{j,kl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj} + Gamma^i_{km} Gamma^m_{lj} - Gamma^i_{lm} Gamma^m_{kj}.
inline CurvatureField riemann(const ConnectionField& G) {
  const int n = G.dim();
  return {G.chart(), n, G.depth() + 1, [G, n](const Seed& s) { return riemann_at(G.eval(s), n); }};
}

/// Component R^i_{j,kl} of a curvature matrix, any k, l.
inline Jet riemann_component(const FormMatrix& R, int i, int j, int k, int l) {
  if (k == l) return Jet();
  const unsigned mask = (1u << k) | (1u << l);
  return k < l ? R(i, j)[mask] : -R(i, j)[mask];
}

/// Connection 1-form matrix omega^i_j = Gamma^i_{kj} dx^k.
inline FormMatrix connection_form_at(const Christoffel& G, int n) {
  FormMatrix w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) w(i, j)[1u << k] = G(i, k, j);
  return w;
}

inline FormMatrixField connection_form(const ConnectionField& G) {
  const int n = G.dim();
  return {G.chart(), n, G.depth(), [G, n](const Seed& s) { return connection_form_at(G.eval(s), n); }};
}

/// Index lowering (X' + sqrt(-1) Y')_i = g_ij K^j. Complex-bilinear, no conjugation.
inline MixedForm musical_flat(const VectorField& K, const MetricField& g) {
  require_same_chart(K, g);
  const int n = g.dim();
  return {g.chart(), n, std::max(K.depth(), g.depth()), [K, g, n](const Seed& s) {
            const JetVector k = K.eval(s);
            const JetMatrix m = g.eval(s);
            FormJet w(n);
            for (int i = 0; i < n; ++i) {
              Jet c;
              for (int j = 0; j < n; ++j) c += m(i, j) * k[j];
              w[1u << i] = c;
            }
            return w;
          }};
}

/// (L_X g)_ij = X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k.
inline MatrixField lie_derivative_metric(const VectorField& X, const MetricField& g) {
  require_same_chart(X, g);
  const int n = g.dim();
  return {g.chart(), n, std::max(X.depth(), g.depth()) + 1, [X, g, n](const Seed& s) {
            const JetVector x = X.eval(s);
            const JetMatrix m = g.eval(s);
            JetMatrix r(n);
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) {
                Jet v;
                for (int k = 0; k < n; ++k)
                  v += x[k] * m(i, j).partial(k) + m(k, j) * x[k].partial(i) + m(i, k) * x[k].partial(j);
                r(i, j) = v;
              }
            return r;
          }};
}

/// Largest |L_X g| over the samples.
inline double killing_residual(const VectorField& X, const MetricField& g, std::span<const Point> samples) {
  return max_residual(lie_derivative_metric(X, g), samples);
}

/// orientation * sqrt(det g) dx^1 ^ ... ^ dx^n.
inline MixedForm volume_form(const MetricField& g, int orientation) {
  const int n = g.dim();
  return {g.chart(), n, g.depth(), [g, n, orientation](const Seed& s) {
            const Jet det = determinant(g.eval(s));
            if (det.value().real() <= 0.0) throw SingularMatrix("metric not positive definite at evaluation point");
            FormJet w(n);
            w[(1u << n) - 1u] = sqrt(det) * static_cast<double>(orientation);
            return w;
          }};
}

/// d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il, which vanishes for the Levi-Civita connection.
inline double metric_compatibility_residual(const MetricField& g, const ConnectionField& G,
                                            std::span<const Point> samples) {
  const int n = g.dim();
  return parallel_max(samples.size(), [&](std::size_t idx) {
    const Seed s(samples[idx], std::max(G.depth(), g.depth() + 1));
    const JetMatrix m = g.eval(s);
    const Christoffel c = G.eval(s);
    double r = 0.0;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Jet v = m(i, j).partial(k);
          for (int l = 0; l < n; ++l) v -= c(l, k, i) * m(l, j) + c(l, k, j) * m(i, l);
          r = std::max(r, std::abs(v.value()));
        }
    return r;
  });
}

/// Cholesky test of the (real) metric at every sample. Returns the smallest pivot.
inline double min_cholesky_pivot(const MetricField& g, std::span<const Point> samples) {
  const int n = g.dim();
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : samples) {
    const JetMatrix m = g.at(p);
    std::vector<double> a(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i * n + j)] = m(i, j).value().real();
    for (int j = 0; j < n; ++j) {
      double d = a[static_cast<std::size_t>(j * n + j)];
      for (int k = 0; k < j; ++k) d -= a[static_cast<std::size_t>(j * n + k)] * a[static_cast<std::size_t>(j * n + k)];
      worst = std::min(worst, d);
      if (d <= 0.0) return d;
      const double l = std::sqrt(d);
      a[static_cast<std::size_t>(j * n + j)] = l;
      for (int i = j + 1; i < n; ++i) {
        double v = a[static_cast<std::size_t>(i * n + j)];
        for (int k = 0; k < j; ++k) v -= a[static_cast<std::size_t>(i * n + k)] * a[static_cast<std::size_t>(j * n + k)];
        a[static_cast<std::size_t>(i * n + j)] = v / l;
      }
    }
  }
  return worst;
}

}  // namespace equiloc

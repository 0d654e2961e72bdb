#pragma once

// Equivariant operators for a pair of commuting Killing fields X, Y with
// K = X + sqrt(-1) Y: d_K = d + i_K, the invariance operator L_X + sqrt(-1) L_Y,
// moment endomorphisms, the equivariant connection and curvature, and the
// characteristic and Euler forms built from the curvature.

#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "equiloc/error.hpp"
#include "equiloc/forms.hpp"
#include "equiloc/geometry.hpp"
#include "equiloc/skewlinalg.hpp"

namespace equiloc {

inline constexpr complex kI{0.0, 1.0};

/// Two real vector fields on one chart and their complex combination.
struct EquivariantPair {
  VectorField X;
  VectorField Y;

  EquivariantPair(VectorField x, VectorField y) : X(std::move(x)), Y(std::move(y)) { require_same_chart(X, Y); }

  const std::string& chart() const noexcept { return X.chart(); }
  int dim() const noexcept { return X.dim(); }
  VectorField K() const { return complexify(X, Y); }
};

/// Largest imaginary part among the components of X and Y (both must be real).
inline double reality_residual(const EquivariantPair& pair, std::span<const Point> samples) {
  return parallel_max(samples.size(), [&](std::size_t i) {
    double r = 0.0;
    for (const auto& f : {pair.X, pair.Y})
      for (const auto& c : f.at(samples[i])) r = std::max(r, std::abs(c.value().imag()));
    return r;
  });
}

/// max |[X_M, Y_M]| over the samples.
inline double commutator_residual(const EquivariantPair& pair, std::span<const Point> samples) {
  return max_residual(lie_bracket(pair.X, pair.Y), samples);
}

/// d_{X + sqrt(-1) Y} = d + i_{X_M + sqrt(-1) Y_M}.
inline MixedForm d_equivariant(const EquivariantPair& pair, const MixedForm& w) {
  return exterior_derivative(w) + interior_product(pair.K(), w);
}

/// (L_{X_M} + sqrt(-1) L_{Y_M}) w.
inline MixedForm invariance_operator(const EquivariantPair& pair, const MixedForm& w) {
  return lie_derivative(pair.X, w) + kI * lie_derivative(pair.Y, w);
}

inline double invariance_residual(const EquivariantPair& pair, const MixedForm& w, std::span<const Point> samples) {
  return max_residual(invariance_operator(pair, w), samples);
}

/// Residual of Lemma 1: d_K^2 w - (L_X + sqrt(-1) L_Y) w.
inline double lemma1_residual(const EquivariantPair& pair, const MixedForm& w, std::span<const Point> samples) {
  return max_residual(d_equivariant(pair, d_equivariant(pair, w)) - invariance_operator(pair, w), samples);
}

/// X' + sqrt(-1) Y', the complex-bilinear dual 1-form of K.
inline MixedForm dual_form(const EquivariantPair& pair, const MetricField& g) { return musical_flat(pair.K(), g); }

/// Residual of Lemma 2: L_{X_M} Y' + L_{Y_M} X'.
inline double lemma2_residual(const EquivariantPair& pair, const MetricField& g, std::span<const Point> samples) {
  return max_residual(lie_derivative(pair.X, musical_flat(pair.Y, g)) + lie_derivative(pair.Y, musical_flat(pair.X, g)),
                      samples);
}

/// Residual of Lemma 3: d_K applied to the d_K-exact form d_K(X' + sqrt(-1) Y').
inline double lemma3_residual(const EquivariantPair& pair, const MetricField& g, std::span<const Point> samples) {
  return max_residual(d_equivariant(pair, d_equivariant(pair, dual_form(pair, g))), samples);
}

// ---------------------------------------------------------------------------
// Moment endomorphisms

/// mu^i_j = -(d_j V^i + Gamma^i_{jk} V^k), i.e. mu(V) = -nabla V.
inline MatrixField moment_endomorphism(const VectorField& V, const ConnectionField& G) {
  require_same_chart(V, G);
  const int n = G.dim();
  return {G.chart(), n, std::max(V.depth() + 1, G.depth()), [V, G, n](const Seed& s) {
            const JetVector v = V.eval(s);
            const Christoffel c = G.eval(s);
            JetMatrix m(n);
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) {
                Jet e = v[i].partial(j);
                for (int k = 0; k < n; ++k) e += c(i, j, k) * v[k];
                m(i, j) = -e;
              }
            return m;
          }};
}

/// mu(V) from its definition L_V - nabla_V on coordinate fields:
/// column j is [V, d_j] - i_V(omega)(d_j) with omega the connection 1-form matrix.
inline MatrixField moment_endomorphism_from_lie(const VectorField& V, const ConnectionField& G) {
  require_same_chart(V, G);
  const int n = G.dim();
  const FormMatrixField omega = connection_form(G);
  return {G.chart(), n, std::max(V.depth() + 1, G.depth()), [V, omega, n](const Seed& s) {
            const JetVector v = V.eval(s);
            const FormMatrix w = omega.eval(s);
            JetMatrix m(n);
            for (int j = 0; j < n; ++j) {
              JetVector e(static_cast<std::size_t>(n), s.constant(0.0));
              e[j] = s.constant(1.0);
              for (int i = 0; i < n; ++i) {
                Jet bracket;
                for (int k = 0; k < n; ++k) bracket += v[k] * e[i].partial(k) - e[k] * v[i].partial(k);
                m(i, j) = bracket - interior_product(v, w(i, j))[0];
              }
            }
            return m;
          }};
}

/// Largest entry of g mu + (g mu)^T, zero when mu is g-skew-adjoint.
inline double skew_adjointness_residual(const MatrixField& mu, const MetricField& g, std::span<const Point> samples) {
  const int n = g.dim();
  return parallel_max(samples.size(), [&](std::size_t idx) {
    const JetMatrix gm = g.at(samples[idx], std::max(g.depth(), mu.depth())) * mu.at(samples[idx]);
    double r = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r = std::max(r, std::abs(gm(i, j).value() + gm(j, i).value()));
    return r;
  });
}

// ---------------------------------------------------------------------------
// Equivariant curvature

/// Geometry bundle of a chart: metric, connection and curvature.
struct ChartGeometry {
  MetricField g;
  ConnectionField gamma;
  CurvatureField R;
  FormMatrixField omega;

  explicit ChartGeometry(MetricField metric)
      : g(std::move(metric)), gamma(christoffel(g)), R(riemann(gamma)), omega(connection_form(gamma)) {}
};

/// R~ = R - mu(X) - sqrt(-1) mu(Y): 2-form part R, 0-form part -mu(X) - sqrt(-1) mu(Y).
inline FormMatrixField equivariant_curvature(const EquivariantPair& pair, const ChartGeometry& geo) {
  const int n = geo.g.dim();
  const MatrixField mx = moment_endomorphism(pair.X, geo.gamma);
  const MatrixField my = moment_endomorphism(pair.Y, geo.gamma);
  const CurvatureField R = geo.R;
  return {R.chart(), n, std::max({R.depth(), mx.depth(), my.depth()}), [R, mx, my, n](const Seed& s) {
            FormMatrix r = R.eval(s);
            const JetMatrix a = mx.eval(s);
            const JetMatrix b = my.eval(s);
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) r(i, j)[0] = -a(i, j) - b(i, j) * kI;
            return r;
          }};
}

/// Residual of Lemma 6, nabla~ R~ = dR~ + omega ^ R~ - R~ ^ omega + i_K R~.
inline double bianchi_residual(const FormMatrixField& Rt, const EquivariantPair& pair, const ChartGeometry& geo,
                               std::span<const Point> samples) {
  const VectorField K = pair.K();
  const FormMatrixField omega = geo.omega;
  const int n = geo.g.dim();
  const int order = std::max({Rt.depth() + 1, omega.depth(), K.depth()});
  if (order > kMaxOrder) throw DomainError("Bianchi residual needs jet order " + std::to_string(order));
  return parallel_max(samples.size(), [&](std::size_t idx) {
    const Seed s(samples[idx], order);
    const FormMatrix r = Rt.eval(s);
    const FormMatrix w = omega.eval(s);
    const JetVector k = K.eval(s);
    FormMatrix out = w * r - r * w;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j) += exterior_derivative(r(i, j)) + interior_product(k, r(i, j));
    return out.max_abs();
  });
}

// ---------------------------------------------------------------------------
// Characteristic forms

/// Polynomial c_0 + c_1 x + ... + c_d x^d with d <= 6.
struct Polynomial {
  static constexpr int kMaxDegree = 6;
  std::vector<complex> coeffs;

  explicit Polynomial(std::vector<complex> c = {}) : coeffs(std::move(c)) {
    if (static_cast<int>(coeffs.size()) > kMaxDegree + 1)
      throw DomainError("polynomial degree above 6 is not supported");
  }
  static Polynomial monomial(int k) {
    std::vector<complex> c(static_cast<std::size_t>(k + 1), 0.0);
    c.back() = 1.0;
    return Polynomial(std::move(c));
  }
  int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
  std::string text() const {
    std::ostringstream out;
    bool first = true;
    for (int k = 0; k <= degree(); ++k) {
      const complex c = coeffs[static_cast<std::size_t>(k)];
      if (c == 0.0) continue;
      if (!first) out << " + ";
      first = false;
      if (c.imag() != 0.0) out << '(' << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
      else if (c != 1.0 || k == 0) out << c.real();
      if (k > 0) out << (c == 1.0 ? "" : "*") << 'x';
      if (k > 1) out << '^' << k;
    }
    return first ? "0" : out.str();
  }
};

/// Tr f(A) for a matrix of mixed forms, powers taken with wedge products.
inline FormJet characteristic_form_at(const Polynomial& f, const FormMatrix& A, const Seed& s) {
  const int n = A.size();
  FormJet out(A.dim());
  FormMatrix power = FormMatrix::identity(n, A.dim(), s);
  for (int k = 0; k <= f.degree(); ++k) {
    if (k > 0) power = power * A;
    const complex c = f.coeffs[static_cast<std::size_t>(k)];
    if (c != 0.0) out += power.trace() * c;
  }
  return out;
}

inline MixedForm characteristic_form(const Polynomial& f, const FormMatrixField& Rt) {
  return {Rt.chart(), Rt.dim(), Rt.depth(), [f, Rt](const Seed& s) { return characteristic_form_at(f, Rt.eval(s), s); }};
}

/// Pf(g R~ / 2pi) expressed in a positively oriented orthonormal frame:
/// orientation * Pf(g_ik R~^k_j) / (sqrt(det g) (2 pi)^{n/2}).
inline MixedForm equivariant_euler_form(const FormMatrixField& Rt, const MetricField& g, int orientation) {
  require_same_chart(Rt, g);
  const int n = g.dim();
  if (n % 2 != 0) throw DomainError("equivariant Euler form needs even dimension");
  return {Rt.chart(), n, std::max(Rt.depth(), g.depth()), [Rt, g, n, orientation](const Seed& s) {
            const FormMatrix r = Rt.eval(s);
            const JetMatrix m = g.eval(s);
            FormMatrix lowered(n, n);
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) lowered(i, j) += r(k, j) * m(i, k);
            const Jet det = determinant(m);
            const FormJet pf = pfaffian_of_form_matrix(lowered, 2.0 * std::numbers::pi);
            return pf * (inverse(sqrt(det)) * static_cast<double>(orientation));
          }};
}

// ---------------------------------------------------------------------------
// TM-valued forms (Lemma 5)

/// A TM-valued mixed form: component a is the form coefficient of d_a.
using VectorFormJet = std::vector<FormJet>;
using VectorValuedForm = Field<VectorFormJet>;

inline double residual_norm(const VectorFormJet& v) {
  double r = 0.0;
  for (const auto& w : v) r = std::max(r, w.max_abs());
  return r;
}

/// A vector field viewed as a TM-valued 0-form.
inline VectorValuedForm as_vector_valued(const VectorField& V) {
  return {V.chart(), V.dim(), V.depth(), [V](const Seed& s) {
            const JetVector v = V.eval(s);
            VectorFormJet out;
            for (const auto& c : v) out.push_back(FormJet::scalar(s.dim(), c));
            return out;
          }};
}

/// TM-valued form w (x) V from a scalar form and a vector field.
inline VectorValuedForm tensor(const MixedForm& w, const VectorField& V) {
  require_same_chart(w, V);
  return {V.chart(), V.dim(), std::max(w.depth(), V.depth()), [w, V](const Seed& s) {
            const FormJet f = w.eval(s);
            const JetVector v = V.eval(s);
            VectorFormJet out;
            for (const auto& c : v) out.push_back(f * c);
            return out;
          }};
}

/// nabla~ w = d w^a + omega^a_b ^ w^b + i_K w^a; i_K contracts the form factor only.
inline VectorValuedForm equivariant_connection(const VectorValuedForm& w, const EquivariantPair& pair,
                                               const ChartGeometry& geo) {
  const VectorField K = pair.K();
  const FormMatrixField omega = geo.omega;
  const int n = geo.g.dim();
  return {w.chart(), n, std::max({w.depth() + 1, omega.depth(), K.depth()}), [w, K, omega, n](const Seed& s) {
            const VectorFormJet v = w.eval(s);
            const FormMatrix c = omega.eval(s);
            const JetVector k = K.eval(s);
            VectorFormJet out;
            for (int a = 0; a < n; ++a) {
              FormJet r = exterior_derivative(v[a]) + interior_product(k, v[a]);
              for (int b = 0; b < n; ++b) r += wedge(c(a, b), v[b]);
              out.push_back(r);
            }
            return out;
          }};
}

/// (L_V w)^a = L_V w^a - w^b d_b V^a for a TM-valued form.
inline VectorValuedForm lie_derivative(const VectorField& V, const VectorValuedForm& w) {
  require_same_chart(V, w);
  const int n = V.dim();
  return {w.chart(), n, std::max(V.depth(), w.depth()) + 1, [V, w, n](const Seed& s) {
            const JetVector v = V.eval(s);
            const VectorFormJet f = w.eval(s);
            VectorFormJet out;
            for (int a = 0; a < n; ++a) {
              FormJet r = lie_derivative(v, f[a]);
              for (int b = 0; b < n; ++b) r -= f[b] * v[a].partial(b);
              out.push_back(r);
            }
            return out;
          }};
}

inline double invariance_residual(const EquivariantPair& pair, const VectorValuedForm& w,
                                  std::span<const Point> samples) {
  const VectorValuedForm lx = lie_derivative(pair.X, w);
  const VectorValuedForm ly = lie_derivative(pair.Y, w);
  const int order = std::max(lx.depth(), ly.depth());
  return parallel_max(samples.size(), [&](std::size_t idx) {
    const Seed s(samples[idx], order);
    const VectorFormJet a = lx.eval(s);
    const VectorFormJet b = ly.eval(s);
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, (a[i] + b[i] * kI).max_abs());
    return r;
  });
}

}  // namespace equiloc

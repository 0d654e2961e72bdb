#pragma once

// The zero set M0 = {<K, K> = 0} of K = X + sqrt(-1) Y: declared components,
// their numerical validation, oriented normal frames, and the restriction of
// the equivariant curvature to the normal bundle.
//
// A component is a coordinate slice of a probe chart: some axes are fixed
// (the normal directions), the others run over the chart box. All axes fixed
// is an isolated point, none fixed is the whole manifold.

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "equiloc/equivariant.hpp"
#include "equiloc/error.hpp"
#include "equiloc/forms.hpp"
#include "equiloc/geometry.hpp"
#include "equiloc/parallel.hpp"

namespace equiloc {

/// Everything known about one chart of a scenario.
struct ChartModel {
  Chart chart;
  ChartGeometry geo;
  EquivariantPair pair;
  /// Integration-chart coordinates as functions of this chart's coordinates (may be empty).
  std::vector<ScalarField> to_main;
};

/// <K, K> = g_ij K^i K^j, complex-bilinear: |X|^2 - |Y|^2 + 2 sqrt(-1) <X, Y>.
inline ScalarField pairing_field(const EquivariantPair& pair, const MetricField& g) {
  const VectorField K = pair.K();
  require_same_chart(K, g);
  const int n = g.dim();
  return {g.chart(), n, std::max(K.depth(), g.depth()), [K, g, n](const Seed& s) {
            const JetVector k = K.eval(s);
            const JetMatrix m = g.eval(s);
            Jet r;
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) r += m(i, j) * k[i] * k[j];
            return r;
          }};
}

enum class ZeroKind { IsolatedPoint, DeclaredSubmanifold, FullManifold };

inline std::string to_string(ZeroKind k) {
  switch (k) {
    case ZeroKind::IsolatedPoint: return "isolated_point";
    case ZeroKind::DeclaredSubmanifold: return "declared_submanifold";
    case ZeroKind::FullManifold: return "full_manifold";
  }
  return "?";
}

/// Scenario declaration of a component of M0.
struct ComponentDecl {
  std::string id;
  std::string chart;
  std::vector<int> fixed_axes;
  std::vector<double> fixed_values;
  double tube_radius = 0.0;
};

/// A validated (or rejected) component with its diagnostics.
struct ZeroComponent {
  ComponentDecl decl;
  ZeroKind kind = ZeroKind::IsolatedPoint;
  std::vector<int> free_axes;
  int normal_rank = 0;
  std::map<std::string, double> residuals;
  double gap_min = 0.0;
  bool confirmed = false;
  std::string failure;
};

/// Probe-chart point of the component with the given free-axis values.
inline Point component_point(const Chart& chart, const ZeroComponent& c, std::span<const double> free_values) {
  Point p(static_cast<std::size_t>(chart.dim()), 0.0);
  for (std::size_t k = 0; k < c.decl.fixed_axes.size(); ++k) p[c.decl.fixed_axes[k]] = c.decl.fixed_values[k];
  for (std::size_t k = 0; k < c.free_axes.size(); ++k) p[c.free_axes[k]] = free_values[k];
  return p;
}

/// Deterministic sample points on the component.
inline std::vector<Point> component_samples(const Chart& chart, const ZeroComponent& c, std::size_t count,
                                            std::uint64_t seed) {
  if (c.free_axes.empty()) return {component_point(chart, c, {})};
  std::vector<Point> out;
  for (const auto& p : chart.samples(count, seed)) {
    Point f;
    for (int a : c.free_axes) f.push_back(p[a]);
    out.push_back(component_point(chart, c, f));
  }
  return out;
}

/// Points at coordinate distance tube_radius from the component in the fixed axes.
inline std::vector<Point> tube_samples(const Chart& chart, const ZeroComponent& c, std::size_t count,
                                       std::uint64_t seed) {
  const auto base = component_samples(chart, c, count, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Point> out;
  for (std::size_t k = 0; k < count; ++k) {
    Point p = base[k % base.size()];
    std::vector<double> dir(c.decl.fixed_axes.size());
    double norm = 0.0;
    while (norm < 1e-8) {
      norm = 0.0;
      for (auto& d : dir) {
        d = normal(rng);
        norm += d * d;
      }
      norm = std::sqrt(norm);
    }
    for (std::size_t j = 0; j < dir.size(); ++j) {
      const int a = c.decl.fixed_axes[j];
      p[a] += c.decl.tube_radius * dir[j] / norm;
      if (!chart.periodic[a] && (p[a] <= chart.lower[a] || p[a] >= chart.upper[a]))
        throw SchemaError("tube of component '" + c.decl.id + "' leaves probe chart '" + chart.id + "'");
    }
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normal frames

using RealVector = std::vector<double>;

/// g-orthonormal frames of TM0 and N at one point. The normal frame is
/// oriented so that (N, TM0) is positive for the chart orientation, with TM0
/// oriented by the order of the free coordinates.
struct NormalFrame {
  std::vector<RealVector> normal;
  std::vector<RealVector> tangent;
};

namespace detail {

inline double g_dot(const std::vector<double>& g, int n, const RealVector& a, const RealVector& b) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += a[i] * g[static_cast<std::size_t>(i * n + j)] * b[j];
  return s;
}

inline void orthonormalize_against(const std::vector<double>& g, int n, const std::vector<RealVector>& basis,
                                   RealVector& v) {
  for (const auto& b : basis) {
    const double c = g_dot(g, n, b, v);
    for (int i = 0; i < n; ++i) v[i] -= c * b[i];
  }
  const double norm = std::sqrt(g_dot(g, n, v, v));
  if (!(norm > 1e-12)) throw SingularMatrix("degenerate normal frame");
  for (auto& x : v) x /= norm;
}

inline double real_det(std::vector<double> a, int n) {
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[static_cast<std::size_t>(r * n + c)]) > std::abs(a[static_cast<std::size_t>(piv * n + c)])) piv = r;
    if (a[static_cast<std::size_t>(piv * n + c)] == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(a[static_cast<std::size_t>(piv * n + j)], a[static_cast<std::size_t>(c * n + j)]);
      det = -det;
    }
    const double d = a[static_cast<std::size_t>(c * n + c)];
    det *= d;
    for (int r = c + 1; r < n; ++r) {
      const double f = a[static_cast<std::size_t>(r * n + c)] / d;
      for (int j = c; j < n; ++j) a[static_cast<std::size_t>(r * n + j)] -= f * a[static_cast<std::size_t>(c * n + j)];
    }
  }
  return det;
}

inline std::vector<double> real_values(const JetMatrix& m) {
  const int n = m.size();
  std::vector<double> out(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i * n + j)] = m(i, j).value().real();
  return out;
}

}  // namespace detail

inline NormalFrame normal_frame(const Chart& chart, const ZeroComponent& c, const JetMatrix& metric) {
  const int n = chart.dim();
  const auto g = detail::real_values(metric);
  NormalFrame f;
  for (int a : c.free_axes) {
    RealVector v(static_cast<std::size_t>(n), 0.0);
    v[a] = 1.0;
    detail::orthonormalize_against(g, n, f.tangent, v);
    f.tangent.push_back(v);
  }
  for (int a : c.decl.fixed_axes) {
    RealVector v(static_cast<std::size_t>(n), 0.0);
    v[a] = 1.0;
    std::vector<RealVector> basis = f.tangent;
    basis.insert(basis.end(), f.normal.begin(), f.normal.end());
    detail::orthonormalize_against(g, n, basis, v);
    f.normal.push_back(v);
  }
  if (!f.normal.empty()) {
    std::vector<double> cols(static_cast<std::size_t>(n * n));
    std::vector<RealVector> all = f.normal;
    all.insert(all.end(), f.tangent.begin(), f.tangent.end());
    for (int col = 0; col < n; ++col)
      for (int row = 0; row < n; ++row) cols[static_cast<std::size_t>(row * n + col)] = all[col][row];
    if (detail::real_det(cols, n) * chart.orientation < 0.0)
      for (auto& x : f.normal.front()) x = -x;
  }
  return f;
}

/// Frame components B_ab = g(e_a, A e_b) of an endomorphism with jet entries.
inline std::vector<complex> frame_components(const JetMatrix& A, const JetMatrix& metric,
                                             const std::vector<RealVector>& ea, const std::vector<RealVector>& eb) {
  const int n = A.size();
  std::vector<complex> out;
  for (const auto& a : ea)
    for (const auto& b : eb) {
      complex s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) s += a[i] * metric(i, j).value() * A(j, k).value() * b[k];
      out.push_back(s);
    }
  return out;
}

/// Normal block of the equivariant curvature, g(n_a, R~ n_b), with form parts
/// pulled back to the component (components along fixed axes dropped).
/// Entries are order-0 jets.
inline FormMatrix normal_curvature(const FormMatrix& Rt, const JetMatrix& metric, const NormalFrame& f,
                                   const ZeroComponent& c) {
  const int n = metric.size();
  const int r = static_cast<int>(f.normal.size());
  unsigned fixed_mask = 0;
  for (int a : c.decl.fixed_axes) fixed_mask |= 1u << a;
  FormMatrix out(r, n);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (unsigned m = 0; m < (1u << n); ++m) {
        if (m & fixed_mask) continue;
        complex s = 0.0;
        bool any = false;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
              const Jet& e = Rt(j, k)[m];
              if (e.nvars() == 0 && e.value() == 0.0) continue;
              any = true;
              s += f.normal[a][i] * metric(i, j).value() * e.value() * f.normal[b][k];
            }
        if (any) out(a, b)[m] = Jet(0, 0, s);
      }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

struct ZeroSetTolerances {
  double vanishing = 1e-10;
  double structural = 1e-9;
  std::size_t component_samples = 100;
  std::size_t tube_samples = 100;
};

/// Checks one declared component against the pairing field and computes the
/// normal-bundle diagnostics. Never throws on a failed check; the failure is
/// recorded in `failure` and the offending residual in `residuals`.
inline ZeroComponent validate_component(const ChartModel& model, const ComponentDecl& decl, double gap,
                                        const ZeroSetTolerances& tol = {}) {
  const Chart& chart = model.chart;
  ZeroComponent c;
  c.decl = decl;
  if (decl.fixed_axes.size() != decl.fixed_values.size())
    throw SchemaError("component '" + decl.id + "': fixed_axes and fixed_values differ in length");
  std::vector<bool> fixed(static_cast<std::size_t>(chart.dim()), false);
  for (int a : decl.fixed_axes) {
    if (a < 0 || a >= chart.dim() || fixed[a])
      throw SchemaError("component '" + decl.id + "': bad fixed axis " + std::to_string(a));
    fixed[a] = true;
  }
  for (int a = 0; a < chart.dim(); ++a)
    if (!fixed[a]) c.free_axes.push_back(a);
  c.normal_rank = static_cast<int>(decl.fixed_axes.size());
  c.kind = c.free_axes.empty()               ? ZeroKind::IsolatedPoint
           : decl.fixed_axes.empty()         ? ZeroKind::FullManifold
                                             : ZeroKind::DeclaredSubmanifold;

  auto fail = [&](const std::string& name, double value) {
    if (c.failure.empty()) c.failure = name;
    c.residuals[name] = value;
  };

  if (c.normal_rank % 2 != 0) {
    fail("normal_rank_odd", static_cast<double>(c.normal_rank));
    return c;
  }

  const ScalarField pairing = pairing_field(model.pair, model.geo.g);
  const auto on = component_samples(chart, c, tol.component_samples, 17);
  const double vanish = parallel_max(on.size(), [&](std::size_t i) { return std::abs(pairing.at(on[i]).value()); });
  c.residuals["vanishing"] = vanish;
  if (!(vanish < tol.vanishing)) fail("vanishing", vanish);

  if (c.kind != ZeroKind::FullManifold) {
    const auto tube = tube_samples(chart, c, tol.tube_samples, 29);
    double gmin = std::numeric_limits<double>::infinity();
    for (const auto& p : tube) gmin = std::min(gmin, std::abs(pairing.at(p).value()));
    c.gap_min = gmin;
    c.residuals["gap_min"] = gmin;
    if (!(gmin >= gap)) fail("gap", gmin);
  }

  const MatrixField mx = moment_endomorphism(model.pair.X, model.geo.gamma);
  const MatrixField my = moment_endomorphism(model.pair.Y, model.geo.gamma);
  const FormMatrixField Rt = equivariant_curvature(model.pair, model.geo);
  double skew = 0.0, commute = 0.0, annihilate = 0.0, tangency = 0.0;
  for (const auto& p : on) {
    const JetMatrix g = model.geo.g.at(p);
    const NormalFrame f = normal_frame(chart, c, g);
    const JetMatrix ax = mx.at(p), ay = my.at(p);
    const int r = c.normal_rank;
    const auto bx = frame_components(ax, g, f.normal, f.normal);
    const auto by = frame_components(ay, g, f.normal, f.normal);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        const auto ij = static_cast<std::size_t>(i * r + j), ji = static_cast<std::size_t>(j * r + i);
        skew = std::max({skew, std::abs(bx[ij] + bx[ji]), std::abs(by[ij] + by[ji])});
        complex com = 0.0;
        for (int k = 0; k < r; ++k) {
          com += bx[static_cast<std::size_t>(i * r + k)] * by[static_cast<std::size_t>(k * r + j)] -
                 by[static_cast<std::size_t>(i * r + k)] * bx[static_cast<std::size_t>(k * r + j)];
        }
        commute = std::max(commute, std::abs(com));
      }
    std::vector<RealVector> all = f.normal;
    all.insert(all.end(), f.tangent.begin(), f.tangent.end());
    for (const auto& v : frame_components(ax, g, all, f.tangent)) annihilate = std::max(annihilate, std::abs(v));
    for (const auto& v : frame_components(ay, g, all, f.tangent)) annihilate = std::max(annihilate, std::abs(v));
    const FormMatrix rn = normal_curvature(Rt.at(p), g, f, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) skew = std::max(skew, (rn(i, j) + rn(j, i)).max_abs());
    const JetVector x = model.pair.X.at(p), y = model.pair.Y.at(p);
    for (const auto& nv : f.normal)
      for (const JetVector* v : {&x, &y}) {
        complex s = 0.0;
        for (int i = 0; i < chart.dim(); ++i)
          for (int j = 0; j < chart.dim(); ++j) s += nv[i] * g(i, j).value() * (*v)[j].value();
        tangency = std::max(tangency, std::abs(s));
      }
  }
  c.residuals["normal_skew"] = skew;
  c.residuals["normal_commutation"] = commute;
  c.residuals["tangent_annihilation"] = annihilate;
  c.residuals["flow_tangency"] = tangency;
  if (!(skew < tol.structural)) fail("normal_skew", skew);
  if (!(commute < tol.structural)) fail("normal_commutation", commute);
  if (!(annihilate < tol.structural)) fail("tangent_annihilation", annihilate);
  if (!(tangency < tol.structural)) fail("flow_tangency", tangency);
  c.confirmed = c.failure.empty();
  return c;
}

/// With no declared components, the pairing must stay at least `gap` away from 0.
inline double empty_zero_set_gap(const ChartModel& main, std::span<const Point> samples) {
  const ScalarField pairing = pairing_field(main.pair, main.geo.g);
  double gmin = std::numeric_limits<double>::infinity();
  for (const auto& p : samples) gmin = std::min(gmin, std::abs(pairing.at(p).value()));
  return gmin;
}

// ---------------------------------------------------------------------------
// Chart transitions

/// Pullback of a form given at the image point, by the Jacobian J (rows: image
/// coordinates, columns: source coordinates). Values only.
inline std::vector<complex> pullback_values(const FormJet& w, const std::vector<double>& J, int n) {
  const unsigned size = 1u << n;
  std::vector<complex> out(size, 0.0);
  for (unsigned I = 0; I < size; ++I) {
    const complex coef = w[I].value();
    if (coef == 0.0) continue;
    const int deg = std::popcount(I);
    std::vector<int> rows;
    for (int i = 0; i < n; ++i)
      if (I & (1u << i)) rows.push_back(i);
    for (unsigned Jm = 0; Jm < size; ++Jm) {
      if (std::popcount(Jm) != deg) continue;
      std::vector<int> cols;
      for (int i = 0; i < n; ++i)
        if (Jm & (1u << i)) cols.push_back(i);
      std::vector<double> minor(static_cast<std::size_t>(deg * deg));
      for (int a = 0; a < deg; ++a)
        for (int b = 0; b < deg; ++b)
          minor[static_cast<std::size_t>(a * deg + b)] = J[static_cast<std::size_t>(rows[a] * n + cols[b])];
      out[Jm] += coef * (deg == 0 ? 1.0 : detail::real_det(minor, deg));
    }
  }
  return out;
}

struct TransitionResiduals {
  double metric = 0.0;
  double fields = 0.0;
  double eta = 0.0;
  std::size_t points = 0;
};

/// Consistency of a probe chart with the integration chart at mapped sample
/// points: J^T g_main J = g_probe, J X_probe = X_main (same for Y), and
/// phi^* eta_main = eta_probe when both etas are given.
inline TransitionResiduals transition_residuals(const ChartModel& probe, const ChartModel& main,
                                                const std::optional<MixedForm>& eta_probe,
                                                const std::optional<MixedForm>& eta_main, std::size_t count) {
  TransitionResiduals out;
  if (probe.to_main.empty()) return out;
  const int n = probe.chart.dim();
  if (static_cast<int>(probe.to_main.size()) != main.chart.dim() || main.chart.dim() != n)
    throw SchemaError("to_main of chart '" + probe.chart.id + "' has wrong arity");
  for (const auto& p : probe.chart.samples(count, 43)) {
    std::vector<double> J(static_cast<std::size_t>(n * n));
    Point q(static_cast<std::size_t>(n));
    bool inside = true;
    for (int i = 0; i < n; ++i) {
      const Jet m = probe.to_main[i].at(p, std::max(1, probe.to_main[i].depth()));
      double v = m.value().real();
      for (int j = 0; j < n; ++j) J[static_cast<std::size_t>(i * n + j)] = m.partial(j).value().real();
      const Chart& mc = main.chart;
      if (mc.periodic[i]) {
        v = mc.lower[i] + std::fmod(std::fmod(v - mc.lower[i], mc.period(i)) + mc.period(i), mc.period(i));
      } else if (v <= mc.lower[i] + 1e-3 * mc.period(i) || v >= mc.upper[i] - 1e-3 * mc.period(i)) {
        inside = false;
      }
      q[i] = v;
    }
    if (!inside) continue;
    ++out.points;
    const JetMatrix gp = probe.geo.g.at(p), gm = main.geo.g.at(q);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        complex s = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            s += J[static_cast<std::size_t>(i * n + a)] * gm(i, j).value() * J[static_cast<std::size_t>(j * n + b)];
        out.metric = std::max(out.metric, std::abs(s - gp(a, b).value()) / (1.0 + std::abs(gp(a, b).value())));
      }
    for (const auto& [vp, vm] : {std::pair{probe.pair.X, main.pair.X}, std::pair{probe.pair.Y, main.pair.Y}}) {
      const JetVector a = vp.at(p), b = vm.at(q);
      for (int i = 0; i < n; ++i) {
        complex s = 0.0;
        for (int j = 0; j < n; ++j) s += J[static_cast<std::size_t>(i * n + j)] * a[j].value();
        out.fields = std::max(out.fields, std::abs(s - b[i].value()) / (1.0 + std::abs(b[i].value())));
      }
    }
    if (eta_probe && eta_main) {
      const auto pulled = pullback_values(eta_main->at(q), J, n);
      const FormJet local = eta_probe->at(p);
      for (unsigned m = 0; m < pulled.size(); ++m)
        out.eta = std::max(out.eta, std::abs(pulled[m] - local[m].value()) / (1.0 + std::abs(local[m].value())));
    }
  }
  return out;
}

}  // namespace equiloc

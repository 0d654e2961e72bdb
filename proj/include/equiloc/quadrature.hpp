#pragma once

// Tensor-product quadrature over coordinate boxes: Gauss-Legendre on
// non-periodic axes, the trapezoidal rule on periodic axes.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "equiloc/error.hpp"
#include "equiloc/forms.hpp"
#include "equiloc/geometry.hpp"
#include "equiloc/parallel.hpp"

namespace equiloc {

inline constexpr int kDefaultResolution = 128;

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], Newton iteration on P_n.
inline Rule1D gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre needs at least one node");
  Rule1D r{std::vector<double>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
  // Returns P_n(z) and stores P_n'(z) in dp.
  auto legendre = [n](double z, double& dp) {
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    dp = n * (z * p1 - p2) / (z * z - 1.0);
    return p1;
  };
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double dz = legendre(z, pp) / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    legendre(z, pp);
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    r.nodes[static_cast<std::size_t>(i)] = -z;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = z;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return r;
}

/// Rule for one axis of a box: Gauss-Legendre mapped to [lo, hi], or the
/// periodic trapezoid with uniform weights summing to the period.
inline Rule1D axis_rule(double lo, double hi, bool periodic, int n) {
  if (n < 1) throw DomainError("quadrature resolution must be positive");
  Rule1D r;
  if (periodic) {
    const double h = (hi - lo) / n;
    for (int k = 0; k < n; ++k) {
      r.nodes.push_back(lo + k * h);
      r.weights.push_back(h);
    }
    return r;
  }
  const Rule1D g = gauss_legendre(n);
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  for (int k = 0; k < n; ++k) {
    r.nodes.push_back(mid + half * g.nodes[static_cast<std::size_t>(k)]);
    r.weights.push_back(half * g.weights[static_cast<std::size_t>(k)]);
  }
  return r;
}

/// Tensor-product grid over a box.
class QuadratureGrid {
 public:
  QuadratureGrid() = default;
  explicit QuadratureGrid(std::vector<Rule1D> axes) : axes_(std::move(axes)) {
    size_ = axes_.empty() ? 0 : 1;
    for (const auto& a : axes_) size_ *= a.nodes.size();
  }

  /// Grid on a chart's box with one resolution per axis (a single value is broadcast).
  static QuadratureGrid for_chart(const Chart& chart, const std::vector<int>& resolution) {
    std::vector<Rule1D> axes;
    for (int i = 0; i < chart.dim(); ++i)
      axes.push_back(axis_rule(chart.lower[i], chart.upper[i], chart.periodic[i], pick(resolution, i)));
    return QuadratureGrid(std::move(axes));
  }

  static int pick(const std::vector<int>& resolution, int axis) {
    if (resolution.empty()) return kDefaultResolution;
    return resolution[std::min<std::size_t>(static_cast<std::size_t>(axis), resolution.size() - 1)];
  }

  int dim() const noexcept { return static_cast<int>(axes_.size()); }
  std::size_t size() const noexcept { return size_; }
  const Rule1D& axis(int i) const { return axes_[static_cast<std::size_t>(i)]; }

  /// Node and weight of flat index k (last axis fastest).
  double node(std::size_t k, Point& p) const {
    double w = 1.0;
    p.resize(axes_.size());
    for (std::size_t a = axes_.size(); a-- > 0;) {
      const std::size_t na = axes_[a].nodes.size();
      const std::size_t i = k % na;
      k /= na;
      p[a] = axes_[a].nodes[i];
      w *= axes_[a].weights[i];
    }
    return w;
  }

  /// Deterministic parallel sum of weight * f(node).
  template <class F>
  complex integrate(F&& f) const {
    return parallel_sum<complex>(size_, [&](std::size_t k) {
      Point p;
      const double w = node(k, p);
      return w * f(p);
    });
  }

 private:
  std::vector<Rule1D> axes_;
  std::size_t size_ = 0;
};

/// Integral over the chart of the top-degree part of w, times the chart orientation.
inline complex integrate_top(const Chart& chart, const MixedForm& w, const QuadratureGrid& grid) {
  if (grid.dim() != chart.dim() || w.dim() != chart.dim())
    throw DomainError("quadrature grid dimension does not match chart '" + chart.id + "'");
  if (w.chart() != chart.id) throw ChartMismatch(w.chart(), chart.id);
  const unsigned top = (1u << chart.dim()) - 1u;
  const complex sum = grid.integrate([&](const Point& p) { return w.at(chart.clamp(p))[top].value(); });
  return sum * static_cast<double>(chart.orientation);
}

}  // namespace equiloc

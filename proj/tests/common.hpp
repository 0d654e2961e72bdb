#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "equiloc/equivariant.hpp"
#include "equiloc/expression.hpp"
#include "equiloc/geometry.hpp"

namespace testing_support {

using namespace equiloc;
inline constexpr double kPi = std::numbers::pi;

inline Chart sphere_chart() { return Chart{"main", {"t", "p"}, {0.0, 0.0}, {kPi, 2 * kPi}, {false, true}, 1, "poles"}; }
inline Chart torus_chart() { return Chart{"main", {"x", "y"}, {0.0, 0.0}, {2 * kPi, 2 * kPi}, {true, true}, 1, ""}; }

inline std::vector<Expression> exprs(const Chart& c, std::vector<std::string> v) {
  std::vector<Expression> out;
  for (const auto& s : v) out.push_back(Expression::parse(s, c.coords));
  return out;
}

inline MetricField metric(const Chart& c, std::vector<std::vector<std::string>> rows) {
  std::vector<std::vector<Expression>> g;
  for (const auto& r : rows) g.push_back(exprs(c, r));
  return metric_from_expressions(c, g);
}

inline VectorField field(const Chart& c, std::vector<std::string> v) { return vector_from_expressions(c, exprs(c, v)); }

inline MetricField round_sphere(const Chart& c) { return metric(c, {{"1", "0"}, {"0", "sin(t)^2"}}); }

inline EquivariantPair rotation_pair(const Chart& c, double a, double b) {
  return EquivariantPair(field(c, {"0", std::to_string(a)}), field(c, {"0", std::to_string(b)}));
}

}  // namespace testing_support

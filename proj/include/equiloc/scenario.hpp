#pragma once

// Scenarios: a manifold given by charts, a Killing pair, a declared zero set
// and an equivariantly closed form eta. Scenarios are plain data (ScenarioSpec,
// serializable as JSON "equiloc-scenario/1") and are turned into evaluable
// fields by build_model().

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "equiloc/equivariant.hpp"
#include "equiloc/error.hpp"
#include "equiloc/expression.hpp"
#include "equiloc/geometry.hpp"
#include "equiloc/zeroset.hpp"

namespace equiloc {

inline constexpr const char* kScenarioSchema = "equiloc-scenario/1";

enum class EtaBuilder { DH, Euler, Characteristic, Custom };

inline std::string to_string(EtaBuilder b) {
  switch (b) {
    case EtaBuilder::DH: return "dh";
    case EtaBuilder::Euler: return "euler";
    case EtaBuilder::Characteristic: return "characteristic";
    case EtaBuilder::Custom: return "custom";
  }
  return "?";
}

inline EtaBuilder eta_builder_from_string(const std::string& s) {
  if (s == "dh") return EtaBuilder::DH;
  if (s == "euler") return EtaBuilder::Euler;
  if (s == "characteristic") return EtaBuilder::Characteristic;
  if (s == "custom") return EtaBuilder::Custom;
  throw SchemaError("unknown eta builder '" + s + "'");
}

/// One chart of a scenario, all functions as expression text.
struct ChartSpec {
  std::string id;
  std::vector<std::string> coords;
  std::vector<std::string> lower;
  std::vector<std::string> upper;
  std::vector<bool> periodic;
  int orientation = 1;
  std::string excluded;
  std::vector<std::vector<std::string>> metric;
  std::vector<std::string> X;
  std::vector<std::string> Y;
  /// Integration-chart coordinates in terms of this chart's coordinates.
  std::vector<std::string> to_main;
  /// Form components keyed by comma-separated increasing axis lists ("" for degree 0).
  std::map<std::string, std::string> eta_form;
};

struct ExpectedValue {
  std::string check;
  complex value;
  std::string provenance;
};

struct Declared {
  bool killing = true;
  bool commuting = true;
  bool closed = true;
};

struct ScenarioSpec {
  std::string id;
  std::string description;
  std::map<std::string, complex> params;
  std::vector<ChartSpec> charts;
  std::string integration_chart;
  Declared declared;
  EtaBuilder eta = EtaBuilder::DH;
  Polynomial polynomial;
  std::vector<ComponentDecl> components;
  double gap = 0.0;
  /// Further invariant metrics on the integration chart for the Lemma 7 comparison.
  std::vector<std::vector<std::vector<std::string>>> lemma7_metrics;
  std::vector<ExpectedValue> expected;
  std::vector<int> resolution;

  const ChartSpec& chart(const std::string& cid) const {
    for (const auto& c : charts)
      if (c.id == cid) return c;
    throw SchemaError("scenario '" + id + "': unknown chart '" + cid + "'");
  }
};

// ---------------------------------------------------------------------------
// JSON

using json = nlohmann::ordered_json;

namespace detail {

inline json complex_to_json(complex c) { return json{{"re", c.real()}, {"im", c.imag()}}; }

inline complex complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_object()) {
    for (const auto& [k, v] : j.items())
      if (k != "re" && k != "im") throw SchemaError(where + ": unknown key '" + k + "' in complex number");
    return {j.value("re", 0.0), j.value("im", 0.0)};
  }
  throw SchemaError(where + ": expected a number or {re, im}");
}

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw SchemaError(where + ": unknown key '" + k + "'");
  }
}

template <class T>
T need(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw SchemaError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(where + ": bad value for '" + key + "': " + e.what());
  }
}

template <class T>
T opt(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return need<T>(j, key, where);
}

inline std::vector<std::string> string_list(const json& j, const char* key, const std::string& where,
                                            bool required = true) {
  if (!j.contains(key)) {
    if (required) throw SchemaError(where + ": missing key '" + key + "'");
    return {};
  }
  std::vector<std::string> out;
  const json& a = j.at(key);
  if (!a.is_array()) throw SchemaError(where + ": '" + key + "' must be an array");
  for (const auto& x : a) {
    if (x.is_string()) out.push_back(x.get<std::string>());
    else if (x.is_number()) {
      std::ostringstream s;
      s.precision(17);
      s << x.get<double>();
      out.push_back(s.str());
    } else throw SchemaError(where + ": '" + key + "' entries must be strings or numbers");
  }
  return out;
}

}  // namespace detail

inline json to_json(const ScenarioSpec& s) {
  json j;
  j["schema"] = kScenarioSchema;
  j["id"] = s.id;
  j["description"] = s.description;
  json params = json::object();
  for (const auto& [k, v] : s.params) params[k] = v.imag() == 0.0 ? json(v.real()) : detail::complex_to_json(v);
  j["params"] = params;
  json charts = json::array();
  for (const auto& c : s.charts) {
    json cj;
    cj["id"] = c.id;
    cj["coords"] = c.coords;
    cj["lower"] = c.lower;
    cj["upper"] = c.upper;
    cj["periodic"] = c.periodic;
    cj["orientation"] = c.orientation;
    cj["excluded"] = c.excluded;
    cj["metric"] = c.metric;
    cj["X"] = c.X;
    cj["Y"] = c.Y;
    if (!c.to_main.empty()) cj["to_main"] = c.to_main;
    if (!c.eta_form.empty()) {
      json e = json::object();
      for (const auto& [k, v] : c.eta_form) e[k] = v;
      cj["eta_form"] = e;
    }
    charts.push_back(cj);
  }
  j["charts"] = charts;
  j["integration_chart"] = s.integration_chart;
  j["declared"] = {{"killing", s.declared.killing}, {"commuting", s.declared.commuting}, {"closed", s.declared.closed}};
  json eta{{"builder", to_string(s.eta)}};
  if (s.eta == EtaBuilder::Characteristic) {
    json p = json::array();
    for (const auto& c : s.polynomial.coeffs) p.push_back(c.imag() == 0.0 ? json(c.real()) : detail::complex_to_json(c));
    eta["polynomial"] = p;
  }
  j["eta"] = eta;
  json comps = json::array();
  for (const auto& c : s.components)
    comps.push_back({{"id", c.id},
                     {"chart", c.chart},
                     {"fixed_axes", c.fixed_axes},
                     {"fixed_values", c.fixed_values},
                     {"tube_radius", c.tube_radius}});
  j["zero_set"] = {{"gap", s.gap}, {"components", comps}};
  if (!s.lemma7_metrics.empty()) j["lemma7_metrics"] = s.lemma7_metrics;
  json exp = json::array();
  for (const auto& e : s.expected)
    exp.push_back({{"check", e.check}, {"value", detail::complex_to_json(e.value)}, {"provenance", e.provenance}});
  j["expected"] = exp;
  if (!s.resolution.empty()) j["resolution"] = s.resolution;
  return j;
}

inline ScenarioSpec scenario_from_json(const json& j) {
  using namespace detail;
  const std::string top = "scenario";
  check_keys(j,
             {"schema", "id", "description", "params", "charts", "integration_chart", "declared", "eta", "zero_set",
              "lemma7_metrics", "expected", "resolution"},
             top);
  if (need<std::string>(j, "schema", top) != kScenarioSchema)
    throw SchemaError("unsupported scenario schema '" + j.at("schema").get<std::string>() + "'");
  ScenarioSpec s;
  s.id = need<std::string>(j, "id", top);
  const std::string where = "scenario '" + s.id + "'";
  s.description = opt<std::string>(j, "description", "", where);
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw SchemaError(where + ": params must be an object");
    for (const auto& [k, v] : j.at("params").items()) s.params[k] = complex_from_json(v, where + " param " + k);
  }
  if (!j.contains("charts") || !j.at("charts").is_array() || j.at("charts").empty())
    throw SchemaError(where + ": 'charts' must be a non-empty array");
  for (const auto& cj : j.at("charts")) {
    check_keys(cj,
               {"id", "coords", "lower", "upper", "periodic", "orientation", "excluded", "metric", "X", "Y", "to_main",
                "eta_form"},
               where + " chart");
    ChartSpec c;
    c.id = need<std::string>(cj, "id", where + " chart");
    const std::string cw = where + " chart '" + c.id + "'";
    c.coords = need<std::vector<std::string>>(cj, "coords", cw);
    c.lower = string_list(cj, "lower", cw);
    c.upper = string_list(cj, "upper", cw);
    c.periodic = need<std::vector<bool>>(cj, "periodic", cw);
    c.orientation = opt<int>(cj, "orientation", 1, cw);
    c.excluded = opt<std::string>(cj, "excluded", "", cw);
    if (!cj.contains("metric") || !cj.at("metric").is_array()) throw SchemaError(cw + ": missing metric");
    for (const auto& row : cj.at("metric")) {
      std::vector<std::string> r;
      if (!row.is_array()) throw SchemaError(cw + ": metric rows must be arrays");
      json wrap{{"row", row}};
      c.metric.push_back(string_list(wrap, "row", cw));
    }
    c.X = string_list(cj, "X", cw);
    c.Y = string_list(cj, "Y", cw);
    c.to_main = string_list(cj, "to_main", cw, false);
    if (cj.contains("eta_form")) {
      if (!cj.at("eta_form").is_object()) throw SchemaError(cw + ": eta_form must be an object");
      for (const auto& [k, v] : cj.at("eta_form").items()) {
        if (v.is_string()) c.eta_form[k] = v.get<std::string>();
        else if (v.is_number()) {
          std::ostringstream os;
          os.precision(17);
          os << v.get<double>();
          c.eta_form[k] = os.str();
        } else throw SchemaError(cw + ": eta_form values must be expressions");
      }
    }
    s.charts.push_back(std::move(c));
  }
  s.integration_chart = need<std::string>(j, "integration_chart", where);
  if (j.contains("declared")) {
    const json& d = j.at("declared");
    check_keys(d, {"killing", "commuting", "closed"}, where + " declared");
    s.declared.killing = opt<bool>(d, "killing", false, where);
    s.declared.commuting = opt<bool>(d, "commuting", false, where);
    s.declared.closed = opt<bool>(d, "closed", false, where);
  } else {
    s.declared = Declared{false, false, false};
  }
  if (!j.contains("eta")) throw SchemaError(where + ": missing eta");
  {
    const json& e = j.at("eta");
    check_keys(e, {"builder", "polynomial"}, where + " eta");
    s.eta = eta_builder_from_string(need<std::string>(e, "builder", where + " eta"));
    if (e.contains("polynomial")) {
      std::vector<complex> c;
      for (const auto& x : e.at("polynomial")) c.push_back(complex_from_json(x, where + " polynomial"));
      s.polynomial = Polynomial(std::move(c));
    } else if (s.eta == EtaBuilder::Characteristic) {
      throw SchemaError(where + ": characteristic eta needs a polynomial");
    }
  }
  if (!j.contains("zero_set")) throw SchemaError(where + ": missing zero_set");
  {
    const json& z = j.at("zero_set");
    check_keys(z, {"gap", "components"}, where + " zero_set");
    s.gap = need<double>(z, "gap", where + " zero_set");
    if (z.contains("components")) {
      for (const auto& cj : z.at("components")) {
        check_keys(cj, {"id", "chart", "fixed_axes", "fixed_values", "tube_radius"}, where + " component");
        ComponentDecl c;
        c.id = need<std::string>(cj, "id", where + " component");
        c.chart = need<std::string>(cj, "chart", where + " component");
        c.fixed_axes = opt<std::vector<int>>(cj, "fixed_axes", {}, where + " component");
        c.fixed_values = opt<std::vector<double>>(cj, "fixed_values", {}, where + " component");
        c.tube_radius = opt<double>(cj, "tube_radius", 0.0, where + " component");
        s.components.push_back(std::move(c));
      }
    }
  }
  if (j.contains("lemma7_metrics"))
    s.lemma7_metrics = need<std::vector<std::vector<std::vector<std::string>>>>(j, "lemma7_metrics", where);
  if (j.contains("expected")) {
    for (const auto& ej : j.at("expected")) {
      check_keys(ej, {"check", "value", "provenance"}, where + " expected");
      s.expected.push_back({need<std::string>(ej, "check", where + " expected"),
                            complex_from_json(ej.at("value"), where + " expected"),
                            opt<std::string>(ej, "provenance", "", where + " expected")});
    }
  }
  s.resolution = opt<std::vector<int>>(j, "resolution", {}, where);
  for (int r : s.resolution)
    if (r < 8) throw SchemaError(where + ": resolution entries must be >= 8");
  if (s.gap < 0.0) throw SchemaError(where + ": gap must be non-negative");
  return s;
}

inline ScenarioSpec read_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("scenario file '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

// ---------------------------------------------------------------------------
// Models

/// Parsed scenario with evaluable fields on every chart.
struct ScenarioModel {
  ScenarioSpec spec;
  std::vector<ChartModel> charts;
  /// Component forms from eta_form per chart (absent when not given).
  std::vector<std::optional<MixedForm>> eta_forms;

  std::size_t index(const std::string& cid) const {
    for (std::size_t i = 0; i < charts.size(); ++i)
      if (charts[i].chart.id == cid) return i;
    throw SchemaError("scenario '" + spec.id + "': unknown chart '" + cid + "'");
  }
  const ChartModel& chart(const std::string& cid) const { return charts[index(cid)]; }
  const ChartModel& main() const { return chart(spec.integration_chart); }

  /// eta on the given chart per the scenario's builder.
  MixedForm eta(const std::string& cid) const {
    const std::size_t i = index(cid);
    const ChartModel& m = charts[i];
    switch (spec.eta) {
      case EtaBuilder::DH:
        if (!eta_forms[i]) throw SchemaError("chart '" + cid + "' has no eta_form for the dh builder");
        return exp(*eta_forms[i]);
      case EtaBuilder::Custom:
        if (!eta_forms[i]) throw SchemaError("chart '" + cid + "' has no eta_form for the custom builder");
        return *eta_forms[i];
      case EtaBuilder::Euler:
        return equivariant_euler_form(equivariant_curvature(m.pair, m.geo), m.geo.g, m.chart.orientation);
      case EtaBuilder::Characteristic:
        return characteristic_form(spec.polynomial, equivariant_curvature(m.pair, m.geo));
    }
    throw SchemaError("corrupt eta builder");
  }

  /// True when eta is given by explicit components (and so must agree across charts).
  bool eta_is_explicit() const { return spec.eta == EtaBuilder::DH || spec.eta == EtaBuilder::Custom; }
};

inline double constant_expression(const std::string& text, const std::map<std::string, complex>& params,
                                  const std::string& where) {
  const Expression e = Expression::parse(text, {}, params);
  const complex v = e.constant_value();
  if (v.imag() != 0.0) throw SchemaError(where + ": bound '" + text + "' is not real");
  return v.real();
}

/// Form-component mask from a key such as "0,2"; "" is degree 0.
inline unsigned form_mask(const std::string& key, int dim, const std::string& where) {
  if (key.empty()) return 0;
  unsigned mask = 0;
  int last = -1;
  std::stringstream ss(key);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    int a = -1;
    try {
      std::size_t used = 0;
      a = std::stoi(tok, &used);
      if (used != tok.size()) a = -1;
    } catch (const std::exception&) {
      a = -1;
    }
    if (a < 0 || a >= dim || a <= last)
      throw SchemaError(where + ": eta_form key '" + key + "' must list strictly increasing axes");
    mask |= 1u << a;
    last = a;
  }
  return mask;
}

inline MetricField metric_from_strings(const Chart& chart, const std::vector<std::vector<std::string>>& rows,
                                       const std::map<std::string, complex>& params) {
  std::vector<std::vector<Expression>> g;
  for (const auto& row : rows) {
    std::vector<Expression> r;
    for (const auto& t : row) r.push_back(Expression::parse(t, chart.coords, params));
    g.push_back(std::move(r));
  }
  return metric_from_expressions(chart, g);
}

inline ChartModel build_chart_model(const ChartSpec& c, const std::map<std::string, complex>& params) {
  const std::string where = "chart '" + c.id + "'";
  Chart chart;
  chart.id = c.id;
  chart.coords = c.coords;
  chart.periodic = c.periodic;
  chart.orientation = c.orientation;
  chart.excluded = c.excluded;
  for (const auto& t : c.lower) chart.lower.push_back(constant_expression(t, params, where));
  for (const auto& t : c.upper) chart.upper.push_back(constant_expression(t, params, where));
  chart.check();
  for (std::size_t i = 0; i < c.coords.size(); ++i)
    for (std::size_t j = i + 1; j < c.coords.size(); ++j)
      if (c.coords[i] == c.coords[j]) throw SchemaError(where + ": duplicate coordinate name " + c.coords[i]);
  auto exprs = [&](const std::vector<std::string>& v) {
    std::vector<Expression> out;
    for (const auto& t : v) out.push_back(Expression::parse(t, chart.coords, params));
    return out;
  };
  MetricField g = metric_from_strings(chart, c.metric, params);
  EquivariantPair pair(vector_from_expressions(chart, exprs(c.X)), vector_from_expressions(chart, exprs(c.Y)));
  std::vector<ScalarField> to_main;
  for (const auto& e : exprs(c.to_main)) to_main.push_back(expression_field(chart.id, e, chart.dim()));
  return ChartModel{chart, ChartGeometry(std::move(g)), std::move(pair), std::move(to_main)};
}

inline std::optional<MixedForm> build_eta_form(const ChartSpec& c, const Chart& chart,
                                               const std::map<std::string, complex>& params) {
  if (c.eta_form.empty()) return std::nullopt;
  std::vector<std::pair<unsigned, Expression>> comps;
  for (const auto& [k, v] : c.eta_form)
    comps.emplace_back(form_mask(k, chart.dim(), "chart '" + c.id + "'"), Expression::parse(v, chart.coords, params));
  const int n = chart.dim();
  return MixedForm{chart.id, n, 0, [comps, n](const Seed& s) {
                     FormJet w(n);
                     for (const auto& [m, e] : comps) w[m] = e.eval(s);
                     return w;
                   }};
}

/// Parses every expression and checks structural consistency. Symmetry of the
/// metric text is required: g_ij and g_ji must be the same expression.
inline ScenarioModel build_model(const ScenarioSpec& spec) {
  ScenarioModel m;
  m.spec = spec;
  for (const auto& c : spec.charts) {
    const std::string where = "scenario '" + spec.id + "' chart '" + c.id + "'";
    const std::size_t n = c.coords.size();
    if (c.metric.size() != n) throw SchemaError(where + ": metric must be " + std::to_string(n) + "x" + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (c.metric[i].size() != n) throw SchemaError(where + ": metric must be square");
      for (std::size_t j = 0; j < i; ++j)
        if (c.metric[i][j] != c.metric[j][i])
          throw SchemaError(where + ": metric is not symmetric (g_" + std::to_string(i) + std::to_string(j) +
                            " differs from g_" + std::to_string(j) + std::to_string(i) + ")");
    }
    if (c.X.size() != n || c.Y.size() != n) throw SchemaError(where + ": X and Y need one component per coordinate");
    if (!c.to_main.empty() && c.id == spec.integration_chart)
      throw SchemaError(where + ": the integration chart cannot have to_main");
    m.charts.push_back(build_chart_model(c, spec.params));
    m.eta_forms.push_back(build_eta_form(c, m.charts.back().chart, spec.params));
  }
  for (std::size_t i = 0; i < m.charts.size(); ++i)
    for (std::size_t j = i + 1; j < m.charts.size(); ++j)
      if (m.charts[i].chart.id == m.charts[j].chart.id) throw SchemaError("duplicate chart id '" + m.charts[i].chart.id + "'");
  const ChartModel& main = m.main();
  for (const auto& c : m.charts)
    if (!c.to_main.empty() && static_cast<int>(c.to_main.size()) != main.chart.dim())
      throw SchemaError("chart '" + c.chart.id + "': to_main needs one expression per integration coordinate");
  for (const auto& d : spec.components) m.index(d.chart);
  if (m.eta_is_explicit())
    for (std::size_t i = 0; i < m.charts.size(); ++i)
      if (!m.eta_forms[i]) throw SchemaError("chart '" + m.charts[i].chart.id + "' needs eta_form for builder " + to_string(spec.eta));
  for (const auto& alt : spec.lemma7_metrics) metric_from_strings(main.chart, alt, spec.params);
  return m;
}

// ---------------------------------------------------------------------------
// Built-in scenarios

namespace detail {

inline std::string num(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

inline std::vector<std::vector<std::string>> sphere_metric(const std::string& factor) {
  return {{factor, "0"}, {"0", factor + "*sin(t)^2"}};
}

/// Graph-coordinate metric of the unit sphere around a pole, times `factor`.
inline std::vector<std::vector<std::string>> pole_metric(const std::string& factor) {
  const std::string w = "(1-u^2-v^2)";
  return {{factor + "*(1+u^2/" + w + ")", factor + "*(u*v/" + w + ")"},
          {factor + "*(u*v/" + w + ")", factor + "*(1+v^2/" + w + ")"}};
}

inline std::string theta_from_pole(bool north) {
  const std::string t = "atan2(sqrt(u^2+v^2), sqrt(1-u^2-v^2))";
  return north ? t : "pi - " + t;
}

}  // namespace detail

enum class SphereKind { DH, Euler };

struct SphereOptions {
  double scale = 1.0;
  /// Conformal factor exp(2 eps cos(theta)).
  double conformal = 0.0;
  /// Replace the DH Hamiltonian factor (a + sqrt(-1) b) by this value (negative control).
  std::optional<double> hamiltonian_override{};
  /// Y = rotation about the x axis instead of b d/dphi (negative control).
  bool tilted_y = false;
};

/// Unit sphere (optionally scaled or conformally deformed), X = a d/dphi,
/// Y = b d/dphi, poles as M0, with graph-coordinate probe charts at the poles.
inline ScenarioSpec build_sphere_scenario(double a, double b, SphereKind kind, const SphereOptions& o = {}) {
  using detail::num;
  if (kind == SphereKind::DH && a == 0.0 && b == 0.0)
    throw DomainError("the DH sphere scenario needs (a, b) != (0, 0)");
  ScenarioSpec s;
  const bool zero = a == 0.0 && b == 0.0 && !o.tilted_y;
  const std::string kind_name = kind == SphereKind::DH ? "dh" : "euler";
  s.id = "s2-" + kind_name + "-a" + num(a) + "-b" + num(b);
  s.params = {{"a", a}, {"b", b}};
  const std::string k = num(o.scale);
  const std::string fmain = o.conformal == 0.0 ? k : k + "*exp(" + num(2 * o.conformal) + "*cos(t))";
  const std::string c = "(a+i*b)";
  const std::string hc = o.hamiltonian_override ? num(*o.hamiltonian_override) : c;

  ChartSpec main;
  main.id = "main";
  main.coords = {"t", "p"};
  main.lower = {"0", "0"};
  main.upper = {"pi", "2*pi"};
  main.periodic = {false, true};
  main.excluded = "poles t=0 and t=pi";
  main.metric = detail::sphere_metric(fmain);
  main.X = {"0", "a"};
  main.Y = o.tilted_y ? std::vector<std::string>{"-sin(p)", "-cos(p)*cos(t)/sin(t)"} : std::vector<std::string>{"0", "b"};
  if (kind == SphereKind::DH) main.eta_form = {{"", "-" + hc + "*cos(t)"}, {"0,1", "sin(t)"}};
  s.charts.push_back(main);

  for (bool north : {true, false}) {
    ChartSpec p;
    p.id = north ? "north" : "south";
    p.coords = {"u", "v"};
    p.lower = {"-0.5", "-0.5"};
    p.upper = {"0.5", "0.5"};
    p.periodic = {false, false};
    p.orientation = north ? 1 : -1;
    const std::string z = north ? "sqrt(1-u^2-v^2)" : "(-sqrt(1-u^2-v^2))";
    const std::string f = o.conformal == 0.0 ? k : k + "*exp(" + num(2 * o.conformal) + "*" + z + ")";
    p.metric = detail::pole_metric(f);
    p.X = {"-a*v", "a*u"};
    p.Y = o.tilted_y ? std::vector<std::string>{"0", north ? "-sqrt(1-u^2-v^2)" : "sqrt(1-u^2-v^2)"}
                     : std::vector<std::string>{"-b*v", "b*u"};
    p.to_main = {detail::theta_from_pole(north), "atan2(v, u)"};
    if (kind == SphereKind::DH)
      p.eta_form = {{"", "-" + hc + "*" + z}, {"0,1", north ? "1/sqrt(1-u^2-v^2)" : "-1/sqrt(1-u^2-v^2)"}};
    s.charts.push_back(p);
  }
  s.integration_chart = "main";
  s.eta = kind == SphereKind::DH ? EtaBuilder::DH : EtaBuilder::Euler;
  const double c2 = a * a + b * b;
  const double fmin = std::exp(-2.0 * std::abs(o.conformal));
  if (zero) {
    s.components = {{"M", "main", {}, {}, 0.0}};
    s.gap = 0.0;
  } else {
    s.components = {{"north-pole", "north", {0, 1}, {0.0, 0.0}, 0.3}, {"south-pole", "south", {0, 1}, {0.0, 0.0}, 0.3}};
    s.gap = 0.5 * c2 * o.scale * fmin * 0.09;
  }
  s.lemma7_metrics = {detail::sphere_metric("exp(0.6*cos(t))")};
  const complex cc(a, b);
  if (kind == SphereKind::DH && !o.hamiltonian_override && !o.tilted_y) {
    s.expected.push_back({"theorem1", 4.0 * std::numbers::pi * std::sinh(cc) / cc,
                          "closed form 4 pi sinh(c)/c with c = a + sqrt(-1) b"});
  }
  if (kind == SphereKind::Euler) s.expected.push_back({"theorem1", 2.0, "Euler characteristic of S^2"});
  s.description = (kind == SphereKind::DH ? "Duistermaat-Heckman form exp(-c cos t + sin t dt^dp)"
                                          : "equivariant Euler form") +
                  std::string(" on the unit sphere, X = a d/dp, Y = b d/dp");
  if (o.scale != 1.0) {
    s.id += "-scaled";
    s.description += ", metric scaled by " + num(o.scale);
  }
  if (o.conformal != 0.0) {
    s.id += "-conformal";
    s.description += ", metric conformal factor exp(2 eps cos t), eps = " + num(o.conformal);
  }
  return s;
}

enum class TorusKind { Degenerate, EmptyZeroSet };

/// Flat torus [0, 2 pi)^2. Degenerate: X = dx, Y = dy (pairing identically 0,
/// eta = 1). Empty: X = dx, Y = 0 (no zeros, eta = equivariant Euler form).
inline ScenarioSpec build_torus_scenario(TorusKind kind) {
  ScenarioSpec s;
  ChartSpec c;
  c.id = "main";
  c.coords = {"x", "y"};
  c.lower = {"0", "0"};
  c.upper = {"2*pi", "2*pi"};
  c.periodic = {true, true};
  c.metric = {{"1", "0"}, {"0", "1"}};
  c.X = {"1", "0"};
  s.integration_chart = "main";
  if (kind == TorusKind::Degenerate) {
    s.id = "t2-degenerate";
    s.description = "flat torus, X = dx, Y = dy: <K, K> vanishes identically, M0 = M";
    c.Y = {"0", "1"};
    c.eta_form = {{"", "1"}};
    s.eta = EtaBuilder::Custom;
    s.components = {{"M", "main", {}, {}, 0.0}};
    s.gap = 0.0;
    s.expected.push_back({"theorem1", 0.0, "eta = 1 has no top-degree part"});
  } else {
    s.id = "t2-empty";
    s.description = "flat torus, X = dx, Y = 0: no zeros, equivariant Euler form";
    c.Y = {"0", "0"};
    s.eta = EtaBuilder::Euler;
    s.gap = 0.5;
    s.expected.push_back({"theorem1", 0.0, "Euler characteristic of T^2"});
  }
  s.charts.push_back(c);
  return s;
}

enum class ProductKind { DH, Euler };

/// S^2 x S^2 with X = a d/dp1, Y = b d/dp1. M0 = {poles} x S^2, two
/// components of normal rank 2.
inline ScenarioSpec build_s2xs2_scenario(double a, double b, ProductKind kind) {
  using detail::num;
  ScenarioSpec s;
  s.id = std::string("s2xs2-") + (kind == ProductKind::DH ? "dh" : "euler") + "-a" + num(a) + "-b" + num(b);
  s.params = {{"a", a}, {"b", b}};
  ChartSpec main;
  main.id = "main";
  main.coords = {"t1", "p1", "t2", "p2"};
  main.lower = {"0", "0", "0", "0"};
  main.upper = {"pi", "2*pi", "pi", "2*pi"};
  main.periodic = {false, true, false, true};
  main.excluded = "t1 or t2 in {0, pi}";
  main.metric = {{"1", "0", "0", "0"}, {"0", "sin(t1)^2", "0", "0"}, {"0", "0", "1", "0"}, {"0", "0", "0", "sin(t2)^2"}};
  main.X = {"0", "a", "0", "0"};
  main.Y = {"0", "b", "0", "0"};
  if (kind == ProductKind::DH)
    main.eta_form = {{"", "-(a+i*b)*cos(t1)"}, {"0,1", "sin(t1)"}, {"2,3", "sin(t2)"}};
  s.charts.push_back(main);
  for (bool north : {true, false}) {
    ChartSpec p;
    p.id = north ? "north1" : "south1";
    p.coords = {"u", "v", "t2", "p2"};
    p.lower = {"-0.5", "-0.5", "0", "0"};
    p.upper = {"0.5", "0.5", "pi", "2*pi"};
    p.periodic = {false, false, false, true};
    p.orientation = north ? 1 : -1;
    p.excluded = "t2 in {0, pi}";
    const auto pm = detail::pole_metric("1");
    p.metric = {{pm[0][0], pm[0][1], "0", "0"}, {pm[1][0], pm[1][1], "0", "0"}, {"0", "0", "1", "0"}, {"0", "0", "0", "sin(t2)^2"}};
    p.X = {"-a*v", "a*u", "0", "0"};
    p.Y = {"-b*v", "b*u", "0", "0"};
    p.to_main = {detail::theta_from_pole(north), "atan2(v, u)", "t2", "p2"};
    if (kind == ProductKind::DH) {
      const std::string z = north ? "sqrt(1-u^2-v^2)" : "(-sqrt(1-u^2-v^2))";
      p.eta_form = {{"", "-(a+i*b)*" + z},
                    {"0,1", north ? "1/sqrt(1-u^2-v^2)" : "-1/sqrt(1-u^2-v^2)"},
                    {"2,3", "sin(t2)"}};
    }
    s.charts.push_back(p);
  }
  s.integration_chart = "main";
  s.eta = kind == ProductKind::DH ? EtaBuilder::DH : EtaBuilder::Euler;
  s.components = {{"north-x-S2", "north1", {0, 1}, {0.0, 0.0}, 0.3}, {"south-x-S2", "south1", {0, 1}, {0.0, 0.0}, 0.3}};
  s.gap = 0.5 * (a * a + b * b) * 0.09;
  s.resolution = {16, 8, 16, 8};
  const complex c(a, b);
  if (kind == ProductKind::DH) {
    s.expected.push_back({"theorem1", 16.0 * std::numbers::pi * std::numbers::pi * std::sinh(c) / c,
                          "closed form (4 pi sinh(c)/c) * 4 pi"});
    s.description = "S^2 x S^2, DH form on the first factor times the area form of the second";
  } else {
    s.expected.push_back({"theorem1", 4.0, "Euler characteristic of S^2 x S^2"});
    s.description = "S^2 x S^2, equivariant Euler form, rotation of the first factor";
  }
  return s;
}

/// Built-in scenario ids in listing order.
inline std::vector<std::string> builtin_scenario_ids() {
  return {"s2-dh-a1-b0",        "s2-dh-a1-b2",     "s2-euler-a1-b0",     "s2-euler-a1-b2",    "s2-euler-a0-b0",
          "s2-dh-a1-b2-scaled", "s2-dh-a1-b2-conformal", "t2-degenerate", "t2-empty",        "s2xs2-dh-a1-b0.5",
          "s2xs2-euler-a1-b0",  "broken-closedness", "broken-commutator"};
}

inline ScenarioSpec builtin_scenario(const std::string& id) {
  if (id == "s2-dh-a1-b0") return build_sphere_scenario(1, 0, SphereKind::DH);
  if (id == "s2-dh-a1-b2") return build_sphere_scenario(1, 2, SphereKind::DH);
  if (id == "s2-euler-a1-b0") return build_sphere_scenario(1, 0, SphereKind::Euler);
  if (id == "s2-euler-a1-b2") return build_sphere_scenario(1, 2, SphereKind::Euler);
  if (id == "s2-euler-a0-b0") return build_sphere_scenario(0, 0, SphereKind::Euler);
  if (id == "s2-dh-a1-b2-scaled") return build_sphere_scenario(1, 2, SphereKind::DH, {.scale = 2.0});
  if (id == "s2-dh-a1-b2-conformal") return build_sphere_scenario(1, 2, SphereKind::DH, {.conformal = 0.3});
  if (id == "t2-degenerate") return build_torus_scenario(TorusKind::Degenerate);
  if (id == "t2-empty") return build_torus_scenario(TorusKind::EmptyZeroSet);
  if (id == "s2xs2-dh-a1-b0.5") return build_s2xs2_scenario(1, 0.5, ProductKind::DH);
  if (id == "s2xs2-euler-a1-b0") return build_s2xs2_scenario(1, 0, ProductKind::Euler);
  if (id == "broken-closedness") {
    ScenarioSpec s = build_sphere_scenario(1, 0, SphereKind::DH, {.hamiltonian_override = 2.0});
    s.id = "broken-closedness";
    s.description = "negative control: DH-type form exp(-2 cos t + sin t dt^dp) with X = d/dp, not d_K-closed";
    return s;
  }
  if (id == "broken-commutator") {
    ScenarioSpec s = build_sphere_scenario(1, 0, SphereKind::DH, {.tilted_y = true});
    s.id = "broken-commutator";
    s.description = "negative control: X = d/dp, Y = rotation about the x axis, [X, Y] != 0";
    s.params["b"] = 1.0;
    s.gap = 0.0;
    return s;
  }
  throw Error("unknown scenario '" + id + "'");
}

}  // namespace equiloc

#pragma once

// Load-time validation of scenarios and the executable statements: the lemma
// suite, the Lemma 4 s-scan, Theorem 1, Corollary 1 and Theorem 2, each
// producing a Report.

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "equiloc/equivariant.hpp"
#include "equiloc/error.hpp"
#include "equiloc/forms.hpp"
#include "equiloc/geometry.hpp"
#include "equiloc/quadrature.hpp"
#include "equiloc/scenario.hpp"
#include "equiloc/skewlinalg.hpp"
#include "equiloc/zeroset.hpp"

namespace equiloc {

struct Tolerances {
  /// Relative tolerance of integral identities: |a - b| <= integral * (1 + |a|).
  double integral = 1e-6;
  /// Pointwise analytic identities (Killing, commutator, Lemmas 1-3, 5, closedness of explicit eta).
  double residual = 1e-10;
  /// Curvature-level identities (Bianchi, closedness of Tr f and of the Euler form).
  double curvature = 1e-9;
  /// Zero-set structure and chart transitions.
  double structural = 1e-9;
};

/// A named diagnostic with its acceptance threshold. Upper bounds unless
/// lower_bound is set (then value >= tolerance is required).
struct Residual {
  double value = 0.0;
  double tolerance = 0.0;
  bool lower_bound = false;

  bool ok() const {
    if (std::isnan(value)) return false;
    return lower_bound ? value >= tolerance : value <= tolerance;
  }
};

using ResidualMap = std::map<std::string, Residual>;

struct VerifyConfig {
  Tolerances tol;
  /// Overrides the scenario's resolution when non-empty.
  std::vector<int> resolution;
  std::vector<double> s_values{0.0, 0.5, 1.0, 2.0};
  std::vector<Polynomial> theorem2_polynomials{Polynomial::monomial(0), Polynomial::monomial(1), Polynomial::monomial(2)};
  std::size_t samples = 50;
  std::size_t component_samples = 100;
  int lemma1_forms = 10;
  std::uint64_t seed = 1;
};

inline std::vector<int> effective_resolution(const ScenarioSpec& s, const VerifyConfig& cfg) {
  if (!cfg.resolution.empty()) return cfg.resolution;
  if (!s.resolution.empty()) return s.resolution;
  return {kDefaultResolution};
}

// ---------------------------------------------------------------------------
// Load-time validation

struct ScenarioValidation {
  ResidualMap residuals;
  std::vector<ZeroComponent> components;
  /// Residual names whose failure does not reject the scenario (undeclared properties).
  std::vector<std::string> advisory;

  bool passes(const std::string& name) const {
    const auto it = residuals.find(name);
    return it != residuals.end() && it->second.ok();
  }
  bool zero_set_confirmed() const {
    for (const auto& [k, r] : residuals)
      if (k.starts_with("zero_set") && !r.ok()) return false;
    for (const auto& c : components)
      if (!c.confirmed) return false;
    return true;
  }
  /// First failing residual that is not advisory, if any.
  std::optional<std::string> first_failure() const {
    for (const auto& [k, r] : residuals) {
      if (r.ok()) continue;
      bool adv = false;
      for (const auto& a : advisory) adv = adv || a == k;
      if (!adv) return k;
    }
    return std::nullopt;
  }
};

namespace detail {

inline void put_max(ResidualMap& m, const std::string& name, double value, double tol) {
  auto [it, fresh] = m.try_emplace(name, Residual{value, tol});
  if (!fresh && !(it->second.value >= value)) it->second.value = value;
}

inline void put_min(ResidualMap& m, const std::string& name, double value, double tol) {
  auto [it, fresh] = m.try_emplace(name, Residual{value, tol, true});
  if (!fresh && !(it->second.value <= value)) it->second.value = value;
}

/// Closedness tolerance for eta: pointwise for explicit forms, curvature level otherwise.
inline double eta_tolerance(const ScenarioModel& m, const Tolerances& tol) {
  return m.eta_is_explicit() ? tol.residual : tol.curvature;
}

}  // namespace detail

/// Re-checks every declared property of a scenario on samples of every chart.
inline ScenarioValidation validate_scenario(const ScenarioModel& m, const Tolerances& tol = {},
                                            std::size_t samples = 50, std::size_t component_samples = 100) {
  ScenarioValidation v;
  const double eta_tol = detail::eta_tolerance(m, tol);
  for (std::size_t i = 0; i < m.charts.size(); ++i) {
    const ChartModel& c = m.charts[i];
    const auto pts = c.chart.samples(samples, 1000 + i);
    detail::put_min(v.residuals, "metric_positivity", min_cholesky_pivot(c.geo.g, pts), 0.0);
    if (!(v.residuals.at("metric_positivity").value > 0.0)) v.residuals.at("metric_positivity").tolerance = 1e-300;
    detail::put_max(v.residuals, "killing_X", killing_residual(c.pair.X, c.geo.g, pts), tol.residual);
    detail::put_max(v.residuals, "killing_Y", killing_residual(c.pair.Y, c.geo.g, pts), tol.residual);
    detail::put_max(v.residuals, "reality", reality_residual(c.pair, pts), tol.residual);
    detail::put_max(v.residuals, "commutator", commutator_residual(c.pair, pts), tol.residual);
    const MixedForm eta = m.eta(c.chart.id);
    detail::put_max(v.residuals, "eta_closedness", max_residual(d_equivariant(c.pair, eta), pts), eta_tol);
    detail::put_max(v.residuals, "eta_invariance", invariance_residual(c.pair, eta, pts), eta_tol);
    if (!c.to_main.empty()) {
      const auto t = transition_residuals(c, m.main(), eta, m.eta(m.spec.integration_chart), samples);
      detail::put_max(v.residuals, "transition_metric", t.metric, tol.structural);
      detail::put_max(v.residuals, "transition_fields", t.fields, tol.structural);
      detail::put_max(v.residuals, "transition_eta", t.eta, tol.structural);
    }
  }
  const ZeroSetTolerances zt{tol.residual, tol.structural, component_samples, component_samples};
  for (const auto& d : m.spec.components) {
    ZeroComponent z = validate_component(m.chart(d.chart), d, m.spec.gap, zt);
    const std::string pre = "zero_set[" + d.id + "].";
    for (const auto& [name, value] : z.residuals) {
      if (name == "gap_min") v.residuals[pre + name] = Residual{value, m.spec.gap, true};
      else if (name == "vanishing") v.residuals[pre + name] = Residual{value, tol.residual};
      else if (name == "normal_rank_odd") v.residuals[pre + name] = Residual{value, 0.0};
      else v.residuals[pre + name] = Residual{value, tol.structural};
    }
    v.components.push_back(std::move(z));
  }
  if (m.spec.components.empty()) {
    const ChartModel& main = m.main();
    const auto pts = main.chart.samples(component_samples, 77);
    v.residuals["zero_set.gap_min"] = Residual{empty_zero_set_gap(main, pts), m.spec.gap, true};
    if (m.spec.gap <= 0.0) throw SchemaError("scenario '" + m.spec.id + "': an empty zero set needs a positive gap");
  }
  if (!m.spec.declared.killing) v.advisory.insert(v.advisory.end(), {"killing_X", "killing_Y"});
  if (!m.spec.declared.commuting) v.advisory.push_back("commutator");
  if (!m.spec.declared.closed) v.advisory.insert(v.advisory.end(), {"eta_closedness", "eta_invariance"});
  return v;
}

struct LoadedScenario {
  ScenarioModel model;
  ScenarioValidation validation;
};

/// Builds and validates a scenario. Strict loading throws ValidationError
/// naming the first failed residual; lenient loading records it.
inline LoadedScenario load_scenario(const ScenarioSpec& spec, bool strict = true, const VerifyConfig& cfg = {}) {
  LoadedScenario out{build_model(spec), {}};
  out.validation = validate_scenario(out.model, cfg.tol, cfg.samples, cfg.component_samples);
  if (strict) {
    if (const auto bad = out.validation.first_failure()) {
      const Residual& r = out.validation.residuals.at(*bad);
      throw ValidationError(*bad, r.value, r.tolerance, "scenario '" + spec.id + "'");
    }
  }
  return out;
}

inline LoadedScenario load_scenario_file(const std::string& path, bool strict = true, const VerifyConfig& cfg = {}) {
  return load_scenario(read_scenario_file(path), strict, cfg);
}

// ---------------------------------------------------------------------------
// Reports

struct ComponentContribution {
  std::string id;
  std::string chart;
  std::string kind;
  int normal_rank = 0;
  bool confirmed = false;
  std::optional<complex> value;
};

struct Report {
  std::string scenario;
  std::string check;
  std::optional<complex> lhs;
  std::optional<complex> rhs;
  std::vector<ComponentContribution> components;
  ResidualMap residuals;
  std::vector<std::pair<double, complex>> s_scan;
  std::map<std::string, bool> preconditions;
  std::vector<std::string> notes;
  std::string verdict = "fail";
  std::map<std::string, double> timings;

  bool passed() const { return verdict == "pass"; }
  std::vector<std::string> failed_residuals() const {
    std::vector<std::string> out;
    for (const auto& [k, r] : residuals)
      if (!r.ok()) out.push_back(k);
    return out;
  }
};

namespace detail {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline double relative_gap(complex a, complex b) { return std::abs(a - b) / (1.0 + std::abs(a)); }

/// Pass iff every precondition and residual holds and both sides agree.
inline void finalize(Report& r, const Tolerances& tol) {
  if (r.lhs && r.rhs) r.residuals["lhs_rhs"] = Residual{relative_gap(*r.lhs, *r.rhs), tol.integral};
  bool ok = true;
  for (const auto& [k, v] : r.preconditions) ok = ok && v;
  for (const auto& [k, v] : r.residuals) ok = ok && v.ok();
  if (r.check != "lemmas" && !(r.lhs && r.rhs)) ok = false;
  r.verdict = ok ? "pass" : "fail";
}

/// Copies the validation residuals relevant to a check into the report.
inline void copy_residuals(Report& r, const ScenarioValidation& v, std::initializer_list<const char*> prefixes) {
  for (const auto& [k, res] : v.residuals)
    for (const char* p : prefixes)
      if (k.starts_with(p)) r.residuals[k] = res;
}

inline FormJet values_only(const FormJet& w) {
  FormJet out(w.dim());
  for (unsigned m = 0; m < w.size(); ++m)
    if (!(w[m].nvars() == 0 && w[m].value() == 0.0)) out[m] = Jet(0, 0, w[m].value());
  return out;
}

inline Rule1D free_axis_rule(const Chart& chart, int axis, const std::vector<int>& resolution) {
  return axis_rule(chart.lower[axis], chart.upper[axis], chart.periodic[axis], QuadratureGrid::pick(resolution, axis));
}

}  // namespace detail

/// Integrand of one component at a point: the coefficient of the component's
/// volume (free coordinates in order) in eta / Pf[(R~^N)/2pi].
inline complex component_integrand(const ChartModel& cm, const ZeroComponent& z, const FormMatrixField& Rt,
                                   const MixedForm& eta, const Point& p) {
  const int n = cm.chart.dim();
  const JetMatrix g = cm.geo.g.at(p);
  const NormalFrame f = normal_frame(cm.chart, z, g);
  const FormMatrix rn = normal_curvature(Rt.at(p), g, f, z);
  const FormJet pf = pfaffian_of_form_matrix(rn, 2.0 * std::numbers::pi, n);
  const FormJet w = wedge(detail::values_only(eta.at(p)), inverse_of_mixed_form(pf));
  unsigned mask = 0;
  for (int a : z.free_axes) mask |= 1u << a;
  return w[mask].value();
}

/// Right-hand-side contribution of one confirmed component.
inline complex component_contribution(const ChartModel& cm, const ZeroComponent& z, const MixedForm& eta,
                                      const std::vector<int>& resolution) {
  if (!z.confirmed) throw DomainError("component '" + z.decl.id + "' is not confirmed");
  if (eta.chart() != cm.chart.id) throw ChartMismatch(eta.chart(), cm.chart.id);
  const FormMatrixField Rt = equivariant_curvature(cm.pair, cm.geo);
  if (z.kind == ZeroKind::IsolatedPoint) return component_integrand(cm, z, Rt, eta, component_point(cm.chart, z, {}));
  std::vector<Rule1D> axes;
  for (int a : z.free_axes) axes.push_back(detail::free_axis_rule(cm.chart, a, resolution));
  const QuadratureGrid grid(std::move(axes));
  const complex sum = grid.integrate([&](const Point& q) {
    return component_integrand(cm, z, Rt, eta, cm.chart.clamp(component_point(cm.chart, z, q)));
  });
  return z.kind == ZeroKind::FullManifold ? sum * static_cast<double>(cm.chart.orientation) : sum;
}

/// integral over M of exp(-s d_K(K')) eta for each s, K' the metric dual of K.
inline std::vector<std::pair<double, complex>> lemma4_scan(const ChartModel& main, const MixedForm& eta,
                                                           const std::vector<double>& s_values,
                                                           const QuadratureGrid& grid) {
  const MixedForm dka = d_equivariant(main.pair, dual_form(main.pair, main.geo.g));
  std::vector<std::pair<double, complex>> out;
  for (double s : s_values) {
    const MixedForm w = wedge(exp(complex(-s) * dka), eta);
    out.emplace_back(s, integrate_top(main.chart, w, grid));
  }
  return out;
}

/// Largest pairwise deviation of the scan values, relative to max(1, |value|).
inline double scan_spread(const std::vector<std::pair<double, complex>>& scan) {
  double worst = 0.0;
  for (std::size_t i = 0; i < scan.size(); ++i)
    for (std::size_t j = i + 1; j < scan.size(); ++j) {
      const double scale = std::max({1.0, std::abs(scan[i].second), std::abs(scan[j].second)});
      worst = std::max(worst, std::abs(scan[i].second - scan[j].second) / scale);
    }
  return worst;
}

/// Random smooth mixed form: each component a sum of two trigonometric waves
/// with integer frequencies and complex amplitudes.
inline MixedForm random_trig_form(const Chart& chart, std::mt19937_64& rng) {
  const int n = chart.dim();
  std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> freq(-2, 2);
  struct Wave {
    complex a;
    std::vector<double> k;
    double phi;
  };
  std::vector<std::vector<Wave>> comps(1u << n);
  for (auto& c : comps)
    for (int w = 0; w < 2; ++w) {
      Wave wave{{amp(rng), amp(rng)}, {}, phase(rng)};
      for (int i = 0; i < n; ++i) wave.k.push_back(freq(rng));
      c.push_back(wave);
    }
  return {chart.id, n, 0, [comps, n](const Seed& s) {
            FormJet out(n);
            for (unsigned m = 0; m < comps.size(); ++m) {
              Jet acc;
              for (std::size_t w = 0; w < comps[m].size(); ++w) {
                const Wave& wave = comps[m][w];
                Jet arg = s.constant(wave.phi);
                for (int i = 0; i < n; ++i) arg += wave.k[static_cast<std::size_t>(i)] * s.coordinate(i);
                acc += wave.a * (w % 2 == 0 ? sin(arg) : cos(arg));
              }
              out[m] = acc;
            }
            return out;
          }};
}

namespace detail {

inline MetricField scaled_metric(const MetricField& g, double c) {
  return {g.chart(), g.dim(), g.depth(), [g, c](const Seed& s) { return g.eval(s) * complex(c); }};
}

inline std::map<std::string, bool> theorem_preconditions(const LoadedScenario& ls) {
  const auto& d = ls.model.spec.declared;
  const auto& v = ls.validation;
  return {{"killing", d.killing && v.passes("killing_X") && v.passes("killing_Y")},
          {"commuting", d.commuting && v.passes("commutator") && v.passes("reality")},
          {"zero_set", v.zero_set_confirmed()},
          {"charts_consistent", v.passes("metric_positivity") &&
                                    (!v.residuals.contains("transition_metric") ||
                                     (v.passes("transition_metric") && v.passes("transition_fields") &&
                                      v.passes("transition_eta")))}};
}

inline void add_expected(Report& r, const ScenarioSpec& s, const std::string& check, const Tolerances& tol) {
  if (!r.lhs) return;
  for (const auto& e : s.expected)
    if (e.check == check) r.residuals["expected_lhs"] = Residual{relative_gap(e.value, *r.lhs), tol.integral};
}

/// Both sides of the localization identity for eta given per chart.
inline void two_sided(Report& r, const LoadedScenario& ls, const std::function<MixedForm(const std::string&)>& eta,
                      const VerifyConfig& cfg) {
  const ScenarioModel& m = ls.model;
  const std::vector<int> res = effective_resolution(m.spec, cfg);
  Stopwatch sw;
  const ChartModel& main = m.main();
  r.lhs = integrate_top(main.chart, eta(main.chart.id), QuadratureGrid::for_chart(main.chart, res));
  r.timings["lhs"] = sw.lap();
  complex rhs = 0.0;
  bool complete = true;
  for (const auto& z : ls.validation.components) {
    ComponentContribution cc{z.decl.id, z.decl.chart, to_string(z.kind), z.normal_rank, z.confirmed, std::nullopt};
    if (z.confirmed) {
      try {
        cc.value = component_contribution(m.chart(z.decl.chart), z, eta(z.decl.chart), res);
        rhs += *cc.value;
      } catch (const DomainError& e) {
        r.notes.push_back("component '" + z.decl.id + "': " + e.what());
        complete = false;
      }
    } else {
      r.notes.push_back("component '" + z.decl.id + "' not confirmed: " + z.failure);
      complete = false;
    }
    r.components.push_back(std::move(cc));
  }
  if (complete) r.rhs = rhs;
  r.timings["rhs"] = sw.lap();
}

}  // namespace detail

/// Theorem 1: integral of eta over M against the sum over M0 components.
inline Report verify_theorem1(const LoadedScenario& ls, const VerifyConfig& cfg = {}) {
  detail::Stopwatch total;
  Report r;
  r.scenario = ls.model.spec.id;
  r.check = "theorem1";
  r.preconditions = detail::theorem_preconditions(ls);
  r.preconditions["eta_closed"] = ls.model.spec.declared.closed && ls.validation.passes("eta_closedness") &&
                                  ls.validation.passes("eta_invariance");
  detail::copy_residuals(r, ls.validation, {"killing", "commutator", "reality", "eta_", "zero_set", "transition"});
  detail::two_sided(r, ls, [&](const std::string& c) { return ls.model.eta(c); }, cfg);
  detail::add_expected(r, ls.model.spec, "theorem1", cfg.tol);
  detail::finalize(r, cfg.tol);
  r.timings["total"] = total.lap();
  return r;
}

inline bool y_vanishes(const ScenarioModel& m, std::size_t samples) {
  for (std::size_t i = 0; i < m.charts.size(); ++i) {
    const auto pts = m.charts[i].chart.samples(samples, 500 + i);
    if (max_residual(m.charts[i].pair.Y, pts) != 0.0) return false;
  }
  return true;
}

/// Corollary 1: Theorem 1 with Y = 0, plus M0 checked against |X|^2 = 0.
inline Report verify_corollary1(const LoadedScenario& ls, const VerifyConfig& cfg = {}) {
  detail::Stopwatch total;
  Report r = verify_theorem1(ls, cfg);
  r.check = "corollary1";
  r.preconditions["y_zero"] = y_vanishes(ls.model, cfg.samples);
  double xnorm = 0.0;
  for (const auto& z : ls.validation.components) {
    const ChartModel& cm = ls.model.chart(z.decl.chart);
    const ScalarField x2 = pairing_field(EquivariantPair(cm.pair.X, zero_vector_field(cm.chart.id, cm.chart.dim())), cm.geo.g);
    for (const auto& p : component_samples(cm.chart, z, cfg.component_samples, 19))
      xnorm = std::max(xnorm, std::abs(x2.at(p).value()));
  }
  r.residuals["x_norm_on_M0"] = Residual{xnorm, cfg.tol.residual};
  r.residuals.erase("expected_lhs");
  detail::add_expected(r, ls.model.spec, "theorem1", cfg.tol);
  detail::finalize(r, cfg.tol);
  r.timings["total"] = total.lap();
  return r;
}

/// Theorem 2: eta = Tr f(R~) built on every chart from its own geometry.
inline Report verify_theorem2(const LoadedScenario& ls, const Polynomial& f, const VerifyConfig& cfg = {}) {
  detail::Stopwatch total;
  const ScenarioModel& m = ls.model;
  Report r;
  r.scenario = m.spec.id;
  r.check = "theorem2[f=" + f.text() + "]";
  r.preconditions = detail::theorem_preconditions(ls);
  detail::copy_residuals(r, ls.validation, {"killing", "commutator", "reality", "zero_set", "transition_metric",
                                            "transition_fields"});
  auto eta = [&](const std::string& c) {
    const ChartModel& cm = m.chart(c);
    return characteristic_form(f, equivariant_curvature(cm.pair, cm.geo));
  };
  for (std::size_t i = 0; i < m.charts.size(); ++i) {
    const ChartModel& cm = m.charts[i];
    const auto pts = cm.chart.samples(cfg.samples, 1000 + i);
    const MixedForm w = eta(cm.chart.id);
    detail::put_max(r.residuals, "eta_closedness", max_residual(d_equivariant(cm.pair, w), pts), cfg.tol.curvature);
    detail::put_max(r.residuals, "eta_invariance", invariance_residual(cm.pair, w, pts), cfg.tol.curvature);
  }
  r.timings["closedness"] = total.lap();
  detail::two_sided(r, ls, eta, cfg);
  detail::finalize(r, cfg.tol);
  double sum = 0.0;
  for (const auto& [k, v] : r.timings) sum += v;
  r.timings["total"] = sum;
  return r;
}

/// Lemma 7 connection independence: integrals of Tr f(R~) for the scenario
/// metric, twice it, and the scenario's alternative metrics on the
/// integration chart. Returns the largest relative deviation and the Killing
/// residual of the alternatives.
struct ConnectionIndependence {
  double deviation = 0.0;
  double killing = 0.0;
  std::vector<std::pair<std::string, complex>> integrals;
};

inline ConnectionIndependence connection_independence(const ScenarioModel& m, const std::vector<Polynomial>& fs,
                                                      const std::vector<int>& resolution, std::size_t samples) {
  const ChartModel& main = m.main();
  std::vector<std::pair<std::string, MetricField>> metrics{{"g", main.geo.g},
                                                           {"2g", detail::scaled_metric(main.geo.g, 2.0)}};
  for (std::size_t i = 0; i < m.spec.lemma7_metrics.size(); ++i)
    metrics.emplace_back("alt" + std::to_string(i), metric_from_strings(main.chart, m.spec.lemma7_metrics[i], m.spec.params));
  const QuadratureGrid grid = QuadratureGrid::for_chart(main.chart, resolution);
  const auto pts = main.chart.samples(samples, 2024);
  ConnectionIndependence out;
  for (const auto& [name, g] : metrics) {
    out.killing = std::max({out.killing, killing_residual(main.pair.X, g, pts), killing_residual(main.pair.Y, g, pts)});
  }
  for (const auto& f : fs) {
    complex base = 0.0;
    for (std::size_t k = 0; k < metrics.size(); ++k) {
      const ChartGeometry geo(metrics[k].second);
      const complex v = integrate_top(main.chart, characteristic_form(f, equivariant_curvature(main.pair, geo)), grid);
      out.integrals.emplace_back(f.text() + "@" + metrics[k].first, v);
      if (k == 0) base = v;
      else out.deviation = std::max(out.deviation, detail::relative_gap(base, v));
    }
  }
  return out;
}

/// Lemmas 1-7 on a scenario: pointwise identities on every chart, the Lemma 4
/// scan on the integration chart and connection independence.
inline Report verify_lemmas(const LoadedScenario& ls, const VerifyConfig& cfg = {}) {
  detail::Stopwatch sw;
  const ScenarioModel& m = ls.model;
  const Tolerances& tol = cfg.tol;
  Report r;
  r.scenario = m.spec.id;
  r.check = "lemmas";
  r.preconditions["eta_closed"] = m.spec.declared.closed;
  detail::copy_residuals(r, ls.validation, {"killing", "commutator", "reality", "eta_", "transition", "metric"});
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = 0; i < m.charts.size(); ++i) {
    const ChartModel& c = m.charts[i];
    const auto pts = c.chart.samples(cfg.samples, 3000 + i);
    double l1 = 0.0;
    for (int k = 0; k < cfg.lemma1_forms; ++k) l1 = std::max(l1, lemma1_residual(c.pair, random_trig_form(c.chart, rng), pts));
    detail::put_max(r.residuals, "lemma1", l1, tol.residual);
    detail::put_max(r.residuals, "lemma2", lemma2_residual(c.pair, c.geo.g, pts), tol.residual);
    detail::put_max(r.residuals, "lemma3", lemma3_residual(c.pair, c.geo.g, pts), tol.residual);
    double moment = 0.0, skew = 0.0;
    for (const auto& V : {c.pair.X, c.pair.Y}) {
      const MatrixField a = moment_endomorphism(V, c.geo.gamma), b = moment_endomorphism_from_lie(V, c.geo.gamma);
      const MatrixField diff{c.chart.id, c.chart.dim(), std::max(a.depth(), b.depth()),
                             [a, b](const Seed& s) { return a.eval(s) - b.eval(s); }};
      moment = std::max(moment, max_residual(diff, pts));
      skew = std::max(skew, skew_adjointness_residual(a, c.geo.g, pts));
    }
    detail::put_max(r.residuals, "moment_identity", moment, tol.residual);
    detail::put_max(r.residuals, "moment_skew_adjoint", skew, tol.residual);
    const VectorField K = c.pair.K();
    const MixedForm Kflat = dual_form(c.pair, c.geo.g);
    double l5 = 0.0;
    for (const auto& w : {as_vector_valued(K), as_vector_valued(c.pair.X), as_vector_valued(c.pair.Y), tensor(Kflat, K),
                          tensor(Kflat, c.pair.X)})
      l5 = std::max(l5, invariance_residual(c.pair, equivariant_connection(w, c.pair, c.geo), pts));
    detail::put_max(r.residuals, "lemma5_invariance", l5, tol.residual);
    const FormMatrixField Rt = equivariant_curvature(c.pair, c.geo);
    detail::put_max(r.residuals, "lemma6_bianchi", bianchi_residual(Rt, c.pair, c.geo, pts), tol.curvature);
    for (int k = 2; k <= 4; ++k) {
      const MixedForm cf = characteristic_form(Polynomial::monomial(k), Rt);
      detail::put_max(r.residuals, "lemma7_closedness[x^" + std::to_string(k) + "]",
                      max_residual(d_equivariant(c.pair, cf), pts), tol.curvature);
    }
  }
  r.timings["pointwise"] = sw.lap();
  const std::vector<int> res = effective_resolution(m.spec, cfg);
  const ChartModel& main = m.main();
  r.s_scan = lemma4_scan(main, m.eta(main.chart.id), cfg.s_values, QuadratureGrid::for_chart(main.chart, res));
  r.residuals["lemma4_flatness"] = Residual{scan_spread(r.s_scan), tol.integral};
  r.timings["lemma4"] = sw.lap();
  const auto ci = connection_independence(m, {Polynomial::monomial(2), Polynomial::monomial(3)}, res, cfg.samples);
  r.residuals["lemma7_connection_independence"] = Residual{ci.deviation, tol.integral};
  r.residuals["lemma7_metric_killing"] = Residual{ci.killing, tol.residual};
  r.timings["lemma7"] = sw.lap();
  detail::finalize(r, tol);
  double sum = 0.0;
  for (const auto& [k, v] : r.timings) sum += v;
  r.timings["total"] = sum;
  return r;
}

}  // namespace equiloc

#pragma once

// Report serialization: structured JSON ("equiloc-report/1") and a
// human-readable text form.

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "equiloc/localization.hpp"

namespace equiloc {

inline constexpr const char* kReportSchema = "equiloc-report/1";

namespace detail {

inline json optional_complex(const std::optional<complex>& c) {
  return c ? complex_to_json(*c) : json(nullptr);
}

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

inline json config_to_json(const VerifyConfig& cfg, const std::vector<int>& resolution, int threads) {
  json s = json::array();
  for (double v : cfg.s_values) s.push_back(v);
  json polys = json::array();
  for (const auto& p : cfg.theorem2_polynomials) polys.push_back(p.text());
  return {{"resolution", resolution},
          {"tolerances",
           {{"integral", cfg.tol.integral},
            {"residual", cfg.tol.residual},
            {"curvature", cfg.tol.curvature},
            {"structural", cfg.tol.structural}}},
          {"s_values", s},
          {"theorem2_polynomials", polys},
          {"samples", cfg.samples},
          {"component_samples", cfg.component_samples},
          {"lemma1_forms", cfg.lemma1_forms},
          {"seed", cfg.seed},
          {"threads", threads}};
}

inline json report_to_json(const Report& r, const json& config, bool with_timings = true) {
  json j;
  j["scenario"] = r.scenario;
  j["check"] = r.check;
  j["lhs"] = detail::optional_complex(r.lhs);
  j["rhs"] = detail::optional_complex(r.rhs);
  json comps = json::array();
  for (const auto& c : r.components)
    comps.push_back({{"id", c.id},
                     {"chart", c.chart},
                     {"kind", c.kind},
                     {"normal_rank", c.normal_rank},
                     {"confirmed", c.confirmed},
                     {"contribution", detail::optional_complex(c.value)}});
  j["components"] = comps;
  json res = json::object();
  for (const auto& [k, v] : r.residuals)
    res[k] = {{"value", detail::number_or_null(v.value)},
              {"tolerance", v.tolerance},
              {"bound", v.lower_bound ? "min" : "max"},
              {"ok", v.ok()}};
  j["residuals"] = res;
  json scan = json::array();
  for (const auto& [s, v] : r.s_scan) scan.push_back({{"s", s}, {"value", detail::complex_to_json(v)}});
  j["s_scan"] = scan;
  json pre = json::object();
  for (const auto& [k, v] : r.preconditions) pre[k] = v;
  j["preconditions"] = pre;
  j["notes"] = r.notes;
  j["verdict"] = r.verdict;
  j["config"] = config;
  if (with_timings) {
    json t = json::object();
    for (const auto& [k, v] : r.timings) t[k] = v;
    j["timings"] = t;
  }
  return j;
}

inline std::string format_complex(complex c) {
  std::ostringstream s;
  s << std::setprecision(12) << c.real();
  if (c.imag() != 0.0) s << (c.imag() < 0 ? " - " : " + ") << std::abs(c.imag()) << "i";
  return s.str();
}

inline void write_text(std::ostream& out, const Report& r) {
  out << (r.passed() ? "[PASS] " : "[FAIL] ") << r.scenario << " " << r.check;
  if (r.timings.contains("total")) out << "  (" << std::fixed << std::setprecision(2) << r.timings.at("total") << " s)";
  out << std::defaultfloat << "\n";
  if (r.lhs) out << "  lhs = " << format_complex(*r.lhs) << "\n";
  if (r.rhs) out << "  rhs = " << format_complex(*r.rhs) << "\n";
  for (const auto& c : r.components) {
    out << "  component " << c.id << " [" << c.kind << ", chart " << c.chart << ", normal rank " << c.normal_rank << "]";
    if (c.value) out << " = " << format_complex(*c.value);
    else out << " (no contribution)";
    out << "\n";
  }
  for (const auto& [s, v] : r.s_scan) out << "  s = " << s << ": " << format_complex(v) << "\n";
  for (const auto& [k, v] : r.preconditions)
    if (!v) out << "  precondition failed: " << k << "\n";
  for (const auto& [k, v] : r.residuals) {
    out << "  " << (v.ok() ? "ok   " : "FAIL ") << k << " = " << std::setprecision(3) << std::scientific << v.value
        << (v.lower_bound ? " >= " : " <= ") << v.tolerance << std::defaultfloat << "\n";
  }
  for (const auto& n : r.notes) out << "  note: " << n << "\n";
}

}  // namespace equiloc

#pragma once

// Batch runner behind the equiloc command line: resolves scenarios, runs the
// requested checks and writes reports. Exit codes: 0 all checks pass, 2 a
// check or validation failed, 1 usage or internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "equiloc/localization.hpp"
#include "equiloc/parallel.hpp"
#include "equiloc/report.hpp"
#include "equiloc/scenario.hpp"

namespace equiloc {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFail = 2;

enum class OutputFormat { Text, Json };

struct RunConfig {
  /// Built-in scenario ids or paths to scenario files.
  std::vector<std::string> scenarios;
  /// Subset of lemmas, theorem1, corollary1, theorem2, all.
  std::vector<std::string> checks{"all"};
  VerifyConfig verify;
  std::string output;
  OutputFormat format = OutputFormat::Text;
  /// 0 keeps the default (EQUILOC_THREADS or the hardware count).
  int threads = 0;
  bool timings = true;
};

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> k{"lemmas", "theorem1", "corollary1", "theorem2", "all"};
  return k;
}

/// Throws Error for configurations that violate the documented bounds.
inline void check_config(const RunConfig& c) {
  if (c.scenarios.empty()) throw Error("no scenario given");
  if (c.checks.empty()) throw Error("no check given");
  for (const auto& k : c.checks)
    if (std::find(known_checks().begin(), known_checks().end(), k) == known_checks().end())
      throw Error("unknown check '" + k + "'");
  for (int r : c.verify.resolution)
    if (r < 8) throw Error("resolution entries must be >= 8");
  const Tolerances& t = c.verify.tol;
  if (!(t.integral > 0 && t.residual > 0 && t.curvature > 0 && t.structural > 0))
    throw Error("tolerances must be positive");
  for (double s : c.verify.s_values)
    if (!(s >= 0.0)) throw Error("s values must be non-negative");
  if (c.threads < 0) throw Error("thread count must be non-negative");
}

/// A built-in id, or a path to a scenario file.
inline ScenarioSpec resolve_scenario(const std::string& name) {
  for (const auto& id : builtin_scenario_ids())
    if (id == name) return builtin_scenario(id);
  if (std::filesystem::exists(name)) return read_scenario_file(name);
  throw Error("unknown scenario '" + name + "' (not a built-in id or an existing file)");
}

inline std::vector<Report> run_checks(const LoadedScenario& ls, const std::vector<std::string>& checks,
                                      const VerifyConfig& cfg) {
  const std::set<std::string> want(checks.begin(), checks.end());
  const bool all = want.contains("all");
  std::vector<Report> out;
  if (all || want.contains("lemmas")) out.push_back(verify_lemmas(ls, cfg));
  if (all || want.contains("theorem1")) out.push_back(verify_theorem1(ls, cfg));
  if (want.contains("corollary1") || (all && y_vanishes(ls.model, cfg.samples)))
    out.push_back(verify_corollary1(ls, cfg));
  if (all || want.contains("theorem2"))
    for (const auto& f : cfg.theorem2_polynomials) out.push_back(verify_theorem2(ls, f, cfg));
  return out;
}

struct RunResult {
  int exit_code = kExitPass;
  std::vector<Report> reports;
  std::string error;
};

/// Runs every requested check and writes the reports to config.output (or
/// `out` when empty). Never throws.
inline RunResult run(const RunConfig& config, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunResult result;
  try {
    check_config(config);
    if (config.threads > 0) set_thread_count(config.threads);
    std::ofstream file;
    if (!config.output.empty()) {
      file.open(config.output);
      if (!file) throw Error("cannot write output file '" + config.output + "'");
    }
    std::ostream& sink = config.output.empty() ? out : file;
    std::vector<ScenarioSpec> specs;
    for (const auto& name : config.scenarios) specs.push_back(resolve_scenario(name));
    json reports = json::array();
    for (const auto& spec : specs) {
      const LoadedScenario ls = load_scenario(spec, false, config.verify);
      const json cfg = config_to_json(config.verify, effective_resolution(spec, config.verify), thread_count());
      for (Report& r : run_checks(ls, config.checks, config.verify)) {
        if (config.format == OutputFormat::Text) write_text(sink, r);
        else reports.push_back(report_to_json(r, cfg, config.timings));
        if (!r.passed()) result.exit_code = kExitFail;
        result.reports.push_back(std::move(r));
      }
    }
    if (config.format == OutputFormat::Json) sink << json{{"schema", kReportSchema}, {"reports", reports}}.dump(2) << "\n";
    sink.flush();
    if (!sink) throw Error("failed writing reports");
  } catch (const std::exception& e) {
    result.exit_code = kExitError;
    result.error = e.what();
    err << "equiloc: error: " << e.what() << "\n";
  }
  return result;
}

}  // namespace equiloc

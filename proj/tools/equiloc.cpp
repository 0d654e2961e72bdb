#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "equiloc/cli.hpp"

namespace {

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::istringstream in(tok);
    T v{};
    if (!(in >> v) || !(in >> std::ws).eof()) throw CLI::ValidationError(what, "cannot parse '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError(what, "empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace equiloc;
  CLI::App app{"equiloc: numerical verification of two-Killing-field localization"};
  app.require_subcommand(1);

  RunConfig config;
  std::string checks = "all", resolution, s_values, format = "text";
  double tol_integral = config.verify.tol.integral, tol_residual = config.verify.tol.residual;
  bool no_timings = false;
  auto* run_cmd = app.add_subcommand("run", "run checks on scenarios");
  run_cmd->add_option("-s,--scenario", config.scenarios, "built-in scenario id or scenario file (repeatable)")->required();
  run_cmd->add_option("-c,--checks", checks, "comma list of lemmas, theorem1, corollary1, theorem2, all");
  run_cmd->add_option("-r,--resolution", resolution, "quadrature points per axis, one value or a comma list");
  run_cmd->add_option("--tol-integral", tol_integral, "relative tolerance of integral identities");
  run_cmd->add_option("--tol-residual", tol_residual, "tolerance of pointwise analytic identities");
  run_cmd->add_option("--s-values", s_values, "comma list of s values for the Lemma 4 scan");
  run_cmd->add_option("-o,--output", config.output, "write reports to this file instead of stdout");
  run_cmd->add_option("-f,--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  run_cmd->add_option("-j,--threads", config.threads, "worker threads (default: EQUILOC_THREADS or hardware)");
  run_cmd->add_flag("--no-timings", no_timings, "omit timings from JSON reports");

  auto* list = app.add_subcommand("list", "list built-in scenarios");

  std::string dump_id, dump_out;
  auto* dump = app.add_subcommand("dump", "print a built-in scenario as JSON");
  dump->add_option("id", dump_id, "built-in scenario id")->required();
  dump->add_option("-o,--output", dump_out, "write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

  try {
    if (*list) {
      for (const auto& id : builtin_scenario_ids()) std::cout << id << "  " << builtin_scenario(id).description << "\n";
      return kExitPass;
    }
    if (*dump) {
      const std::string text = to_json(builtin_scenario(dump_id)).dump(2) + "\n";
      if (dump_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(dump_out);
        if (!(f << text)) throw Error("cannot write '" + dump_out + "'");
      }
      return kExitPass;
    }
    config.checks = parse_list<std::string>(checks, "--checks");
    if (!resolution.empty()) config.verify.resolution = parse_list<int>(resolution, "--resolution");
    if (!s_values.empty()) config.verify.s_values = parse_list<double>(s_values, "--s-values");
    config.verify.tol.integral = tol_integral;
    config.verify.tol.residual = tol_residual;
    config.format = format == "json" ? OutputFormat::Json : OutputFormat::Text;
    config.timings = !no_timings;
  } catch (const std::exception& e) {
    std::cerr << "equiloc: error: " << e.what() << "\n";
    return kExitError;
  }
  return equiloc::run(config).exit_code;
}

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "oscillon/config.hpp"
#include "oscillon/experiments.hpp"

using namespace oscillon;

namespace {

int fail(int code, const std::string& status, const std::string& key, const std::string& message) {
  nlohmann::json doc = {{"status", status}, {"key", key}, {"message", message}, {"exit_code", code}};
  std::cout << doc.dump() << std::endl;
  std::cerr << "oscillon: " << message << std::endl;
  return code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral-Galerkin simulator and verification suite for the nonautonomous fractional oscillon "
               "equation"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  std::string config_path;
  std::string out_dir;
  bool show_grammar = false;
  app.add_option("-c,--config", config_path, "config file (sectioned key = value text)");
  app.add_option("-o,--out", out_dir, "output directory, overrides [output] dir");
  app.add_flag("--config-grammar", show_grammar, "print the config grammar and exit");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"verify-operator", "closed-form operator identities, quadrature oracle, alpha -> 1 limits"},
      {"check-assumptions", "sample every structural assumption on omega and mu"},
      {"simulate", "evolve one ensemble member and write its trajectory"},
      {"energy-report", "two-sided bounds of the energy functionals on random states"},
      {"decay-check", "a-priori decay estimate along an ensemble, at h and h/2"},
      {"absorbing", "pullback absorbing family for each radius plus a negative control"},
      {"pullback", "pullback semidistances, linear control and tail compactness"},
      {"spectrum-table", "eigenvalues of -Lambda(t)^alpha over alpha, t and modes"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfigError;
  }
  if (show_grammar) {
    std::cout << config_grammar();
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return kExitConfigError;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  ExperimentConfig cfg;
  try {
    cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    finalize_config(cfg);
  } catch (const ConfigError& e) {
    return fail(kExitConfigError, "config_error", e.key(), e.what());
  }

  try {
    const RunResult res = run_experiment(name, cfg);
    nlohmann::json line = {{"experiment", name},
                           {"exit_code", res.exit_code},
                           {"pass", res.report.value("pass", false)},
                           {"report", cfg.output.dir + "/" + name + ".json"}};
    if (res.report.contains("error")) line["error"] = res.report["error"];
    std::cout << line.dump() << std::endl;
    return res.exit_code;
  } catch (const ConfigError& e) {
    return fail(kExitConfigError, "config_error", e.key(), e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kExitConfigError, "config_error", "", e.what());
  } catch (const std::exception& e) {
    return fail(kExitCheckFail, "runtime_error", "", e.what());
  }
}

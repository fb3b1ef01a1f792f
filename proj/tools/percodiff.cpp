#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "percodiff/errors.hpp"
#include "percodiff/experiment.hpp"
#include "percodiff/plot.hpp"
#include "percodiff/scenario.hpp"

namespace pd = percodiff;

namespace {

int report(const pd::RunOutcome& o) {
  if (!o.summary.empty()) std::cout << o.summary << '\n';
  if (!o.error.empty()) std::cerr << "error: " << o.error << '\n';
  return o.exit_code;
}

// Severity order when several scenarios run: config error, numerical failure, disagreement.
int combine(int a, int b) {
  for (int code : {pd::kExitConfig, pd::kExitNumerical, pd::kExitDisagreement}) {
    if (a == code || b == code) return code;
  }
  return pd::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson obstacle archipelagos: avoidability criteria and walk-on-spheres escape estimates"};
  std::string config;
  std::string builtin;
  bool battery = false;
  bool list = false;
  std::string emit;
  std::string plot_csv;
  std::uint64_t seed = 0;
  std::int64_t paths = 0;
  int realizations = 0;
  std::string out;
  bool plot = false;
  int threads = 1;

  auto* config_opt = app.add_option("--config", config, "Scenario file")->envname("PERCODIFF_CONFIG");
  auto* builtin_opt = app.add_option("--builtin", builtin, "Run a built-in scenario by name");
  auto* battery_opt = app.add_flag("--battery", battery, "Run every built-in scenario");
  app.add_flag("--list", list, "List the built-in scenarios");
  app.add_option("--emit", emit, "Print the config of a built-in scenario");
  app.add_option("--plot-csv", plot_csv, "Render a criteria or escape CSV as SVG on stdout");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed")->envname("PERCODIFF_SEED");
  auto* paths_opt = app.add_option("--paths", paths, "Walk-on-spheres paths per estimate")
                        ->envname("PERCODIFF_PATHS")
                        ->check(CLI::PositiveNumber);
  auto* real_opt = app.add_option("--realizations", realizations, "Realizations per rung")
                       ->envname("PERCODIFF_REALIZATIONS")
                       ->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", out, "Output directory")->envname("PERCODIFF_OUT");
  app.add_flag("--plot", plot, "Also write SVG plots")->envname("PERCODIFF_PLOT");
  app.add_option("--threads", threads, "Worker threads (0 = all cores); never changes results")
      ->envname("PERCODIFF_THREADS");
  config_opt->excludes(builtin_opt)->excludes(battery_opt);
  builtin_opt->excludes(battery_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pd::kExitConfig;
  }

  if (list) {
    for (const auto& name : pd::builtin_scenario_names()) std::cout << name << '\n';
    return 0;
  }
  if (!emit.empty()) {
    try {
      std::cout << pd::emit_scenario(pd::builtin_scenario(emit));
      return 0;
    } catch (const pd::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return pd::kExitConfig;
    }
  }
  if (!plot_csv.empty()) {
    std::ifstream in(plot_csv, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read " << plot_csv << '\n';
      return pd::kExitConfig;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
      std::cout << pd::emit_plot(buffer.str());
      return 0;
    } catch (const pd::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return pd::kExitConfig;
    }
  }

  pd::RunOptions options;
  if (*seed_opt) options.seed = seed;
  if (*paths_opt) options.paths = paths;
  if (*real_opt) options.realizations = realizations;
  if (*out_opt) options.out = out;
  options.plot = plot;
  options.threads = threads;

  if (!config.empty()) return report(pd::run_config(config, options));
  try {
    if (!builtin.empty()) return report(pd::run_scenario(pd::builtin_scenario(builtin), options));
  } catch (const pd::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pd::kExitConfig;
  }
  if (battery) {
    int code = pd::kExitOk;
    for (const auto& name : pd::builtin_scenario_names()) {
      code = combine(code, report(pd::run_scenario(pd::builtin_scenario(name), options)));
    }
    return code;
  }
  std::cerr << app.help();
  return pd::kExitConfig;
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "percodiff/criteria.hpp"
#include "percodiff/scenario.hpp"
#include "percodiff/wos.hpp"

namespace percodiff {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitDisagreement = 4;

/// Command-line overrides; unset fields keep the scenario's values.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> paths;
  std::optional<int> realizations;
  std::optional<std::filesystem::path> out;
  bool plot = false;
  /// Wall-time only; results never depend on it.
  int threads = 1;
};

struct RunOutcome {
  int exit_code = kExitOk;
  Verdict analytic = Verdict::inconclusive;
  /// Empty for scenarios without a simulation.
  std::optional<Verdict> simulated;
  std::string summary;
  std::string error;
  std::vector<std::filesystem::path> files;
};

/// Verdict read off the escape ladder: converges when the last two rung means
/// agree within 3 pooled standard errors and the last mean is positive at 3
/// sigma; diverges when every successive drop is significant at 3 sigma or the
/// escape probability falls to 0; inconclusive otherwise.
Verdict simulated_verdict(std::span<const ProbeRung> rungs);

/// Runs one scenario: writes <out>/<name>_criteria.csv, <out>/<name>_escape.csv
/// (when simulated) and SVG plots with options.plot. Exit codes: 0 success,
/// 2 configuration error, 3 numerical failure, 4 analytic and simulated
/// verdicts disagree while both are decisive. Files of a failed run are removed.
RunOutcome run_scenario(const Scenario& scenario, const RunOptions& options);

/// Parses and runs a config file; parse errors give exit code 2.
RunOutcome run_config(const std::filesystem::path& config, const RunOptions& options);

}  // namespace percodiff

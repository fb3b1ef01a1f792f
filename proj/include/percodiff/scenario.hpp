#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace percodiff {

enum class ScenarioKind {
  /// Poisson archipelago in the ball: radial, Lundh, balayage and count criteria, escape probe.
  random,
  /// Obstacles on a regular lattice: deterministic criterion, escape probe per truncation.
  lattice,
  /// Profiles outside the ball: exterior criteria only.
  exterior,
};

const char* to_string(ScenarioKind k);

/// One experiment. Empty `taus` / `x0` mean the first three coordinate axes and the origin.
/// For exterior scenarios `ladder` holds the radii R.
struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::random;
  int dimension = 3;
  std::string phi;
  std::string nu;
  std::vector<double> ladder;
  std::vector<std::vector<double>> taus;
  std::vector<double> x0;
  std::uint64_t seed = 1;
  std::int64_t paths = 1000;
  int realizations = 4;
  double lattice_separation = 0.2;
  double lattice_covering = 0.9;
  std::string out = "out";

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Flat YAML mapping with the field names above. Unknown keys, wrong types and
/// invalid values raise ConfigError.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
/// Emits every field; parse_scenario(emit_scenario(s)) == s.
std::string emit_scenario(const Scenario& s);

/// Checks dimension, profile descriptors, ladder, budgets and points; throws ConfigError.
void validate_scenario(const Scenario& s);

std::vector<std::string> builtin_scenario_names();
/// Throws ConfigError for an unknown name.
Scenario builtin_scenario(std::string_view name);

}  // namespace percodiff

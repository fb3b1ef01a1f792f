#include "percodiff/scenario.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <yaml-cpp/yaml.h>

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "percodiff/criteria.hpp"
#include "percodiff/errors.hpp"
#include "percodiff/geometry.hpp"
#include "percodiff/profiles.hpp"

namespace percodiff {

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::random:
      return "random";
    case ScenarioKind::lattice:
      return "lattice";
    case ScenarioKind::exterior:
      return "exterior";
  }
  return "random";
}

namespace {

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(fmt::format("'{}' must be a scalar", key));
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("'{}' has the wrong type", key));
  }
}

std::vector<double> numbers(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw ConfigError(fmt::format("'{}' must be an array of numbers", key));
  std::vector<double> out;
  for (const auto& item : node) out.push_back(scalar<double>(item, key));
  return out;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string number_list(const std::vector<double>& v) {
  return fmt::format("[{}]", fmt::join(v, ", "));
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("malformed config: {}", e.what()));
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping of keys to values");
  Scenario s;
  std::set<std::string> seen;
  for (const auto& entry : root) {
    const auto key = scalar<std::string>(entry.first, "key");
    if (!seen.insert(key).second) throw ConfigError(fmt::format("duplicate key '{}'", key));
    const YAML::Node& v = entry.second;
    if (key == "name") {
      s.name = scalar<std::string>(v, key);
    } else if (key == "kind") {
      const auto kind = scalar<std::string>(v, key);
      if (kind == "random") {
        s.kind = ScenarioKind::random;
      } else if (kind == "lattice") {
        s.kind = ScenarioKind::lattice;
      } else if (kind == "exterior") {
        s.kind = ScenarioKind::exterior;
      } else {
        throw ConfigError(fmt::format("unknown kind '{}'", kind));
      }
    } else if (key == "dimension") {
      s.dimension = scalar<int>(v, key);
    } else if (key == "phi") {
      s.phi = scalar<std::string>(v, key);
    } else if (key == "nu") {
      s.nu = scalar<std::string>(v, key);
    } else if (key == "ladder") {
      s.ladder = numbers(v, key);
    } else if (key == "taus") {
      if (!v.IsSequence()) throw ConfigError("'taus' must be an array of arrays");
      s.taus.clear();
      for (const auto& item : v) s.taus.push_back(numbers(item, key));
    } else if (key == "x0") {
      s.x0 = numbers(v, key);
    } else if (key == "seed") {
      s.seed = scalar<std::uint64_t>(v, key);
    } else if (key == "paths") {
      s.paths = scalar<std::int64_t>(v, key);
    } else if (key == "realizations") {
      s.realizations = scalar<int>(v, key);
    } else if (key == "lattice_separation") {
      s.lattice_separation = scalar<double>(v, key);
    } else if (key == "lattice_covering") {
      s.lattice_covering = scalar<double>(v, key);
    } else if (key == "out") {
      s.out = scalar<std::string>(v, key);
    } else {
      throw ConfigError(fmt::format("unknown key '{}'", key));
    }
  }
  if (s.name.empty()) throw ConfigError("missing 'name'");
  if (s.phi.empty()) throw ConfigError("missing 'phi'");
  if (s.nu.empty()) throw ConfigError("missing 'nu'");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string emit_scenario(const Scenario& s) {
  std::string out;
  out += fmt::format("name: {}\n", quoted(s.name));
  out += fmt::format("kind: {}\n", to_string(s.kind));
  out += fmt::format("dimension: {}\n", s.dimension);
  out += fmt::format("phi: {}\n", quoted(s.phi));
  out += fmt::format("nu: {}\n", quoted(s.nu));
  out += fmt::format("ladder: {}\n", number_list(s.ladder));
  std::vector<std::string> taus;
  for (const auto& t : s.taus) taus.push_back(number_list(t));
  out += fmt::format("taus: [{}]\n", fmt::join(taus, ", "));
  out += fmt::format("x0: {}\n", number_list(s.x0));
  out += fmt::format("seed: {}\n", s.seed);
  out += fmt::format("paths: {}\n", s.paths);
  out += fmt::format("realizations: {}\n", s.realizations);
  out += fmt::format("lattice_separation: {}\n", s.lattice_separation);
  out += fmt::format("lattice_covering: {}\n", s.lattice_covering);
  out += fmt::format("out: {}\n", quoted(s.out));
  return out;
}

void validate_scenario(const Scenario& s) {
  try {
    check_dimension(s.dimension);
    const auto phi = RadiusProfile::parse(s.phi);
    const auto nu = IntensityProfile::parse(s.nu);
    (void)phi;
    (void)nu;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(fmt::format("scenario '{}': {}", s.name, e.what()));
  }
  for (char c : s.name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    if (!ok) throw ConfigError("scenario names may only use letters, digits, '-', '_' and '.'");
  }
  if (s.ladder.empty()) throw ConfigError("'ladder' is empty");
  for (std::size_t i = 0; i < s.ladder.size(); ++i) {
    const double v = s.ladder[i];
    if (s.kind == ScenarioKind::exterior) {
      if (!(v > 1.0) || (i > 0 && !(v > s.ladder[i - 1]))) {
        throw ConfigError("exterior ladder radii must exceed 1 and increase");
      }
    } else if (!(v > 0.0 && v < 0.5) || (i > 0 && !(v < s.ladder[i - 1]))) {
      throw ConfigError("ladder truncations must lie in (0, 0.5) and decrease");
    }
  }
  for (const auto& t : s.taus) {
    if (static_cast<int>(t.size()) != s.dimension) throw ConfigError("each tau needs 'dimension' coordinates");
    double n2 = 0.0;
    for (double c : t) n2 += c * c;
    if (!(n2 > 0.0)) throw ConfigError("tau must be a nonzero direction");
  }
  if (!s.x0.empty()) {
    if (static_cast<int>(s.x0.size()) != s.dimension) throw ConfigError("'x0' needs 'dimension' coordinates");
    double n2 = 0.0;
    for (double c : s.x0) n2 += c * c;
    if (!(std::sqrt(n2) < 1.0)) throw ConfigError("'x0' must lie inside the unit ball");
  }
  if (s.paths < 1) throw ConfigError("'paths' must be positive");
  if (s.realizations < 1) throw ConfigError("'realizations' must be positive");
  if (!(s.lattice_separation > 0.0)) throw ConfigError("'lattice_separation' must be positive");
  if (!(s.lattice_covering > 0.5 && s.lattice_covering < 1.0)) {
    throw ConfigError("'lattice_covering' must lie in (1/2, 1)");
  }
  if (s.out.empty()) throw ConfigError("'out' is empty");
}

std::vector<std::string> builtin_scenario_names() {
  return {"empty",         "percolation",   "lundh-counterexample", "saturation",
          "lattice-sparse", "lattice-dense", "exterior-sparse",      "exterior-dense"};
}

Scenario builtin_scenario(std::string_view name) {
  Scenario s;
  s.name = std::string(name);
  s.ladder = default_ladder();
  if (name == "empty") {
    s.phi = "power-law 0.1 1";
    s.nu = "constant 0";
  } else if (name == "percolation") {
    s.phi = "power-law 0.2 1";
    s.nu = "power-law 1 1.5";
  } else if (name == "lundh-counterexample") {
    s.phi = "power-law 0.1 1";
    s.nu = "power-law 1 2";
  } else if (name == "saturation") {
    s.phi = "power-law 0.1 1";
    s.nu = "power-law 1 3";
    s.ladder = {1e-1, 3e-2, 1e-2, 3e-3};
    s.realizations = 16;
    s.paths = 2000;
  } else if (name == "lattice-sparse") {
    s.kind = ScenarioKind::lattice;
    s.phi = "power-law 0.1 2";
    s.nu = "constant 0";
  } else if (name == "lattice-dense") {
    s.kind = ScenarioKind::lattice;
    s.phi = "power-law 0.1 1";
    s.nu = "constant 0";
  } else if (name == "exterior-sparse") {
    s.kind = ScenarioKind::exterior;
    s.phi = "radial-power 1 -3";
    s.nu = "constant 1";
    s.ladder = default_exterior_ladder();
  } else if (name == "exterior-dense") {
    s.kind = ScenarioKind::exterior;
    s.phi = "radial-power 1 -2";
    s.nu = "constant 1";
    s.ladder = default_exterior_ladder();
  } else {
    throw ConfigError(fmt::format("unknown built-in scenario '{}'", name));
  }
  return s;
}

}  // namespace percodiff

#include "percodiff/profiles.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "percodiff/errors.hpp"

namespace percodiff {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidProfile(std::string(what) + " must be finite");
}

double parse_number(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidProfile("cannot parse number '" + std::string(s) + "' in profile descriptor");
  }
  return v;
}

std::vector<std::string> split_words(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

struct Parsed {
  std::string family;
  std::vector<double> params;
  std::vector<double> radii;
  std::vector<double> values;
};

Parsed parse_descriptor(std::string_view descriptor) {
  const auto words = split_words(descriptor);
  if (words.empty()) throw InvalidProfile("empty profile descriptor");
  Parsed p;
  p.family = words[0];
  if (p.family == "table") {
    if (words.size() != 2) throw InvalidProfile("table descriptor takes one list of t:v pairs");
    std::string_view list = words[1];
    while (!list.empty()) {
      const auto comma = list.find(',');
      const auto item = list.substr(0, comma);
      const auto colon = item.find(':');
      if (colon == std::string_view::npos) throw InvalidProfile("table entries must look like t:v");
      p.radii.push_back(parse_number(item.substr(0, colon)));
      p.values.push_back(parse_number(item.substr(colon + 1)));
      if (comma == std::string_view::npos) break;
      list.remove_prefix(comma + 1);
    }
    return p;
  }
  for (std::size_t i = 1; i < words.size(); ++i) p.params.push_back(parse_number(words[i]));
  return p;
}

void expect_params(const Parsed& p, std::size_t n) {
  if (p.params.size() != n) {
    throw InvalidProfile(fmt::format("profile family '{}' takes {} parameter(s)", p.family, n));
  }
}

std::string describe_table(const RadialFunction& f) {
  std::string out = "table ";
  for (std::size_t i = 0; i < f.table_radii().size(); ++i) {
    if (i) out += ',';
    out += fmt::format("{}:{}", f.table_radii()[i], f.table_values()[i]);
  }
  return out;
}

}  // namespace

RadialFunction RadialFunction::power_law(double kappa, double exponent) {
  require_finite(kappa, "kappa");
  require_finite(exponent, "exponent");
  if (!(kappa > 0.0)) throw InvalidProfile("power-law kappa must be positive");
  RadialFunction f;
  f.family_ = ProfileFamily::power_law;
  f.kappa_ = kappa;
  f.exponent_ = exponent;
  return f;
}

RadialFunction RadialFunction::constant(double kappa) {
  require_finite(kappa, "kappa");
  if (kappa < 0.0) throw InvalidProfile("constant profile must be nonnegative");
  RadialFunction f;
  f.family_ = ProfileFamily::constant;
  f.kappa_ = kappa;
  return f;
}

RadialFunction RadialFunction::table(std::vector<double> radii, std::vector<double> values) {
  if (radii.empty() || radii.size() != values.size()) {
    throw InvalidProfile("table profile needs matching, nonempty radius and value lists");
  }
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require_finite(radii[i], "table radius");
    require_finite(values[i], "table value");
    if (radii[i] < 0.0 || radii[i] >= 1.0) throw InvalidProfile("table radii must lie in [0, 1)");
    if (!(values[i] > 0.0)) throw InvalidProfile("table values must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw InvalidProfile("table radii must be increasing");
  }
  RadialFunction f;
  f.family_ = ProfileFamily::table;
  f.radii_ = std::move(radii);
  f.values_ = std::move(values);
  for (std::size_t i = 0; i < f.radii_.size(); ++i) {
    f.log_u_.push_back(std::log(1.0 - f.radii_[i]));
    f.log_v_.push_back(std::log(f.values_[i]));
  }
  return f;
}

RadialFunction RadialFunction::radial_power(double kappa, double exponent) {
  require_finite(kappa, "kappa");
  require_finite(exponent, "exponent");
  if (!(kappa > 0.0)) throw InvalidProfile("radial-power kappa must be positive");
  RadialFunction f;
  f.family_ = ProfileFamily::radial_power;
  f.kappa_ = kappa;
  f.exponent_ = exponent;
  return f;
}

double RadialFunction::table_at(double u) const {
  const std::size_t n = log_u_.size();
  if (n == 1) return values_[0];
  if (u <= 0.0) {
    const double slope = (log_v_[n - 1] - log_v_[n - 2]) / (log_u_[n - 1] - log_u_[n - 2]);
    if (slope > 0.0) return 0.0;
    if (slope < 0.0) return std::numeric_limits<double>::infinity();
    return values_[n - 1];
  }
  const double lu = std::log(u);
  // log_u_ is decreasing in the node index.
  std::size_t seg = 0;
  if (lu <= log_u_[n - 1]) {
    seg = n - 2;
  } else if (lu >= log_u_[0]) {
    seg = 0;
  } else {
    while (seg + 2 < n && lu < log_u_[seg + 1]) ++seg;
  }
  const double w = (lu - log_u_[seg]) / (log_u_[seg + 1] - log_u_[seg]);
  return std::exp(log_v_[seg] + w * (log_v_[seg + 1] - log_v_[seg]));
}

double RadialFunction::at_boundary_distance(double u) const {
  switch (family_) {
    case ProfileFamily::power_law:
      if (u == 0.0) {
        if (exponent_ > 0.0) return 0.0;
        if (exponent_ < 0.0) return std::numeric_limits<double>::infinity();
        return kappa_;
      }
      return kappa_ * std::pow(u, exponent_);
    case ProfileFamily::constant:
      return kappa_;
    case ProfileFamily::table:
      return table_at(u);
    case ProfileFamily::radial_power:
      return kappa_ * std::pow(1.0 - u, exponent_);
  }
  return 0.0;
}

double RadialFunction::at_radius(double t) const {
  if (family_ == ProfileFamily::radial_power) return kappa_ * std::pow(t, exponent_);
  return at_boundary_distance(1.0 - t);
}

double RadialFunction::tail_exponent() const {
  switch (family_) {
    case ProfileFamily::power_law:
      return exponent_;
    case ProfileFamily::table: {
      const std::size_t n = log_u_.size();
      if (n == 1) return 0.0;
      return (log_v_[n - 1] - log_v_[n - 2]) / (log_u_[n - 1] - log_u_[n - 2]);
    }
    case ProfileFamily::constant:
    case ProfileFamily::radial_power:
      return 0.0;
  }
  return 0.0;
}

bool RadialFunction::is_zero() const { return family_ == ProfileFamily::constant && kappa_ == 0.0; }

RadiusProfile RadiusProfile::power_law(double kappa, double gamma) {
  if (!(gamma >= 1.0)) throw InvalidProfile("radius power-law exponent must be at least 1");
  return RadiusProfile(RadialFunction::power_law(kappa, gamma));
}

RadiusProfile RadiusProfile::constant(double kappa) { return RadiusProfile(RadialFunction::constant(kappa)); }

RadiusProfile RadiusProfile::table(std::vector<double> radii, std::vector<double> values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1]) throw InvalidProfile("radius table must be nonincreasing");
  }
  return RadiusProfile(RadialFunction::table(std::move(radii), std::move(values)));
}

RadiusProfile RadiusProfile::radial_power(double kappa, double exponent) {
  return RadiusProfile(RadialFunction::radial_power(kappa, exponent));
}

RadiusProfile RadiusProfile::parse(std::string_view descriptor) {
  const Parsed p = parse_descriptor(descriptor);
  if (p.family == "power-law") {
    expect_params(p, 2);
    return power_law(p.params[0], p.params[1]);
  }
  if (p.family == "constant") {
    expect_params(p, 1);
    return constant(p.params[0]);
  }
  if (p.family == "table") return table(p.radii, p.values);
  if (p.family == "radial-power") {
    expect_params(p, 2);
    return radial_power(p.params[0], p.params[1]);
  }
  throw InvalidProfile("unknown radius profile family '" + p.family + "'");
}

std::string RadiusProfile::describe() const {
  switch (f_.family()) {
    case ProfileFamily::power_law:
      return fmt::format("power-law {} {}", f_.kappa(), f_.exponent());
    case ProfileFamily::constant:
      return fmt::format("constant {}", f_.kappa());
    case ProfileFamily::table:
      return describe_table(f_);
    case ProfileFamily::radial_power:
      return fmt::format("radial-power {} {}", f_.kappa(), f_.exponent());
  }
  return {};
}

IntensityProfile IntensityProfile::power_law(double kappa, double beta) {
  return IntensityProfile(RadialFunction::power_law(kappa, -beta));
}

IntensityProfile IntensityProfile::constant(double kappa) {
  return IntensityProfile(RadialFunction::constant(kappa));
}

IntensityProfile IntensityProfile::table(std::vector<double> radii, std::vector<double> values) {
  return IntensityProfile(RadialFunction::table(std::move(radii), std::move(values)));
}

IntensityProfile IntensityProfile::radial_power(double kappa, double exponent) {
  return IntensityProfile(RadialFunction::radial_power(kappa, exponent));
}

IntensityProfile IntensityProfile::parse(std::string_view descriptor) {
  const Parsed p = parse_descriptor(descriptor);
  if (p.family == "power-law") {
    expect_params(p, 2);
    return power_law(p.params[0], p.params[1]);
  }
  if (p.family == "constant") {
    expect_params(p, 1);
    return constant(p.params[0]);
  }
  if (p.family == "table") return table(p.radii, p.values);
  if (p.family == "radial-power") {
    expect_params(p, 2);
    return radial_power(p.params[0], p.params[1]);
  }
  throw InvalidProfile("unknown intensity profile family '" + p.family + "'");
}

std::string IntensityProfile::describe() const {
  switch (f_.family()) {
    case ProfileFamily::power_law:
      return fmt::format("power-law {} {}", f_.kappa(), -f_.exponent());
    case ProfileFamily::constant:
      return fmt::format("constant {}", f_.kappa());
    case ProfileFamily::table:
      return describe_table(f_);
    case ProfileFamily::radial_power:
      return fmt::format("radial-power {} {}", f_.kappa(), f_.exponent());
  }
  return {};
}

}  // namespace percodiff

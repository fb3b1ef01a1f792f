#include "percodiff/experiment.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "percodiff/errors.hpp"
#include "percodiff/lattice.hpp"
#include "percodiff/plot.hpp"
#include "percodiff/point_process.hpp"
#include "percodiff/profiles.hpp"
#include "percodiff/rng.hpp"

namespace percodiff {

Verdict simulated_verdict(std::span<const ProbeRung> rungs) {
  if (rungs.size() < 2) return Verdict::inconclusive;
  auto pooled = [](const ProbeRung& a, const ProbeRung& b) {
    return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  };
  const ProbeRung& last = rungs.back();
  const ProbeRung& prev = rungs[rungs.size() - 2];
  bool all_drops = true;
  for (std::size_t i = 1; i < rungs.size(); ++i) {
    all_drops = all_drops && rungs[i - 1].mean - rungs[i].mean > 3.0 * pooled(rungs[i - 1], rungs[i]);
  }
  if (all_drops) return Verdict::diverges;
  if (last.mean == 0.0 && rungs.front().mean > 0.0) return Verdict::diverges;
  if (std::abs(last.mean - prev.mean) <= 3.0 * pooled(last, prev) && last.mean > 3.0 * last.std_error &&
      last.mean > 0.0) {
    return Verdict::converges;
  }
  return Verdict::inconclusive;
}

namespace {

Point to_point(const std::vector<double>& v) { return Point(std::span<const double>(v)); }

std::string describe(const CriterionReport& r) {
  return fmt::format("{}={} {}", r.criterion, r.limit ? *r.limit : r.last(), to_string(r.verdict));
}

void write_file(const std::filesystem::path& path, const std::string& content, RunOutcome& o) {
  std::ofstream out(path, std::ios::binary);
  o.files.push_back(path);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
}

RunOutcome fail(RunOutcome o, int code, const std::string& message) {
  for (const auto& f : o.files) {
    std::error_code ec;
    std::filesystem::remove(f, ec);
  }
  o.files.clear();
  o.exit_code = code;
  o.error = message;
  return o;
}

std::vector<ProbeRung> lattice_probe(const Scenario& s, const RadiusProfile& phi, const Point& x0, int threads) {
  const double eps_min = s.ladder.back();
  int depth = static_cast<int>(std::floor(std::log2(1.0 / eps_min)));
  if (std::ldexp(1.0, -depth) <= eps_min) --depth;
  const auto lattice = regular_lattice(s.dimension, s.lattice_separation, s.lattice_covering, std::max(depth, 0));
  std::vector<ProbeRung> rungs;
  const std::uint64_t path_seed = derive_seed(s.seed, Stream::probe_paths, {0});
  for (double eps : s.ladder) {
    std::vector<Ball> balls;
    for (const auto& p : lattice.points) {
      const double r = phi.at(p);
      if (p.norm() < 1.0 - eps && r > 0.0) balls.emplace_back(p, r);
    }
    rungs.push_back(probe_archipelago(balls, eps, x0, s.paths, path_seed, {}, threads));
  }
  return rungs;
}

}  // namespace

RunOutcome run_scenario(const Scenario& scenario, const RunOptions& options) {
  RunOutcome o;
  Scenario s = scenario;
  if (options.seed) s.seed = *options.seed;
  if (options.paths) s.paths = *options.paths;
  if (options.realizations) s.realizations = *options.realizations;
  if (options.out) s.out = options.out->string();

  std::vector<CriterionReport> reports;
  std::vector<ProbeRung> rungs;
  try {
    validate_scenario(s);
    const int d = s.dimension;
    const auto phi = RadiusProfile::parse(s.phi);
    const auto nu = IntensityProfile::parse(s.nu);
    std::vector<BoundaryPoint> taus;
    for (const auto& t : s.taus) taus.push_back(BoundaryPoint::from_direction(to_point(t)));
    if (taus.empty()) {
      for (int k = 0; k < std::min(d, 3); ++k) taus.push_back(BoundaryPoint(Point::axis(d, k)));
    }
    Point x0 = s.x0.empty() ? Point(d) : to_point(s.x0);

    if (s.kind == ScenarioKind::random) {
      const auto check = validate_profiles(phi, nu, d);
      if (!check.passed()) throw ConfigError("profile assumptions fail: " + check.summary());
    }
    try {
      switch (s.kind) {
        case ScenarioKind::random: {
          reports.push_back(radial_criterion(phi, nu, d, s.ladder));
          reports.push_back(lundh_criterion(nu, d, s.ladder));
          reports.push_back(expected_obstacle_count(nu, d, s.ladder));
          for (std::size_t k = 0; k < taus.size(); ++k) {
            auto b = balayage(phi, nu, taus[k], s.ladder, d);
            b.criterion = fmt::format("balayage-tau{}", k + 1);
            reports.push_back(std::move(b));
          }
          o.analytic = reports.front().verdict;
          rungs = avoidability_probe(phi, nu, d, s.ladder, x0, s.paths, s.realizations, s.seed, {}, options.threads);
          o.simulated = simulated_verdict(rungs);
          break;
        }
        case ScenarioKind::lattice: {
          if (s.x0.empty()) x0 = Point::axis(d, 0, 0.25);
          reports.push_back(deterministic_criterion(phi, d, s.ladder));
          o.analytic = reports.front().verdict;
          rungs = lattice_probe(s, phi, x0, options.threads);
          o.simulated = simulated_verdict(rungs);
          break;
        }
        case ScenarioKind::exterior: {
          reports.push_back(exterior_criterion(phi, nu, d, s.ladder));
          reports.push_back(exterior_deterministic_criterion(phi, d, s.ladder));
          o.analytic = reports.front().verdict;
          break;
        }
      }
    } catch (const InvalidProfile& e) {
      throw ConfigError(e.what());
    } catch (const GenerationFailure& e) {
      throw ConfigError(e.what());
    } catch (const InvalidStart& e) {
      throw ConfigError(e.what());
    }

    std::vector<std::string> details;
    for (const auto& r : reports) details.push_back(describe(r));
    o.summary = fmt::format("{}: {}(analytic) vs {}(simulated); {}", s.name, to_string(o.analytic),
                            o.simulated ? to_string(*o.simulated) : "n/a", fmt::join(details, ", "));

    const std::filesystem::path dir(s.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError(fmt::format("cannot create output directory '{}'", dir.string()));
    std::ostringstream criteria;
    write_criteria_csv(criteria, reports);
    write_file(dir / (s.name + "_criteria.csv"), criteria.str(), o);
    if (options.plot) write_file(dir / (s.name + "_criteria.svg"), emit_plot(criteria.str()), o);
    if (!rungs.empty()) {
      std::ostringstream escape;
      write_escape_csv(escape, rungs);
      write_file(dir / (s.name + "_escape.csv"), escape.str(), o);
      if (options.plot) write_file(dir / (s.name + "_escape.svg"), emit_plot(escape.str()), o);
    }
  } catch (const ConfigError& e) {
    return fail(std::move(o), kExitConfig, e.what());
  } catch (const InvalidParameter& e) {
    return fail(std::move(o), kExitConfig, e.what());
  } catch (const Error& e) {
    return fail(std::move(o), kExitNumerical, e.what());
  } catch (const std::bad_alloc&) {
    return fail(std::move(o), kExitNumerical, "out of memory; raise the truncation or lower the budgets");
  }

  const bool decisive = o.analytic != Verdict::inconclusive && o.simulated && *o.simulated != Verdict::inconclusive;
  if (decisive && *o.simulated != o.analytic) o.exit_code = kExitDisagreement;
  return o;
}

RunOutcome run_config(const std::filesystem::path& config, const RunOptions& options) {
  Scenario s;
  try {
    s = load_scenario(config);
  } catch (const ConfigError& e) {
    RunOutcome o;
    o.exit_code = kExitConfig;
    o.error = e.what();
    return o;
  }
  return run_scenario(s, options);
}

}  // namespace percodiff

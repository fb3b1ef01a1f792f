#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "percodiff/errors.hpp"
#include "percodiff/experiment.hpp"
#include "percodiff/plot.hpp"
#include "percodiff/scenario.hpp"

using namespace percodiff;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("percodiff_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Command {
  int status = -1;
  std::string output;
};

Command run_cli(const std::string& args) {
  Command c;
  const std::string cmd = std::string(PERCODIFF_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return c;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) c.output += buf;
  const int raw = pclose(pipe);
  c.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return c;
}

ProbeRung rung(double eps, double mean, double se) {
  ProbeRung r;
  r.epsilon = eps;
  r.mean = mean;
  r.std_error = se;
  return r;
}

std::vector<double> polyline_ys(const std::string& svg) {
  const std::regex poly("<polyline points=\"([^\"]*)\"");
  std::smatch m;
  std::vector<double> ys;
  if (!std::regex_search(svg, m, poly)) return ys;
  std::istringstream pts(m[1].str());
  std::string pair;
  while (pts >> pair) ys.push_back(std::stod(pair.substr(pair.find(',') + 1)));
  return ys;
}

}  // namespace

TEST(Scenario, EmitParseRoundTrip) {
  for (const auto& name : builtin_scenario_names()) {
    const auto s = builtin_scenario(name);
    EXPECT_EQ(parse_scenario(emit_scenario(s)), s) << name;
    EXPECT_NO_THROW(validate_scenario(s)) << name;
  }
  auto custom = builtin_scenario("percolation");
  custom.taus = {{1, 0, 0}, {0, 0.6, 0.8}};
  custom.x0 = {0.1, 0.2, 0.3};
  custom.name = "with \"quotes\"";
  EXPECT_EQ(parse_scenario(emit_scenario(custom)), custom);
}

TEST(Scenario, MalformedConfigsAreConfigErrors) {
  EXPECT_THROW(parse_scenario("name: a\nphi: constant 0\n"), ConfigError);
  EXPECT_THROW(parse_scenario("name: a\nphi: constant 0\nnu: constant 0\ncolour: red\n"), ConfigError);
  EXPECT_THROW(parse_scenario("name: a\nname: b\nphi: constant 0\nnu: constant 0\n"), ConfigError);
  EXPECT_THROW(parse_scenario("name: a\nphi: constant 0\nnu: constant 0\npaths: many\n"), ConfigError);
  EXPECT_THROW(parse_scenario("name: a\nphi: constant 0\nnu: constant 0\nladder: 0.1\n"), ConfigError);
  EXPECT_THROW(parse_scenario("[1, 2"), ConfigError);
  EXPECT_THROW(parse_scenario("- just\n- a list\n"), ConfigError);
  EXPECT_THROW(builtin_scenario("nonesuch"), ConfigError);
}

TEST(Scenario, ValidationCatchesBadValues) {
  auto s = builtin_scenario("percolation");
  s.ladder = {0.1, 0.2, 0.01, 0.001};
  EXPECT_THROW(validate_scenario(s), ConfigError);
  s = builtin_scenario("percolation");
  s.x0 = {0.9, 0.9, 0};
  EXPECT_THROW(validate_scenario(s), ConfigError);
  s = builtin_scenario("percolation");
  s.phi = "power-law 0.1 0.2";
  EXPECT_THROW(validate_scenario(s), ConfigError);
  s = builtin_scenario("exterior-sparse");
  s.ladder = {0.5, 10, 100, 1000};
  EXPECT_THROW(validate_scenario(s), ConfigError);
  s = builtin_scenario("lattice-sparse");
  s.lattice_covering = 3.0;
  EXPECT_THROW(validate_scenario(s), ConfigError);
}

TEST(SimulatedVerdict, ThreeWay) {
  const std::vector<ProbeRung> stable{rung(0.1, 0.6, 0.01), rung(0.01, 0.55, 0.01), rung(0.001, 0.54, 0.01)};
  EXPECT_EQ(simulated_verdict(stable), Verdict::converges);
  const std::vector<ProbeRung> falling{rung(0.1, 0.6, 0.01), rung(0.01, 0.4, 0.01), rung(0.001, 0.2, 0.01)};
  EXPECT_EQ(simulated_verdict(falling), Verdict::diverges);
  const std::vector<ProbeRung> extinct{rung(0.1, 0.6, 0.01), rung(0.01, 0.5, 0.05), rung(0.001, 0.0, 0.0)};
  EXPECT_EQ(simulated_verdict(extinct), Verdict::diverges);
  const std::vector<ProbeRung> noisy{rung(0.1, 0.6, 0.01), rung(0.01, 0.58, 0.01), rung(0.001, 0.5, 0.01)};
  EXPECT_EQ(simulated_verdict(noisy), Verdict::inconclusive);
}

TEST(Run, EmptyProcessConvergesAndEscapes) {
  const auto dir = fresh_dir("empty");
  RunOptions opt;
  opt.out = dir;
  opt.paths = 200;
  const auto o = run_scenario(builtin_scenario("empty"), opt);
  EXPECT_EQ(o.exit_code, kExitOk) << o.error;
  EXPECT_EQ(o.analytic, Verdict::converges);
  ASSERT_TRUE(o.simulated);
  const auto escape = slurp(dir / "empty_escape.csv");
  EXPECT_NE(escape.find("\n0.001,1,0,1,1,1,"), std::string::npos) << escape;
  EXPECT_TRUE(fs::exists(dir / "empty_criteria.csv"));
}

TEST(Run, LundhCounterexampleReportsBoth) {
  const auto dir = fresh_dir("lundh");
  RunOptions opt;
  opt.out = dir;
  opt.paths = 200;
  opt.realizations = 2;
  const auto o = run_scenario(builtin_scenario("lundh-counterexample"), opt);
  EXPECT_EQ(o.exit_code, kExitOk) << o.error;
  EXPECT_NE(o.summary.find("lundh=1 converges"), std::string::npos) << o.summary;
  EXPECT_NE(o.summary.find("expected-count="), std::string::npos);
  EXPECT_NE(o.summary.find("diverges"), std::string::npos);
}

TEST(Run, MalformedConfigLeavesNoOutputs) {
  const auto dir = fresh_dir("malformed");
  const auto config = dir / "bad.yaml";
  std::ofstream(config) << "name: bad\nphi: [oops\n";
  RunOptions opt;
  opt.out = dir / "out";
  const auto o = run_config(config, opt);
  EXPECT_EQ(o.exit_code, kExitConfig);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Run, ProfileAssumptionFailureIsConfigError) {
  const auto dir = fresh_dir("assumption");
  auto s = builtin_scenario("percolation");
  s.phi = "power-law 2 1";
  RunOptions opt;
  opt.out = dir;
  const auto o = run_scenario(s, opt);
  EXPECT_EQ(o.exit_code, kExitConfig);
  EXPECT_TRUE(fs::is_empty(dir));
}

TEST(Run, PlotsAreWritten) {
  const auto dir = fresh_dir("plots");
  RunOptions opt;
  opt.out = dir;
  opt.plot = true;
  const auto o = run_scenario(builtin_scenario("exterior-sparse"), opt);
  EXPECT_EQ(o.exit_code, kExitOk) << o.error;
  EXPECT_FALSE(o.simulated);
  const auto svg = slurp(dir / "exterior-sparse_criteria.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(svg, emit_plot(slurp(dir / "exterior-sparse_criteria.csv")));
}

TEST(Plot, EmptyDataGivesAxesOnly) {
  const auto svg = emit_plot("# schema=1\ncriterion,epsilon,value,verdict,model,params\n");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("<line"), std::string::npos);
  EXPECT_EQ(svg.find("<polyline"), std::string::npos);
}

TEST(Plot, MonotoneLadderGivesMonotonePolyline) {
  const std::string csv =
      "# schema=1\ncriterion,epsilon,value,verdict,model,params\n"
      "radial,0.1,0.09,converges,geometric,\nradial,0.01,0.099,converges,geometric,\n"
      "radial,0.001,0.0999,converges,geometric,\nradial,0.0001,0.5,converges,geometric,\n";
  const auto ys = polyline_ys(emit_plot(csv));
  ASSERT_EQ(ys.size(), 4u);
  // SVG y grows downwards, so increasing values mean nonincreasing coordinates.
  for (std::size_t i = 1; i < ys.size(); ++i) EXPECT_LE(ys[i], ys[i - 1]);
}

TEST(Plot, DeterministicAndSchemaChecked) {
  const std::string csv =
      "# schema=1\nepsilon,mean,stderr,min,max,fraction_positive,realizations,blocked,censored,paths\n"
      "0.1,0.5,0.01,0.4,0.6,1,4,0,0,4000\n0.01,0.45,0.01,0.4,0.5,1,4,0,0,4000\n";
  EXPECT_EQ(emit_plot(csv), emit_plot(std::string(csv)));
  EXPECT_THROW(emit_plot("a,b,c\n1,2,3\n"), ConfigError);
}

TEST(Cli, ListAndEmit) {
  const auto list = run_cli("--list");
  EXPECT_EQ(list.status, 0);
  for (const auto& name : builtin_scenario_names()) EXPECT_NE(list.output.find(name), std::string::npos);
  const auto emitted = run_cli("--emit saturation");
  EXPECT_EQ(emitted.status, 0);
  EXPECT_EQ(parse_scenario(emitted.output), builtin_scenario("saturation"));
}

TEST(Cli, ExitCodes) {
  const auto dir = fresh_dir("cli");
  std::ofstream(dir / "bad.yaml") << "name: x\nunknown: 1\n";
  EXPECT_EQ(run_cli("--config " + (dir / "bad.yaml").string() + " --out " + (dir / "o").string()).status, 2);
  EXPECT_FALSE(fs::exists(dir / "o"));
  EXPECT_EQ(run_cli("--builtin nonesuch").status, 2);
  const auto ok = run_cli("--builtin empty --paths 100 --out " + (dir / "ok").string());
  EXPECT_EQ(ok.status, 0) << ok.output;
  EXPECT_NE(ok.output.find("empty: converges(analytic) vs converges(simulated)"), std::string::npos) << ok.output;
  const auto plot = run_cli("--plot-csv " + (dir / "ok" / "empty_escape.csv").string());
  EXPECT_EQ(plot.status, 0);
  EXPECT_EQ(plot.output.rfind("<svg", 0), 0u);
}

TEST(Cli, EnvironmentOverrides) {
  const auto dir = fresh_dir("env");
  const auto r = run_cli("--builtin empty --out " + dir.string() + " --paths 50");
  ASSERT_EQ(r.status, 0) << r.output;
  const std::string with_env = "PERCODIFF_PATHS=50 " + std::string(PERCODIFF_CLI) + " --builtin empty --out " +
                               (dir / "env").string() + " > /dev/null 2>&1";
  ASSERT_EQ(std::system(with_env.c_str()), 0);
  EXPECT_EQ(slurp(dir / "empty_escape.csv"), slurp(dir / "env" / "empty_escape.csv"));
}

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <numbers>

#include "cfbell/workbench.hpp"

using namespace cfbell;
using std::numbers::pi;

namespace {

std::string location_of(const std::vector<std::string>& args, const std::string& config = "") {
  try {
    if (config.empty()) parse_runspec(args);
    else parse_runspec(config, args);
  } catch (const ParseError& e) {
    return e.location();
  }
  return "no error";
}

RunSpec quiet(std::vector<std::string> args) {
  args.push_back("--no-timestamp");
  return parse_runspec(args);
}

}  // namespace

TEST(ParseRunspec, ClassicalFlags) {
  const auto s = parse_runspec({"classical", "--n", "3", "--d", "4"});
  EXPECT_EQ(s.command, "classical");
  EXPECT_EQ(s.n, 3);
  EXPECT_EQ(s.d, 4);
  EXPECT_EQ(s.family, ExpressionFamily::multipartite);
  EXPECT_EQ(s.format, "json");
  EXPECT_TRUE(s.timestamp);
}

TEST(ParseRunspec, OutOfRange) {
  EXPECT_EQ(location_of({"classical", "--d", "1"}), "--d");
  EXPECT_EQ(location_of({"classical", "--n", "1"}), "--n");
  EXPECT_EQ(location_of({"classical"}, R"({"d": 1})"), "config:d");
  EXPECT_EQ(location_of({"classical", "--d", "three"}), "arguments");
}

TEST(ParseRunspec, FlagsOverrideConfig) {
  const auto s = parse_runspec(R"({"command": "optimize", "seed": 7, "starts": 5, "state": "ghz_max"})", {"--seed", "9"});
  EXPECT_EQ(s.optimizer.seed, 9u);
  EXPECT_EQ(s.optimizer.starts, 5u);
  EXPECT_EQ(s.command, "optimize");
  EXPECT_EQ(parse_runspec(R"({"command": "optimize"})", {"seesaw"}).command, "seesaw");
}

TEST(ParseRunspec, Rejections) {
  EXPECT_EQ(location_of({"classical"}, R"({"bogus": 1})"), "config:bogus");
  EXPECT_EQ(location_of({"classical"}, R"({"n": "three"})"), "config:n");
  EXPECT_EQ(location_of({"classical"}, "{not json"), "config");
  EXPECT_EQ(location_of({"classical", "--bogus", "1"}), "arguments");
  EXPECT_EQ(location_of({"frobnicate"}), "command");
  EXPECT_EQ(location_of({}), "command");
  EXPECT_EQ(location_of({"violate", "--state", "amplitudes:000=0.5,1x1=0.5"}), "--state");
  EXPECT_EQ(location_of({"violate", "--state", "amplitudes:000=abc"}), "--state");
  EXPECT_EQ(location_of({"violate", "--state", "amplitudes:000=0.1"}), "--state");
  EXPECT_EQ(location_of({"violate", "--state", "amplitudes:0000=1"}), "--state");
  EXPECT_EQ(location_of({"violate", "--state", "ghz_qutrit:1,1"}), "--state");
  EXPECT_EQ(location_of({"violate", "--phases", "0,0|0,0;0,0|0,0"}), "--phases");
  EXPECT_EQ(location_of({"violate", "--phases", "0,0|0,0;0,0|0,0;0,0|0,x"}), "--phases");
  EXPECT_EQ(location_of({"classical", "--family", "mabk"}), "--family");
  EXPECT_EQ(location_of({"classical", "--format", "xml"}), "--format");
  EXPECT_EQ(location_of({"classical", "--format", "csv"}), "--format");
  EXPECT_EQ(location_of({"optimize", "--measurements", "povm"}), "--measurements");
  EXPECT_EQ(location_of({"sweep", "--grid", "1;;x"}), "--grid");
}

TEST(ParseAngle, Forms) {
  EXPECT_DOUBLE_EQ(parse_angle("0.25"), 0.25);
  EXPECT_DOUBLE_EQ(parse_angle("pi"), pi);
  EXPECT_DOUBLE_EQ(parse_angle("-pi"), -pi);
  EXPECT_DOUBLE_EQ(parse_angle("-1/12pi"), -pi / 12);
  EXPECT_DOUBLE_EQ(parse_angle("5/12pi"), 5 * pi / 12);
  EXPECT_DOUBLE_EQ(parse_angle("0.5pi"), pi / 2);
  EXPECT_THROW(parse_angle("1/0pi"), DomainError);
  EXPECT_THROW(parse_angle("twopi"), DomainError);
  EXPECT_THROW(parse_angle(""), DomainError);
}

TEST(ParseState, Descriptors) {
  EXPECT_EQ(parse_state("ghz_qubit", 3, 2).free_family, StateFamily::ghz_qubit);
  const auto g = parse_state("ghz_qubit:1/4pi", 3, 2);
  ASSERT_TRUE(g.state.has_value());
  EXPECT_LE((g.state->amplitudes() - ghz_qubit(pi / 4).amplitudes()).norm(), 1e-15);
  const auto a = parse_state("amplitudes:000=0.7071067811865476,111=0:0.7071067811865476", 3, 2);
  EXPECT_NEAR(std::abs(a.state->amplitudes()(7) - Complex(0, 1 / std::sqrt(2.0))), 0, 1e-15);
  EXPECT_EQ(parse_state("ghz_max", 4, 3).state->scenario(), Scenario(4, 3));
  EXPECT_FALSE(parse_state("", 3, 2).state.has_value());
  EXPECT_THROW(parse_state("cluster", 3, 2), DomainError);
}

TEST(ParsePhases, PiFractionNotation) {
  const auto c = parse_phases("0,-1/12pi|0,1/4pi;0,-1/6pi|0,1/3pi;0,0|0,1/6pi", 3, 2);
  EXPECT_DOUBLE_EQ(c.phases(0, 1)[1], -pi / 12);
  EXPECT_DOUBLE_EQ(c.phases(1, 2)[1], pi / 3);
  EXPECT_DOUBLE_EQ(c.phases(2, 2)[1], pi / 6);
}

TEST(RunSpec, RoundTrip) {
  const std::vector<std::vector<std::string>> cases = {
      {"classical", "--n", "4", "--d", "3", "--threads", "2"},
      {"facet", "--n", "2", "--family", "bipartite-legacy"},
      {"violate", "--state", "amplitudes:000=0.169414,100=0.0461131,101=0.161369,110=0.193624,111=0.951652", "--phases", "0,-1/12pi|0,1/4pi;0,0|0,0;0,0|0,pi", "--format", "csv", "--out", "t.csv"},
      {"optimize", "--state", "w_state", "--seed", "123456789012", "--starts", "3", "--tol", "1e-7", "--measurements", "qubit", "--step", "0.125", "--max-iter", "77"},
      {"sweep", "--state", "ghz_qubit", "--grid", "1/16pi;1/8pi", "--no-timestamp"},
      {"threshold", "--violation", "2.8284271247461903"}};
  for (const auto& args : cases) {
    const auto spec = parse_runspec(args);
    const auto text = to_json(spec).dump();
    const auto back = runspec_from_json(Json::parse(text));
    EXPECT_EQ(back, spec) << text;
    EXPECT_EQ(to_json(back).dump(), text);
    EXPECT_EQ(parse_runspec(text, {}), spec);
  }
}

TEST(Run, FacetReport) {
  const auto out = run(quiet({"facet", "--n", "3", "--d", "2"}));
  EXPECT_EQ(out.exit_status, 0);
  const auto j = Json::parse(out.body);
  EXPECT_EQ(j["result"]["is_facet"], true);
  EXPECT_EQ(j["result"]["dimension"], 26);
  EXPECT_EQ(j["spec"]["command"], "facet");
  EXPECT_TRUE(j["diagnostics"].contains("iterations"));
  EXPECT_FALSE(j["diagnostics"].contains("runtime_ms"));
  EXPECT_FALSE(j.contains("timestamp"));
}

TEST(Run, TimestampedReportHasRuntime) {
  const auto j = Json::parse(run(parse_runspec({"threshold", "--violation", "3"})).body);
  EXPECT_TRUE(j.contains("timestamp"));
  EXPECT_TRUE(j["diagnostics"].contains("runtime_ms"));
}

TEST(Run, Threshold) {
  const auto j = Json::parse(run(quiet({"threshold", "--violation", "2.8284271"})).body);
  EXPECT_NEAR(j["result"]["f_thr"].get<double>(), 0.2928932, 1e-7);
}

TEST(Run, ViolateAtPublishedPhases) {
  const auto spec = quiet({"violate", "--state", "ghz_qubit:1/4pi", "--phases", "0,-1/12pi|0,1/4pi;0,-1/6pi|0,1/3pi;0,0|0,1/6pi"});
  const auto j = Json::parse(run(spec).body);
  EXPECT_NEAR(j["result"]["bell_value"].get<double>(), 2 * std::sqrt(2.0), 1e-9);
  auto csv_spec = spec;
  csv_spec.format = "csv";
  const auto csv = run(csv_spec).body;
  EXPECT_EQ(csv.rfind("settings,outcomes,probability\n", 0), 0u);
}

TEST(Run, ExitStatuses) {
  EXPECT_EQ(run(quiet({"facet", "--n", "9", "--d", "9"})).exit_status, 2);
  EXPECT_EQ(run(quiet({"threshold", "--violation", "-1"})).exit_status, 1);
  EXPECT_EQ(run(quiet({"threshold"})).exit_status, 1);
  EXPECT_EQ(run(quiet({"reduce", "--n", "4"})).exit_status, 1);
  EXPECT_EQ(run(quiet({"violate", "--state", "ghz_max"})).exit_status, 1);
  EXPECT_EQ(run(quiet({"mermin", "--d", "3", "--state", "ghz_max"})).exit_status, 1);
  const auto j = Json::parse(run(quiet({"facet", "--n", "9", "--d", "9"})).body);
  EXPECT_EQ(j["error"]["kind"], "resource");
}

TEST(Run, ByteIdenticalAcrossRepeatsAndThreads) {
  const std::vector<std::vector<std::string>> cases = {
      {"classical", "--d", "4"},
      {"facet", "--d", "3"},
      {"optimize", "--state", "ghz_qubit:0.6", "--starts", "6"},
      {"sweep", "--state", "ghz_qubit", "--grid", "0.3;0.7", "--starts", "4", "--format", "csv"},
      {"seesaw", "--starts", "3"},
      {"mermin", "--state", "ghz_qubit:0.5", "--starts", "4"}};
  for (auto args : cases) {
    const auto first = run(quiet(args)).body;
    EXPECT_EQ(run(quiet(args)).body, first);
    args.insert(args.end(), {"--threads", "3"});
    EXPECT_EQ(run(quiet(args)).body, first) << args[0];
  }
}

#ifdef CFBELL_CLI_PATH
namespace {

std::pair<int, std::string> shell(const std::string& command) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return {-1, out};
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST(Cli, ReportsAreByteIdentical) {
  const std::string cli = CFBELL_CLI_PATH;
  const std::string args = " optimize --d 3 --state ghz_qutrit:0.9,0.6 --starts 4 --seed 3 --no-timestamp";
  const auto a = shell(cli + args + " --threads 1");
  const auto b = shell(cli + args + " --threads 1");
  const auto c = shell(cli + args + " --threads 4");
  EXPECT_EQ(a.first, 0);
  EXPECT_FALSE(a.second.empty());
  EXPECT_EQ(a.second, b.second);
  EXPECT_EQ(a.second, c.second);
}

TEST(Cli, ExitCodes) {
  const std::string cli = CFBELL_CLI_PATH;
  EXPECT_EQ(shell(cli + " classical --d 1 2>/dev/null").first, 1);
  EXPECT_EQ(shell(cli + " facet --n 9 --d 9 --no-timestamp 2>/dev/null").first, 2);
  EXPECT_EQ(shell(cli + " threshold --violation 4 --no-timestamp").first, 0);
}
#endif

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "app.hpp"
#include "config.hpp"
#include "oracles.hpp"

using namespace sensched;
using sensched::testing::fixture_path;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string tmp_file(const std::string& name, const std::string& content) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << content;
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kTwinScalars = R"({
  "systems": [
    {"id": 1, "A": {"rows": 1, "cols": 1, "data": [2]}, "C": {"rows": 1, "cols": 1, "data": [1]},
     "Q": {"rows": 1, "cols": 1, "data": [1]}, "R": {"rows": 1, "cols": 1, "data": [1]}},
    {"id": 2, "A": {"rows": 1, "cols": 1, "data": [2]}, "C": {"rows": 1, "cols": 1, "data": [1]},
     "Q": {"rows": 1, "cols": 1, "data": [1]}, "R": {"rows": 1, "cols": 1, "data": [1]}}
  ]
})";

}  // namespace

TEST(Config, LoadsFixture) {
  const auto cfg = cli::load_config(fixture_path("trio_a"));
  EXPECT_EQ(cfg.systems.size(), 3u);
  EXPECT_EQ(cfg.options.rh_window, 2);
  EXPECT_EQ(cfg.options.bounds.mode, BoundMode::kLiteral);
}

TEST(Config, ZeroRNamesSystem) {
  std::string text = kTwinScalars;
  text.replace(text.rfind("\"data\": [1]}}"), 13, "\"data\": [0]}}");
  try {
    cli::parse_config(text, "t.json");
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("system 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("R must be positive definite"), std::string::npos) << msg;
  }
}

TEST(Config, NonSquareA) {
  std::string text = kTwinScalars;
  const std::string a = "\"A\": {\"rows\": 1, \"cols\": 1, \"data\": [2]}";
  text.replace(text.find(a), a.size(),
               "\"A\": {\"rows\": 1, \"cols\": 2, \"data\": [2, 1]}");
  EXPECT_THROW(cli::parse_config(text), DimensionError);
}

TEST(Config, SyntaxErrorHasLine) {
  try {
    cli::parse_config("{\n  \"systems\": [\n  oops\n]}", "bad.json");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json:3:"), std::string::npos) << e.what();
  }
}

TEST(Config, DuplicateIdsAndUnknownOptions) {
  std::string dup = kTwinScalars;
  dup.replace(dup.find("\"id\": 2"), 7, "\"id\": 1");
  EXPECT_THROW(cli::parse_config(dup), ValidationError);
  std::string opt = kTwinScalars;
  opt.insert(opt.rfind('}'), ", \"options\": {\"windw\": 3}");
  EXPECT_THROW(cli::parse_config(opt), ValidationError);
}

TEST(Cli, EvaluateTwinScalars) {
  const auto path = tmp_file("twin.json", kTwinScalars);
  const auto r = run({"evaluate", path, "--schedule", "1,2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("5.04508497"), std::string::npos) << r.out;
}

TEST(Cli, SolveMdpReportsScheduleAndStates) {
  const auto csv = ::testing::TempDir() + "mdp.csv";
  const auto r = run({"solve", fixture_path("trio_a"), "--method", "mdp", "--csv", csv});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("747"), std::string::npos);
  const auto text = read_file(csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "method,cost,period,schedule,state_count,wall_time_s");
  EXPECT_NE(text.find("mdp,"), std::string::npos);
  EXPECT_NE(text.find(",8,\""), std::string::npos);
}

TEST(Cli, CsvRoundTripThroughEvaluate) {
  for (const char* method : {"mdp", "mef", "rh"}) {
    const auto csv = ::testing::TempDir() + "rt.csv";
    ASSERT_EQ(run({"solve", fixture_path("trio_b"), "--method", method, "--csv", csv}).code, 0);
    const auto text = read_file(csv);
    const auto row = text.substr(text.find('\n') + 1);
    const auto q1 = row.find('"'), q2 = row.find('"', q1 + 1);
    const auto sched = row.substr(q1 + 1, q2 - q1 - 1);
    const double reported = std::stod(row.substr(row.find(',') + 1));
    const auto csv2 = ::testing::TempDir() + "rt2.csv";
    ASSERT_EQ(run({"evaluate", fixture_path("trio_b"), "--schedule", sched, "--csv", csv2}).code, 0);
    const auto row2 = read_file(csv2).substr(read_file(csv2).find('\n') + 1);
    EXPECT_NEAR(std::stod(row2.substr(row2.find(',') + 1)), reported, 1e-9) << method;
  }
}

TEST(Cli, CsvIsDeterministicApartFromWallTime) {
  auto strip = [](std::string s) { return s.substr(0, s.rfind(',')); };
  const auto a = ::testing::TempDir() + "d1.csv", b = ::testing::TempDir() + "d2.csv";
  ASSERT_EQ(run({"solve", fixture_path("trio_a"), "--method", "rh", "--window", "3", "--csv", a}).code, 0);
  ASSERT_EQ(run({"solve", fixture_path("trio_a"), "--method", "rh", "--window", "3", "--csv", b}).code, 0);
  EXPECT_EQ(strip(read_file(a)), strip(read_file(b)));
}

TEST(Cli, BoundModeFlag) {
  const auto r = run({"bounds", fixture_path("trio_b"), "--bound-mode", "linear"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("per sensor: 21 44 7"), std::string::npos) << r.out;
}

TEST(Cli, OtherCommands) {
  EXPECT_EQ(run({"steady", fixture_path("trio_a")}).code, 0);
  EXPECT_EQ(run({"lower-bound", fixture_path("trio_a")}).code, 0);
  const auto c = run({"construct", fixture_path("construction")});
  EXPECT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.out.find("schedule: 1,2,3"), std::string::npos) << c.out;
  EXPECT_EQ(run({"solve", fixture_path("trio_a"), "--method", "brute", "--max-period", "8"}).code, 0);
}

TEST(Cli, ExitCodes) {
  const auto bad = tmp_file("bad.json", "{\"systems\": [}");
  EXPECT_EQ(run({"solve", bad}).code, 2);
  EXPECT_EQ(run({"solve", fixture_path("trio_a"), "--method", "bogus"}).code, 2);
  EXPECT_EQ(run({"evaluate", fixture_path("trio_a"), "--schedule", "1,2"}).code, 3);
  EXPECT_EQ(run({"solve", fixture_path("trio_a"), "--method", "brute", "--max-period", "20"}).code, 4);
  const auto stable = tmp_file("stable.json", R"({"systems": [
    {"id": 1, "A": {"rows": 1, "cols": 1, "data": [0.5]}, "C": {"rows": 1, "cols": 1, "data": [1]},
     "Q": {"rows": 1, "cols": 1, "data": [1]}, "R": {"rows": 1, "cols": 1, "data": [1]}},
    {"id": 2, "A": {"rows": 1, "cols": 1, "data": [2]}, "C": {"rows": 1, "cols": 1, "data": [1]},
     "Q": {"rows": 1, "cols": 1, "data": [1]}, "R": {"rows": 1, "cols": 1, "data": [1]}}]})");
  EXPECT_EQ(run({"bounds", stable}).code, 3);
}

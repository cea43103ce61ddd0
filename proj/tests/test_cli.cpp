#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "oracle_values.hpp"

using namespace wildfire;

namespace {

struct Outcome {
  int rc = -1;
  std::string out;
  std::string err;
};

Outcome cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "wildfire");
  std::ostringstream out, err;
  Outcome o;
  o.rc = cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string scenario(const char* name) {
  return (std::filesystem::path(WILDFIRE_SOURCE_DIR) / "scenarios" / name).string();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, double> csv_values(const std::string& text) {
  std::map<std::string, double> out;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    out[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
  }
  return out;
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

TEST(Cli, IndicatrixFourDirections) {
  const auto o = cli_run({"indicatrix", "--R0", "1", "--phi_s", "0.45", "--n", "4"});
  ASSERT_EQ(o.rc, cli::kExitOk) << o.err;
  std::istringstream in(o.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "theta,x,y");
  const double radii[] = {1.45, 1.0, 0.55, 1.0};
  for (int i = 0; i < 4; ++i) {
    ASSERT_TRUE(std::getline(in, line));
    double th, x, y;
    char c1, c2;
    std::istringstream row(line);
    row >> th >> c1 >> x >> c2 >> y;
    EXPECT_NEAR(th, i * std::numbers::pi / 2, 1e-9);
    EXPECT_NEAR(std::hypot(x, y), radii[i], 1e-9);
  }
  EXPECT_FALSE(std::getline(in, line));
}

TEST(Cli, IndicatrixValidityAndUsage) {
  const auto bad = cli_run({"indicatrix", "--R0", "1", "--phi_s", "0.6"});
  EXPECT_EQ(bad.rc, cli::kExitInvalid);
  EXPECT_NE(bad.err.find("phi_s < 0.5 violated"), std::string::npos) << bad.err;
  EXPECT_EQ(cli_run({"indicatrix", "--R0", "1", "--n", "3"}).rc, cli::kExitInvalid);
  EXPECT_EQ(cli_run({"indicatrix", "--a", "1"}).rc, cli::kExitInvalid);
  EXPECT_EQ(cli_run({"indicatrix", "--R0", "1", "--T", "0"}).rc, cli::kExitInvalid);
  EXPECT_EQ(cli_run({"nonsense"}).rc, cli::kExitInvalid);
  EXPECT_EQ(cli_run({}).rc, cli::kExitInvalid);
  EXPECT_EQ(cli_run({"--help"}).rc, cli::kExitOk);
}

TEST(Cli, IndicatrixFrameNamesBound) {
  const auto o = cli_run({"indicatrix", "--a", "1", "--b", "1.5", "--c", "0.9"});
  EXPECT_EQ(o.rc, cli::kExitInvalid);
  EXPECT_NE(o.err.find("2c < b violated"), std::string::npos) << o.err;
}

TEST(Cli, SpreadParamsMatchesOracle) {
  const auto& f = oracle::fuel();
  const auto& e = oracle::env();
  const auto o = cli_run({"spread-params", "--sigma", std::to_string(f.sigma), "--w_o", "0.034",
                          "--delta", std::to_string(f.delta), "--M_x", std::to_string(f.M_x), "--M_f",
                          std::to_string(f.M_f), "--U", "88", "--tan_phi", "0.3", "--format", "csv"});
  ASSERT_EQ(o.rc, cli::kExitOk) << o.err;
  ASSERT_EQ(f.w_o, 0.034);
  ASSERT_EQ(e.U, 88.0);
  EXPECT_EQ(o.out.rfind("quantity,value\n", 0), 0u);
  const auto v = csv_values(o.out);
  for (const char* key : {"beta", "beta_op", "gamma", "I_R", "xi", "C", "B", "E", "epsilon", "Q_ig", "R0",
                          "R_H", "R_B", "a", "b", "c"})
    EXPECT_TRUE(v.count(key)) << key;
  EXPECT_TRUE(oracle::six_digits(v.at("beta"), oracle::beta));
  EXPECT_TRUE(oracle::six_digits(v.at("I_R"), oracle::I_R));
  EXPECT_TRUE(oracle::six_digits(v.at("R0"), oracle::R0));
}

TEST(Cli, SpreadParamsWindlessAndFlat) {
  const auto o = cli_run({"spread-params", "--sigma", "3500", "--w_o", "0.034", "--delta", "1", "--M_x",
                          "0.12", "--M_f", "0.05", "--format", "csv"});
  ASSERT_EQ(o.rc, cli::kExitOk) << o.err;
  const auto v = csv_values(o.out);
  EXPECT_EQ(v.at("R_B"), v.at("R_H"));
  EXPECT_EQ(v.at("phi_s"), 0.0);
  const auto text = cli_run({"spread-params", "--sigma", "3500", "--w_o", "0.034", "--delta", "1",
                             "--M_x", "0.12", "--M_f", "0.05"});
  EXPECT_NE(text.out.find("R_B"), std::string::npos);
}

TEST(Cli, SpreadParamsNamesBadField) {
  const auto o = cli_run({"spread-params", "--sigma", "-1", "--w_o", "0.034", "--delta", "1", "--M_x",
                          "0.12", "--M_f", "0.05"});
  EXPECT_EQ(o.rc, cli::kExitInvalid);
  EXPECT_NE(o.err.find("sigma"), std::string::npos) << o.err;
  const auto s = cli_run({"spread-params", "--scenario", scenario("fuel_no_wind.json"), "--format", "csv"});
  EXPECT_EQ(s.rc, cli::kExitOk) << s.err;
  EXPECT_EQ(cli_run({"spread-params", "--scenario", scenario("homogeneous_wind.json")}).rc, cli::kExitInvalid);
}

TEST(Cli, ConvertSpeed) {
  auto value = [](const std::string& v, const char* from, const char* to) {
    const auto o = cli_run({"convert-speed", "--value", v, "--from", from, "--to", to});
    EXPECT_EQ(o.rc, cli::kExitOk) << o.err;
    return std::stod(o.out);
  };
  EXPECT_EQ(value("7", "km/h", "ft/min"), 382.76465441819767);
  EXPECT_EQ(value("0", "mph", "km/h"), 0.0);
  for (const char* a : {"ft/min", "km/h", "mph"})
    for (const char* b : {"ft/min", "km/h", "mph"}) {
      const double there = value("3.7", a, b);
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", there);
      EXPECT_NEAR(value(buf, b, a), 3.7, 3.7e-12) << a << " " << b;
    }
  EXPECT_EQ(cli_run({"convert-speed", "--value", "1", "--from", "knots", "--to", "km/h"}).rc, cli::kExitInvalid);
}

TEST(Cli, SimulateWritesOutputsDeterministically) {
  TempDir a("wildfire_cli_a"), b("wildfire_cli_b");
  const auto first = cli_run({"simulate", "--scenario", scenario("homogeneous_wind.json"), "--out-dir", a.path().string()});
  const auto second = cli_run({"simulate", "--scenario", scenario("homogeneous_wind.json"), "--out-dir", b.path().string()});
  ASSERT_EQ(first.rc, cli::kExitOk) << first.err;
  ASSERT_EQ(second.rc, cli::kExitOk) << second.err;
  for (const char* name : {"fronts.csv", "fronts.svg", "report.json"}) {
    ASSERT_TRUE(std::filesystem::exists(a.path() / name)) << name;
    EXPECT_EQ(slurp(a.path() / name), slurp(b.path() / name)) << name;
  }
  EXPECT_EQ(slurp(a.path() / "fronts.csv").rfind("stage,t,vertex_index,x,y\n", 0), 0u);
  const auto report = nlohmann::json::parse(slurp(a.path() / "report.json"));
  EXPECT_EQ(report["status"], "completed");
  EXPECT_EQ(report["partial"], false);
  EXPECT_EQ(report["fronts"].size(), 4u);
  EXPECT_EQ(report["stages"][0]["valid"], true);
}

TEST(Cli, SimulateRaysCsv) {
  TempDir dir("wildfire_cli_rays");
  const auto o = cli_run({"simulate", "--scenario", scenario("example1b.json"), "--out-dir", dir.path().string()});
  ASSERT_EQ(o.rc, cli::kExitOk) << o.err;
  const std::string rays = slurp(dir.path() / "rays.csv");
  EXPECT_EQ(rays.rfind("ray_id,t,x,y,v1,v2\n", 0), 0u);
}

TEST(Cli, SimulateViolationFlushesPartialOutputs) {
  TempDir dir("wildfire_cli_violation");
  const auto o = cli_run({"simulate", "--scenario", scenario("example1c.json"), "--out-dir", dir.path().string()});
  EXPECT_EQ(o.rc, cli::kExitModelViolation);
  EXPECT_NE(o.err.find("2c < b"), std::string::npos) << o.err;
  const auto report = nlohmann::json::parse(slurp(dir.path() / "report.json"));
  EXPECT_EQ(report["status"], "model_violation");
  EXPECT_EQ(report["partial"], true);
  EXPECT_GT(report["fronts"].size(), 0u);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "fronts.csv"));
}

TEST(Cli, SimulateInvalidScenario) {
  TempDir dir("wildfire_cli_invalid");
  {
    std::ofstream s(dir.path() / "empty.json");
    s << R"({"schema_version": 1, "initial": {"point": [0, 0]}, "stages": []})";
  }
  {
    std::ofstream s(dir.path() / "typo.json");
    s << R"({"schema_version": 1, "initial": {"point": [0, 0]}, "stagez": []})";
  }
  const auto empty = cli_run({"simulate", "--scenario", (dir.path() / "empty.json").string(), "--out-dir", dir.path().string()});
  EXPECT_EQ(empty.rc, cli::kExitInvalid);
  const auto typo = cli_run({"simulate", "--scenario", (dir.path() / "typo.json").string(), "--out-dir", dir.path().string()});
  EXPECT_EQ(typo.rc, cli::kExitInvalid);
  EXPECT_NE(typo.err.find("stagez"), std::string::npos) << typo.err;
  EXPECT_EQ(cli_run({"simulate", "--scenario", (dir.path() / "none.json").string()}).rc, cli::kExitInvalid);
  EXPECT_EQ(cli_run({"simulate"}).rc, cli::kExitInvalid);
}

}  // namespace

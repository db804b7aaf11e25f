#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "imp/bench.hpp"
#include "imp/rng.hpp"
#include "imp/scenario_io.hpp"

namespace fs = std::filesystem;
using imp::Rng;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("imp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args) const {
    const fs::path log = dir_ / "stdout.txt";
    const std::string cmd = "cd '" + dir_.string() + "' && '" IMP_CLI_PATH "' " + args + " > '" + log.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read(log)};
  }

  static std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  void write(const fs::path& p, const std::string& text) const { std::ofstream(dir_ / p, std::ios::binary) << text; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenerateIsDeterministic) {
  auto a = run("generate --seed 7 --objects 6 --fixed-ratio 0.5 -o a.json");
  ASSERT_EQ(a.code, 0) << a.out;
  auto b = run("generate --seed 7 --objects 6 --fixed-ratio 0.5 -o b.json");
  ASSERT_EQ(b.code, 0) << b.out;
  EXPECT_EQ(read(dir_ / "a.json"), read(dir_ / "b.json"));
  EXPECT_EQ(imp::read_scenario(dir_ / "a.json").objects.size(), 6u);

  ASSERT_EQ(run("generate --seed 7").code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "scenario_7.json"));
}

TEST_F(Cli, GenerateOverfullTableFails) {
  const auto r = run("generate --seed 1 --objects 500");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("placement budget"), std::string::npos) << r.out;
}

TEST_F(Cli, RunEmptyTableWritesExports) {
  imp::WorldState w;
  w.robot.position = {0.2, 0.2};
  w.targets = {{{0.5, 0.4}, 0.01}};
  imp::write_scenario(dir_ / "empty.json", w);
  const auto r = run("run --scenario empty.json --svg --field-dump --name t");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("success true"), std::string::npos) << r.out;
  for (const char* f : {"t_trajectory.csv", "t_overview.svg", "t_field.csv", "t_field.svg"})
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  EXPECT_EQ(read(dir_ / "t_field.csv").substr(0, 20), "x,y,potential,fx,fy\n");
}

TEST_F(Cli, CorridorSeparatesApfFromImp) {
  const auto imp_run = run("run --fixture corridor --seed 3 --planner imp --no-csv");
  const auto apf_run = run("run --fixture corridor --seed 3 --planner apf --no-csv");
  EXPECT_EQ(imp_run.code, 0) << imp_run.out;
  EXPECT_EQ(apf_run.code, 1) << apf_run.out;
  EXPECT_NE(apf_run.out.find("success false"), std::string::npos);
}

TEST_F(Cli, ProximityAblationRaisesFirstContactForce) {
  auto first_contact = [](const std::string& out) {
    const auto at = out.find("first_contact_force ");
    return at == std::string::npos ? -1.0 : std::stod(out.substr(at + 20));
  };
  const auto full = run("run --fixture approach --seed 2 --no-csv --max-time 30");
  const auto blind = run("run --fixture approach --seed 2 --no-csv --max-time 30 --ablate proximity");
  EXPECT_GT(first_contact(blind.out), first_contact(full.out)) << full.out << blind.out;
}

TEST_F(Cli, BenchSingleCellAndReruns) {
  const std::string args = "bench --objects 3 --fixed-ratio 0.5 --targets 1 --trials 2 --planners imp,apf -q";
  ASSERT_EQ(run(args + " --name a").code, 0);
  ASSERT_EQ(run(args + " --name b").code, 0);
  const std::string a = read(dir_ / "a.json");
  EXPECT_EQ(a, read(dir_ / "b.json"));
  EXPECT_EQ(read(dir_ / "a.csv"), read(dir_ / "b.csv"));
  const auto doc = nlohmann::json::parse(a);
  EXPECT_EQ(doc["cells"].size(), 1u);
  const std::string csv = read(dir_ / "a.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST_F(Cli, BenchStressGrid) {
  const auto r = run("bench --stress --trials 1 --planners apf -q --name s");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto doc = nlohmann::json::parse(read(dir_ / "s.json"));
  EXPECT_EQ(doc["cells"].size(), 40u);
}

TEST_F(Cli, EstimateRecoversSpring) {
  std::ostringstream csv;
  csv << "dx,v,F\n";
  Rng rng(4);
  for (int i = 0; i < 60; ++i) {
    const double dx = rng.uniform(0, 0.01), v = rng.uniform(0, 0.02);
    csv << imp::fmt9(dx) << ',' << imp::fmt9(v) << ',' << imp::fmt9(700.0 * dx) << '\n';
  }
  write("spring.csv", csv.str());
  const auto r = run("estimate spring.csv");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["theta"]["K"].get<double>(), 700.0, 1e-3);
  EXPECT_NEAR(j["theta"]["D"].get<double>(), 0.0, 1e-3);
  EXPECT_NEAR(j["theta"]["C"].get<double>(), 0.0, 1e-5);
  EXPECT_TRUE(j["confident"].get<bool>());
}

TEST_F(Cli, EstimateResidualMatchesOfflineRecomputation) {
  std::ostringstream csv;
  Rng rng(5);
  std::vector<std::array<double, 3>> rows;
  for (int i = 0; i < 100; ++i) {
    const double dx = rng.uniform(0, 0.01), v = rng.uniform(0, 0.02);
    rows.push_back({imp::round9(dx), imp::round9(v), imp::round9(500 * dx + 20 * v + 0.5 + 0.2 * rng.normal())});
    csv << imp::fmt9(rows.back()[0]) << ',' << imp::fmt9(rows.back()[1]) << ',' << imp::fmt9(rows.back()[2]) << '\n';
  }
  write("noisy.csv", csv.str());
  const auto r = run("estimate noisy.csv");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  const double K = j["theta"]["K"], D = j["theta"]["D"], C = j["theta"]["C"];
  double ss = 0.0;
  for (const auto& row : rows) ss += std::pow(row[2] - (K * row[0] + D * row[1] + C), 2);
  EXPECT_NEAR(j["residual_rms"].get<double>(), std::sqrt(ss / rows.size()), 1e-6);
  EXPECT_EQ(j["sample_count"].get<int>(), 100);
}

TEST_F(Cli, EstimateErrors) {
  write("empty.csv", "");
  EXPECT_EQ(run("estimate empty.csv").code, 3);
  write("bad.csv", "dx,v,F\n0.1,abc,3\n");
  EXPECT_EQ(run("estimate bad.csv").code, 3);
  std::ostringstream flat;
  for (int i = 0; i < 40; ++i) flat << "0.001,0,0.5\n";
  write("flat.csv", flat.str());
  const auto r = run("estimate flat.csv");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("rank"), std::string::npos) << r.out;
  EXPECT_EQ(run("estimate missing.csv").code, 3);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("run --planner nope --seed 1").code, 2);
  EXPECT_EQ(run("run").code, 2);
  EXPECT_EQ(run("run --scenario nowhere.json").code, 3);
  EXPECT_EQ(run("--help").code, 0);
}

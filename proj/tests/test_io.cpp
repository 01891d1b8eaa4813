#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "homdelay/csv.hpp"
#include "homdelay/json_io.hpp"
#include "homdelay/tables.hpp"

namespace homdelay {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int status = -1;
  std::string output;
};

CliRun RunCli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "homdelay_cli_test.log";
  const std::string cmd = std::string(HOMDELAY_CLI) + " " + args + " > " +
                          log.string() + " 2>&1";
  CliRun r;
  const int raw = std::system(cmd.c_str());
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(log);
  std::stringstream buf;
  buf << in.rdbuf();
  r.output = buf.str();
  return r;
}

std::string Config(const char* name) {
  return std::string(HOMDELAY_CONFIG_DIR) + "/" + name;
}

GTEST_TEST(TablesTest, NonFlaggedCellsReproduce) {
  for (int t : {1, 2, 3}) {
    const TableReport r = reproduce_table(t);
    EXPECT_TRUE(r.ok()) << "table " << t;
    EXPECT_FALSE(r.cells.empty());
  }
  const TableReport t2 = reproduce_table(2);
  EXPECT_TRUE(t2.cell("lr.c_tilde_1").pass);
  EXPECT_TRUE(t2.cell("lk.c_hat_2").flagged);
  EXPECT_THROW(t2.cell("nope"), Error);
  EXPECT_THROW(reproduce_table(4), ConfigError);
}

GTEST_TEST(TablesTest, CsvHasOneRowPerCell) {
  const TableReport r = reproduce_table(3);
  std::ostringstream out;
  write_table_csv(out, r);
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("table,key,", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')),
            r.cells.size() + 1);
}

GTEST_TEST(JsonTest, DeclarativeSystemEstimatesGrowth) {
  const Json cfg = ReadJsonFile(Config("cubic_system.json"));
  const SystemModel m = system_from_json(cfg.at("system"));
  EXPECT_EQ(m.rhs.dimension(), 1u);
  EXPECT_DOUBLE_EQ(m.rhs.delay(), 2.0);
  // Exact maxima 2, 6, 1.5 times the 1.05 safety factor at most.
  EXPECT_GE(m.growth.m, 2.0 * (1 - 1e-3));
  EXPECT_LE(m.growth.m, 2.1 + 1e-12);
  EXPECT_GE(m.growth.m1, 6.0 * (1 - 1e-3));
  EXPECT_LE(m.growth.m1, 6.3 + 1e-12);
  EXPECT_GE(m.growth.m2, 1.5 * (1 - 1e-3));
  EXPECT_LE(m.growth.m2, 1.575 + 1e-12);

  Json sys = cfg.at("system");
  sys["growth"] = {{"m", 2.5}, {"m1", 7.0}, {"m2", 2.0}};
  EXPECT_DOUBLE_EQ(system_from_json(sys).growth.m, 2.5);
  sys.erase("h");
  EXPECT_THROW(system_from_json(sys), ConfigError);
}

GTEST_TEST(JsonTest, HistoryForms) {
  const HistorySegment c =
      history_from_json(Json::parse(R"({"constant": [0.1, -0.2]})"), 1.0);
  EXPECT_EQ(c.dimension(), 2u);
  EXPECT_NEAR(c.sup_norm(), std::sqrt(0.05), 1e-15);
  const Json samples = Json::parse(
      R"({"samples": {"theta": [-2, -1.5, -1, -0.5, 0], "values": [[1],[2],[3],[4],[5]]}})");
  EXPECT_DOUBLE_EQ(history_from_json(samples, 2.0).Evaluate(-0.75)[0], 3.5);
  EXPECT_THROW(history_from_json(samples, 1.0), ConfigError);
  EXPECT_THROW(history_from_json(Json::object(), 1.0), ConfigError);
}

GTEST_TEST(JsonTest, CertificatesSerializeEveryConstant) {
  const Preset p = preset("table3");
  const SystemModel m = build_example(p.example);
  const Json lk = to_json(krasovskii_certificate(m, p.krasovskii));
  for (const char* key : {"path", "H1", "H2", "a1", "a2", "b", "beta", "L", "c",
                          "L1", "L2", "Delta", "c_hat_1", "c_hat_2"}) {
    EXPECT_TRUE(lk.contains(key)) << key;
  }
  EXPECT_EQ(lk.at("path"), "general");
  const Json lr = to_json(razumikhin_certificate(m, p.razumikhin));
  for (const char* key : {"k4", "H", "k5", "kappa", "K", "Delta", "d_bar", "rho",
                          "A", "B", "c_tilde_1", "c_tilde_2"}) {
    EXPECT_TRUE(lr.contains(key)) << key;
  }
}

GTEST_TEST(JsonTest, ParameterOverrides) {
  RazumikhinParams base;
  base.delta = 0.01;
  const auto lr = razumikhin_params_from_json(Json::parse(R"({"alpha": 3})"), base);
  EXPECT_EQ(lr.alpha, 3.0);
  EXPECT_EQ(*lr.delta, 0.01);
  const auto lk = krasovskii_params_from_json(
      Json::parse(R"({"path": "scalar", "chi": 0.2})"), {});
  EXPECT_EQ(lk.path, KrasovskiiPath::kScalar);
  EXPECT_EQ(*lk.chi, 0.2);
  EXPECT_THROW(krasovskii_params_from_json(Json::parse(R"({"path": "x"})"), {}),
               ConfigError);
  const auto tp = tuning_problem_from_json(
      Json::parse(R"({"method": "razumikhin", "bounds": {"alpha": [1.5, 3]}})"),
      build_example({}));
  ASSERT_EQ(tp.bounds.size(), 1u);
  EXPECT_EQ(tp.bounds[0].hi, 3.0);
}

GTEST_TEST(CsvTest, NumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -4.2937559355900058e-5, 1e300}) {
    EXPECT_EQ(std::stod(FormatNumber(v)), v);
  }
  std::ostringstream out;
  WriteCsvRow(out, {1.5, -2.0});
  EXPECT_EQ(out.str(), "1.5,-2\n");
}

GTEST_TEST(CliTest, ReproduceTables) {
  const CliRun r = RunCli("reproduce-tables");
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("Table 3"), std::string::npos);
  EXPECT_NE(r.output.find("[flagged]"), std::string::npos);
}

GTEST_TEST(CliTest, RegionAndEstimateEmitJson) {
  CliRun r = RunCli("region --example ex1");
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("\"Delta\""), std::string::npos);
  r = RunCli("estimate --example ex2");
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("\"c_hat_2\""), std::string::npos);
}

GTEST_TEST(CliTest, CompareWithConfig) {
  const fs::path csv = fs::temp_directory_path() / "homdelay_compare.csv";
  const CliRun r = RunCli("compare --config " + Config("ex1_compare.json") +
                          " --horizon 1000 --step 0.01 --out " + csv.string());
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("\"razumikhin_dominates\": true"), std::string::npos);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,norm,razumikhin,krasovskii");
}

GTEST_TEST(CliTest, CompareCustomSystem) {
  const CliRun r = RunCli("compare --config " + Config("cubic_system.json") +
                          " --horizon 200");
  EXPECT_EQ(r.status, 0) << r.output;
}

GTEST_TEST(CliTest, SimulateWritesTrajectory) {
  const fs::path csv = fs::temp_directory_path() / "homdelay_sim.csv";
  const CliRun r = RunCli("simulate --example ex2 --horizon 5 --step 0.01 --out " +
                          csv.string());
  ASSERT_EQ(r.status, 0) << r.output;
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,x_1,x_2,norm,V");
}

GTEST_TEST(CliTest, TuneSmallBudget) {
  const CliRun r = RunCli("tune --example ex1 --budget 200 --seed 4");
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("\"evaluations\""), std::string::npos);
}

GTEST_TEST(CliTest, ErrorsAreReported) {
  EXPECT_NE(RunCli("region --example ex9").status, 0);
  EXPECT_EQ(RunCli("simulate --example ex1 --step 0.3").status, 2);
  EXPECT_EQ(RunCli("compare --example ex2 --figure").status, 2);
  EXPECT_EQ(RunCli("region --config /nonexistent.json").status, 2);
}

}  // namespace
}  // namespace homdelay

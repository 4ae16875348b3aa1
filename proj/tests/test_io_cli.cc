#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qrot/cli.h"
#include "qrot/io.h"
#include "test_support.h"

namespace qrot {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qrot_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    unsetenv("QROT_SEED");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const Json& j) {
    const std::string path = (dir_ / name).string();
    std::ofstream(path) << j.dump();
    return path;
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

Json diagonal_file(double gamma) {
  return Json{{"schema_version", 1},
              {"mu", {0.5, 0.5}},
              {"nu", {0.5, 0.5}},
              {"cost_generator", {{"kind", "indicator_offdiag"}, {"gamma", gamma}}}};
}

TEST(InstanceFileFormat, DefaultsAndGenerator) {
  const InstanceFile f = parse_instance_file(diagonal_file(1.0));
  EXPECT_DOUBLE_EQ(f.epsilon, 1.0);
  EXPECT_FALSE(f.symmetric);
  const Instance inst = validate_instance(f.to_raw());
  EXPECT_DOUBLE_EQ(inst.cost(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(inst.cost(1, 1), 0.0);
  EXPECT_EQ(inst.mu_tilde, inst.mu);
}

TEST(InstanceFileFormat, Errors) {
  Json j = diagonal_file(1.0);
  j["schema_version"] = 2;
  EXPECT_THROW(parse_instance_file(j), FormatError);
  j = diagonal_file(1.0);
  j["cost"] = {{0, 1}, {1, 0}};
  EXPECT_THROW(parse_instance_file(j), FormatError);
  j = diagonal_file(1.0);
  j.erase("mu");
  EXPECT_THROW(parse_instance_file(j), FormatError);
  j = diagonal_file(1.0);
  j.erase("cost_generator");
  j["cost"] = {{0, 1}, {1}};
  EXPECT_THROW(validate_instance(parse_instance_file(j).to_raw()),
               InstanceError);
}

TEST(InstanceFileFormat, RoundTrip) {
  Json j{{"schema_version", 1},
         {"mu", {0.25, 0.75}},
         {"nu", {0.5, 0.5}},
         {"mu_tilde", {0.5, 0.5}},
         {"cost", {{0.0, 1.0}, {2.0, 0.5}}},
         {"epsilon", 0.5},
         {"symmetric", false}};
  const InstanceFile f = parse_instance_file(j);
  const InstanceFile g = parse_instance_file(instance_file_to_json(f));
  EXPECT_EQ(g.mu, f.mu);
  EXPECT_EQ(g.cost, f.cost);
  EXPECT_EQ(g.mu_tilde, f.mu_tilde);
  EXPECT_DOUBLE_EQ(g.epsilon, 0.5);
}

TEST(ReportFormat, PolytopeInfinitySentinel) {
  PolytopeDescription pd;
  pd.n_components = 2;
  pd.a = Matrix::Constant(2, 2, std::numeric_limits<double>::infinity());
  pd.a(0, 0) = pd.a(1, 1) = 0.0;
  pd.dist = pd.a;
  pd.dimension = 2;
  const Json j = polytope_to_json(pd);
  EXPECT_EQ(j["a"][0][1], "inf");
  const PolytopeDescription back = polytope_from_json(j);
  EXPECT_TRUE(std::isinf(back.a(0, 1)));
  EXPECT_EQ(back.dimension, 2);
}

TEST_F(CliTest, SolveWritesReportThatRoundTrips) {
  const std::string inst = write("inst.json", diagonal_file(1.0));
  const std::string out = (dir_ / "report.json").string();
  ASSERT_EQ(run({"solve", inst, "--out", out}), kExitOk) << err_.str();
  const Json j = read_json_file(out);
  const ReportFile r = report_from_json(j);
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.components.count, 2);
  ASSERT_TRUE(r.polytope.has_value());
  EXPECT_NEAR(r.polytope->a(0, 1), 1.0, 1e-8);
  EXPECT_TRUE(report_from_json(report_to_json(r)) == r);
}

TEST_F(CliTest, SolveIsDeterministic) {
  const std::string inst = write("inst.json", diagonal_file(0.5));
  ASSERT_EQ(run({"solve", inst, "--seed", "3"}), kExitOk);
  const std::string first = out_.str();
  ASSERT_EQ(run({"solve", inst, "--seed", "3"}), kExitOk);
  EXPECT_EQ(out_.str(), first);
}

TEST_F(CliTest, SeedEnvironmentOverridesFlag) {
  const std::string inst = write("inst.json", diagonal_file(0.5));
  setenv("QROT_SEED", "77", 1);
  ASSERT_EQ(run({"solve", inst, "--seed", "3"}), kExitOk);
  unsetenv("QROT_SEED");
  EXPECT_EQ(Json::parse(out_.str())["provenance"]["seed"], 77);
}

TEST_F(CliTest, InputErrorExitCode) {
  Json bad = diagonal_file(1.0);
  bad["mu"] = {1.0, 0.0};
  const std::string path = write("bad.json", bad);
  EXPECT_EQ(run({"solve", path}), kExitInputError);
  EXPECT_NE(err_.str().find("nonpositive weight at mu[1]"), std::string::npos)
      << err_.str();
  EXPECT_EQ(run({"solve", (dir_ / "missing.json").string()}), kExitInputError);
  EXPECT_EQ(run({"frobnicate"}), kExitInputError);
}

TEST_F(CliTest, NotConvergedExitCode) {
  std::mt19937_64 rng(5);
  const Instance hard = testing::random_instance(rng, 10, 10, 0.01);
  Json j{{"schema_version", 1}, {"epsilon", 0.01}};
  j["mu"] = std::vector<double>(hard.mu.data(), hard.mu.data() + 10);
  j["nu"] = std::vector<double>(hard.nu.data(), hard.nu.data() + 10);
  Json cost = Json::array();
  for (int i = 0; i < 10; ++i) {
    Json row = Json::array();
    for (int k = 0; k < 10; ++k) row.push_back(hard.cost(i, k));
    cost.push_back(row);
  }
  j["cost"] = cost;
  EXPECT_EQ(run({"solve", write("hard.json", j), "--max-sweeps", "1"}),
            kExitNotConverged);
}

TEST_F(CliTest, VerifyAcceptsFamilyAndRejectsOutside) {
  const std::string inst = write("inst.json", diagonal_file(1.0));
  const std::string good =
      write("good.json", Json{{"f", {0.5, 1.5}}, {"g", {1.5, 0.5}}});
  EXPECT_EQ(run({"verify", inst, "--potentials", good}), kExitOk) << err_.str();
  EXPECT_EQ(Json::parse(out_.str())["valid"], true);
  const std::string bad =
      write("bad.json", Json{{"f", {0.4, 1.5}}, {"g", {1.6, 0.5}}});
  EXPECT_EQ(run({"verify", inst, "--potentials", bad}), kExitRejected);
  const std::string report = (dir_ / "r.json").string();
  ASSERT_EQ(run({"solve", inst, "--out", report}), kExitOk);
  EXPECT_EQ(run({"verify", inst, "--potentials", report}), kExitOk);
}

TEST_F(CliTest, AnalyzeSymmetricSlice) {
  Json j{{"schema_version", 1},
         {"mu", {0.5, 0.5}},
         {"nu", {0.5, 0.5}},
         {"cost", {{3.0, 0.0}, {0.0, 3.0}}},
         {"symmetric", true}};
  ASSERT_EQ(run({"analyze", write("sym.json", j), "--samples", "3"}), kExitOk)
      << err_.str();
  const Json r = Json::parse(out_.str());
  EXPECT_EQ(r["components"]["count"], 2);
  EXPECT_EQ(r["samples"].size(), 3u);
  EXPECT_TRUE(r["symmetric_slice"]["feasible"].get<bool>());
}

TEST_F(CliTest, AnalyzeReportNeedsInstance) {
  const std::string inst = write("inst.json", diagonal_file(1.0));
  const std::string report = (dir_ / "r.json").string();
  ASSERT_EQ(run({"solve", inst, "--out", report}), kExitOk);
  EXPECT_EQ(run({"analyze", report}), kExitInputError);
  EXPECT_EQ(run({"analyze", report, "--instance", inst}), kExitOk);
  EXPECT_EQ(Json::parse(out_.str())["polytope"]["dimension"], 2);
}

TEST_F(CliTest, SweepAndOracle) {
  Json j{{"schema_version", 1},
         {"mu", {0.25, 0.25, 0.25, 0.25}},
         {"nu", {0.25, 0.25, 0.25, 0.25}},
         {"cost_generator",
          {{"kind", "quadratic_1d"},
           {"x", {0.125, 0.375, 0.625, 0.875}},
           {"y", {0.125, 0.375, 0.625, 0.875}}}}};
  const std::string path = write("q.json", j);
  ASSERT_EQ(run({"sweep", path, "--eps-list", "1,0.1"}), kExitOk) << err_.str();
  const std::string csv = out_.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(run({"sweep", path, "--eps-list", "1,x"}), kExitInputError);
  ASSERT_EQ(run({"oracle", path}), kExitOk) << err_.str();
  EXPECT_TRUE(Json::parse(out_.str())["agree"].get<bool>());
}

}  // namespace
}  // namespace qrot

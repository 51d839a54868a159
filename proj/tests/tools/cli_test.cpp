#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli/cli.hpp"
#include "support/instances.hpp"
#include "vmrank/ingest.hpp"
#include "vmrank/json.hpp"

namespace fs = std::filesystem;
using vmrank::cli::run;

namespace {

std::string data_path(const std::string& rel) { return std::string(VMRANK_DATA_DIR) + "/" + rel; }

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "vmrank");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ::unsetenv(vmrank::cli::kDatasetEnv);
    dir_ = fs::temp_directory_path() / ("vmrank_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& content) {
    const auto p = dir_ / name;
    std::ofstream(p) << content;
    return p.string();
  }

  fs::path dir_;
};

const std::string kDemo = data_path("demo.measurements");

}  // namespace

TEST_F(CliTest, RankDemoTable) {
  const auto r = invoke({"rank", "-m", kDemo, "--weights", "5,3,5,0", "--mode", "sequential"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header.find("rank"), header.find_first_not_of(' '));
  int rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find("xlarge") != std::string::npos) ++rows;
  }
  EXPECT_EQ(rows, 12);
}

TEST_F(CliTest, RankJsonRoundTrips) {
  const auto r = invoke({"rank", "-m", kDemo, "--weights", "5,3,5,0", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto table = vmrank::rank_table_from_json(nlohmann::json::parse(r.out));
  EXPECT_EQ(table.size(), 12u);
  EXPECT_EQ(nlohmann::json(table), nlohmann::json::parse(r.out));
  const auto csv = invoke({"rank", "-m", kDemo, "--weights", "5,3,5,0", "--format", "csv"});
  EXPECT_EQ(csv.out.rfind("rank,vm,score\n", 0), 0u);
}

TEST_F(CliTest, InvalidWeightsAreUsageErrors) {
  const auto zero = invoke({"rank", "-m", kDemo, "--weights", "0,0,0,0"});
  EXPECT_EQ(zero.code, 1);
  EXPECT_NE(zero.err.find("not all zero"), std::string::npos) << zero.err;
  const auto big = invoke({"rank", "-m", kDemo, "--weights", "6,0,0,0"});
  EXPECT_EQ(big.code, 1);
  EXPECT_NE(big.err.find("0-5"), std::string::npos) << big.err;
  EXPECT_EQ(invoke({"rank", "-m", kDemo}).code, 1);
}

TEST_F(CliTest, DataErrorsNameTheirStage) {
  const auto missing = invoke({"rank", "-m", "/nonexistent.measurements", "--weights", "1,1,1,1"});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("[parse]"), std::string::npos) << missing.err;

  const auto partial = write("partial.measurements",
                             "@vm a, 1, 1, x, 1\n@vm b, 1, 1, x, 1\n"
                             "@attribute m, memory_process, higher_better, u, M\n"
                             "a, m, 1\nb, m, 2\n");
  const auto scoring = invoke({"rank", "-m", partial, "--weights", "1,0,0,1"});
  EXPECT_EQ(scoring.code, 2);
  EXPECT_NE(scoring.err.find("[score] MissingGroup"), std::string::npos) << scoring.err;
}

TEST_F(CliTest, DatasetFromEnvironment) {
  EXPECT_EQ(invoke({"rank", "--weights", "1,1,1,1"}).code, 1);
  ::setenv(vmrank::cli::kDatasetEnv, kDemo.c_str(), 1);
  EXPECT_EQ(invoke({"rank", "--weights", "1,1,1,1"}).code, 0);
  ::unsetenv(vmrank::cli::kDatasetEnv);
}

TEST_F(CliTest, SweepFooterAndFormats) {
  const auto t = invoke({"sweep", "-m", kDemo, "--top", "3"});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_NE(t.out.find("total_vectors: 1295"), std::string::npos) << t.out;
  const auto j = invoke({"sweep", "-m", kDemo, "--format", "json", "--mode", "parallel"});
  const auto parsed = nlohmann::json::parse(j.out).get<vmrank::SweepResult>();
  EXPECT_EQ(parsed.total_vectors, 1295);
  EXPECT_EQ(parsed.mode, vmrank::ExecutionMode::Parallel);
  const auto c = invoke({"sweep", "-m", kDemo, "--format", "csv"});
  EXPECT_EQ(c.out.rfind("vm,rank1_count,rank2_count,rank3_count,topk_count,topk_frequency\n", 0), 0u) << c.out;
  const auto plot = (dir_ / "plot.csv").string();
  EXPECT_EQ(invoke({"sweep", "-m", kDemo, "--plot-csv", plot}).code, 0);
  EXPECT_TRUE(fs::file_size(plot) > 0);
}

TEST_F(CliTest, SweepDominantVm) {
  const auto path = write("dominant.measurements", vmrank::to_canonical_text(testdata::dominant_instance()));
  const auto r = invoke({"sweep", "-m", path, "--top", "1", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto res = nlohmann::json::parse(r.out).get<vmrank::SweepResult>();
  EXPECT_DOUBLE_EQ(res.top_k_frequency("vm0"), 1.0);
}

TEST_F(CliTest, SweepRejectsZeroK) { EXPECT_EQ(invoke({"sweep", "-m", kDemo, "--top", "0"}).code, 1); }

TEST_F(CliTest, ValidateFixture) {
  const auto r = invoke({"validate", "--fixture", "casestudy1-ranks", "--mode", "sequential"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("PearsonOnRanks: 0.925"), std::string::npos) << r.out;
  const auto par = invoke({"validate", "--fixture", "casestudy1-ranks", "--mode", "parallel", "--format", "json"});
  const auto j = nlohmann::json::parse(par.out);
  EXPECT_NEAR(j.at("coefficient").get<double>(), 0.576, 0.005);
  EXPECT_EQ(j.at("divergence").at("flagged").at(0).at("vm"), "hs1.8xlarge");
}

TEST_F(CliTest, ValidateTimings) {
  const auto r = invoke({"validate", "-m", kDemo, "--timings", data_path("casestudy1.timings"), "--weights",
                         "5,3,5,0", "--method", "kendall"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("KendallTau"), std::string::npos);

  const auto pearson = invoke({"validate", "-m", kDemo, "--timings", data_path("casestudy1.timings"), "--weights",
                               "5,3,5,0", "--format", "json"});
  EXPECT_NEAR(nlohmann::json::parse(pearson.out).at("coefficient").get<double>(), 0.925, 0.005);
}

TEST_F(CliTest, ValidateIdenticalRankings) {
  const auto data = write("three.measurements",
                          "@vm fast, 1, 1, x, 1\n@vm mid, 1, 1, x, 1\n@vm slow, 1, 1, x, 1\n"
                          "@attribute t, computation, lower_better, ns, T\n"
                          "fast, t, 1\nmid, t, 2\nslow, t, 3\n");
  const auto timings = write("three.timings", "fast, sequential, 10\nmid, sequential, 20\nslow, sequential, 30\n");
  const auto r = invoke({"validate", "-m", data, "--timings", timings, "--weights", "0,0,1,0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1.000"), std::string::npos) << r.out;
}

TEST_F(CliTest, ValidateMissingTimingsFile) {
  const auto r = invoke({"validate", "-m", kDemo, "--timings", "/nonexistent.timings", "--weights", "5,3,5,0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("not found"), std::string::npos);
}

TEST_F(CliTest, FixtureAndExtract) {
  const auto f = invoke({"fixture", "vm-specs"});
  EXPECT_EQ(f.code, 0);
  EXPECT_NE(f.out.find("@vm cr1.8xlarge, 32, 244.0"), std::string::npos);
  EXPECT_EQ(invoke({"fixture", "casestudy9"}).code, 2);
  const auto fj = invoke({"fixture", "casestudy2-ranks", "--format", "json"});
  EXPECT_EQ(nlohmann::json::parse(fj.out).at("tables").size(), 4u);

  const auto e = invoke({"extract", "--spec", data_path("specs/lmbench.spec"), "--input",
                         data_path("samples/lmbench_cr1.8xlarge.txt"), "--vm", "cr1.8xlarge", "-m", kDemo});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("cr1.8xlarge, int_add_ns, 0.19"), std::string::npos) << e.out;
  EXPECT_NO_THROW(vmrank::load_measurements(e.out));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"frobnicate"}).code, 1);
  EXPECT_EQ(invoke({"rank", "-m", kDemo, "--weights", "1,1,1,1", "--format", "xml"}).code, 1);
  EXPECT_EQ(invoke({"serve", "-m", kDemo, "--bind", "nocolon"}).code, 1);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <sstream>

#include "aninorm/cli.hpp"
#include "aninorm/lti.hpp"
#include "fixtures.hpp"

using namespace aninorm;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / "aninorm_cli_test";
    std::filesystem::create_directories(dir_);
    model_ = (dir_ / "scalar.json").string();
    save_model(fixtures::scalar_lag(), model_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path dir_;
  std::string model_;
};

}  // namespace

TEST_F(CliTest, NormAtZeroIsScaledH2) {
  const CliRun r = run({"norm", "--model", model_, "--a", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["gamma"].get<double>(), 1.154701, 1e-6);
  EXPECT_EQ(j["status"], "BoundaryA0");
  EXPECT_TRUE(j["eta_star"].is_null());
}

TEST_F(CliTest, Hinf) {
  const CliRun r = run({"hinf", "--model", model_});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out)["gamma"].get<double>(), 2.0, 1e-8);
}

TEST_F(CliTest, H2AndAnisotropy) {
  const CliRun h2 = run({"h2", "--model", model_});
  ASSERT_EQ(h2.code, 0);
  EXPECT_NEAR(nlohmann::json::parse(h2.out)["gamma"].get<double>(), std::sqrt(4.0 / 3.0), 1e-12);

  const std::string filter = (dir_ / "filter.json").string();
  save_model(fixtures::one_pole(0.5), filter);
  const CliRun an = run({"anisotropy", "--model", filter});
  ASSERT_EQ(an.code, 0) << an.err;
  EXPECT_NEAR(nlohmann::json::parse(an.out)["mean_anisotropy"].get<double>(), 0.1438410362258905, 1e-9);
}

TEST_F(CliTest, Feasible) {
  const CliRun yes = run({"feasible", "--model", model_, "--a", "1", "--gamma", "1.95"});
  ASSERT_EQ(yes.code, 0) << yes.err;
  const auto j = nlohmann::json::parse(yes.out);
  EXPECT_TRUE(j["feasible"].get<bool>());
  EXPECT_TRUE(j.contains("witness"));
  const CliRun no = run({"feasible", "--model", model_, "--a", "1", "--gamma", "1.9"});
  ASSERT_EQ(no.code, 0);
  EXPECT_FALSE(nlohmann::json::parse(no.out)["feasible"].get<bool>());
}

TEST_F(CliTest, Verify) {
  const CliRun r = run({"verify", "--model", model_, "--a", "1", "--samples", "10"});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_TRUE(nlohmann::json::parse(r.out)["passed"].get<bool>());
}

TEST_F(CliTest, BenchAndSummarize) {
  const std::string csv = (dir_ / "bench.csv").string();
  const CliRun b = run({"bench", "--n", "1..2", "--m", "2", "--trials", "1", "--a-list", "0,1", "--rho-cap",
                        "0.9", "--grid", "40", "--out", csv});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(nlohmann::json::parse(b.out)["records"].get<int>(), 8);
  const CliRun s = run({"summarize", csv});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(std::count(s.out.begin(), s.out.end(), '\n'), 1 + 2 + 2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"norm", "--a", "0"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"norm", "--model", model_, "--a", "-1"}).code, 2);
  EXPECT_EQ(run({"bench", "--n", "x..y"}).code, 2);
  EXPECT_EQ(run({"bench", "--m", ""}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, ComputationFailures) {
  EXPECT_EQ(run({"norm", "--model", (dir_ / "missing.json").string(), "--a", "1"}).code, 1);
  const std::string unstable = (dir_ / "unstable.json").string();
  save_model(StateSpaceModel(fixtures::mat({{1.5}}), fixtures::mat({{1}}), fixtures::mat({{1}}),
                             fixtures::mat({{0}})),
             unstable);
  const CliRun r = run({"norm", "--model", unstable, "--a", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
}

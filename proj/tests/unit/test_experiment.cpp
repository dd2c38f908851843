/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddvar/errors.hpp"
#include "ddvar/experiment.hpp"
#include "ddvar/output.hpp"
#include "json.hpp"

namespace ddvar {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class ExperimentTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("ddvar_test_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(ExperimentConfig cfg, const std::string& sub, std::size_t threads = 1) {
    cfg.output_dir = dir_ / sub;
    std::ostringstream out, err;
    return run_experiment(cfg, RunOptions{threads}, out, err);
  }

  fs::path dir_;
};

TEST(Config, MinimalConfigUsesDefaults) {
  const auto cfg = parse_config("np = 40\nj_sub = 2\nhalo = 2\nmethod = compare\n");
  EXPECT_EQ(cfg.tol, 1e-12);
  EXPECT_EQ(cfg.max_iters, 500);
  EXPECT_EQ(cfg.cov_kind, CovarianceKind::Gaussian);
  EXPECT_EQ(cfg.length_scale, 2.0);
  EXPECT_EQ(cfg.sigma_b, 1.0);
  EXPECT_EQ(cfg.sigma_o, 0.1);
  EXPECT_EQ(cfg.effective_nobs(), 8);
  EXPECT_EQ(cfg.seed, 0u);
  EXPECT_EQ(cfg.update_convention, UpdateConvention::VTimesW);
  EXPECT_EQ(cfg.method, ExperimentMethod::Compare);
}

TEST(Config, CommentsAndWhitespace) {
  const auto cfg = parse_config("# header\n  np=50   # trailing\n\nnobs = 10\ncov_kind = identity\nseed=7\n");
  EXPECT_EQ(cfg.np, 50);
  EXPECT_EQ(cfg.effective_nobs(), 10);
  EXPECT_EQ(cfg.cov_kind, CovarianceKind::Identity);
  EXPECT_EQ(cfg.seed, 7u);
}

TEST(Config, HaloTooLargeNamesKey) {
  try {
    parse_config("np = 10\nj_sub = 3\nhalo = 2\n");
    FAIL() << "expected a validation error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ValidationError);
    EXPECT_EQ(e.key(), "halo");
  }
}

TEST(Config, UnknownKeyReportsLine) {
  try {
    parse_config("np = 40\nlambda = 3\n");
    FAIL() << "expected a parse error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.key(), "lambda");
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Config, RejectsBadValuesAndDuplicates) {
  EXPECT_THROW(parse_config("np = forty\n"), ConfigError);
  EXPECT_THROW(parse_config("np = 40\nnp = 41\n"), ConfigError);
  EXPECT_THROW(parse_config("method = fastest\n"), ConfigError);
  EXPECT_THROW(parse_config("sigma_o = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("nobs = 41\n"), ConfigError);
  EXPECT_THROW(parse_config("np\n"), ConfigError);
}

TEST(Config, TextRoundTrip) {
  ExperimentConfig cfg;
  cfg.np = 33;
  cfg.nobs = 5;
  cfg.length_scale = 0.3;
  cfg.sigma_o = 1.0 / 3.0;
  cfg.method = ExperimentMethod::Mps;
  cfg.update_convention = UpdateConvention::BinvVTimesW;
  const auto back = parse_config(config_to_text(cfg));
  EXPECT_EQ(config_to_text(back), config_to_text(cfg));
  EXPECT_EQ(back.sigma_o, cfg.sigma_o);
  EXPECT_EQ(back.nobs, cfg.nobs);
}

TEST(Output, FloatFormatting) {
  EXPECT_EQ(format_real(0.1), "1.0000000000000001e-01");
  EXPECT_EQ(format_real(-2.0), "-2.0000000000000000e+00");
  EXPECT_EQ(format_real(0.0), "0.0000000000000000e+00");
}

TEST_F(ExperimentTest, GlobalWithoutObservationsReturnsBackground) {
  ExperimentConfig cfg;
  cfg.nobs = 0;
  cfg.method = ExperimentMethod::Global;
  ASSERT_EQ(run(cfg, "g"), 0);
  const auto j = nlohmann::json::parse(slurp(dir_ / "g" / "result.json"));
  EXPECT_EQ(j["u_analysis"], j["u_background"]);
  EXPECT_EQ(j["u_analysis"].size(), 40u);
  EXPECT_FALSE(fs::exists(dir_ / "g" / "history.csv"));
}

TEST_F(ExperimentTest, OutputsAreByteDeterministic) {
  ExperimentConfig cfg;
  cfg.seed = 42;
  cfg.method = ExperimentMethod::Mps;
  ASSERT_EQ(run(cfg, "a", 1), 0);
  ASSERT_EQ(run(cfg, "b", 1), 0);
  ASSERT_EQ(run(cfg, "c", 4), 0);
  for (const char* f : {"result.json", "history.csv"}) {
    const std::string a = slurp(dir_ / "a" / f);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(dir_ / "b" / f));
    EXPECT_EQ(a, slurp(dir_ / "c" / f));
  }
}

TEST_F(ExperimentTest, HistoryCsvLayout) {
  ExperimentConfig cfg;
  cfg.j_sub = 3;
  cfg.np = 45;
  cfg.method = ExperimentMethod::Mps;
  ASSERT_EQ(run(cfg, "h"), 0);
  std::istringstream csv(slurp(dir_ / "h" / "history.csv"));
  std::string header, row;
  std::getline(csv, header);
  EXPECT_EQ(header, "iter,max_delta,global_cost,res_sub_1,res_sub_2,res_sub_3");
  std::getline(csv, row);
  EXPECT_EQ(row.rfind("1,", 0), 0u);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 5);
  const auto j = nlohmann::json::parse(slurp(dir_ / "h" / "result.json"));
  EXPECT_EQ(j["per_subdomain_w"].size(), 3u);
  EXPECT_TRUE(j["converged"].get<bool>());
}

TEST_F(ExperimentTest, CompareWritesEquivalenceKeys) {
  ASSERT_EQ(run(ExperimentConfig{}, "cmp"), 0);
  const auto j = nlohmann::json::parse(slurp(dir_ / "cmp" / "result.json"));
  for (const char* key : {"c_equal", "a_structure_exact", "interface_mismatch", "ddda_in_mps_residual",
                          "w_delta_linf", "cost_global", "cost_mps", "cost_ddda", "iters_mps"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_TRUE(j["c_equal"].get<bool>());
  EXPECT_TRUE(j["a_structure_exact"].get<bool>());
}

TEST_F(ExperimentTest, NonConvergenceExitCode) {
  ExperimentConfig cfg;
  cfg.method = ExperimentMethod::Mps;
  cfg.max_iters = 2;
  EXPECT_EQ(run(cfg, "nc"), 2);
  const auto j = nlohmann::json::parse(slurp(dir_ / "nc" / "result.json"));
  EXPECT_FALSE(j["converged"].get<bool>());
}

TEST_F(ExperimentTest, SweepWritesOneDirectoryPerValue) {
  ExperimentConfig cfg;
  cfg.method = ExperimentMethod::Ddda;
  cfg.output_dir = dir_ / "sweep";
  std::ostringstream out, err;
  ASSERT_EQ(run_sweep(cfg, "halo", {"1", "2", "3"}, RunOptions{1}, out, err), 0);
  for (const char* v : {"halo=1", "halo=2", "halo=3"}) EXPECT_TRUE(fs::exists(dir_ / "sweep" / v / "result.json"));
  EXPECT_NE(run_sweep(cfg, "nonsense", {"1"}, RunOptions{1}, out, err), 0);
}

TEST(Environment, ThreadsFromEnv) {
  ::setenv("DDVAR_THREADS", "3", 1);
  EXPECT_EQ(threads_from_env(), 3u);
  ::unsetenv("DDVAR_THREADS");
  EXPECT_EQ(threads_from_env(), 0u);
}

}  // namespace
}  // namespace ddvar

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "spinchain");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = spinchain::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_graph() {
  const auto path = std::filesystem::temp_directory_path() / "spinchain_cli_test.el";
  std::ofstream(path) << "0 1\n1 2\n2 3\n3 4\n4 0\n";
  return path.string();
}

}  // namespace

TEST(Cli, ThresholdsHardcore) {
  const auto r = run({"thresholds", "--model", "hardcore", "--delta", "0", "--max-degree", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"lambda_critical\":4.0"), std::string::npos) << r.out;
}

TEST(Cli, VerifyOracleDeterministic) {
  const auto a = run({"verify", "--suite", "oracle", "--seed", "7"});
  const auto b = run({"verify", "--suite", "oracle", "--seed", "7"});
  EXPECT_EQ(a.code, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.out.empty());
}

TEST(Cli, SampleCountStream) {
  const auto g = temp_graph();
  const auto r = run({"sample", "--model", "ising", "--beta", "0.8", "--lambda", "1", "--graph", g, "--chain", "glauber",
                      "--steps", "1000", "--emit", "count"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1000);
  EXPECT_NE(r.err.find("update path"), std::string::npos);
}

TEST(Cli, SampleDeterministicUnderSeed) {
  const auto g = temp_graph();
  const std::vector<std::string> args{"sample", "--model", "hardcore", "--lambda", "1.5", "--graph", g, "--chain",
                                      "balanced:K=2", "--steps", "200", "--emit", "config", "--seed", "3"};
  const auto a = run(args), b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 200);
}

TEST(Cli, MixReport) {
  const auto r = run({"mix", "--model", "hardcore", "--lambda", "1", "--random-regular", "6", "3", "--chain", "glauber",
                      "--ensemble", "500"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"tv_estimate\""), std::string::npos);
  EXPECT_NE(r.out.find("\"T\":"), std::string::npos);
}

TEST(Cli, ConcentrateCsv) {
  const auto r = run({"concentrate", "--model", "hardcore", "--lambda", "1", "--random-regular", "20", "3", "--samples",
                      "200", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("k,t,exceedance", 0), 0u);
}

TEST(Cli, Bench) {
  const auto r = run({"bench", "--degrees", "8", "--trials", "1000"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"mean_coins\""), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"sample", "--steps", "notanumber"}).code, 2);
  const auto missing = run({"sample", "--model", "hardcore"});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("graph"), std::string::npos);
  const auto g = temp_graph();
  EXPECT_EQ(run({"sample", "--model", "hardcore", "--lambda", "-2", "--graph", g}).code, 2);
  EXPECT_EQ(run({"sample", "--model", "hardcore", "--graph", g, "--chain", "metropolis"}).code, 2);
}

TEST(Cli, Help) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("thresholds"), std::string::npos);
}

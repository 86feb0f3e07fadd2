#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "spinchain/diagnostics.hpp"
#include "spinchain/errors.hpp"

using namespace spinchain;

TEST(Diagnostics, PlugInTv) {
  const std::vector<std::uint64_t> counts{3, 1, 0, 0};
  const std::vector<double> mu{0.25, 0.25, 0.25, 0.25};
  EXPECT_NEAR(plug_in_tv(counts, mu), 0.5, 1e-15);
}

TEST(Diagnostics, NoMovementGivesStartDistance) {
  const Graph g = cycle_graph(5);
  const Model m = HardcoreParams::uniform(5, 1.0);
  const auto mu = enumerate_model(m, g);
  MixingOptions opts;
  opts.start = StartKind::empty;
  const auto r = estimate_tv(m, g, ChainSpec::parse("glauber"), 0, 2000, 3, opts);
  EXPECT_NEAR(r.tv_estimate, 1 - mu[0], 1e-12);
  EXPECT_EQ(r.public_steps, 0u);
}

TEST(Diagnostics, GlauberMixesOnSmallCycle) {
  const Graph g = cycle_graph(6);
  const Model m = TwoSpinParams{0.7, 0.7, 0.9};
  const auto r = estimate_tv(m, g, ChainSpec::parse("glauber"), 300, 20000, 5);
  EXPECT_LE(r.tv_estimate, 0.05 + r.bias_allowance);
  EXPECT_GT(r.mc_error, 0.0);
}

TEST(Diagnostics, IndependentOfThreadCount) {
  const Graph g = cycle_graph(6);
  const Model m = HardcoreParams::uniform(6, 1.0);
  ::setenv("SPINCHAIN_THREADS", "1", 1);
  const auto a = estimate_tv(m, g, ChainSpec::parse("balanced:K=2"), 50, 3000, 9).to_json();
  ::setenv("SPINCHAIN_THREADS", "3", 1);
  const auto b = estimate_tv(m, g, ChainSpec::parse("balanced:K=2"), 50, 3000, 9).to_json();
  ::unsetenv("SPINCHAIN_THREADS");
  EXPECT_EQ(a, b);
}

TEST(Diagnostics, BootstrapErrorScaling) {
  const Graph g = cycle_graph(6);
  const Model m = HardcoreParams::uniform(6, 1.0);
  MixingOptions opts;
  opts.bootstrap = 400;
  const auto small = estimate_tv(m, g, ChainSpec::parse("glauber"), 60, 4000, 1, opts);
  const auto large = estimate_tv(m, g, ChainSpec::parse("glauber"), 60, 8000, 2, opts);
  const double ratio = small.mc_error / large.mc_error;
  EXPECT_GE(ratio, 1.2);
  EXPECT_LE(ratio, 1.7);
}

TEST(Diagnostics, MixingReportJson) {
  MixingReport r;
  r.chain = "glauber";
  const auto j = r.to_json();
  for (const char* key : {"\"chain\"", "\"T\"", "\"ensemble\"", "\"tv_estimate\"", "\"reference\"", "\"mc_error\""}) {
    EXPECT_NE(j.find(key), std::string::npos) << key;
  }
}

TEST(Diagnostics, BinomialTail) {
  // Direct sum of C(n, k) / 2^n over k > n/2 + t, independent of the library routine.
  auto direct = [](int n, double t) {
    double s = 0;
    for (int k = 0; k <= n; ++k) {
      if (k - n / 2.0 > t) s += std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1) - n * std::log(2.0));
    }
    return s;
  };
  EXPECT_NEAR(binomial_upper_tail(10, 2.0), 56.0 / 1024.0, 1e-15);
  EXPECT_NEAR(binomial_upper_tail(2000, 44.72), direct(2000, 44.72), 1e-12);
  EXPECT_NEAR(binomial_upper_tail(2000, 44.72), 0.023276410245891904, 1e-12);
}

TEST(Diagnostics, ConcentrationProductMeasure) {
  // beta = lambda = 1 Ising is uniform on {+,-}^n, so the plus count is Binomial(n, 1/2).
  const std::size_t n = 400;
  const Graph g = cycle_graph(n);
  const Model m = TwoSpinParams{1.0, 1.0, 1.0};
  const auto r = concentration_experiment(m, g, "count", 20000, 4);
  ASSERT_EQ(r.thresholds.size(), 3u);
  EXPECT_NEAR(r.mean, n / 2.0, 1.0);
  EXPECT_NEAR(r.exceedance[1], binomial_upper_tail(n, r.thresholds[1]), 0.01);
}

TEST(Diagnostics, ConcentrationConstant) {
  const Graph g = cycle_graph(50);
  const auto r = concentration_experiment(HardcoreParams::uniform(50, 1.0), g, "constant", 500, 4);
  EXPECT_EQ(r.sigma, 0.0);
  for (double e : r.exceedance) EXPECT_EQ(e, 0.0);
  EXPECT_THROW(concentration_experiment(HardcoreParams::uniform(50, 1.0), g, "median", 10, 4), DomainError);
}

TEST(Diagnostics, TailReportCsv) {
  const auto r = concentration_experiment(HardcoreParams::uniform(30, 1.0), cycle_graph(30), "count", 2000, 4);
  const auto csv = r.to_csv();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Diagnostics, FactoryCostWithoutInteraction) {
  const auto rows = factory_cost_profile({{1.0, 1.0}}, {8}, 20000, 1);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].within_caps);
  EXPECT_LE(rows[0].mean_coins, 1.0);
  EXPECT_NE(cost_rows_to_json(rows).find("\"mean_coins\""), std::string::npos);
}

TEST(Diagnostics, FactoryCostBoundedInDegree) {
  const auto rows = factory_cost_profile({{1.0, 8.0 / 9.0}}, {8}, 50000, 1);
  const auto big = factory_cost_profile({{1.0, 512.0 / 513.0}}, {512}, 50000, 1);
  EXPECT_LT(big[0].mean_coins, 2 * rows[0].mean_coins);
}

TEST(Diagnostics, AcceptanceRegistry) {
  EXPECT_EQ(acceptance_criterion_count(), 12);
  AcceptanceConfig cfg;
  cfg.only = {12};
  const auto a = run_acceptance_suite(cfg);
  const auto b = run_acceptance_suite(cfg);
  ASSERT_EQ(a.results.size(), 1u);
  EXPECT_EQ(a.results[0].line(false), b.results[0].line(false));
}

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "spinchain/chains.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/oracle.hpp"

using namespace spinchain;

namespace {

// Largest |empirical - exact| over masks after `runs` independent draws.
template <class Draw>
double max_deviation(const DenseDistribution& mu, int runs, Draw&& draw) {
  std::vector<double> freq(mu.weights.size(), 0.0);
  for (int r = 0; r < runs; ++r) freq[draw(r).to_mask()] += 1.0 / runs;
  double worst = 0;
  for (std::size_t s = 0; s < freq.size(); ++s) worst = std::max(worst, std::fabs(freq[s] - mu.weights[s]));
  return worst;
}

}  // namespace

TEST(Chains, SiteUpdateHardcore) {
  const Graph g = path_graph(3);
  const Model m = HardcoreParams::uniform(3, 1.0);
  SiteUpdater up(m, g);
  Rng rng(1);
  SpinConfig empty(3);
  int hits = 0;
  const int runs = 100000;
  for (int t = 0; t < runs; ++t) hits += up.draw(empty, 1, rng);
  EXPECT_NEAR(hits / double(runs), 0.5, 4 * std::sqrt(0.25 / runs));
  SpinConfig blocked(3);
  blocked.set(0, true);
  for (int t = 0; t < 1000; ++t) EXPECT_FALSE(up.draw(blocked, 1, rng));
}

TEST(Chains, UpdatePathNames) {
  EXPECT_EQ(parse_update_path("naive"), UpdatePath::naive);
  EXPECT_EQ(parse_update_path("factory"), UpdatePath::factory);
  EXPECT_EQ(parse_update_path("auto"), UpdatePath::automatic);
  EXPECT_THROW(parse_update_path("fast"), DomainError);
}

TEST(Chains, AutoPathLogsSelection) {
  const Graph g = star_graph(64);
  const SiteUpdater inside(Model{TwoSpinParams{0.99, 0.99, 1.0}}, g, UpdatePath::automatic);
  EXPECT_TRUE(inside.factory_everywhere());
  const SiteUpdater outside(Model{TwoSpinParams{0.5, 0.5, 1.0}}, g, UpdatePath::automatic);
  EXPECT_FALSE(outside.factory_everywhere());
  EXPECT_FALSE(outside.describe().empty());
}

TEST(Chains, ScanOnOneVertexIsOneUpdate) {
  const Graph g = Graph::from_edges(1, std::vector<Edge>{});
  const Model m = HardcoreParams::uniform(1, 3.0);
  Rng a(5), b(5);
  SpinConfig x(1), y(1);
  const auto order = identity_order(1);
  for (int t = 0; t < 200; ++t) {
    systematic_scan_pass(m, g, x, order, a);
    SiteUpdater up(m, g);
    up.update(y, 0, b);
    ASSERT_EQ(x, y);
  }
}

TEST(Chains, GlauberReachesExactLaw) {
  const Graph g = cycle_graph(4);
  const Model m = HardcoreParams::uniform(4, 1.5);
  const auto mu = enumerate_model(m, g);
  const double dev = max_deviation(mu, 40000, [&](int r) {
    Rng rng(derive_seed(21, r));
    SpinConfig c(4);
    for (int t = 0; t < 100; ++t) glauber_step(m, g, c, rng);
    return c;
  });
  EXPECT_LT(dev, 0.015);
}

TEST(Chains, BalancedIsolatedVertex) {
  const Graph g = Graph::from_edges(1, std::vector<Edge>{});
  const Model m = HardcoreParams::uniform(1, 1.0);
  SiteUpdater up(m, g);
  auto state = make_balanced_state(g, SpinConfig(1), 2.0);
  Rng rng(3);
  std::vector<Vertex> log;
  for (int t = 0; t < 50; ++t) balanced_glauber_step(up, state, rng, &log);
  EXPECT_EQ(state.forced_updates, 0u);
  EXPECT_EQ(state.debt[0], 0u);
  EXPECT_EQ(log.size(), 50u);
}

TEST(Chains, BalancedDebtStaysBounded) {
  const Graph g = star_graph(10);
  const Model m = HardcoreParams::uniform(11, 1.0);
  SiteUpdater up(m, g);
  for (double K : {1.5, 2.0, 4.0}) {
    auto state = make_balanced_state(g, SpinConfig(11), K);
    EXPECT_EQ(state.threshold, static_cast<std::uint64_t>(std::floor(K * 10)));
    Rng rng(4);
    for (int t = 0; t < 5000; ++t) {
      balanced_glauber_step(up, state, rng);
      for (auto d : state.debt) ASSERT_LE(d, state.threshold);
    }
    EXPECT_GT(state.forced_updates, 0u);
    EXPECT_EQ(state.update_log_len(), state.public_steps + state.forced_updates);
  }
}

TEST(Chains, FieldFromEmptyDrawsTiltedLaw) {
  // From the empty configuration every site is in S, so the output is exactly theta * mu.
  const Graph g = path_graph(4);
  const Model m = HardcoreParams::uniform(4, 2.0);
  const double theta = 0.3;
  const auto target = enumerate_model(tilted(m, theta), g);
  FieldDynConfig fd;
  fd.theta = theta;
  fd.resampler = Resampler::exact;
  const double dev = max_deviation(target, 40000, [&](int r) {
    Rng rng(derive_seed(8, r));
    SpinConfig c(4);
    field_dynamics_step(m, g, c, fd, rng);
    return c;
  });
  EXPECT_LT(dev, 0.01);
}

TEST(Chains, FieldDynamicsPreservesLaw) {
  const Graph g = cycle_graph(5);
  const Model m = HardcoreParams::uniform(5, 1.0);
  const auto mu = enumerate_model(m, g);
  FieldDynConfig fd;
  fd.theta = 0.4;
  fd.resampler = Resampler::exact;
  const double dev = max_deviation(mu, 40000, [&](int r) {
    Rng rng(derive_seed(9, r));
    SpinConfig c(5);
    for (int t = 0; t < 30; ++t) field_dynamics_step(m, g, c, fd, rng);
    return c;
  });
  EXPECT_LT(dev, 0.012);
}

TEST(Chains, InterleavedZeroRoundsIsIdentity) {
  const Graph g = cycle_graph(6);
  const Model m = HardcoreParams::uniform(6, 1.0);
  Rng rng(2);
  SpinConfig start(6);
  start.set(0, true);
  start.set(3, true);
  EXPECT_EQ(interleaved_sampler(m, g, start, 0.1, 10, 0, rng), start);
}

TEST(Chains, DefaultTheta) {
  const Graph g = cycle_graph(6);
  EXPECT_DOUBLE_EQ(default_theta(HardcoreParams::uniform(6, 1.0), g), 0.1);
  EXPECT_GT(default_theta(TwoSpinParams{0.8, 0.8, 1.0}, g), 0.0);
}

TEST(Chains, SpecParsing) {
  const auto s = ChainSpec::parse("interleaved:theta=0.1,m=auto");
  EXPECT_EQ(s.name, "interleaved");
  EXPECT_DOUBLE_EQ(s.number("theta", 0), 0.1);
  EXPECT_EQ(s.text("m", ""), "auto");
  EXPECT_EQ(ChainSpec::parse("balanced-glauber:K=3").name, "balanced");
  EXPECT_DOUBLE_EQ(ChainSpec::parse("balanced:K=3").number("K", 2), 3.0);
  EXPECT_THROW(ChainSpec::parse("metropolis"), DomainError);
  EXPECT_THROW(ChainSpec::parse("glauber:K=2"), DomainError);
  EXPECT_THROW(ChainSpec::parse("balanced:K"), DomainError);
}

TEST(Chains, ScheduleDeterministic) {
  Rng graph_rng(1);
  const Graph g = generate_random_regular(30, 3, graph_rng);
  const Model m = TwoSpinParams{0.8, 0.8, 1.0};
  for (const char* chain : {"glauber", "scan", "balanced:K=2", "field", "interleaved:theta=0.1,m=20"}) {
    ScheduleOptions opts;
    opts.steps = 40;
    opts.emit_config = true;
    Rng a(77), b(77);
    const auto x = run_schedule(ChainSpec::parse(chain), m, g, SpinConfig(30), a, opts);
    const auto y = run_schedule(ChainSpec::parse(chain), m, g, SpinConfig(30), b, opts);
    ASSERT_EQ(x.trace.size(), 40u) << chain;
    for (std::size_t i = 0; i < x.trace.size(); ++i) {
      EXPECT_EQ(x.trace[i].config_hash, y.trace[i].config_hash) << chain;
      EXPECT_EQ(x.trace[i].config_hex, y.trace[i].config_hex) << chain;
    }
    EXPECT_EQ(x.final_config, y.final_config) << chain;
  }
}

TEST(Chains, ScheduleStrideAndTraceJson) {
  const Graph g = cycle_graph(8);
  const Model m = HardcoreParams::uniform(8, 1.0);
  ScheduleOptions opts;
  opts.steps = 100;
  opts.stride = 10;
  Rng rng(1);
  const auto res = run_schedule(ChainSpec::parse("glauber"), m, g, SpinConfig(8), rng, opts);
  ASSERT_EQ(res.trace.size(), 10u);
  EXPECT_EQ(res.trace.front().step, 10u);
  const auto json = res.trace.front().to_json();
  EXPECT_NE(json.find("\"occupied_count\""), std::string::npos);
  EXPECT_NE(json.find("\"config_hash\""), std::string::npos);
}

TEST(Chains, ScheduleRejectsBadStart) {
  const Graph g = cycle_graph(8);
  Rng rng(1);
  ScheduleOptions opts;
  opts.steps = 1;
  EXPECT_THROW(run_schedule(ChainSpec::parse("glauber"), HardcoreParams::uniform(8, 1.0), g, SpinConfig(7), rng, opts),
               DomainError);
}

#include <gtest/gtest.h>

#include <cmath>

#include "spinchain/errors.hpp"
#include "spinchain/factory.hpp"
#include "spinchain/graph.hpp"
#include "spinchain/models.hpp"

using namespace spinchain;

namespace {

constexpr int kRuns = 100000;

double four_sigma(double p) { return 4 * std::sqrt(p * (1 - p) / kRuns); }

template <class F>
double frequency(F&& draw) {
  int hits = 0;
  for (int t = 0; t < kRuns; ++t) hits += draw() ? 1 : 0;
  return hits / double(kRuns);
}

}  // namespace

TEST(Factory, NeighborCoinBias) {
  const Graph g = star_graph(6);
  Rng rng(1);
  SpinConfig plus(7, true), minus(7, false);
  NeighborCoin all_plus(g, 0, plus), all_minus(g, 0, minus);
  EXPECT_NEAR(frequency([&] { return all_plus.draw(rng); }), 0.75, four_sigma(0.75));
  EXPECT_NEAR(frequency([&] { return all_minus.draw(rng); }), 0.25, four_sigma(0.25));
  EXPECT_EQ(all_plus.consumed(), std::uint64_t(kRuns));
}

TEST(Factory, NeighborCoinIsolated) {
  const Graph g = Graph::from_edges(1, std::vector<Edge>{});
  SpinConfig c(1);
  EXPECT_THROW(NeighborCoin(g, 0, c), GraphError);
}

TEST(Factory, ExpZeroRate) {
  Rng rng(2);
  BiasedCoin coin(0.5);
  for (int t = 0; t < 1000; ++t) EXPECT_TRUE(exp_factory(0.0, coin, rng));
  EXPECT_EQ(coin.consumed(), 0u);
}

TEST(Factory, ExpHalfCoin) {
  Rng rng(3);
  BiasedCoin coin(0.5);
  const ExpFactory f(-1.0);
  const double p = 0.60653065971263342;  // e^{-1/2}
  EXPECT_NEAR(frequency([&] { return f(coin, rng); }), p, four_sigma(p));
  // Expected coins are at most the rate.
  EXPECT_LE(coin.consumed() / double(kRuns), 1.0 + 0.02);
}

TEST(Factory, ExpAlwaysHeads) {
  Rng rng(4);
  BiasedCoin coin(1.0);
  const double p = 0.13533528323661269;  // e^{-2}
  EXPECT_NEAR(frequency([&] { return exp_factory(-2.0, coin, rng); }), p, four_sigma(p));
}

TEST(Factory, ExpRejectsPositiveRate) { EXPECT_THROW(ExpFactory(0.5), DomainError); }

TEST(Factory, LogisticAlwaysHeads) {
  Rng rng(5);
  BiasedCoin coin(1.0);
  EXPECT_NEAR(frequency([&] { return logistic_factory(1.0, coin, rng); }), 0.5, four_sigma(0.5));
}

TEST(Factory, LogisticAlwaysTails) {
  Rng rng(6);
  BiasedCoin coin(0.0);
  for (int t = 0; t < 1000; ++t) EXPECT_FALSE(logistic_factory(3.0, coin, rng));
}

TEST(Factory, LogisticHalfCoin) {
  Rng rng(7);
  BiasedCoin coin(0.5);
  EXPECT_NEAR(frequency([&] { return logistic_factory(2.0, coin, rng); }), 0.5, four_sigma(0.5));
}

TEST(Factory, LogisticRejectsBadMultiplier) {
  Rng rng(8);
  BiasedCoin coin(0.5);
  EXPECT_THROW(logistic_factory(0.0, coin, rng), DomainError);
  EXPECT_THROW(logistic_factory(INFINITY, coin, rng), DomainError);
}

TEST(Factory, IsingNoInteractionBypassesNeighbors) {
  const TwoSpinParams p{1.0, 1.0, 0.6};
  const auto plan = plan_fast_ising(p, 4, {});
  EXPECT_TRUE(plan.bypass);
  const Graph g = star_graph(4);
  Rng rng(9);
  SpinConfig c(5, true);
  FactoryStats stats;
  const double target = 0.6 / 1.6;
  EXPECT_NEAR(frequency([&] { return fast_ising_update(plan, p, g, 0, c, rng, &stats); }), target,
              four_sigma(target));
  EXPECT_EQ(stats.total_coins, 0u);
}

TEST(Factory, IsingMatchesConditional) {
  // Center of a star with D = 6; every count of minus leaves.
  const std::size_t D = 6;
  const Graph g = star_graph(D);
  for (const TwoSpinParams p : {TwoSpinParams{0.7, 0.7, 1.0}, TwoSpinParams{1.3, 1.3, 0.5}}) {
    const auto plan = plan_fast_ising(p, D, {});
    ASSERT_TRUE(plan.within_caps);
    for (std::size_t s = 0; s <= D; ++s) {
      SpinConfig c(D + 1, true);
      for (Vertex v = 1; v <= s; ++v) c.set(v, false);
      Rng rng(100 + s);
      const double target = two_spin_conditional(p, D, s);
      EXPECT_NEAR(frequency([&] { return fast_ising_update(plan, p, g, 0, c, rng); }), target, four_sigma(target))
          << p.beta << " s=" << s;
    }
  }
}

TEST(Factory, IsingOutsideCapsThrows) {
  const std::size_t D = 64;
  const TwoSpinParams p{0.5, 0.5, 1.0};
  const auto plan = plan_fast_ising(p, D, {});
  EXPECT_FALSE(plan.within_caps);
  const Graph g = star_graph(D);
  SpinConfig c(D + 1);
  Rng rng(10);
  EXPECT_THROW(fast_ising_update(plan, p, g, 0, c, rng), CapExceeded);
}

TEST(Factory, IsingPlanNeedsNormalizedField) {
  EXPECT_THROW(plan_fast_ising(TwoSpinParams{0.9, 0.9, 2.0}, 3, {}), DomainError);
}

TEST(Factory, HardcoreZeroFugacity) {
  const Graph g = path_graph(3);
  SpinConfig c(3);
  Rng rng(12);
  for (int t = 0; t < 1000; ++t) EXPECT_FALSE(fast_hardcore_update(0.0, g, 1, c, rng));
}

TEST(Factory, HardcoreLazyMatchesConditional) {
  const Graph g = path_graph(3);
  Rng rng(13);
  SpinConfig empty(3), blocked(3);
  blocked.set(2, true);
  FactoryStats stats;
  EXPECT_NEAR(frequency([&] { return fast_hardcore_update(3.0, g, 1, empty, rng, &stats); }), 0.75,
              four_sigma(0.75));
  for (int t = 0; t < 1000; ++t) EXPECT_FALSE(fast_hardcore_update(3.0, g, 1, blocked, rng));
  // Neighbors are read only on the r = 1 branch: 2 reads with probability 3/4.
  EXPECT_NEAR(stats.mean_coins(), 1.5, 0.02);
}

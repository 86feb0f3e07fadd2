#include <gtest/gtest.h>

#include <sstream>

#include "spinchain/errors.hpp"
#include "spinchain/graph.hpp"
#include "spinchain/models.hpp"
#include "spinchain/spin_config.hpp"

using namespace spinchain;

TEST(SpinConfig, HexRoundTrip) {
  SpinConfig c(10);
  c.set(0, true);
  c.set(5, true);
  c.set(9, true);
  EXPECT_EQ(c.count(), 3u);
  EXPECT_EQ(SpinConfig::from_hex(c.to_hex(), 10), c);
  EXPECT_EQ(SpinConfig::from_mask(c.to_mask(), 10), c);
  c.flip_all();
  EXPECT_EQ(c.count(), 7u);
}

TEST(SpinConfig, IndependentSet) {
  const Graph g = path_graph(3);
  SpinConfig c(3);
  c.set(0, true);
  c.set(2, true);
  EXPECT_TRUE(is_independent_set(g, c));
  c.set(1, true);
  EXPECT_FALSE(is_independent_set(g, c));
}

TEST(Models, HardcoreConditional) {
  const Graph g = path_graph(3);
  SpinConfig empty(3);
  EXPECT_DOUBLE_EQ(hardcore_conditional(HardcoreParams::uniform(3, 1.0), g, empty, 1), 0.5);
  EXPECT_DOUBLE_EQ(hardcore_conditional(HardcoreParams::uniform(3, 4.0), g, empty, 1), 0.8);
  SpinConfig one = empty;
  one.set(0, true);
  EXPECT_EQ(hardcore_conditional(HardcoreParams::uniform(3, 4.0), g, one, 1), 0.0);
  EXPECT_EQ(hardcore_conditional(HardcoreParams::uniform(3, 123.0), g, one, 1), 0.0);
}

TEST(Models, TwoSpinConditional) {
  EXPECT_DOUBLE_EQ(two_spin_conditional(TwoSpinParams{1, 1, 1}, 3, 1), 0.5);
  EXPECT_DOUBLE_EQ(two_spin_conditional(TwoSpinParams{1, 1, 1}, 0, 0), 0.5);
  EXPECT_DOUBLE_EQ(two_spin_conditional(TwoSpinParams{0.5, 0.5, 1}, 2, 0), 0.2);
  EXPECT_DOUBLE_EQ(two_spin_conditional(TwoSpinParams{0.5, 2, 1}, 1, 1), 1.0 / 3.0);
}

TEST(Models, NormalizeFlipsIsingField) {
  const auto p = normalize(TwoSpinParams{0.7, 0.7, 2.0});
  EXPECT_TRUE(p.flipped);
  EXPECT_DOUBLE_EQ(p.lambda, 0.5);
  const auto q = normalize(TwoSpinParams{0.5, 2.0, 1.0});
  EXPECT_FALSE(q.flipped);
  const auto r = normalize(TwoSpinParams{2.0, 0.5, 1.0});
  EXPECT_TRUE(r.flipped);
  EXPECT_DOUBLE_EQ(r.beta, 0.5);
  EXPECT_DOUBLE_EQ(r.gamma, 2.0);
}

TEST(Models, ValidateRejectsBadParameters) {
  const Graph g = path_graph(3);
  EXPECT_THROW(validate(Model{HardcoreParams::uniform(3, -1.0)}, g), DomainError);
  EXPECT_THROW(validate(Model{HardcoreParams::uniform(2, 1.0)}, g), DomainError);
  EXPECT_THROW(validate(Model{HardcoreParams::uniform(3, 0.0)}, g), DomainError);
  EXPECT_THROW(validate(Model{TwoSpinParams{1.0, 0.0, 1.0}}, g), DomainError);
  // beta = 0 is a hard constraint and stays valid.
  EXPECT_NO_THROW(validate(Model{TwoSpinParams{0.0, 1.0, 1.0}}, g));
}

TEST(Models, LogWeight) {
  const Graph g = path_graph(2);
  SpinConfig both(2, true);
  EXPECT_EQ(log_weight(Model{HardcoreParams::uniform(2, 2.0)}, g, both), -std::numeric_limits<double>::infinity());
  SpinConfig one(2);
  one.set(0, true);
  EXPECT_NEAR(log_weight(Model{HardcoreParams::uniform(2, 2.0)}, g, one), std::log(2.0), 1e-15);
  // beta^{#++} gamma^{#--} lambda^{#+}
  EXPECT_NEAR(log_weight(Model{TwoSpinParams{0.5, 0.25, 3.0}}, g, both), std::log(0.5 * 9), 1e-15);
  EXPECT_NEAR(log_weight(Model{TwoSpinParams{0.5, 0.25, 3.0}}, g, SpinConfig(2)), std::log(0.25), 1e-15);
}

TEST(Models, KeyValueConfig) {
  std::istringstream in("# ising\nmodel = ising\nbeta=0.8\n\nlambda = 0.5\n");
  const auto kv = parse_key_value(in);
  const auto spec = model_spec_from_map(kv);
  EXPECT_EQ(spec.kind, "ising");
  EXPECT_DOUBLE_EQ(spec.beta, 0.8);
  EXPECT_DOUBLE_EQ(spec.lambda, 0.5);
  const Model m = build_model(spec, cycle_graph(4));
  const auto& p = std::get<TwoSpinParams>(m);
  EXPECT_DOUBLE_EQ(p.gamma, 0.8);
}

TEST(Models, KeyValueRejectsUnknownKey) {
  std::istringstream in("model=hardcore\nfugacity=2\n");
  EXPECT_THROW(model_spec_from_map(parse_key_value(in)), ParseError);
}

TEST(Models, ToExternalUndoesFlip) {
  const Graph g = path_graph(3);
  const Model m = build_model(model_spec_from_map({{"model", "ising"}, {"beta", "0.7"}, {"lambda", "3"}}), g);
  ASSERT_TRUE(std::get<TwoSpinParams>(m).flipped);
  EXPECT_EQ(to_external(m, SpinConfig(3)).count(), 3u);
}

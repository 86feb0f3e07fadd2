#include <benchmark/benchmark.h>

#include "spinchain/chains.hpp"
#include "spinchain/oracle.hpp"

using namespace spinchain;

namespace {

// Ising update at the center of a star with beta = D/(D+1), lambda = 1.
void star_update(benchmark::State& state, UpdatePath path) {
  const auto D = static_cast<std::size_t>(state.range(0));
  const Graph g = star_graph(D);
  const double d = static_cast<double>(D);
  const Model m = TwoSpinParams{d / (d + 1), d / (d + 1), 1.0};
  SiteUpdater up(m, g, path);
  Rng rng(1);
  SpinConfig config(D + 1);
  for (Vertex v = 1; v <= D; ++v) config.set(v, bernoulli(rng, 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(up.draw(config, 0, rng));
  state.counters["mean_coins"] = up.stats().mean_coins();
}

void BM_StarUpdateNaive(benchmark::State& state) { star_update(state, UpdatePath::naive); }
void BM_StarUpdateFactory(benchmark::State& state) { star_update(state, UpdatePath::factory); }

BENCHMARK(BM_StarUpdateNaive)->RangeMultiplier(8)->Range(8, 512);
BENCHMARK(BM_StarUpdateFactory)->RangeMultiplier(8)->Range(8, 512);

void BM_GlauberStepCubic(benchmark::State& state) {
  Rng rng(2);
  const Graph g = generate_random_regular(static_cast<std::size_t>(state.range(0)), 3, rng);
  const Model m = HardcoreParams::uniform(g.num_vertices(), 1.0);
  SiteUpdater up(m, g, UpdatePath::automatic);
  SpinConfig config(g.num_vertices());
  for (auto _ : state) glauber_step(up, config, rng);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GlauberStepCubic)->Arg(1000)->Arg(100000);

void BM_BalancedStepCubic(benchmark::State& state) {
  Rng rng(3);
  const Graph g = generate_random_regular(static_cast<std::size_t>(state.range(0)), 3, rng);
  const Model m = HardcoreParams::uniform(g.num_vertices(), 1.0);
  SiteUpdater up(m, g, UpdatePath::automatic);
  auto balanced = make_balanced_state(g, SpinConfig(g.num_vertices()), 2.0);
  for (auto _ : state) balanced_glauber_step(up, balanced, rng);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BalancedStepCubic)->Arg(1000)->Arg(100000);

void BM_EnumerateHardcore(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Graph g = cycle_graph(n);
  const Model m = HardcoreParams::uniform(n, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_model(m, g, 20).weights.data());
}
BENCHMARK(BM_EnumerateHardcore)->DenseRange(10, 18, 4);

void BM_FieldDynamicsMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto mu = enumerate_model(HardcoreParams::uniform(n, 1.0), cycle_graph(n));
  for (auto _ : state) benchmark::DoNotOptimize(field_dynamics_matrix(mu, 0.2).P.data());
}
BENCHMARK(BM_FieldDynamicsMatrix)->Arg(6)->Arg(8);

}  // namespace
BENCHMARK_MAIN();

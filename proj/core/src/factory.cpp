#include "spinchain/factory.hpp"

#include <json.hpp>

namespace spinchain {

void FactoryStats::merge(const FactoryStats& other) {
  updates += other.updates;
  total_coins += other.total_coins;
  max_coins = std::max(max_coins, other.max_coins);
}

std::string FactoryStats::to_json() const {
  nlohmann::ordered_json j;
  j["mean_coins"] = mean_coins();
  j["max_coins"] = max_coins;
  j["updates"] = updates;
  return j.dump();
}

bool neighbor_coin(const Graph& g, Vertex v, const SpinConfig& config, Rng& rng) {
  NeighborCoin coin(g, v, config);
  return coin.draw(rng);
}

IsingFactoryPlan plan_fast_ising(const TwoSpinParams& p, std::size_t degree, const FactoryCaps& caps) {
  if (!p.is_ising()) throw DomainError("fast_ising_update needs an Ising model (beta == gamma)");
  if (p.lambda > 1) throw DomainError("fast_ising_update needs lambda <= 1; normalize by a spin flip first");
  if (!(p.beta > 0)) throw DomainError("fast_ising_update needs beta > 0");
  IsingFactoryPlan plan;
  double b = p.beta;
  if (b > 1) {
    b = 1 / b;
    plan.count_minus = true;
  }
  const double d = static_cast<double>(degree);
  plan.c1 = std::log(p.lambda) - 2 * d * std::log(b);
  plan.c2 = 4 * d * std::log(b);
  plan.bypass = degree == 0 || b == 1;
  plan.within_caps = plan.bypass || (plan.c1 <= caps.max_c1() && -plan.c2 <= caps.max_c2());
  if (plan.bypass) {
    plan.r = p.lambda / (1 + p.lambda);
  } else {
    const double M = std::exp(plan.c1);
    plan.r = M / (1 + M);
    plan.exp = ExpFactory(plan.c2);
  }
  return plan;
}

bool fast_ising_update(const IsingFactoryPlan& plan, const TwoSpinParams& p, const Graph& g, Vertex v,
                       const SpinConfig& config, Rng& rng, FactoryStats* stats) {
  (void)p;
  if (plan.bypass) {
    if (stats) stats->record(0);
    return bernoulli(rng, plan.r);
  }
  if (!plan.within_caps) {
    throw CapExceeded("fast_ising_update: c1 = " + std::to_string(plan.c1) + ", |c2| = " +
                      std::to_string(-plan.c2) + " exceed the configured caps");
  }
  NeighborCoin coin(g, v, config, plan.count_minus);
  ExpCoin<NeighborCoin> sub(plan.exp, coin);
  const bool out = logistic_factory_r(plan.r, sub, rng);
  if (stats) stats->record(coin.consumed());
  return out;
}

bool fast_ising_update(const TwoSpinParams& p, const Graph& g, Vertex v, const SpinConfig& config, Rng& rng,
                       const FactoryCaps& caps, FactoryStats* stats) {
  return fast_ising_update(plan_fast_ising(p, g.degree(v), caps), p, g, v, config, rng, stats);
}

}  // namespace spinchain

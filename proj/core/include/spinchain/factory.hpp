#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include "spinchain/errors.hpp"
#include "spinchain/graph.hpp"
#include "spinchain/models.hpp"
#include "spinchain/rng.hpp"
#include "spinchain/spin_config.hpp"

namespace spinchain {

// A stream of i.i.d. bits with a bias unknown to the consumer.
template <class C>
concept CoinSource = requires(C& c, Rng& rng) {
  { c.draw(rng) } -> std::convertible_to<bool>;
  { c.consumed() } -> std::convertible_to<std::uint64_t>;
};

struct FactoryStats {
  std::uint64_t updates = 0;
  std::uint64_t total_coins = 0;
  std::uint64_t max_coins = 0;

  void record(std::uint64_t coins) {
    ++updates;
    total_coins += coins;
    if (coins > max_coins) max_coins = coins;
  }
  void merge(const FactoryStats& other);
  double mean_coins() const { return updates ? static_cast<double>(total_coins) / static_cast<double>(updates) : 0.0; }
  std::string to_json() const;
};

// Cap on the logistic multiplier and exponential rate: c1 <= 2 alpha, |c2| <= 4 alpha.
// With lambda <= 1 both hold whenever beta >= D/(D + alpha).
struct FactoryCaps {
  double alpha = 8.0;
  double max_c1() const { return 2 * alpha; }
  double max_c2() const { return 4 * alpha; }
};

class BiasedCoin {
 public:
  explicit BiasedCoin(double p) : p_(p) {}
  bool draw(Rng& rng) {
    ++consumed_;
    return bernoulli(rng, p_);
  }
  std::uint64_t consumed() const { return consumed_; }

 private:
  double p_;
  std::uint64_t consumed_ = 0;
};

// Half the time a fair bit, otherwise whether a uniform neighbor of v is +.
// Bias 1/4 + #plus/(2 deg v); with count_minus the roles of the spins are swapped.
class NeighborCoin {
 public:
  NeighborCoin(const Graph& g, Vertex v, const SpinConfig& config, bool count_minus = false)
      : nb_(g.neighbors(v)), config_(config), count_minus_(count_minus) {
    if (nb_.empty()) throw GraphError("neighbor coin on isolated vertex " + std::to_string(v));
  }
  bool draw(Rng& rng) {
    ++consumed_;
    if (bits_.next(rng)) return bits_.next(rng);
    const Vertex u = nb_[uniform_below(rng, nb_.size())];
    return config_.test(u) != count_minus_;
  }
  std::uint64_t consumed() const { return consumed_; }

 private:
  std::span<const Vertex> nb_;
  const SpinConfig& config_;
  bool count_minus_;
  BitStream bits_;
  std::uint64_t consumed_ = 0;
};

bool neighbor_coin(const Graph& g, Vertex v, const SpinConfig& config, Rng& rng);

// Ber(exp(-a p)) from Ber(p) coins: Poisson(a) many coin flips, output 0 on the first head.
// The Poisson count is generated by inversion one arrival at a time against a precomputed
// CDF table, so the expected number of flips is at most a.
class ExpFactory {
 public:
  explicit ExpFactory(double c2) {
    if (!(c2 <= 0)) throw DomainError("exp_factory needs c2 <= 0");
    rate_ = -c2;
    if (rate_ == 0) return;
    // Past rate + 12 sqrt(rate) + 60 the remaining Poisson mass is below double resolution.
    const auto guard = static_cast<std::size_t>(rate_ + 12 * std::sqrt(rate_) + 60);
    double term = std::exp(-rate_), cdf = term;
    cdf_.reserve(guard);
    for (std::size_t k = 1; k <= guard; ++k) {
      cdf_.push_back(cdf);
      term *= rate_ / static_cast<double>(k);
      cdf += term;
    }
  }

  template <CoinSource C>
  bool operator()(C& coin, Rng& rng) const {
    if (rate_ == 0) return true;
    const double u = uniform01(rng);
    for (std::size_t k = 0; k < cdf_.size() && u >= cdf_[k]; ++k) {
      if (coin.draw(rng)) return false;
    }
    return true;
  }

  double rate() const { return rate_; }

 private:
  double rate_ = 0;
  std::vector<double> cdf_;  // P(Poisson(rate) <= k)
};

template <CoinSource C>
bool exp_factory(double c2, C& coin, Rng& rng) {
  return ExpFactory(c2)(coin, rng);
}

// Presents an exponential factory fed by `coin` as a coin of bias exp(c2 p).
template <CoinSource C>
class ExpCoin {
 public:
  ExpCoin(const ExpFactory& f, C& coin) : f_(f), coin_(coin) {}
  bool draw(Rng& rng) { return f_(coin_, rng); }
  std::uint64_t consumed() const { return coin_.consumed(); }

 private:
  const ExpFactory& f_;
  C& coin_;
};

// Ber(Mq/(1+Mq)) from Ber(q) coins: repeat {with prob 1/(1+M) output 0; else a q-head outputs 1}.
// Expected subcoin draws are at most M.
template <CoinSource C>
bool logistic_factory_r(double r, C& subcoin, Rng& rng) {
  for (;;) {
    if (!bernoulli(rng, r)) return false;
    if (subcoin.draw(rng)) return true;
  }
}

template <CoinSource C>
bool logistic_factory(double M, C& subcoin, Rng& rng) {
  if (!(M > 0) || !std::isfinite(M)) throw DomainError("logistic_factory needs finite M > 0");
  return logistic_factory_r(M / (1 + M), subcoin, rng);
}

// Everything about a factory-path Ising update that depends only on (params, degree).
struct IsingFactoryPlan {
  bool within_caps = true;
  bool bypass = false;  // degree 0 or beta == 1: no neighbor needed
  bool count_minus = false;  // ferromagnetic: flip the neighbor roles
  double c1 = 0, c2 = 0;
  double r = 0;  // M/(1+M) with M = exp(c1)
  ExpFactory exp{0.0};
};

// Throws DomainError for non-Ising or lambda > 1 (normalize first).
IsingFactoryPlan plan_fast_ising(const TwoSpinParams& p, std::size_t degree, const FactoryCaps& caps);

// Exact Ising conditional at v through the coin composition. Throws CapExceeded when the
// plan is outside the caps; the caller then falls back to the neighbor scan.
bool fast_ising_update(const IsingFactoryPlan& plan, const TwoSpinParams& p, const Graph& g, Vertex v,
                       const SpinConfig& config, Rng& rng, FactoryStats* stats = nullptr);
bool fast_ising_update(const TwoSpinParams& p, const Graph& g, Vertex v, const SpinConfig& config, Rng& rng,
                       const FactoryCaps& caps = {}, FactoryStats* stats = nullptr);

// r ~ Ber(lambda_v/(1+lambda_v)); neighbors are read only when r = 1.
inline bool fast_hardcore_update(double lambda_v, const Graph& g, Vertex v, const SpinConfig& config, Rng& rng,
                                 FactoryStats* stats = nullptr) {
  if (!bernoulli(rng, lambda_v / (1 + lambda_v))) {
    if (stats) stats->record(0);
    return false;
  }
  std::uint64_t reads = 0;
  for (Vertex u : g.neighbors(v)) {
    ++reads;
    if (config.test(u)) {
      if (stats) stats->record(reads);
      return false;
    }
  }
  if (stats) stats->record(reads);
  return true;
}

inline bool fast_hardcore_update(const HardcoreParams& p, const Graph& g, Vertex v, const SpinConfig& config,
                                 Rng& rng, FactoryStats* stats = nullptr) {
  return fast_hardcore_update(p.fugacity[v], g, v, config, rng, stats);
}

}  // namespace spinchain

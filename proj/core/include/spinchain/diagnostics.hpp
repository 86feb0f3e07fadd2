#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spinchain/chains.hpp"
#include "spinchain/graph.hpp"
#include "spinchain/models.hpp"
#include "spinchain/oracle.hpp"

namespace spinchain {

// Worker threads for ensembles: SPINCHAIN_THREADS if set, else the hardware count, capped by `work`.
unsigned ensemble_threads(std::size_t work);

enum class StartKind { empty, post_scan };

struct MixingOptions {
  StartKind start = StartKind::post_scan;
  UpdatePath path = UpdatePath::automatic;
  double eps = 0.05;
  std::size_t bootstrap = 200;
  // Plug-in TV of `ensemble` exact draws from mu, averaged over this many repeats.
  std::size_t bias_repeats = 5;
};

struct MixingReport {
  std::string chain;
  std::uint64_t T = 0;
  std::size_t ensemble = 0;
  double tv_estimate = 0;
  std::string reference = "exact-oracle";
  double mc_error = 0;
  double bias_allowance = 0;
  std::uint64_t forced_updates = 0;  // summed over the ensemble (balanced chains)
  std::uint64_t public_steps = 0;    // summed over the ensemble

  std::string to_json() const;
};

// Plug-in TV between the empirical law of `ensemble` independent chains after T steps and the exact mu.
// Chain c draws from derive_seed(seed, c); the result does not depend on the thread count.
MixingReport estimate_tv(const Model& m, const Graph& g, const ChainSpec& chain, std::uint64_t T,
                         std::size_t ensemble, std::uint64_t seed, const MixingOptions& opts = {});

// 1/2 sum |counts/N - mu| over masks, with mu in the same orientation as the counts.
double plug_in_tv(const std::vector<std::uint64_t>& counts, std::span<const double> mu);

struct TailReport {
  std::string function = "count";
  double kappa = 1;
  std::size_t samples = 0;
  std::size_t n = 0;
  double mean = 0;
  double sigma = 0;
  std::vector<double> thresholds;  // 1, 2, 3 sample standard deviations
  std::vector<double> exceedance;  // P(f - mean > t); NaN when no sample reaches the level
  std::optional<double> c_hat;     // from log P vs t^2/(kappa^2 n) on the two largest thresholds
  std::optional<double> c_hat_lambda;

  std::string to_json() const;
  std::string to_csv() const;
};

struct ConcentrationOptions {
  std::uint64_t burn_rounds = 30;  // interleaved sampler rounds before the first sample
  std::uint64_t thin = 0;          // Glauber updates between samples; 0 means n
  UpdatePath path = UpdatePath::automatic;
  double eps = 0.05;
};

// f is "count" (occupied or plus sites, kappa = 1) or "constant".
TailReport concentration_experiment(const Model& m, const Graph& g, const std::string& f, std::size_t samples,
                                    std::uint64_t seed, const ConcentrationOptions& opts = {});

// P(X - n/2 > t) for X ~ Binomial(n, 1/2).
double binomial_upper_tail(std::size_t n, double t);

struct CostRow {
  double lambda = 0;
  double beta = 0;
  std::size_t degree = 0;
  bool within_caps = true;
  double mean_coins = 0;
  std::uint64_t max_coins = 0;
  double ns_factory = 0;
  double ns_naive = 0;
};

// Repeated updates at the center of a star with a fixed random leaf configuration.
// Grid points outside the factory caps are marked and only timed on the naive path.
std::vector<CostRow> factory_cost_profile(const std::vector<std::pair<double, double>>& lambda_beta,
                                          const std::vector<std::size_t>& degrees, std::size_t trials,
                                          std::uint64_t seed, const FactoryCaps& caps = {});
std::string cost_rows_to_json(const std::vector<CostRow>& rows);

struct AcceptanceConfig {
  std::uint64_t seed = 7;
  std::vector<int> only;  // empty runs all criteria
  bool timings = false;   // add wall-clock fields; off keeps reports byte-identical
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string measured;   // JSON object
  std::string tolerance;  // human-readable
  double seconds = 0;
  double limit_seconds = 0;

  std::string to_json(bool timings) const;
  std::string line(bool timings) const;
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;
  bool all_passed() const;
};

AcceptanceReport run_acceptance_suite(const AcceptanceConfig& config);
int acceptance_criterion_count();

// Exact-oracle invariants on small instances (stationarity, reversibility, operator identities,
// data processing, Dirichlet-form bounds). Every check is expected to pass.
std::vector<CriterionResult> run_oracle_suite(std::uint64_t seed);

}  // namespace spinchain

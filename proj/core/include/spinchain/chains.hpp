#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spinchain/factory.hpp"
#include "spinchain/graph.hpp"
#include "spinchain/models.hpp"
#include "spinchain/rng.hpp"
#include "spinchain/spin_config.hpp"

namespace spinchain {

enum class UpdatePath { naive, factory, automatic };

UpdatePath parse_update_path(std::string_view s);
std::string update_path_name(UpdatePath p);

// Resamples a single site from its exact conditional. Built once per (model, graph, path);
// coefficient tables are cached per degree.
class SiteUpdater {
 public:
  SiteUpdater(const Model& model, const Graph& g, UpdatePath path = UpdatePath::naive, FactoryCaps caps = {});

  bool draw(const SpinConfig& config, Vertex v, Rng& rng);
  void update(SpinConfig& config, Vertex v, Rng& rng) { config.set(v, draw(config, v, rng)); }

  const Model& model() const { return model_; }
  const Graph& graph() const { return *g_; }
  // Human-readable account of which update path each part of the graph uses.
  std::string describe() const;
  bool factory_everywhere() const;
  const FactoryStats& stats() const { return stats_; }

 private:
  enum class Kind { hardcore_scan, hardcore_lazy, two_spin_table, two_spin_direct, ising_factory };

  Model model_;
  const Graph* g_;
  Kind kind_;
  UpdatePath path_;
  std::vector<std::size_t> table_offset_;  // by degree, into table_
  std::vector<double> table_;              // P(+ | s minus) for each degree present
  std::vector<IsingFactoryPlan> plans_;    // by degree
  FactoryStats stats_;
};

Model tilted(const Model& m, double theta);

void glauber_step(SiteUpdater& up, SpinConfig& config, Rng& rng);
void glauber_step(const Model& m, const Graph& g, SpinConfig& config, Rng& rng);

void systematic_scan_pass(SiteUpdater& up, SpinConfig& config, std::span<const Vertex> order, Rng& rng);
void systematic_scan_pass(const Model& m, const Graph& g, SpinConfig& config, std::span<const Vertex> order,
                          Rng& rng);

std::vector<Vertex> identity_order(std::size_t n);

struct BalancedState {
  SpinConfig config;
  std::vector<std::uint32_t> debt;
  double K = 2.0;
  // A vertex is forced once its debt exceeds K * max_degree; debts are integers,
  // so the comparison is against floor(K * max_degree).
  std::uint64_t threshold = 0;
  std::uint64_t public_steps = 0;
  std::uint64_t forced_updates = 0;

  std::uint64_t update_log_len() const { return public_steps + forced_updates; }
};

BalancedState make_balanced_state(const Graph& g, SpinConfig start, double K = 2.0);

// One public step: uniform update, neighbor debts +1, own debt reset, then forced updates at the
// smallest-index vertex over threshold until none is. Updated vertices are appended to `log`.
void balanced_glauber_step(SiteUpdater& up, BalancedState& state, Rng& rng, std::vector<Vertex>* log = nullptr);

enum class Resampler { exact, glauber };

struct FieldDynConfig {
  double theta = 0.1;
  Resampler resampler = Resampler::glauber;
  // Inner Glauber steps; 0 means ceil(10 n_S log(n_S T / eps)) with n_S = |S|.
  std::uint64_t m = 0;
  std::uint64_t horizon = 1;  // T in the auto recipe
  double eps = 0.05;
  std::size_t exact_cap = 14;  // largest n for the exact resampler
};

std::uint64_t auto_inner_steps(std::size_t n_s, std::uint64_t horizon, double eps);

// Field dynamics: S holds every empty site and each occupied site with probability theta;
// sigma_S is redrawn from (theta * mu) pinned to the occupied sites outside S.
class FieldDynamics {
 public:
  FieldDynamics(const Model& m, const Graph& g, FieldDynConfig cfg, UpdatePath path = UpdatePath::automatic);

  void step(SpinConfig& config, Rng& rng);
  const FieldDynConfig& config() const { return cfg_; }
  std::uint64_t inner_updates() const { return inner_updates_; }

 private:
  void resample_exact(SpinConfig& config, Rng& rng);
  void resample_glauber(SpinConfig& config, Rng& rng);

  Model tilted_;
  const Graph* g_;
  FieldDynConfig cfg_;
  SiteUpdater inner_;
  std::vector<Vertex> free_;
  std::vector<double> logw_;
  std::uint64_t inner_updates_ = 0;
};

void field_dynamics_step(const Model& m, const Graph& g, SpinConfig& config, const FieldDynConfig& fd, Rng& rng);

// Default theta: 1/10 for hardcore, gap^2/64 for Ising/two-spin.
double default_theta(const Model& m, const Graph& g);

// T rounds of (systematic scan in vertex order, then field dynamics with the Glauber resampler).
class InterleavedSampler {
 public:
  InterleavedSampler(const Model& m, const Graph& g, double theta, std::uint64_t m_inner, std::uint64_t horizon,
                     double eps = 0.05, UpdatePath path = UpdatePath::automatic);
  void round(SpinConfig& config, Rng& rng);
  void run(SpinConfig& config, std::uint64_t rounds, Rng& rng);

 private:
  SiteUpdater scan_;
  FieldDynamics field_;
  std::vector<Vertex> order_;
};

SpinConfig interleaved_sampler(const Model& m, const Graph& g, SpinConfig start, double theta, std::uint64_t m_inner,
                               std::uint64_t T, Rng& rng);

// "name" or "name:key=value,key=value". Names: glauber, scan, balanced (alias balanced-glauber),
// field, interleaved.
struct ChainSpec {
  std::string name;
  std::map<std::string, std::string> params;

  static ChainSpec parse(std::string_view text);
  std::string to_string() const;
  double number(const std::string& key, double fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
};

struct TraceRecord {
  std::uint64_t step = 0;
  std::size_t occupied_count = 0;
  std::uint64_t config_hash = 0;
  std::optional<std::string> config_hex;

  std::string to_json() const;
};

struct ScheduleOptions {
  std::uint64_t steps = 0;
  std::uint64_t stride = 1;
  bool record_trace = true;
  bool emit_config = false;
  UpdatePath path = UpdatePath::automatic;
  double eps = 0.05;
  // Called with the user-facing configuration at every stride.
  std::function<void(std::uint64_t step, const SpinConfig& config)> on_config;
};

struct ScheduleResult {
  SpinConfig final_config;  // user-facing spins
  std::vector<TraceRecord> trace;
  std::uint64_t public_steps = 0;
  std::uint64_t update_log_len = 0;
  std::uint64_t forced_updates = 0;
  FactoryStats stats;
  std::string path_description;
};

// `start` is in the model's stored (normalized) orientation.
ScheduleResult run_schedule(const ChainSpec& spec, const Model& m, const Graph& g, SpinConfig start, Rng& rng,
                            const ScheduleOptions& opts);

}  // namespace spinchain

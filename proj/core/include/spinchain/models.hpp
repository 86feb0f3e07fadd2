#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "spinchain/graph.hpp"
#include "spinchain/spin_config.hpp"

namespace spinchain {

struct HardcoreParams {
  std::vector<double> fugacity;

  static HardcoreParams uniform(std::size_t n, double lambda) { return {std::vector<double>(n, lambda)}; }
  double max_fugacity() const;
};

// mu(sigma) ∝ lambda^{#plus} beta^{#(++ edges)} gamma^{#(-- edges)}. Ising is beta == gamma.
struct TwoSpinParams {
  double beta = 1.0;
  double gamma = 1.0;
  double lambda = 1.0;
  // Set when the stored parameters describe the globally flipped system.
  bool flipped = false;

  bool antiferro() const { return beta * gamma <= 1.0; }
  bool is_ising() const { return beta == gamma; }
};

// Swaps spins so that beta <= gamma, and for Ising so that lambda <= 1.
// Each swap maps (beta, gamma, lambda) to (gamma, beta, 1/lambda) and toggles `flipped`.
TwoSpinParams normalize(TwoSpinParams p);

using Model = std::variant<HardcoreParams, TwoSpinParams>;

void validate(const HardcoreParams& p, std::size_t n);
void validate(const TwoSpinParams& p);
void validate(const Model& m, const Graph& g);

bool is_hardcore(const Model& m);
std::string model_name(const Model& m);

// Maps a configuration of the stored (possibly flipped) system back to user spins.
SpinConfig to_external(const Model& m, SpinConfig config);

// P(v occupied | rest) = lambda_v/(1+lambda_v) when no neighbor is occupied, else 0.
double hardcore_conditional(const HardcoreParams& p, const Graph& g, const SpinConfig& config, Vertex v);

// P(+ | s minus-neighbors out of `degree`) = lambda beta^{d-s} / (gamma^s + lambda beta^{d-s}).
double two_spin_conditional(const TwoSpinParams& p, std::size_t degree, std::size_t minus_neighbors);
double two_spin_conditional(const TwoSpinParams& p, const Graph& g, const SpinConfig& config, Vertex v);

// Conditional probability of bit v under the model with the field at v scaled by field_scale.
double plus_probability(const Model& m, const Graph& g, const SpinConfig& config, Vertex v,
                        double field_scale = 1.0);

// Unnormalized log-mass; -inf for configurations outside the support.
double log_weight(const Model& m, const Graph& g, const SpinConfig& config);

// key=value lines, '#' comments. Keys: model, lambda, beta, gamma, per_site_lambda.
std::map<std::string, std::string> parse_key_value(std::istream& in);

struct ModelSpec {
  std::string kind = "hardcore";  // hardcore | ising | two-spin
  double lambda = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  bool gamma_set = false;
  std::filesystem::path per_site_lambda;
};

ModelSpec model_spec_from_map(const std::map<std::string, std::string>& kv);
Model build_model(const ModelSpec& spec, const Graph& g);

// One fugacity per line (or whitespace separated), in vertex order.
std::vector<double> load_per_site_lambda(const std::filesystem::path& path, std::size_t n);

}  // namespace spinchain

#include "spinchain/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "spinchain/errors.hpp"

namespace spinchain {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ParseError("config: '" + key + "' expects a number, got '" + value + "'");
  }
  if (used != value.size()) throw ParseError("config: trailing characters in value of '" + key + "'");
  return x;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

double HardcoreParams::max_fugacity() const {
  return fugacity.empty() ? 0.0 : *std::max_element(fugacity.begin(), fugacity.end());
}

TwoSpinParams normalize(TwoSpinParams p) {
  if (p.beta > p.gamma) {
    std::swap(p.beta, p.gamma);
    p.lambda = 1.0 / p.lambda;
    p.flipped = !p.flipped;
  }
  if (p.is_ising() && p.lambda > 1.0) {
    p.lambda = 1.0 / p.lambda;
    p.flipped = !p.flipped;
  }
  return p;
}

void validate(const HardcoreParams& p, std::size_t n) {
  if (p.fugacity.size() != n) {
    throw DomainError("hardcore: " + std::to_string(p.fugacity.size()) + " fugacities for " +
                      std::to_string(n) + " vertices");
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!(p.fugacity[v] > 0) || !std::isfinite(p.fugacity[v])) {
      throw DomainError("hardcore: fugacity of vertex " + std::to_string(v) + " must be positive and finite");
    }
  }
}

void validate(const TwoSpinParams& p) {
  if (!(p.beta >= 0) || !std::isfinite(p.beta)) throw DomainError("two-spin: beta must be >= 0 and finite");
  if (!(p.gamma > 0) || !std::isfinite(p.gamma)) throw DomainError("two-spin: gamma must be > 0 and finite");
  if (!(p.lambda > 0) || !std::isfinite(p.lambda)) throw DomainError("two-spin: lambda must be > 0 and finite");
}

void validate(const Model& m, const Graph& g) {
  if (const auto* hc = std::get_if<HardcoreParams>(&m)) {
    validate(*hc, g.num_vertices());
  } else {
    validate(std::get<TwoSpinParams>(m));
  }
}

bool is_hardcore(const Model& m) { return std::holds_alternative<HardcoreParams>(m); }

std::string model_name(const Model& m) {
  if (is_hardcore(m)) return "hardcore";
  return std::get<TwoSpinParams>(m).is_ising() ? "ising" : "two-spin";
}

SpinConfig to_external(const Model& m, SpinConfig config) {
  if (const auto* ts = std::get_if<TwoSpinParams>(&m); ts && ts->flipped) config.flip_all();
  return config;
}

double hardcore_conditional(const HardcoreParams& p, const Graph& g, const SpinConfig& config, Vertex v) {
  for (Vertex u : g.neighbors(v)) {
    if (config.test(u)) return 0.0;
  }
  const double lam = p.fugacity[v];
  return lam / (1.0 + lam);
}

double two_spin_conditional(const TwoSpinParams& p, std::size_t degree, std::size_t minus_neighbors) {
  if (minus_neighbors > degree) throw DomainError("two_spin_conditional: s_v exceeds degree");
  const std::size_t plus = degree - minus_neighbors;
  // 0 * log(0) terms are exponent-zero powers and contribute nothing.
  const double log_num = std::log(p.lambda) + (plus > 0 ? static_cast<double>(plus) * std::log(p.beta) : 0.0);
  const double log_den = minus_neighbors > 0 ? static_cast<double>(minus_neighbors) * std::log(p.gamma) : 0.0;
  if (log_num == kNegInf && log_den == kNegInf) {
    throw DomainError("two_spin_conditional: numerator and denominator both vanish");
  }
  if (log_num == kNegInf) return 0.0;
  if (log_den == kNegInf) return 1.0;
  return 1.0 / (1.0 + std::exp(log_den - log_num));
}

double two_spin_conditional(const TwoSpinParams& p, const Graph& g, const SpinConfig& config, Vertex v) {
  std::size_t minus = 0;
  for (Vertex u : g.neighbors(v)) minus += config.test(u) ? 0 : 1;
  return two_spin_conditional(p, g.degree(v), minus);
}

double plus_probability(const Model& m, const Graph& g, const SpinConfig& config, Vertex v, double field_scale) {
  if (const auto* hc = std::get_if<HardcoreParams>(&m)) {
    for (Vertex u : g.neighbors(v)) {
      if (config.test(u)) return 0.0;
    }
    const double lam = hc->fugacity[v] * field_scale;
    return lam / (1.0 + lam);
  }
  TwoSpinParams p = std::get<TwoSpinParams>(m);
  p.lambda *= field_scale;
  return two_spin_conditional(p, g, config, v);
}

double log_weight(const Model& m, const Graph& g, const SpinConfig& config) {
  double w = 0;
  if (const auto* hc = std::get_if<HardcoreParams>(&m)) {
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      if (!config.test(v)) continue;
      for (Vertex u : g.neighbors(v)) {
        if (config.test(u)) return kNegInf;
      }
      w += std::log(hc->fugacity[v]);
    }
    return w;
  }
  const auto& p = std::get<TwoSpinParams>(m);
  std::size_t plus = config.count(), pp = 0, mm = 0;
  for (auto [u, v] : g.edges()) {
    const bool a = config.test(u), b = config.test(v);
    pp += (a && b) ? 1 : 0;
    mm += (!a && !b) ? 1 : 0;
  }
  w = static_cast<double>(plus) * std::log(p.lambda);
  if (pp > 0) w += static_cast<double>(pp) * std::log(p.beta);
  if (mm > 0) w += static_cast<double>(mm) * std::log(p.gamma);
  return w;
}

std::map<std::string, std::string> parse_key_value(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(line_no) + ": expected key=value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("config line " + std::to_string(line_no) + ": empty key");
    std::replace(key.begin(), key.end(), '-', '_');
    kv[key] = value;
  }
  return kv;
}

ModelSpec model_spec_from_map(const std::map<std::string, std::string>& kv) {
  ModelSpec s;
  for (const auto& [key, value] : kv) {
    if (key != "model" && key != "lambda" && key != "beta" && key != "gamma" && key != "per_site_lambda") {
      throw ParseError("unknown model key '" + key + "' (expected model, lambda, beta, gamma, per_site_lambda)");
    }
  }
  if (auto it = kv.find("model"); it != kv.end()) s.kind = it->second;
  if (auto it = kv.find("lambda"); it != kv.end()) s.lambda = parse_double("lambda", it->second);
  if (auto it = kv.find("beta"); it != kv.end()) s.beta = parse_double("beta", it->second);
  if (auto it = kv.find("gamma"); it != kv.end()) {
    s.gamma = parse_double("gamma", it->second);
    s.gamma_set = true;
  }
  if (auto it = kv.find("per_site_lambda"); it != kv.end()) s.per_site_lambda = it->second;
  return s;
}

std::vector<double> load_per_site_lambda(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open per-site lambda file " + path.string());
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::getline(in, tok);
      continue;
    }
    out.push_back(parse_double("per_site_lambda", tok));
  }
  if (out.size() != n) {
    throw ParseError("per-site lambda file has " + std::to_string(out.size()) + " values, graph has " +
                     std::to_string(n) + " vertices");
  }
  return out;
}

Model build_model(const ModelSpec& spec, const Graph& g) {
  if (spec.kind == "hardcore") {
    HardcoreParams p = HardcoreParams::uniform(g.num_vertices(), spec.lambda);
    if (!spec.per_site_lambda.empty()) p.fugacity = load_per_site_lambda(spec.per_site_lambda, g.num_vertices());
    validate(p, g.num_vertices());
    return p;
  }
  TwoSpinParams p;
  if (spec.kind == "ising") {
    p = {spec.beta, spec.beta, spec.lambda, false};
  } else if (spec.kind == "two-spin" || spec.kind == "two_spin") {
    if (!spec.gamma_set) throw DomainError("two-spin model needs gamma");
    p = {spec.beta, spec.gamma, spec.lambda, false};
  } else {
    throw DomainError("unknown model '" + spec.kind + "' (expected hardcore, ising or two-spin)");
  }
  validate(p);
  return normalize(p);
}

}  // namespace spinchain

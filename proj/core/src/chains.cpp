#include "spinchain/chains.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "spinchain/errors.hpp"
#include "spinchain/thresholds.hpp"

namespace spinchain {

UpdatePath parse_update_path(std::string_view s) {
  if (s == "naive") return UpdatePath::naive;
  if (s == "factory") return UpdatePath::factory;
  if (s == "auto") return UpdatePath::automatic;
  throw DomainError("update path must be naive, factory or auto, got '" + std::string(s) + "'");
}

std::string update_path_name(UpdatePath p) {
  switch (p) {
    case UpdatePath::naive:
      return "naive";
    case UpdatePath::factory:
      return "factory";
    case UpdatePath::automatic:
      return "auto";
  }
  return "auto";
}

SiteUpdater::SiteUpdater(const Model& model, const Graph& g, UpdatePath path, FactoryCaps caps)
    : model_(model), g_(&g), path_(path) {
  validate(model_, g);
  if (is_hardcore(model_)) {
    kind_ = path == UpdatePath::naive ? Kind::hardcore_scan : Kind::hardcore_lazy;
    return;
  }
  const auto& p = std::get<TwoSpinParams>(model_);
  const std::size_t maxd = g.max_degree();
  if (maxd <= 4096) {
    std::vector<bool> present(maxd + 1, false);
    for (Vertex v = 0; v < g.num_vertices(); ++v) present[g.degree(v)] = true;
    table_offset_.assign(maxd + 1, 0);
    for (std::size_t d = 0; d <= maxd; ++d) {
      if (!present[d]) continue;
      table_offset_[d] = table_.size();
      for (std::size_t s = 0; s <= d; ++s) table_.push_back(two_spin_conditional(p, d, s));
    }
    kind_ = Kind::two_spin_table;
  } else {
    kind_ = Kind::two_spin_direct;
  }
  if (path == UpdatePath::naive) return;
  if (!p.is_ising()) {
    if (path == UpdatePath::factory) throw DomainError("factory update path needs an Ising model");
    return;
  }
  plans_.reserve(maxd + 1);
  for (std::size_t d = 0; d <= maxd; ++d) plans_.push_back(plan_fast_ising(p, d, caps));
  kind_ = Kind::ising_factory;
}

bool SiteUpdater::draw(const SpinConfig& config, Vertex v, Rng& rng) {
  const Graph& g = *g_;
  switch (kind_) {
    case Kind::hardcore_scan: {
      for (Vertex u : g.neighbors(v)) {
        if (config.test(u)) return false;
      }
      const double lam = std::get<HardcoreParams>(model_).fugacity[v];
      return bernoulli(rng, lam / (1 + lam));
    }
    case Kind::hardcore_lazy:
      return fast_hardcore_update(std::get<HardcoreParams>(model_).fugacity[v], g, v, config, rng, &stats_);
    case Kind::ising_factory: {
      const auto& plan = plans_[g.degree(v)];
      if (plan.within_caps) {
        return fast_ising_update(plan, std::get<TwoSpinParams>(model_), g, v, config, rng, &stats_);
      }
      if (path_ == UpdatePath::factory) {
        return fast_ising_update(plan, std::get<TwoSpinParams>(model_), g, v, config, rng, &stats_);
      }
      [[fallthrough]];
    }
    case Kind::two_spin_table:
    case Kind::two_spin_direct: {
      std::size_t minus = 0;
      for (Vertex u : g.neighbors(v)) minus += config.test(u) ? 0 : 1;
      const std::size_t d = g.degree(v);
      const double prob = table_.empty() ? two_spin_conditional(std::get<TwoSpinParams>(model_), d, minus)
                                         : table_[table_offset_[d] + minus];
      return bernoulli(rng, prob);
    }
  }
  return false;
}

bool SiteUpdater::factory_everywhere() const {
  if (kind_ == Kind::hardcore_lazy) return true;
  if (kind_ != Kind::ising_factory) return false;
  for (Vertex v = 0; v < g_->num_vertices(); ++v) {
    if (!plans_[g_->degree(v)].within_caps) return false;
  }
  return true;
}

std::string SiteUpdater::describe() const {
  std::ostringstream os;
  os << model_name(model_) << ": ";
  switch (kind_) {
    case Kind::hardcore_scan:
      os << "neighbor scan at every vertex";
      break;
    case Kind::hardcore_lazy:
      os << "lazy update (neighbors read only after r = 1) at every vertex";
      break;
    case Kind::two_spin_table:
    case Kind::two_spin_direct:
      os << "neighbor scan at every vertex";
      break;
    case Kind::ising_factory: {
      std::size_t fast = 0;
      for (Vertex v = 0; v < g_->num_vertices(); ++v) fast += plans_[g_->degree(v)].within_caps ? 1 : 0;
      os << "factory path at " << fast << " vertices, ";
      if (path_ == UpdatePath::factory) {
        os << "cap errors at " << g_->num_vertices() - fast;
      } else {
        os << "neighbor scan at " << g_->num_vertices() - fast;
      }
      break;
    }
  }
  os << " (requested " << update_path_name(path_) << ")";
  return os.str();
}

Model tilted(const Model& m, double theta) {
  if (!(theta > 0)) throw DomainError("tilt factor must be positive");
  if (const auto* hc = std::get_if<HardcoreParams>(&m)) {
    HardcoreParams p = *hc;
    for (auto& l : p.fugacity) l *= theta;
    return p;
  }
  TwoSpinParams p = std::get<TwoSpinParams>(m);
  p.lambda *= theta;
  return p;
}

void glauber_step(SiteUpdater& up, SpinConfig& config, Rng& rng) {
  const auto v = static_cast<Vertex>(uniform_below(rng, config.size()));
  up.update(config, v, rng);
}

void glauber_step(const Model& m, const Graph& g, SpinConfig& config, Rng& rng) {
  SiteUpdater up(m, g);
  glauber_step(up, config, rng);
}

void systematic_scan_pass(SiteUpdater& up, SpinConfig& config, std::span<const Vertex> order, Rng& rng) {
  for (Vertex v : order) up.update(config, v, rng);
}

void systematic_scan_pass(const Model& m, const Graph& g, SpinConfig& config, std::span<const Vertex> order,
                          Rng& rng) {
  if (order.size() != g.num_vertices()) throw DomainError("scan order must be a permutation of the vertices");
  std::vector<bool> seen(g.num_vertices(), false);
  for (Vertex v : order) {
    if (v >= g.num_vertices() || seen[v]) throw DomainError("scan order must be a permutation of the vertices");
    seen[v] = true;
  }
  SiteUpdater up(m, g);
  systematic_scan_pass(up, config, order, rng);
}

std::vector<Vertex> identity_order(std::size_t n) {
  std::vector<Vertex> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<Vertex>(i);
  return order;
}

BalancedState make_balanced_state(const Graph& g, SpinConfig start, double K) {
  if (!(K > 1)) throw DomainError("balanced Glauber dynamics needs K > 1");
  if (start.size() != g.num_vertices()) throw DomainError("start configuration has the wrong size");
  BalancedState s;
  s.config = std::move(start);
  s.debt.assign(g.num_vertices(), 0);
  s.K = K;
  s.threshold = static_cast<std::uint64_t>(std::floor(K * static_cast<double>(g.max_degree())));
  return s;
}

void balanced_glauber_step(SiteUpdater& up, BalancedState& state, Rng& rng, std::vector<Vertex>* log) {
  const Graph& g = up.graph();
  const std::uint64_t over = state.threshold + 1;
  std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> pending;
  auto touch = [&](Vertex v) {
    up.update(state.config, v, rng);
    if (log) log->push_back(v);
    for (Vertex u : g.neighbors(v)) {
      if (++state.debt[u] == over) pending.push(u);
    }
    state.debt[v] = 0;
  };
  touch(static_cast<Vertex>(uniform_below(rng, g.num_vertices())));
  ++state.public_steps;
  while (!pending.empty()) {
    const Vertex w = pending.top();
    pending.pop();
    touch(w);
    ++state.forced_updates;
  }
}

std::uint64_t auto_inner_steps(std::size_t n_s, std::uint64_t horizon, double eps) {
  if (n_s == 0) return 0;
  const double ns = static_cast<double>(n_s);
  const double m = std::ceil(10 * ns * std::log(ns * static_cast<double>(horizon) / eps));
  return std::max<std::uint64_t>(n_s, static_cast<std::uint64_t>(std::max(m, 0.0)));
}

FieldDynamics::FieldDynamics(const Model& m, const Graph& g, FieldDynConfig cfg, UpdatePath path)
    : tilted_(tilted(m, cfg.theta)), g_(&g), cfg_(cfg), inner_(tilted_, g, path) {
  if (!(cfg.theta > 0 && cfg.theta < 1)) throw DomainError("field dynamics needs theta in (0, 1)");
  if (cfg.resampler == Resampler::exact && g.num_vertices() > cfg.exact_cap) {
    throw CapExceeded("exact field-dynamics resampler limited to n <= " + std::to_string(cfg.exact_cap));
  }
  if (!(cfg.eps > 0 && cfg.eps < 1)) throw DomainError("eps must lie in (0, 1)");
  free_.reserve(g.num_vertices());
}

void FieldDynamics::step(SpinConfig& config, Rng& rng) {
  free_.clear();
  for (Vertex v = 0; v < g_->num_vertices(); ++v) {
    if (!config.test(v) || bernoulli(rng, cfg_.theta)) free_.push_back(v);
  }
  if (cfg_.resampler == Resampler::exact) {
    resample_exact(config, rng);
  } else {
    resample_glauber(config, rng);
  }
}

void FieldDynamics::resample_exact(SpinConfig& config, Rng& rng) {
  const std::size_t k = free_.size();
  const std::uint64_t count = std::uint64_t{1} << k;
  logw_.resize(count);
  double top = -std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (std::size_t i = 0; i < k; ++i) config.set(free_[i], (mask >> i) & 1U);
    logw_[mask] = log_weight(tilted_, *g_, config);
    top = std::max(top, logw_[mask]);
  }
  double total = 0;
  for (auto& w : logw_) {
    w = std::exp(w - top);
    total += w;
  }
  double u = uniform01(rng) * total;
  std::uint64_t pick = count - 1;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    if (u < logw_[mask]) {
      pick = mask;
      break;
    }
    u -= logw_[mask];
  }
  // Guard against landing on a zero-weight state through rounding in the last subtraction.
  while (logw_[pick] == 0 && pick > 0) --pick;
  for (std::size_t i = 0; i < k; ++i) config.set(free_[i], (pick >> i) & 1U);
  inner_updates_ += k;
}

void FieldDynamics::resample_glauber(SpinConfig& config, Rng& rng) {
  for (Vertex v : free_) config.set(v, false);
  if (free_.empty()) return;
  const std::uint64_t m = cfg_.m ? cfg_.m : auto_inner_steps(free_.size(), cfg_.horizon, cfg_.eps);
  const std::uint64_t ns = free_.size();
  for (std::uint64_t i = 0; i < m; ++i) {
    inner_.update(config, free_[uniform_below(rng, ns)], rng);
  }
  inner_updates_ += m;
}

void field_dynamics_step(const Model& m, const Graph& g, SpinConfig& config, const FieldDynConfig& fd, Rng& rng) {
  FieldDynamics dyn(m, g, fd);
  dyn.step(config, rng);
}

double default_theta(const Model& m, const Graph& g) {
  if (is_hardcore(m)) return 0.1;
  const int maxd = std::max<int>(3, static_cast<int>(g.max_degree()));
  const auto report = classify_uniqueness(m, maxd, 0.0);
  if (!(report.delta_gap > 0)) {
    throw DomainError("no positive uniqueness gap for these parameters; pass theta explicitly");
  }
  return report.delta_gap * report.delta_gap / 64;
}

InterleavedSampler::InterleavedSampler(const Model& m, const Graph& g, double theta, std::uint64_t m_inner,
                                       std::uint64_t horizon, double eps, UpdatePath path)
    : scan_(m, g, path),
      field_(m, g, FieldDynConfig{theta, Resampler::glauber, m_inner, std::max<std::uint64_t>(horizon, 1), eps},
             path),
      order_(identity_order(g.num_vertices())) {}

void InterleavedSampler::round(SpinConfig& config, Rng& rng) {
  systematic_scan_pass(scan_, config, order_, rng);
  field_.step(config, rng);
}

void InterleavedSampler::run(SpinConfig& config, std::uint64_t rounds, Rng& rng) {
  for (std::uint64_t t = 0; t < rounds; ++t) round(config, rng);
}

SpinConfig interleaved_sampler(const Model& m, const Graph& g, SpinConfig start, double theta, std::uint64_t m_inner,
                               std::uint64_t T, Rng& rng) {
  if (T == 0) return start;
  InterleavedSampler sampler(m, g, theta, m_inner, T);
  sampler.run(start, T, rng);
  return start;
}

namespace {

const std::map<std::string, std::vector<std::string>>& chain_registry() {
  static const std::map<std::string, std::vector<std::string>> registry = {
      {"glauber", {}},
      {"scan", {"order"}},
      {"balanced", {"K"}},
      {"field", {"theta", "resampler", "m"}},
      {"interleaved", {"theta", "m"}},
  };
  return registry;
}

std::uint64_t parse_inner_steps(const ChainSpec& spec) {
  const auto m = spec.text("m", "auto");
  if (m == "auto") return 0;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(m, &used);
    if (used != m.size() || v == 0) throw std::invalid_argument("m");
    return v;
  } catch (const std::exception&) {
    throw DomainError("chain parameter m must be 'auto' or a positive integer, got '" + m + "'");
  }
}

}  // namespace

ChainSpec ChainSpec::parse(std::string_view text) {
  ChainSpec spec;
  const auto colon = text.find(':');
  spec.name = std::string(text.substr(0, colon));
  if (spec.name == "balanced-glauber") spec.name = "balanced";
  const auto& reg = chain_registry();
  const auto it = reg.find(spec.name);
  if (it == reg.end()) {
    throw DomainError("unknown chain '" + spec.name + "' (expected glauber, scan, balanced, field or interleaved)");
  }
  if (colon == std::string_view::npos) return spec;
  std::string rest(text.substr(colon + 1));
  std::istringstream items(rest);
  std::string item;
  while (std::getline(items, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw DomainError("chain parameter '" + item + "' needs key=value");
    const auto key = item.substr(0, eq);
    if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
      throw DomainError("chain '" + spec.name + "' has no parameter '" + key + "'");
    }
    spec.params[key] = item.substr(eq + 1);
  }
  return spec;
}

std::string ChainSpec::to_string() const {
  std::string out = name;
  char sep = ':';
  for (const auto& [k, v] : params) {
    out += sep + k + "=" + v;
    sep = ',';
  }
  return out;
}

double ChainSpec::number(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw DomainError("chain parameter " + key + " expects a number, got '" + it->second + "'");
  }
}

std::string ChainSpec::text(const std::string& key, const std::string& fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::string TraceRecord::to_json() const {
  nlohmann::ordered_json j;
  j["step"] = step;
  j["occupied_count"] = occupied_count;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash));
  j["config_hash"] = buf;
  if (config_hex) j["config"] = *config_hex;
  return j.dump();
}

ScheduleResult run_schedule(const ChainSpec& spec, const Model& m, const Graph& g, SpinConfig start, Rng& rng,
                            const ScheduleOptions& opts) {
  if (start.size() != g.num_vertices()) throw DomainError("start configuration has the wrong size");
  if (opts.stride == 0) throw DomainError("stride must be positive");
  ScheduleResult res;
  const std::size_t n = g.num_vertices();
  SiteUpdater up(m, g, opts.path);
  res.path_description = up.describe();

  auto observe = [&](std::uint64_t step, const SpinConfig& config) {
    if (step % opts.stride != 0) return;
    const SpinConfig ext = to_external(m, config);
    if (opts.record_trace) {
      TraceRecord r{step, ext.count(), ext.hash(), std::nullopt};
      if (opts.emit_config) r.config_hex = ext.to_hex();
      res.trace.push_back(std::move(r));
    }
    if (opts.on_config) opts.on_config(step, ext);
  };

  SpinConfig config = std::move(start);
  if (spec.name == "glauber") {
    for (std::uint64_t t = 1; t <= opts.steps; ++t) {
      glauber_step(up, config, rng);
      observe(t, config);
    }
    res.update_log_len = opts.steps;
  } else if (spec.name == "scan") {
    auto order = identity_order(n);
    const auto kind = spec.text("order", "identity");
    if (kind == "reverse") {
      std::reverse(order.begin(), order.end());
    } else if (kind != "identity") {
      throw DomainError("scan order must be identity or reverse");
    }
    for (std::uint64_t t = 1; t <= opts.steps; ++t) {
      systematic_scan_pass(up, config, order, rng);
      observe(t, config);
    }
    res.update_log_len = opts.steps * n;
  } else if (spec.name == "balanced") {
    auto state = make_balanced_state(g, std::move(config), spec.number("K", 2.0));
    for (std::uint64_t t = 1; t <= opts.steps; ++t) {
      balanced_glauber_step(up, state, rng);
      observe(t, state.config);
    }
    res.update_log_len = state.update_log_len();
    res.forced_updates = state.forced_updates;
    config = std::move(state.config);
  } else if (spec.name == "field") {
    FieldDynConfig fd;
    fd.theta = spec.number("theta", default_theta(m, g));
    const auto r = spec.text("resampler", "glauber");
    if (r == "exact") {
      fd.resampler = Resampler::exact;
    } else if (r != "glauber") {
      throw DomainError("field resampler must be exact or glauber");
    }
    fd.m = parse_inner_steps(spec);
    fd.horizon = std::max<std::uint64_t>(opts.steps, 1);
    fd.eps = opts.eps;
    FieldDynamics dyn(m, g, fd, opts.path);
    for (std::uint64_t t = 1; t <= opts.steps; ++t) {
      dyn.step(config, rng);
      observe(t, config);
    }
    res.update_log_len = dyn.inner_updates();
  } else if (spec.name == "interleaved") {
    const double theta = spec.number("theta", default_theta(m, g));
    FieldDynamics dyn(m, g, {theta, Resampler::glauber, parse_inner_steps(spec), std::max<std::uint64_t>(opts.steps, 1),
                             opts.eps},
                      opts.path);
    const auto order = identity_order(n);
    for (std::uint64_t t = 1; t <= opts.steps; ++t) {
      systematic_scan_pass(up, config, order, rng);
      dyn.step(config, rng);
      observe(t, config);
    }
    res.update_log_len = opts.steps * n + dyn.inner_updates();
  } else {
    throw DomainError("unknown chain '" + spec.name + "'");
  }
  res.public_steps = opts.steps;
  res.stats = up.stats();
  res.final_config = to_external(m, config);
  return res;
}

}  // namespace spinchain

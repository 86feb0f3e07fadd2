#include "spinchain/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "spinchain/errors.hpp"
#include "spinchain/rng.hpp"

namespace spinchain {

namespace {

using Json = nlohmann::ordered_json;

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

// Runs fn(begin, end, worker) over contiguous blocks of [0, work).
template <class Fn>
void parallel_blocks(std::size_t work, Fn&& fn) {
  const unsigned threads = ensemble_threads(work);
  if (threads <= 1) {
    fn(std::size_t{0}, work, 0U);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (work + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t b = std::min(work, t * chunk), e = std::min(work, b + chunk);
    pool.emplace_back([&fn, b, e, t] { fn(b, e, t); });
  }
  for (auto& th : pool) th.join();
}

// mu indexed by user-facing masks.
std::vector<double> external_weights(const Model& m, const DenseDistribution& stored) {
  std::vector<double> out = stored.weights;
  if (const auto* p = std::get_if<TwoSpinParams>(&m); p && p->flipped) {
    const Mask full = out.size() - 1;
    for (Mask s = 0; s < out.size(); ++s) out[s ^ full] = stored.weights[s];
  }
  return out;
}

std::vector<std::uint64_t> exact_draw_counts(std::span<const double> mu, std::size_t draws, Rng& rng) {
  std::vector<double> cdf(mu.size());
  std::partial_sum(mu.begin(), mu.end(), cdf.begin());
  std::vector<std::uint64_t> counts(mu.size(), 0);
  for (std::size_t i = 0; i < draws; ++i) {
    const double u = uniform01(rng) * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    ++counts[static_cast<std::size_t>(it - cdf.begin())];
  }
  return counts;
}

}  // namespace

unsigned ensemble_threads(std::size_t work) {
  unsigned t = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SPINCHAIN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) t = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(t, work)));
}

double plug_in_tv(const std::vector<std::uint64_t>& counts, std::span<const double> mu) {
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  if (total == 0) throw DomainError("no samples");
  double tv = 0.0;
  for (std::size_t s = 0; s < counts.size(); ++s) tv += std::abs(static_cast<double>(counts[s]) / total - mu[s]);
  return 0.5 * tv;
}

std::string MixingReport::to_json() const {
  Json j;
  j["chain"] = chain;
  j["T"] = T;
  j["ensemble"] = ensemble;
  j["tv_estimate"] = tv_estimate;
  j["reference"] = reference;
  j["mc_error"] = mc_error;
  j["bias_allowance"] = bias_allowance;
  if (forced_updates) j["forced_updates"] = forced_updates;
  j["public_steps"] = public_steps;
  return j.dump();
}

MixingReport estimate_tv(const Model& m, const Graph& g, const ChainSpec& chain, std::uint64_t T,
                         std::size_t ensemble, std::uint64_t seed, const MixingOptions& opts) {
  if (ensemble == 0) throw DomainError("ensemble must be positive");
  const std::size_t n = g.num_vertices();
  const DenseDistribution stored = enumerate_model(m, g);
  const std::vector<double> mu = external_weights(m, stored);

  const unsigned threads = ensemble_threads(ensemble);
  std::vector<std::vector<std::uint64_t>> counts(threads, std::vector<std::uint64_t>(mu.size(), 0));
  std::vector<std::uint64_t> forced(threads, 0), steps(threads, 0);
  ScheduleOptions sched;
  sched.steps = T;
  sched.record_trace = false;
  sched.path = opts.path;
  sched.eps = opts.eps;
  const auto order = identity_order(n);
  parallel_blocks(ensemble, [&](std::size_t b, std::size_t e, unsigned w) {
    SiteUpdater up(m, g, opts.path);
    for (std::size_t c = b; c < e; ++c) {
      Rng rng(derive_seed(seed, c));
      SpinConfig start(n, false);
      if (opts.start == StartKind::post_scan) systematic_scan_pass(up, start, order, rng);
      const auto res = run_schedule(chain, m, g, std::move(start), rng, sched);
      ++counts[w][res.final_config.to_mask()];
      forced[w] += res.forced_updates;
      steps[w] += res.public_steps;
    }
  });
  for (unsigned w = 1; w < threads; ++w) {
    for (std::size_t s = 0; s < mu.size(); ++s) counts[0][s] += counts[w][s];
  }
  const auto& merged = counts[0];

  MixingReport rep;
  rep.chain = chain.to_string();
  rep.T = T;
  rep.ensemble = ensemble;
  rep.tv_estimate = plug_in_tv(merged, mu);
  rep.forced_updates = std::accumulate(forced.begin(), forced.end(), std::uint64_t{0});
  rep.public_steps = std::accumulate(steps.begin(), steps.end(), std::uint64_t{0});

  // Bootstrap over chains: resample the ensemble with replacement.
  const std::uint64_t boot_seed = derive_seed(seed, 0xb0075ULL << 32);
  if (opts.bootstrap > 1) {
    std::vector<double> cdf(merged.size());
    for (std::size_t s = 0; s < merged.size(); ++s) cdf[s] = static_cast<double>(merged[s]);
    std::partial_sum(cdf.begin(), cdf.end(), cdf.begin());
    std::vector<double> tvs(opts.bootstrap);
    Rng rng(boot_seed);
    std::vector<std::uint64_t> bc(merged.size());
    for (auto& tv : tvs) {
      std::fill(bc.begin(), bc.end(), 0);
      for (std::size_t i = 0; i < ensemble; ++i) {
        const auto u = static_cast<double>(uniform_below(rng, ensemble));
        ++bc[static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin())];
      }
      tv = plug_in_tv(bc, mu);
    }
    const double mean = std::accumulate(tvs.begin(), tvs.end(), 0.0) / static_cast<double>(tvs.size());
    double var = 0.0;
    for (double tv : tvs) var += (tv - mean) * (tv - mean);
    rep.mc_error = std::sqrt(var / static_cast<double>(tvs.size() - 1));
  }
  if (opts.bias_repeats > 0) {
    double bias = 0.0;
    for (std::size_t r = 0; r < opts.bias_repeats; ++r) {
      Rng rng(derive_seed(boot_seed, r + 1));
      bias += plug_in_tv(exact_draw_counts(mu, ensemble, rng), mu);
    }
    rep.bias_allowance = bias / static_cast<double>(opts.bias_repeats);
  }
  return rep;
}

std::string TailReport::to_json() const {
  Json j;
  j["function"] = function;
  j["kappa"] = kappa;
  j["samples"] = samples;
  j["n"] = n;
  j["mean"] = mean;
  j["sigma"] = sigma;
  j["thresholds"] = thresholds;
  Json ex = Json::array();
  for (double e : exceedance) ex.push_back(number_or_null(e));
  j["exceedance"] = ex;
  j["c_hat"] = c_hat ? Json(*c_hat) : Json(nullptr);
  if (c_hat_lambda) j["c_hat_lambda"] = *c_hat_lambda;
  return j.dump();
}

std::string TailReport::to_csv() const {
  std::ostringstream out;
  out.precision(10);
  out << "k,t,exceedance\n";
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    out << i + 1 << ',' << thresholds[i] << ',';
    if (std::isfinite(exceedance[i])) {
      out << exceedance[i];
    } else {
      out << "nan";
    }
    out << '\n';
  }
  return out.str();
}

TailReport concentration_experiment(const Model& m, const Graph& g, const std::string& f, std::size_t samples,
                                    std::uint64_t seed, const ConcentrationOptions& opts) {
  if (f != "count" && f != "constant") throw DomainError("function must be count or constant, got '" + f + "'");
  if (samples < 2) throw DomainError("need at least two samples");
  const std::size_t n = g.num_vertices();
  const bool flipped = std::holds_alternative<TwoSpinParams>(m) && std::get<TwoSpinParams>(m).flipped;
  Rng rng(seed);
  SpinConfig config(n, false);
  if (opts.burn_rounds > 0) {
    InterleavedSampler burn(m, g, default_theta(m, g), 0, opts.burn_rounds, opts.eps, opts.path);
    burn.run(config, opts.burn_rounds, rng);
  }
  SiteUpdater up(m, g, opts.path);
  const std::uint64_t thin = opts.thin ? opts.thin : n;
  std::vector<double> values(samples);
  for (auto& v : values) {
    for (std::uint64_t t = 0; t < thin; ++t) glauber_step(up, config, rng);
    const auto c = static_cast<double>(config.count());
    v = f == "constant" ? 0.0 : (flipped ? static_cast<double>(n) - c : c);
  }

  TailReport rep;
  rep.function = f;
  rep.samples = samples;
  rep.n = n;
  rep.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(samples);
  double var = 0.0;
  for (double v : values) var += (v - rep.mean) * (v - rep.mean);
  rep.sigma = std::sqrt(var / static_cast<double>(samples - 1));
  for (int k = 1; k <= 3; ++k) {
    const double t = k * rep.sigma;
    const auto hits = std::count_if(values.begin(), values.end(), [&](double v) { return v - rep.mean > t; });
    rep.thresholds.push_back(t);
    rep.exceedance.push_back(hits == 0 && rep.sigma > 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                                          : static_cast<double>(hits) / static_cast<double>(samples));
  }
  const double p2 = rep.exceedance[1], p3 = rep.exceedance[2];
  if (rep.sigma > 0.0 && std::isfinite(p2) && std::isfinite(p3) && p3 > 0.0) {
    const double t2 = rep.thresholds[1], t3 = rep.thresholds[2];
    const double scale = (t3 * t3 - t2 * t2) / (rep.kappa * rep.kappa * static_cast<double>(n));
    rep.c_hat = std::log(p2 / p3) / scale;
    if (const auto* hp = std::get_if<HardcoreParams>(&m)) rep.c_hat_lambda = *rep.c_hat * hp->max_fugacity();
  }
  return rep;
}

double binomial_upper_tail(std::size_t n, double t) {
  const double half = static_cast<double>(n) / 2.0;
  const double log_norm = static_cast<double>(n) * std::log(2.0);
  double tail = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (static_cast<double>(k) - half <= t) continue;
    tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(static_cast<double>(n - k) + 1.0) -
                     log_norm);
  }
  return tail;
}

std::vector<CostRow> factory_cost_profile(const std::vector<std::pair<double, double>>& lambda_beta,
                                          const std::vector<std::size_t>& degrees, std::size_t trials,
                                          std::uint64_t seed, const FactoryCaps& caps) {
  using Clock = std::chrono::steady_clock;
  std::vector<CostRow> rows;
  std::uint64_t sink = 0;
  std::uint64_t stream = 0;
  for (const auto& [lambda, beta] : lambda_beta) {
    for (std::size_t d : degrees) {
      const Graph star = star_graph(d);
      const Model model = normalize(TwoSpinParams{beta, beta, lambda, false});
      Rng rng(derive_seed(seed, stream++));
      SpinConfig config(d + 1, false);
      for (Vertex v = 1; v <= d; ++v) config.set(v, bernoulli(rng, 0.5));
      CostRow row{lambda, beta, d, true, 0, 0, 0, 0};
      row.within_caps = plan_fast_ising(std::get<TwoSpinParams>(model), d, caps).within_caps;

      SiteUpdater naive(model, star, UpdatePath::naive, caps);
      auto t0 = Clock::now();
      for (std::size_t i = 0; i < trials; ++i) sink += naive.draw(config, 0, rng);
      row.ns_naive = std::chrono::duration<double, std::nano>(Clock::now() - t0).count() / static_cast<double>(trials);

      if (row.within_caps) {
        SiteUpdater fast(model, star, UpdatePath::factory, caps);
        t0 = Clock::now();
        for (std::size_t i = 0; i < trials; ++i) sink += fast.draw(config, 0, rng);
        row.ns_factory =
            std::chrono::duration<double, std::nano>(Clock::now() - t0).count() / static_cast<double>(trials);
        row.mean_coins = fast.stats().mean_coins();
        row.max_coins = fast.stats().max_coins;
      }
      rows.push_back(row);
    }
  }
  // Keeps the timed loops observable.
  if (sink == std::numeric_limits<std::uint64_t>::max()) rows.clear();
  return rows;
}

std::string cost_rows_to_json(const std::vector<CostRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["lambda"] = r.lambda;
    j["beta"] = r.beta;
    j["degree"] = r.degree;
    j["within_caps"] = r.within_caps;
    if (r.within_caps) {
      j["mean_coins"] = r.mean_coins;
      j["max_coins"] = r.max_coins;
      j["ns_factory"] = r.ns_factory;
    }
    j["ns_naive"] = r.ns_naive;
    arr.push_back(j);
  }
  return arr.dump();
}

}  // namespace spinchain

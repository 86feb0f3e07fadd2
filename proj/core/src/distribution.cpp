#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <json.hpp>

#include "spinchain/errors.hpp"
#include "spinchain/oracle.hpp"

namespace spinchain {

namespace {

void check_ground(std::size_t n) {
  if (n > kDenseCap) {
    throw CapExceeded("dense distribution over " + std::to_string(n) + " elements exceeds the cap of " +
                      std::to_string(kDenseCap));
  }
}

Mask full_mask(std::size_t n) { return n == 64 ? ~Mask{0} : (Mask{1} << n) - 1; }

}  // namespace

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::to_string(i);
  return out;
}

double DenseDistribution::total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

double DenseDistribution::marginal(std::size_t i) const {
  double s = 0.0;
  const Mask bit = Mask{1} << i;
  for (Mask m = 0; m < weights.size(); ++m) {
    if (m & bit) s += weights[m];
  }
  return s;
}

std::vector<double> DenseDistribution::marginals() const {
  std::vector<double> out(size(), 0.0);
  for (Mask m = 0; m < weights.size(); ++m) {
    const double w = weights[m];
    if (w == 0.0) continue;
    for (Mask r = m; r; r &= r - 1) out[std::countr_zero(r)] += w;
  }
  return out;
}

void DenseDistribution::normalize() {
  const double z = total();
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("distribution has no mass");
  for (double& w : weights) w /= z;
  homogeneous_k.reset();
  int k = -1;
  for (Mask m = 0; m < weights.size(); ++m) {
    if (weights[m] == 0.0) continue;
    const int c = std::popcount(m);
    if (k < 0) {
      k = c;
    } else if (k != c) {
      return;
    }
  }
  homogeneous_k = static_cast<std::size_t>(k);
}

DenseDistribution DenseDistribution::from_weights(std::vector<std::string> ground, std::vector<double> weights) {
  check_ground(ground.size());
  if (weights.size() != (std::size_t{1} << ground.size())) throw DomainError("weight table size must be 2^|ground|");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("weights must be finite and nonnegative");
  }
  DenseDistribution d{std::move(ground), std::move(weights), std::nullopt};
  d.normalize();
  return d;
}

DenseDistribution enumerate_model(const Model& m, const Graph& g, std::size_t cap) {
  const std::size_t n = g.num_vertices();
  if (n > cap || n > kDenseCap) {
    throw CapExceeded("enumeration over " + std::to_string(n) + " vertices exceeds the cap of " +
                      std::to_string(std::min(cap, kDenseCap)));
  }
  validate(m, g);
  std::vector<double> logw(std::size_t{1} << n);
  double top = -std::numeric_limits<double>::infinity();
  for (Mask s = 0; s < logw.size(); ++s) {
    logw[s] = log_weight(m, g, SpinConfig::from_mask(s, n));
    top = std::max(top, logw[s]);
  }
  std::vector<double> w(logw.size());
  for (std::size_t s = 0; s < w.size(); ++s) w[s] = std::isfinite(logw[s]) ? std::exp(logw[s] - top) : 0.0;
  return DenseDistribution::from_weights(default_labels(n), std::move(w));
}

DenseDistribution tilt(const DenseDistribution& d, std::span<const double> field) {
  if (field.size() != d.size()) throw DomainError("field length must match the ground set");
  for (double f : field) {
    if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("tilt fields must be positive and finite");
  }
  DenseDistribution out = d;
  for (Mask m = 0; m < out.weights.size(); ++m) {
    if (out.weights[m] == 0.0) continue;
    double f = 1.0;
    for (Mask r = m; r; r &= r - 1) f *= field[std::countr_zero(r)];
    out.weights[m] *= f;
  }
  out.normalize();
  return out;
}

DenseDistribution pin(const DenseDistribution& d, const Pinning& pinning) {
  if (pinning.size() != d.size()) throw DomainError("pinning length must match the ground set");
  Mask forced_in = 0;
  std::vector<std::size_t> free;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < pinning.size(); ++i) {
    if (pinning[i] < 0) {
      free.push_back(i);
      labels.push_back(d.ground[i]);
    } else if (pinning[i] > 0) {
      forced_in |= Mask{1} << i;
    }
  }
  std::vector<double> w(std::size_t{1} << free.size(), 0.0);
  for (Mask t = 0; t < w.size(); ++t) {
    Mask s = forced_in;
    for (std::size_t j = 0; j < free.size(); ++j) {
      if (t >> j & 1U) s |= Mask{1} << free[j];
    }
    w[t] = d.weights[s];
  }
  if (!(std::accumulate(w.begin(), w.end(), 0.0) > 0.0)) throw DomainError("pinning has zero mass");
  return DenseDistribution::from_weights(std::move(labels), std::move(w));
}

DenseDistribution homogenize(const DenseDistribution& d) {
  const std::size_t n = d.size();
  check_ground(2 * n);
  std::vector<std::string> labels = d.ground;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(d.ground[i] + "~");
  std::vector<double> w(std::size_t{1} << (2 * n), 0.0);
  const Mask full = full_mask(n);
  for (Mask s = 0; s < d.weights.size(); ++s) w[s | ((~s & full) << n)] = d.weights[s];
  DenseDistribution out = DenseDistribution::from_weights(std::move(labels), std::move(w));
  out.homogeneous_k = n;
  return out;
}

DenseDistribution dehomogenize(const DenseDistribution& hom) {
  if (hom.size() % 2 != 0) throw DomainError("homogenized ground set must have even size");
  const std::size_t n = hom.size() / 2;
  const Mask full = full_mask(n);
  std::vector<double> w(std::size_t{1} << n, 0.0);
  for (Mask s = 0; s < hom.weights.size(); ++s) {
    if (hom.weights[s] == 0.0) continue;
    const Mask up = s & full, down = s >> n;
    if ((up ^ down) != full) throw DomainError("mass outside the homogenized support");
    w[up] += hom.weights[s];
  }
  return DenseDistribution::from_weights(
      std::vector<std::string>(hom.ground.begin(), hom.ground.begin() + static_cast<std::ptrdiff_t>(n)),
      std::move(w));
}

std::size_t blow_up_index(std::span<const std::size_t> k, std::size_t i, std::size_t j) {
  return std::accumulate(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(i), std::size_t{0}) + j;
}

DenseDistribution blow_up(const DenseDistribution& d, std::span<const std::size_t> k) {
  const std::size_t n = d.size();
  if (k.size() != n) throw DomainError("blow-up multiplicities must match the ground set");
  for (std::size_t ki : k) {
    if (ki == 0) throw DomainError("blow-up multiplicities must be positive");
  }
  const std::size_t total = std::accumulate(k.begin(), k.end(), std::size_t{0});
  check_ground(total);
  std::vector<std::string> labels;
  std::vector<std::size_t> offset(n);
  for (std::size_t i = 0; i < n; ++i) {
    offset[i] = labels.size();
    for (std::size_t j = 0; j < k[i]; ++j) labels.push_back("(" + d.ground[i] + "," + std::to_string(j) + ")");
  }
  std::vector<double> w(std::size_t{1} << total, 0.0);
  for (Mask s = 0; s < d.weights.size(); ++s) {
    if (d.weights[s] == 0.0) continue;
    std::vector<std::size_t> occ;
    double share = d.weights[s];
    for (Mask r = s; r; r &= r - 1) {
      occ.push_back(static_cast<std::size_t>(std::countr_zero(r)));
      share /= static_cast<double>(k[occ.back()]);
    }
    // Odometer over the copy chosen for each occupied element.
    std::vector<std::size_t> pick(occ.size(), 0);
    while (true) {
      Mask t = 0;
      for (std::size_t a = 0; a < occ.size(); ++a) t |= Mask{1} << (offset[occ[a]] + pick[a]);
      w[t] += share;
      std::size_t a = 0;
      while (a < occ.size() && ++pick[a] == k[occ[a]]) pick[a++] = 0;
      if (a == occ.size()) break;
    }
  }
  return DenseDistribution::from_weights(std::move(labels), std::move(w));
}

DenseDistribution project_blow_up(const DenseDistribution& dk, std::span<const std::size_t> k) {
  const std::size_t n = k.size();
  if (std::accumulate(k.begin(), k.end(), std::size_t{0}) != dk.size()) {
    throw DomainError("multiplicities do not match the blown-up ground set");
  }
  std::vector<Mask> group(n, 0);
  std::vector<std::string> labels(n);
  for (std::size_t i = 0, off = 0; i < n; off += k[i], ++i) {
    group[i] = ((Mask{1} << k[i]) - 1) << off;
    const std::string& l = dk.ground[off];
    labels[i] = l.size() > 2 ? l.substr(1, l.rfind(',') - 1) : std::to_string(i);
  }
  std::vector<double> w(std::size_t{1} << n, 0.0);
  for (Mask t = 0; t < dk.weights.size(); ++t) {
    if (dk.weights[t] == 0.0) continue;
    Mask s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int c = std::popcount(t & group[i]);
      if (c > 1) throw DomainError("two copies of one element are present together");
      if (c == 1) s |= Mask{1} << i;
    }
    w[s] += dk.weights[t];
  }
  return DenseDistribution::from_weights(std::move(labels), std::move(w));
}

DenseDistribution down_apply(const DenseDistribution& d, std::size_t l) {
  if (!d.homogeneous_k) throw DomainError("down operator needs a homogeneous distribution");
  const std::size_t k = *d.homogeneous_k;
  if (l > k) throw DomainError("down operator target size exceeds the support size");
  std::vector<double> w(d.weights.size(), 0.0);
  const double inv = 1.0 / std::exp(std::lgamma(k + 1.0) - std::lgamma(l + 1.0) - std::lgamma(k - l + 1.0));
  for (Mask s = 0; s < d.weights.size(); ++s) {
    if (d.weights[s] == 0.0) continue;
    if (l == k) {
      w[s] += d.weights[s];
      continue;
    }
    const double share = d.weights[s] * inv;
    for (Mask t = s;; t = (t - 1) & s) {
      if (static_cast<std::size_t>(std::popcount(t)) == l) w[t] += share;
      if (t == 0) break;
    }
  }
  DenseDistribution out = DenseDistribution::from_weights(d.ground, std::move(w));
  out.homogeneous_k = l;
  return out;
}

double kl_divergence(std::span<const double> nu, std::span<const double> mu) {
  double kl = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (nu[i] == 0.0) continue;
    if (mu[i] == 0.0) return std::numeric_limits<double>::infinity();
    kl += nu[i] * std::log(nu[i] / mu[i]);
  }
  return std::max(kl, 0.0);
}

Divergences divergences(const DenseDistribution& nu, const DenseDistribution& mu) {
  if (nu.weights.size() != mu.weights.size()) throw DomainError("distributions live on different ground sets");
  Divergences d{kl_divergence(nu.weights, mu.weights), 0.0, 0.0};
  for (std::size_t i = 0; i < nu.weights.size(); ++i) {
    d.tv += std::abs(nu.weights[i] - mu.weights[i]);
    if (mu.weights[i] > 0.0) {
      const double r = nu.weights[i] - mu.weights[i];
      d.chi2 += r * r / mu.weights[i];
    } else if (nu.weights[i] > 0.0) {
      d.chi2 = std::numeric_limits<double>::infinity();
    }
  }
  d.tv *= 0.5;
  return d;
}

double entropy_functional(const DenseDistribution& mu, std::span<const double> f) {
  if (f.size() != mu.weights.size()) throw DomainError("function must have one value per subset");
  double mean = 0.0, flogf = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (mu.weights[i] == 0.0) continue;
    if (f[i] < 0.0) throw DomainError("entropy functional needs a nonnegative function");
    mean += mu.weights[i] * f[i];
    if (f[i] > 0.0) flogf += mu.weights[i] * f[i] * std::log(f[i]);
  }
  return mean > 0.0 ? flogf - mean * std::log(mean) : 0.0;
}

std::string to_json(const DenseDistribution& d) {
  nlohmann::ordered_json j;
  j["ground"] = d.ground;
  if (d.homogeneous_k) j["homogeneous_k"] = *d.homogeneous_k;
  nlohmann::ordered_json w = nlohmann::ordered_json::object();
  for (Mask s = 0; s < d.weights.size(); ++s) {
    if (d.weights[s] == 0.0) continue;
    std::string key(d.size(), '0');
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (s >> i & 1U) key[i] = '1';
    }
    w[key] = d.weights[s];
  }
  j["weights"] = std::move(w);
  return j.dump();
}

DenseDistribution distribution_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("distribution json: ") + e.what());
  }
  if (!j.contains("ground") || !j.contains("weights")) throw ParseError("distribution json needs ground and weights");
  auto ground = j["ground"].get<std::vector<std::string>>();
  check_ground(ground.size());
  std::vector<double> w(std::size_t{1} << ground.size(), 0.0);
  for (const auto& [key, value] : j["weights"].items()) {
    if (key.size() != ground.size()) throw ParseError("weight key '" + key + "' has the wrong length");
    Mask s = 0;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (key[i] == '1') {
        s |= Mask{1} << i;
      } else if (key[i] != '0') {
        throw ParseError("weight key '" + key + "' is not a bit string");
      }
    }
    w[s] = value.get<double>();
  }
  return DenseDistribution::from_weights(std::move(ground), std::move(w));
}

}  // namespace spinchain

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinchain/errors.hpp"
#include "spinchain/oracle.hpp"
#include "spinchain/rng.hpp"

namespace spinchain {

namespace {

// Every pinning with at most max_pinned fixed coordinates, the empty pinning first.
template <class Fn>
void for_each_pinning(std::size_t n, std::size_t max_pinned, Fn&& fn) {
  Pinning p(n, -1);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code, fixed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<int>(c % 3) - 1;
      c /= 3;
      if (p[i] >= 0) ++fixed;
    }
    if (fixed <= max_pinned) fn(p);
  }
}

std::vector<double> restrict_field(const std::vector<double>& field, const Pinning& p) {
  std::vector<double> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0) out.push_back(field[i]);
  }
  return out;
}

double pinned_mass(const DenseDistribution& d, const Pinning& p) {
  double z = 0.0;
  for (Mask s = 0; s < d.weights.size(); ++s) {
    bool ok = true;
    for (std::size_t i = 0; i < p.size() && ok; ++i) {
      if (p[i] >= 0) ok = static_cast<int>(s >> i & 1U) == p[i];
    }
    if (ok) z += d.weights[s];
  }
  return z;
}

}  // namespace

FieldGrid FieldGrid::make(std::size_t n, double eps, std::uint64_t seed, std::size_t random_count) {
  FieldGrid grid;
  std::vector<double> points;
  for (int j = 0; j < 5; ++j) points.push_back((1.0 + eps) * std::pow(3.0, -j));
  for (double x : points) grid.fields.emplace_back(n, x);
  std::size_t product = 1;
  for (std::size_t i = 0; i < n && product <= 4096; ++i) product *= points.size();
  if (n > 1 && product <= 4096) {
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      const bool uniform = std::all_of(idx.begin(), idx.end(), [&](std::size_t v) { return v == idx[0]; });
      if (!uniform) {
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = points[idx[i]];
        grid.fields.push_back(std::move(f));
      }
      std::size_t a = 0;
      while (a < n && ++idx[a] == points.size()) idx[a++] = 0;
      if (a == n) break;
    }
  }
  Rng rng(seed);
  const double lo = std::log(1e-3);
  for (std::size_t r = 0; r < random_count; ++r) {
    std::vector<double> f(n);
    for (double& x : f) x = (1.0 + eps) * std::exp(lo * uniform01(rng));
    grid.fields.push_back(std::move(f));
  }
  return grid;
}

SpectralReport certify_spectral_domination(const DenseDistribution& d, double eta, double eps, const FieldGrid& grid,
                                           bool complete) {
  for (const auto& field : grid.fields) {
    if (std::any_of(field.begin(), field.end(), [&](double x) { return !(x > 0.0) || x > 1.0 + eps + 1e-12; })) {
      throw DomainError("field grid leaves (0, 1+eps]^n");
    }
  }
  SpectralReport rep{eta, -std::numeric_limits<double>::infinity(), false, 0, 0};
  const std::size_t n = d.size();
  auto check = [&](const DenseDistribution& base, const Pinning* p) {
    for (const auto& field : grid.fields) {
      const auto f = p ? restrict_field(field, *p) : field;
      rep.max_lambda = std::max(rep.max_lambda, correlation_lambda_max(tilt(base, f)));
      ++rep.fields_checked;
    }
  };
  check(d, nullptr);
  if (complete && n >= 2) {
    for_each_pinning(n, n - 2, [&](const Pinning& p) {
      if (std::all_of(p.begin(), p.end(), [](int v) { return v < 0; })) return;
      if (!(pinned_mass(d, p) > 0.0)) return;
      ++rep.pinnings_checked;
      check(pin(d, p), &p);
    });
  }
  rep.certified = rep.max_lambda <= eta;
  return rep;
}

double bounded_ratio(const DenseDistribution& nu, const DenseDistribution& mu) {
  if (nu.weights.size() != mu.weights.size()) throw DomainError("distributions live on different ground sets");
  for (std::size_t s = 0; s < nu.weights.size(); ++s) {
    if (nu.weights[s] > 0.0 && mu.weights[s] == 0.0) throw DomainError("nu is not absolutely continuous w.r.t. mu");
  }
  const auto pn = nu.marginals(), pm = mu.marginals();
  double best = 0.0;
  for (std::size_t i = 0; i < pn.size(); ++i) {
    if (pm[i] == 0.0 || pm[i] >= 1.0) continue;
    if (pn[i] >= 1.0) return std::numeric_limits<double>::infinity();
    best = std::max(best, pn[i] * (1.0 - pm[i]) / (pm[i] * (1.0 - pn[i])));
  }
  return best;
}

BoundedReport certify_c_bounded(const DenseDistribution& nu, const DenseDistribution& mu, double C, bool complete,
                                const FieldGrid* grid) {
  BoundedReport rep{C, bounded_ratio(nu, mu), false, 1, complete};
  if (complete) {
    const std::size_t n = mu.size();
    std::vector<std::vector<double>> fields{std::vector<double>(n, 1.0)};
    if (grid) fields.insert(fields.end(), grid->fields.begin(), grid->fields.end());
    for_each_pinning(n, n == 0 ? 0 : n - 1, [&](const Pinning& p) {
      if (!(pinned_mass(nu, p) > 0.0)) return;
      const DenseDistribution np = pin(nu, p), mp = pin(mu, p);
      for (const auto& field : fields) {
        const auto f = restrict_field(field, p);
        rep.max_ratio = std::max(rep.max_ratio, bounded_ratio(tilt(np, f), tilt(mp, f)));
        ++rep.checks;
      }
    });
  }
  rep.passed = rep.max_ratio <= C;
  return rep;
}

ContractionReport entropy_contraction_ratio(const DenseDistribution& nu, const DenseDistribution& mu, std::size_t l,
                                            std::optional<double> eta_prime) {
  const std::size_t n = mu.size();
  if (nu.size() != n) throw DomainError("distributions live on different ground sets");
  if (l > n) throw DomainError("l must be at most n");
  const double before = divergences(nu, mu).kl;
  if (!(before > 1e-10)) throw DomainError("KL(nu || mu) is too small for a contraction ratio");
  const double after = divergences(down_apply(homogenize(nu), n - l), down_apply(homogenize(mu), n - l)).kl;
  ContractionReport rep{after / before, before, after, std::nullopt};
  if (eta_prime) {
    const double theta = static_cast<double>(l) / static_cast<double>(n);
    rep.theoretical = 1.0 - std::pow(theta / 3.0, *eta_prime);
  }
  return rep;
}

double dobrushin_entry_exact(double lambda, double beta, int degree) {
  if (degree < 1) throw DomainError("degree must be at least 1");
  if (!(lambda > 0.0) || !(beta > 0.0)) throw DomainError("lambda and beta must be positive");
  const auto D = static_cast<std::size_t>(degree);
  const Graph star = star_graph(D);
  const DenseDistribution mu = enumerate_model(TwoSpinParams{beta, beta, lambda, false}, star, kDenseCap);
  // Vertex 0 is the center; leaf 1 is the influencing neighbor.
  auto plus = [&](Mask leaves) {
    const double w0 = mu.weights[leaves], w1 = mu.weights[leaves | 1U];
    return w1 / (w0 + w1);
  };
  double best = 0.0;
  for (Mask leaves = 0; leaves < (Mask{1} << (D + 1)); leaves += 2) {
    if (leaves & 2U) continue;
    best = std::max(best, std::abs(plus(leaves | 2U) - plus(leaves)));
  }
  return best;
}

}  // namespace spinchain

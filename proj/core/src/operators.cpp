#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <unordered_map>

#include "spinchain/errors.hpp"
#include "spinchain/oracle.hpp"
#include "spinchain/thresholds.hpp"

namespace spinchain {

namespace {

std::vector<Mask> support(const DenseDistribution& d) {
  std::vector<Mask> s;
  for (Mask m = 0; m < d.weights.size(); ++m) {
    if (d.weights[m] > 0.0) s.push_back(m);
  }
  return s;
}

void check_matrix_cap(std::size_t n) {
  if (n > kMatrixCap) {
    throw CapExceeded("transition matrix over 2^" + std::to_string(n) + " states exceeds the cap of 2^" +
                      std::to_string(kMatrixCap));
  }
}

TransitionMatrix empty_matrix(std::vector<Mask> states) {
  TransitionMatrix t{std::move(states), {}};
  t.P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(t.states.size()), static_cast<Eigen::Index>(t.states.size()));
  return t;
}

double binom(std::size_t n, std::size_t k) {
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

}  // namespace

std::size_t TransitionMatrix::index_of(Mask s) const {
  const auto it = std::lower_bound(states.begin(), states.end(), s);
  if (it == states.end() || *it != s) throw DomainError("configuration is not a state of this chain");
  return static_cast<std::size_t>(it - states.begin());
}

double TransitionMatrix::max_row_sum_error() const {
  return P.rows() == 0 ? 0.0 : (P.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

Eigen::VectorXd restrict_to(const TransitionMatrix& T, const DenseDistribution& d) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(T.states.size()));
  for (std::size_t i = 0; i < T.states.size(); ++i) v[static_cast<Eigen::Index>(i)] = d.weights[T.states[i]];
  return v;
}

DenseDistribution push_forward(const TransitionMatrix& T, const DenseDistribution& nu) {
  const Eigen::VectorXd v = restrict_to(T, nu);
  if (std::abs(v.sum() - 1.0) > 1e-9) throw DomainError("distribution puts mass outside the chain's states");
  const Eigen::RowVectorXd out = v.transpose() * T.P;
  DenseDistribution res = nu;
  std::fill(res.weights.begin(), res.weights.end(), 0.0);
  for (std::size_t i = 0; i < T.states.size(); ++i) res.weights[T.states[i]] = std::max(0.0, out[static_cast<Eigen::Index>(i)]);
  res.normalize();
  return res;
}

double stationarity_residual(const TransitionMatrix& T, const DenseDistribution& mu) {
  const Eigen::VectorXd v = restrict_to(T, mu);
  const Eigen::RowVectorXd r = v.transpose() * T.P - v.transpose();
  double outside = 1.0 - v.sum();
  return std::max(r.cwiseAbs().maxCoeff(), std::abs(outside));
}

double detailed_balance_residual(const TransitionMatrix& T, const DenseDistribution& mu) {
  const Eigen::VectorXd v = restrict_to(T, mu);
  const Eigen::MatrixXd flow = v.asDiagonal() * T.P;
  return (flow - flow.transpose()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd reversible_spectrum(const TransitionMatrix& T, const DenseDistribution& mu) {
  const Eigen::VectorXd v = restrict_to(T, mu);
  const Eigen::VectorXd s = v.cwiseSqrt();
  const Eigen::VectorXd inv = s.cwiseInverse();
  Eigen::MatrixXd S = s.asDiagonal() * T.P * inv.asDiagonal();
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

bool is_irreducible(const TransitionMatrix& T) {
  const auto n = static_cast<Eigen::Index>(T.states.size());
  if (n == 0) return false;
  for (int dir = 0; dir < 2; ++dir) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const auto x = stack.back();
      stack.pop_back();
      for (Eigen::Index y = 0; y < n; ++y) {
        const double p = dir == 0 ? T.P(x, y) : T.P(y, x);
        if (p > 0.0 && !seen[static_cast<std::size_t>(y)]) {
          seen[static_cast<std::size_t>(y)] = 1;
          stack.push_back(y);
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) return false;
  }
  return true;
}

TransitionMatrix down_up_walk(const DenseDistribution& d, std::size_t l) {
  if (!d.homogeneous_k) throw DomainError("down-up walk needs a homogeneous distribution");
  const std::size_t k = *d.homogeneous_k;
  if (l > k) throw DomainError("down-up walk level exceeds the support size");
  TransitionMatrix t = empty_matrix(support(d));
  if (l == k) {
    t.P.setIdentity();
    return t;
  }
  std::unordered_map<Mask, std::vector<std::size_t>> up;
  std::unordered_map<Mask, double> z;
  auto for_subsets = [&](Mask s, auto&& fn) {
    for (Mask u = s;; u = (u - 1) & s) {
      if (static_cast<std::size_t>(std::popcount(u)) == l) fn(u);
      if (u == 0) break;
    }
  };
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    const Mask s = t.states[i];
    for_subsets(s, [&](Mask u) {
      up[u].push_back(i);
      z[u] += d.weights[s];
    });
  }
  const double inv = 1.0 / binom(k, l);
  for (std::size_t i = 0; i < t.states.size(); ++i) {
    for_subsets(t.states[i], [&](Mask u) {
      const double zu = z[u];
      for (std::size_t j : up[u]) {
        t.P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += inv * d.weights[t.states[j]] / zu;
      }
    });
  }
  return t;
}

TransitionMatrix project_homogenized_blow_up_chain(const TransitionMatrix& T, const DenseDistribution& hom_blow_up,
                                                   std::size_t n, std::size_t k) {
  if (hom_blow_up.size() != 2 * n * k) throw DomainError("ground set does not match a homogenized blow-up");
  const Mask group = (Mask{1} << k) - 1;
  auto project = [&](Mask x) {
    Mask s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (x >> (i * k) & group) s |= Mask{1} << i;
    }
    return s;
  };
  std::vector<double> mass(std::size_t{1} << n, 0.0);
  for (Mask x : T.states) mass[project(x)] += hom_blow_up.weights[x];
  std::vector<Mask> states;
  for (Mask s = 0; s < mass.size(); ++s) {
    if (mass[s] > 0.0) states.push_back(s);
  }
  TransitionMatrix out = empty_matrix(std::move(states));
  std::vector<std::size_t> fiber(T.states.size());
  for (std::size_t a = 0; a < T.states.size(); ++a) fiber[a] = out.index_of(project(T.states[a]));
  for (std::size_t a = 0; a < T.states.size(); ++a) {
    const double w = hom_blow_up.weights[T.states[a]] / mass[out.states[fiber[a]]];
    if (w == 0.0) continue;
    for (std::size_t b = 0; b < T.states.size(); ++b) {
      const double p = T.P(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (p != 0.0) out.P(static_cast<Eigen::Index>(fiber[a]), static_cast<Eigen::Index>(fiber[b])) += w * p;
    }
  }
  return out;
}

namespace {

std::size_t block_size(std::size_t n, std::size_t k, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("theta must lie in (0, 1]");
  if (k == 0) throw DomainError("blow-up multiplicity must be positive");
  const double raw = theta * static_cast<double>(k * n);
  auto l = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::min(l, n * k);
}

}  // namespace

TransitionMatrix projected_block_row(const DenseDistribution& d, std::size_t k, double theta) {
  const std::size_t n = d.size();
  check_matrix_cap(n);
  const std::size_t l = block_size(n, k, theta);
  TransitionMatrix t = empty_matrix(support(d));
  const double total = binom(n * k, l);
  const double kd = static_cast<double>(k);

  // Removal counts r_i of the k labels present at each site, sum l.
  std::vector<std::size_t> r(n, 0);
  std::vector<double> tiltw(n);
  std::vector<double> cond(d.weights.size());
  auto visit = [&](double pr) {
    Mask touched = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (r[i] > 0) touched |= Mask{1} << i;
      tiltw[i] = static_cast<double>(r[i]) / kd;
    }
    for (std::size_t a = 0; a < t.states.size(); ++a) {
      const Mask sigma = t.states[a];
      const Mask exposed = sigma & touched;
      // A: occupied sites whose unbarred label was removed.
      for (Mask A = exposed;; A = (A - 1) & exposed) {
        double pa = pr;
        for (std::size_t i = 0; i < n; ++i) {
          if (!(exposed >> i & 1U)) continue;
          pa *= (A >> i & 1U) ? tiltw[i] : 1.0 - tiltw[i];
        }
        if (pa > 0.0) {
          const Mask in = sigma & ~A;
          const Mask free = touched & ~in;
          double z = 0.0;
          for (Mask T = free;; T = (T - 1) & free) {
            double w = d.weights[in | T];
            for (Mask q = T; q && w > 0.0; q &= q - 1) w *= tiltw[static_cast<std::size_t>(std::countr_zero(q))];
            cond[T] = w;
            z += w;
            if (T == 0) break;
          }
          for (Mask T = free;; T = (T - 1) & free) {
            if (cond[T] > 0.0) {
              t.P(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t.index_of(in | T))) += pa * cond[T] / z;
            }
            if (T == 0) break;
          }
        }
        if (A == 0) break;
      }
    }
  };
  auto rec = [&](auto&& self, std::size_t i, std::size_t left, double pr) -> void {
    if (i == n) {
      if (left == 0) visit(pr / total);
      return;
    }
    if (left > (n - i) * k) return;
    for (std::size_t ri = 0; ri <= std::min(k, left); ++ri) {
      r[i] = ri;
      self(self, i + 1, left - ri, pr * binom(k, ri));
    }
    r[i] = 0;
  };
  rec(rec, 0, l, 1.0);
  return t;
}

TransitionMatrix projected_block_literal(const DenseDistribution& d, std::size_t k, double theta) {
  const std::size_t n = d.size();
  const std::size_t l = block_size(n, k, theta);
  const std::vector<std::size_t> ks(n, k);
  const DenseDistribution hom = homogenize(blow_up(d, ks));
  const TransitionMatrix walk = down_up_walk(hom, n * k - l);
  return project_homogenized_blow_up_chain(walk, hom, n, k);
}

TransitionMatrix site_update_matrix(const DenseDistribution& mu, std::size_t v) {
  check_matrix_cap(mu.size());
  if (v >= mu.size()) throw DomainError("site index out of range");
  TransitionMatrix t = empty_matrix(support(mu));
  const Mask bit = Mask{1} << v;
  for (std::size_t a = 0; a < t.states.size(); ++a) {
    const Mask s0 = t.states[a] & ~bit, s1 = t.states[a] | bit;
    const double w0 = mu.weights[s0], w1 = mu.weights[s1];
    const double p1 = w1 / (w0 + w1);
    if (w0 > 0.0) t.P(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t.index_of(s0))) += 1.0 - p1;
    if (w1 > 0.0) t.P(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t.index_of(s1))) += p1;
  }
  return t;
}

TransitionMatrix product(const TransitionMatrix& a, const TransitionMatrix& b) {
  if (a.states != b.states) throw DomainError("transition matrices act on different state spaces");
  TransitionMatrix t{a.states, a.P * b.P};
  return t;
}

TransitionMatrix glauber_matrix(const DenseDistribution& mu) {
  const std::size_t n = mu.size();
  TransitionMatrix t = empty_matrix(support(mu));
  for (std::size_t v = 0; v < n; ++v) t.P += site_update_matrix(mu, v).P / static_cast<double>(n);
  return t;
}

TransitionMatrix scan_matrix(const DenseDistribution& mu, std::span<const Vertex> order) {
  TransitionMatrix t = empty_matrix(support(mu));
  t.P.setIdentity();
  for (Vertex v : order) t.P = (t.P * site_update_matrix(mu, v).P).eval();
  return t;
}

TransitionMatrix field_dynamics_matrix(const DenseDistribution& mu, double theta) {
  const std::size_t n = mu.size();
  check_matrix_cap(n);
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("field dynamics needs theta in (0, 1)");
  TransitionMatrix t = empty_matrix(support(mu));
  const Mask full = (Mask{1} << n) - 1;
  std::vector<double> theta_pow(n + 1, 1.0), keep_pow(n + 1, 1.0);
  for (std::size_t i = 1; i <= n; ++i) {
    theta_pow[i] = theta_pow[i - 1] * theta;
    keep_pow[i] = keep_pow[i - 1] * (1.0 - theta);
  }
  // z[R]: mass of (theta * mu) over supersets of R, with R's own factor removed.
  std::vector<double> z(std::size_t{1} << n, 0.0);
  for (Mask R = 0; R <= full; ++R) {
    const Mask rest = full & ~R;
    for (Mask T = rest;; T = (T - 1) & rest) {
      z[R] += mu.weights[R | T] * theta_pow[static_cast<std::size_t>(std::popcount(T))];
      if (T == 0) break;
    }
  }
  for (std::size_t a = 0; a < t.states.size(); ++a) {
    const Mask sigma = t.states[a];
    const auto size = static_cast<std::size_t>(std::popcount(sigma));
    // R: occupied sites left out of S, hence kept occupied.
    for (Mask R = sigma;; R = (R - 1) & sigma) {
      const auto r = static_cast<std::size_t>(std::popcount(R));
      const double pr = keep_pow[r] * theta_pow[size - r] / z[R];
      const Mask rest = full & ~R;
      for (Mask T = rest;; T = (T - 1) & rest) {
        const double w = mu.weights[R | T];
        if (w > 0.0) {
          t.P(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t.index_of(R | T))) +=
              pr * w * theta_pow[static_cast<std::size_t>(std::popcount(T))];
        }
        if (T == 0) break;
      }
      if (R == 0) break;
    }
  }
  return t;
}

TransitionMatrix chain_transition_matrix(const ChainSpec& spec, const Model& m, const Graph& g) {
  check_matrix_cap(g.num_vertices());
  const DenseDistribution mu = enumerate_model(m, g, kMatrixCap);
  const std::size_t n = g.num_vertices();
  if (spec.name == "glauber") return glauber_matrix(mu);
  if (spec.name == "scan") {
    auto order = identity_order(n);
    const auto kind = spec.text("order", "identity");
    if (kind == "reverse") {
      std::reverse(order.begin(), order.end());
    } else if (kind != "identity") {
      throw DomainError("scan order must be identity or reverse");
    }
    return scan_matrix(mu, order);
  }
  if (spec.name == "field") {
    if (spec.text("resampler", "exact") != "exact") {
      throw DomainError("only the exact field-dynamics resampler has an oracle matrix");
    }
    return field_dynamics_matrix(mu, spec.number("theta", default_theta(m, g)));
  }
  if (spec.name == "site") {
    const double v = spec.number("v", -1.0);
    if (v < 0.0 || v != std::floor(v)) throw DomainError("site chain needs v=<vertex>");
    return site_update_matrix(mu, static_cast<std::size_t>(v));
  }
  if (spec.name == "balanced") {
    throw DomainError(
        "balanced Glauber dynamics is not a chain on configurations alone; compose site matrices along the realized "
        "update sequence instead");
  }
  throw DomainError("no oracle matrix for chain '" + spec.name + "'");
}

}  // namespace spinchain

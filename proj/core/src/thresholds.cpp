#include "spinchain/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "spinchain/errors.hpp"

namespace spinchain {

namespace {

// x^k for possibly large k, through logs once the exponent is large.
double power(double x, double k) {
  if (std::abs(k) <= 50) return std::pow(x, k);
  if (x == 0) return k > 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::exp(k * std::log(x));
}

double log_tree_map(const TwoSpinParams& p, double d, double x) {
  return std::log(p.lambda) + d * (std::log1p(p.beta * x) - std::log(x + p.gamma));
}

}  // namespace

double hardcore_critical_fugacity(int max_degree) {
  if (max_degree < 3) throw DomainError("hardcore_critical_fugacity needs max degree >= 3");
  const double d = max_degree;
  if (max_degree <= 50) return std::pow(d - 1, d - 1) / std::pow(d - 2, d);
  return std::exp((d - 1) * std::log(d - 1) - d * std::log(d - 2));
}

BetaInterval ising_worst_case_interval(int max_degree, double gap) {
  if (max_degree < 3) throw DomainError("ising_worst_case_interval needs max degree >= 3");
  if (!(gap >= 0 && gap <= 1)) throw DomainError("ising_worst_case_interval needs gap in [0, 1]");
  const double d = max_degree;
  return {(d - 2 + gap) / (d - gap), (d - gap) / (d - 2 + gap)};
}

TreeFixpoint tree_recursion_gap(const TwoSpinParams& p, double d) {
  if (!(p.beta * p.gamma <= 1.0)) throw DomainError("tree_recursion_gap needs beta*gamma <= 1");
  if (!(p.lambda > 0) || !(p.gamma > 0) || !(p.beta >= 0)) throw DomainError("tree_recursion_gap: bad parameters");
  if (!(d >= 1)) throw DomainError("tree_recursion_gap needs d >= 1");

  // g(x) = x - F_d(x) is increasing because F_d is nonincreasing for beta*gamma <= 1.
  auto g = [&](double x) { return x - std::exp(log_tree_map(p, d, x)); };
  double lo = 0;
  double hi = std::max(p.lambda, p.lambda * power(p.gamma, d)) + 1;
  int expansions = 0;
  while (g(hi) < 0) {
    lo = hi;
    hi *= 2;
    if (++expansions > 2000) throw Error("tree_recursion_gap: bracket expansion did not converge");
  }
  for (int it = 0; it < 4000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi) break;
    if (g(mid) < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x = 0.5 * (lo + hi);
  const double fx = std::exp(log_tree_map(p, d, x));
  const double deriv = d * fx * (p.beta * p.gamma - 1) / ((p.beta * x + 1) * (x + p.gamma));
  return {x, 1 - std::abs(deriv)};
}

UniquenessLambdas antiferro_uniqueness_lambdas(double beta, double gamma, double delta, double d) {
  if (!(beta > 0) || !(gamma > 0) || !(beta * gamma <= 1)) {
    throw DomainError("antiferro_uniqueness_lambdas needs beta > 0, gamma > 0, beta*gamma <= 1");
  }
  if (!(delta >= 0 && delta < 1)) throw DomainError("antiferro_uniqueness_lambdas needs delta in [0, 1)");
  if (!(d >= 1)) throw DomainError("antiferro_uniqueness_lambdas needs d >= 1");

  UniquenessLambdas out;
  const double bg = beta * gamma;
  const double s = std::sqrt(bg);
  out.delta_bar = s < 1 ? (1 + s) / (1 - s) : std::numeric_limits<double>::infinity();
  out.zeta = d * (1 - bg) - (1 - delta) * (1 + bg);
  if (d <= (1 - delta) * out.delta_bar) return out;

  out.case_two = true;
  double disc = out.zeta * out.zeta - 4 * (1 - delta) * (1 - delta) * bg;
  if (disc < 0) {
    if (disc < -1e-12 * out.zeta * out.zeta) {
      throw Error("antiferro_uniqueness_lambdas: negative discriminant in case two");
    }
    disc = 0;
  }
  const double root = std::sqrt(disc);
  out.x2 = (out.zeta + root) / (2 * (1 - delta) * beta);
  // Same root as (zeta - sqrt(disc)) / (2(1-delta)beta), without the cancellation.
  out.x1 = 2 * (1 - delta) * gamma / (out.zeta + root);
  auto log_lambda = [&](double x) { return std::log(x) + d * (std::log(x + gamma) - std::log1p(beta * x)); };
  const double l1 = log_lambda(out.x1), l2 = log_lambda(out.x2);
  out.lambda1 = std::exp(l1);
  out.lambda2 = std::exp(l2);
  const double target = (d + 1) * (std::log(gamma) - std::log(beta));
  if (std::abs(std::expm1(l1 + l2 - target)) > 1e-9) {
    throw Error("antiferro_uniqueness_lambdas: product identity violated");
  }
  return out;
}

Lambda1Bounds lambda1_bounds_check(double beta, double gamma, double delta, double d) {
  const auto u = antiferro_uniqueness_lambdas(beta, gamma, delta, d);
  if (!u.case_two) throw DomainError("lambda1_bounds_check needs d > (1-delta) * delta_bar");
  const double log_g = (d + 1) * std::log(gamma);
  const double lower = (1 - delta) * std::exp(log_g) / u.zeta;
  const double upper = 9 * std::exp(log_g - 0.5 * std::log(beta * gamma));
  return {lower, u.lambda1, upper};
}

double dobrushin_entry_bound(double lambda, double beta, int degree) {
  if (degree < 1) throw DomainError("dobrushin bound needs degree >= 1");
  if (!(beta > 0)) throw DomainError("dobrushin bound needs beta > 0");
  const double lb = std::log(beta);
  const double e = std::max((degree - 2) * lb, -degree * lb);
  return lambda * std::abs(beta * beta - 1) * std::exp(e);
}

double dobrushin_entry_max_form(double lambda, double beta, int degree) {
  if (degree < 1) throw DomainError("dobrushin max form needs degree >= 1");
  if (!(beta > 0)) throw DomainError("dobrushin max form needs beta > 0");
  auto sigmoid = [&](double k) {
    const double t = std::log(lambda) + k * std::log(beta);
    return t > 0 ? 1 / (1 + std::exp(-t)) : std::exp(t) / (1 + std::exp(t));
  };
  double best = 0;
  for (int s = 0; s < degree; ++s) {
    best = std::max(best, std::abs(sigmoid(degree - 2.0 * s) - sigmoid(degree - 2.0 * s - 2)));
  }
  return best;
}

double dobrushin_row_bound(const TwoSpinParams& p, int max_degree) {
  if (!p.is_ising()) throw DomainError("dobrushin_row_bound is for the Ising case");
  if (p.lambda > 1) throw DomainError("dobrushin_row_bound needs lambda <= 1 (flip spins first)");
  return max_degree * dobrushin_entry_bound(p.lambda, p.beta, max_degree);
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::hardcore_delta_unique:
      return "hardcore-delta-unique";
    case Regime::ising_worst_case_delta_unique:
      return "ising-worst-case-delta-unique";
    case Regime::up_to_delta_unique:
      return "up-to-delta-unique";
    case Regime::non_unique:
      return "non-unique";
  }
  return "non-unique";
}

UniquenessReport classify_uniqueness(const Model& m, int max_degree, double delta, bool params_given) {
  if (max_degree < 3) throw DomainError("uniqueness classification needs max degree >= 3");
  if (!(delta >= 0 && delta < 1)) throw DomainError("uniqueness classification needs delta in [0, 1)");
  UniquenessReport r;
  r.model = model_name(m);
  r.max_degree = max_degree;
  r.delta_requested = delta;
  r.params_given = params_given;

  if (const auto* hc = std::get_if<HardcoreParams>(&m)) {
    r.lambda_critical = hardcore_critical_fugacity(max_degree);
    if (!params_given) return r;
    const double lam = hc->max_fugacity();
    r.delta_gap = std::clamp(1 - lam / r.lambda_critical, 0.0, 1.0);
    r.regime = lam <= (1 - delta) * r.lambda_critical ? Regime::hardcore_delta_unique : Regime::non_unique;
    return r;
  }

  const auto& p = std::get<TwoSpinParams>(m);
  if (p.is_ising()) r.beta_interval = ising_worst_case_interval(max_degree, delta);
  const bool antiferro = p.beta * p.gamma < 1;
  if (antiferro && p.beta > 0) {
    const int last = max_degree - 1;
    for (int d = 1; d <= last; ++d) {
      if (d > 64 && d != last) continue;
      const auto u = antiferro_uniqueness_lambdas(p.beta, p.gamma, delta, d);
      r.critical.push_back({d, u.case_two, u.lambda1, u.lambda2});
    }
  }
  if (!params_given) return r;

  if (p.is_ising()) {
    const double b = p.beta <= 1 ? p.beta : 1 / p.beta;
    const double ws_gap = (2 - max_degree * (1 - b)) / (1 + b);
    if (ws_gap >= delta) {
      r.regime = Regime::ising_worst_case_delta_unique;
      r.delta_gap = std::clamp(ws_gap, 0.0, 1.0);
      return r;
    }
  }
  if (p.beta * p.gamma <= 1) {
    double worst = 1;
    for (int d = 1; d <= max_degree - 1; ++d) worst = std::min(worst, tree_recursion_gap(p, d).gap);
    r.delta_gap = std::clamp(worst, 0.0, 1.0);
    r.regime = worst >= delta ? Regime::up_to_delta_unique : Regime::non_unique;
  }
  return r;
}

std::string to_json(const UniquenessReport& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model;
  j["max_degree"] = r.max_degree;
  j["delta"] = r.delta_requested;
  if (r.model == "hardcore") {
    j["lambda_critical"] = r.lambda_critical;
    j["lambda_max_for_delta"] = (1 - r.delta_requested) * r.lambda_critical;
  }
  if (r.model == "ising") j["beta_interval"] = {r.beta_interval.lo, r.beta_interval.hi};
  if (!r.critical.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : r.critical) {
      nlohmann::ordered_json e;
      e["d"] = c.d;
      e["case"] = c.case_two ? 2 : 1;
      if (c.case_two) {
        e["lambda1"] = c.lambda1;
        e["lambda2"] = c.lambda2;
      }
      arr.push_back(e);
    }
    j["critical"] = arr;
  }
  if (r.params_given) {
    j["regime"] = regime_name(r.regime);
    j["delta_gap"] = r.delta_gap;
  }
  return j.dump();
}

}  // namespace spinchain

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinchain/errors.hpp"
#include "spinchain/oracle.hpp"

namespace spinchain {

namespace {

// p a log(a/m) + q b log(b/m) with m = p a + q b; equals the two-point entropy without cancellation
// between the f log f terms and m log m.
double two_point_entropy(double p, double a, double b) {
  const double q = 1.0 - p;
  const double m = p * a + q * b;
  return p * a * std::log(a / m) + q * b * std::log(b / m);
}

}  // namespace

LemmaSides ent_compare_sides(double a, double b, double x, double eta) {
  if (!(a > 0.0 && b > 0.0 && x > 0.0 && eta > 0.0)) throw DomainError("ent-compare needs positive arguments");
  const double k = std::max(eta, 1.0 / eta);
  const double lhs = two_point_entropy(1.0 / (x + 1.0), a, b);
  const double rhs = k * two_point_entropy(1.0 / (eta * x + 1.0), a, b);
  const double scale = std::max(std::abs(a * std::log(a)), std::abs(b * std::log(b))) * k + 1.0;
  return {lhs, rhs, scale};
}

LemmaSides dirichlet_to_entropy_sides(double f_plus, double f_minus, double C, double mu_plus) {
  if (!(f_plus > 0.0 && f_minus > 0.0 && C > 0.0)) throw DomainError("dirichlet-to-entropy needs positive f and C");
  if (!(mu_plus > 0.0 && mu_plus < 1.0)) throw DomainError("mu_plus must lie in (0, 1)");
  const double mu_minus = 1.0 - mu_plus;
  const double ent = two_point_entropy(mu_minus, f_minus, f_plus);
  const double lhs = C * ent;
  // mu_- f_- log f_- + mu_+ f_+ log f_+ - (mu_- f_- + mu_+ f_+)(mu_+ log f_+ + mu_- log f_-), collected.
  const double rhs = mu_minus * mu_plus * (f_minus - f_plus) * (std::log(f_minus) - std::log(f_plus));
  const double scale = C * std::max(std::abs(f_minus * std::log(f_minus)), std::abs(f_plus * std::log(f_plus))) + 1.0;
  return {lhs, rhs, scale};
}

double dirichlet_form(const TransitionMatrix& T, std::span<const double> pi, std::span<const double> f,
                      std::span<const double> g) {
  const auto n = static_cast<Eigen::Index>(T.states.size());
  if (pi.size() != T.states.size() || f.size() != pi.size() || g.size() != pi.size()) {
    throw DomainError("vectors must have one entry per state");
  }
  double e = 0.0;
  for (Eigen::Index x = 0; x < n; ++x) {
    double pf = 0.0;
    for (Eigen::Index y = 0; y < n; ++y) pf += T.P(x, y) * f[static_cast<std::size_t>(y)];
    const auto xi = static_cast<std::size_t>(x);
    e += pi[xi] * (f[xi] - pf) * g[xi];
  }
  return e;
}

DirichletCheck dirichlet_check(const TransitionMatrix& T, std::span<const double> pi, std::span<const double> f,
                               double gamma) {
  const std::size_t n = T.states.size();
  if (pi.size() != n || f.size() != n) throw DomainError("vectors must have one entry per state");
  DirichletCheck c{};
  c.kappa = -std::numeric_limits<double>::infinity();
  std::vector<double> ef(n), gf(n);
  double mean = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    ef[x] = std::exp(gamma * f[x]);
    gf[x] = gamma * f[x];
    mean += pi[x] * ef[x];
  }
  for (std::size_t x = 0; x < n; ++x) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      const double p = T.P(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
      if (p <= 0.0) continue;
      const double d = f[x] - f[y];
      s1 += p * (d > 0.0 ? d * d : 0.0);
      s2 += p * (d < 0.0 ? d * d : 0.0);
      c.kappa = std::max(c.kappa, -d);
    }
    c.v1 = std::max(c.v1, s1);
    c.v2 = std::max(c.v2, s2);
  }
  c.dirichlet = dirichlet_form(T, pi, ef, gf);
  c.bound1 = gamma * gamma * c.v1 * mean;
  c.bound2 = std::exp(gamma * c.kappa) * gamma * gamma * c.v2 * mean;
  return c;
}

}  // namespace spinchain

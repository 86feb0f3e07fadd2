#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "spinchain/diagnostics.hpp"
#include "spinchain/rng.hpp"
#include "spinchain/thresholds.hpp"

namespace spinchain {

namespace {

using Json = nlohmann::ordered_json;

DenseDistribution random_on_support(const DenseDistribution& like, Rng& rng) {
  DenseDistribution d = like;
  for (std::size_t s = 0; s < d.weights.size(); ++s) {
    d.weights[s] = like.weights[s] > 0.0 ? std::pow(uniform01(rng), 3.0) + 1e-3 : 0.0;
  }
  d.normalize();
  return d;
}

CriterionResult make(int id, const char* name, bool ok, Json measured, const char* tolerance) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  r.passed = ok;
  r.measured = measured.dump();
  r.tolerance = tolerance;
  return r;
}

}  // namespace

std::vector<CriterionResult> run_oracle_suite(std::uint64_t seed) {
  std::vector<CriterionResult> out;
  Rng rng(derive_seed(seed, 0x5eed));

  {
    const Model m = normalize(TwoSpinParams{0.8, 0.8, 1.0, false});
    const Graph g = cycle_graph(6);
    const auto mu = enumerate_model(m, g);
    const auto t = chain_transition_matrix(ChainSpec::parse("glauber"), m, g);
    const double r = stationarity_residual(t, mu);
    out.push_back(make(1, "glauber-cycle6-ising", r <= 1e-12 && t.states.size() == 64,
                       {{"states", t.states.size()}, {"residual", r}}, "muP = mu to 1e-12"));
  }
  {
    const Graph g = path_graph(5);
    const Model m = HardcoreParams{{0.5, 1.5, 0.7, 2.0, 1.0}};
    const auto mu = enumerate_model(m, g);
    double r = 0.0;
    for (const char* order : {"scan:order=identity", "scan:order=reverse"}) {
      r = std::max(r, stationarity_residual(chain_transition_matrix(ChainSpec::parse(order), m, g), mu));
    }
    const double db = detailed_balance_residual(chain_transition_matrix(ChainSpec::parse("scan"), m, g), mu);
    out.push_back(make(2, "scan-stationary-not-reversible", r <= 1e-12 && db > 1e-6,
                       {{"stationarity", r}, {"detailed_balance", db}}, "stationary to 1e-12; reversibility residual > 0"));
  }
  {
    const Graph g = cycle_graph(5);
    const Model m = HardcoreParams::uniform(5, 1.2);
    const auto mu = enumerate_model(m, g);
    double db = 0.0, st = 0.0, lazy = 0.0;
    bool irreducible = true;
    for (double theta : {0.1, 0.5, 0.9}) {
      const auto t = field_dynamics_matrix(mu, theta);
      db = std::max(db, detailed_balance_residual(t, mu));
      st = std::max(st, stationarity_residual(t, mu));
      irreducible = irreducible && is_irreducible(t);
      lazy = std::max(lazy, t.P.diagonal().maxCoeff());
    }
    out.push_back(make(3, "field-dynamics-reversible", db <= 1e-12 && st <= 1e-12 && irreducible && lazy > 0.0,
                       {{"detailed_balance", db}, {"stationarity", st}, {"irreducible", irreducible}},
                       "detailed balance to 1e-12; irreducible; aperiodic"));
  }
  {
    double db = 0.0, min_eig = std::numeric_limits<double>::infinity();
    for (int inst = 0; inst < 5; ++inst) {
      std::vector<double> w(8);
      for (double& x : w) x = uniform01(rng) + 0.01;
      const auto hom = homogenize(DenseDistribution::from_weights(default_labels(3), w));
      for (std::size_t l = 0; l <= 3; ++l) {
        const auto t = down_up_walk(hom, l);
        db = std::max(db, detailed_balance_residual(t, hom));
        min_eig = std::min(min_eig, reversible_spectrum(t, hom).minCoeff());
      }
    }
    out.push_back(make(4, "down-up-walk", db <= 1e-12 && min_eig >= -1e-9,
                       {{"detailed_balance", db}, {"min_eigenvalue", min_eig}},
                       "reversible to 1e-12; eigenvalues >= -1e-9"));
  }
  {
    double gap = 0.0, st = 0.0;
    const Graph g = path_graph(3);
    const auto mu3 = enumerate_model(HardcoreParams::uniform(3, 0.8), g);
    const auto mu2 = enumerate_model(normalize(TwoSpinParams{0.6, 0.6, 0.9, false}), path_graph(2));
    for (const auto* mu : {&mu2, &mu3}) {
      for (double theta : {0.25, 0.5}) {
        const auto fast = projected_block_row(*mu, 2, theta);
        const auto lit = projected_block_literal(*mu, 2, theta);
        gap = std::max(gap, (fast.P - lit.P).cwiseAbs().maxCoeff());
        st = std::max(st, stationarity_residual(fast, *mu));
      }
    }
    out.push_back(make(5, "projected-block-reduction", gap <= 1e-12 && st <= 1e-12,
                       {{"max_gap_vs_literal", gap}, {"stationarity", st}},
                       "removal-count reduction equals the literal down-up walk to 1e-12"));
  }
  {
    const Graph g = cycle_graph(5);
    const auto mu = enumerate_model(HardcoreParams::uniform(5, 1.0), g);
    const std::vector<TransitionMatrix> chains = {glauber_matrix(mu), scan_matrix(mu, identity_order(5)),
                                                  field_dynamics_matrix(mu, 0.3)};
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < 1000; ++t) {
      const auto nu = random_on_support(mu, rng);
      const auto& P = chains[static_cast<std::size_t>(t) % chains.size()];
      worst = std::max(worst, divergences(push_forward(P, nu), mu).kl - divergences(nu, mu).kl);
    }
    out.push_back(make(6, "data-processing", worst <= 1e-10, {{"max_kl_increase", worst}},
                       "KL(nuP || mu) <= KL(nu || mu) + 1e-10"));
  }
  {
    double worst = -std::numeric_limits<double>::infinity();
    std::vector<double> w(32);
    for (int t = 0; t < 1000; ++t) {
      for (double& x : w) x = uniform01(rng);
      const auto nu = DenseDistribution::from_weights(default_labels(5), w);
      for (double& x : w) x = uniform01(rng) + 1e-3;
      const auto mu = DenseDistribution::from_weights(default_labels(5), w);
      const auto d = divergences(nu, mu);
      worst = std::max(worst, d.tv - std::sqrt(d.kl / 2));
    }
    out.push_back(make(7, "pinsker", worst <= 1e-12, {{"max_tv_minus_bound", worst}}, "tv <= sqrt(kl/2)"));
  }
  {
    std::size_t v1 = 0, v2 = 0;
    for (int t = 0; t < 1000; ++t) {
      const std::size_t n = 2 + static_cast<std::size_t>(t % 4);
      const double a = 0.5 + uniform01(rng);
      const Model m = t % 2 ? Model{HardcoreParams::uniform(n, a)} : Model{normalize(TwoSpinParams{a, a, 0.8, false})};
      const auto mu = enumerate_model(m, path_graph(n));
      const auto T = glauber_matrix(mu);
      std::vector<double> pi(T.states.size()), f(T.states.size());
      for (std::size_t i = 0; i < pi.size(); ++i) {
        pi[i] = mu.weights[T.states[i]];
        f[i] = 4.0 * uniform01(rng) - 2.0;
      }
      const double gamma = 2.0 * uniform01(rng);
      const auto c = dirichlet_check(T, pi, f, gamma);
      if (c.dirichlet > c.bound1 * (1 + 1e-12) + 1e-15) ++v1;
      if (c.dirichlet > c.bound2 * (1 + 1e-12) + 1e-15) ++v2;
    }
    out.push_back(make(8, "dirichlet-form-bounds", v1 == 0 && v2 == 0, {{"violations_v1", v1}, {"violations_v2", v2}},
                       "both Dirichlet-form bounds on 1000 random (f, gamma)"));
  }
  {
    Rng grng(derive_seed(seed, 9));
    const Graph g = generate_random_regular(6, 3, grng);
    const Model m = HardcoreParams::uniform(6, 2.0);
    const auto mu = enumerate_model(m, g);
    SiteUpdater up(m, g);
    auto state = make_balanced_state(g, SpinConfig(6, false), 1.5);
    std::vector<Vertex> log;
    for (int t = 0; t < 60; ++t) balanced_glauber_step(up, state, rng, &log);
    TransitionMatrix prod{glauber_matrix(mu).states, {}};
    prod.P = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(prod.states.size()),
                                       static_cast<Eigen::Index>(prod.states.size()));
    for (Vertex v : log) prod.P = (prod.P * site_update_matrix(mu, v).P).eval();
    const double r = stationarity_residual(prod, mu);
    out.push_back(make(9, "balanced-realized-sequence", r <= 1e-12,
                       {{"updates", log.size()}, {"forced", state.forced_updates}, {"residual", r}},
                       "product of site matrices along the realized updates fixes mu to 1e-12"));
  }
  {
    std::size_t viol = 0;
    for (int t = 0; t < 10000; ++t) {
      auto lu = [&] { return std::exp(std::log(1e3) * (2 * uniform01(rng) - 1)); };
      const auto s = ent_compare_sides(lu(), lu(), lu(), lu());
      if (s.lhs - s.rhs > 1e-12 * s.scale) ++viol;
    }
    out.push_back(make(10, "ent-compare", viol == 0, {{"tuples", 10000}, {"violations", viol}},
                       "zero violations beyond 1e-12 * scale"));
  }
  return out;
}

}  // namespace spinchain

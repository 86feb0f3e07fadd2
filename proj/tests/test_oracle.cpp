#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "spinchain/errors.hpp"
#include "spinchain/oracle.hpp"
#include "spinchain/thresholds.hpp"

using namespace spinchain;

namespace {

DenseDistribution random_distribution(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(std::size_t{1} << n);
  for (auto& x : w) x = 0.05 + uniform01(rng);
  return DenseDistribution::from_weights(default_labels(n), w);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  EXPECT_EQ(a.size(), b.size());
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST(Oracle, EnumerateEdge) {
  const auto d = enumerate_model(HardcoreParams::uniform(2, 1.0), path_graph(2));
  EXPECT_NEAR(d[0b00], 1.0 / 3, 1e-15);
  EXPECT_NEAR(d[0b01], 1.0 / 3, 1e-15);
  EXPECT_NEAR(d[0b10], 1.0 / 3, 1e-15);
  EXPECT_EQ(d[0b11], 0.0);
}

TEST(Oracle, EnumerateSingleIsingSpin) {
  const auto d = enumerate_model(TwoSpinParams{0.7, 0.7, 1.0}, Graph::from_edges(1, std::vector<Edge>{}));
  EXPECT_NEAR(d[0], 0.5, 1e-15);
  EXPECT_NEAR(d[1], 0.5, 1e-15);
}

TEST(Oracle, EnumerateTriangle) {
  const auto d = enumerate_model(HardcoreParams::uniform(3, 2.0), complete_graph(3));
  EXPECT_NEAR(d[0], 1.0 / 7, 1e-15);
  for (Mask s : {1u, 2u, 4u}) EXPECT_NEAR(d[s], 2.0 / 7, 1e-15);
  for (Mask s : {3u, 5u, 6u, 7u}) EXPECT_EQ(d[s], 0.0);
}

TEST(Oracle, EnumerateCap) {
  EXPECT_THROW(enumerate_model(HardcoreParams::uniform(15, 1.0), path_graph(15)), CapExceeded);
}

TEST(Oracle, TiltAndPinIdentity) {
  const auto d = random_distribution(4, 1);
  const std::vector<double> ones(4, 1.0);
  EXPECT_LT(max_abs_diff(tilt(d, ones).weights, d.weights), 1e-15);
  EXPECT_LT(max_abs_diff(pin(d, Pinning(4, -1)).weights, d.weights), 1e-15);
}

TEST(Oracle, PinNeighborExclusion) {
  const auto d = enumerate_model(HardcoreParams::uniform(2, 1.0), path_graph(2));
  const auto p = pin(d, Pinning{1, -1});
  ASSERT_EQ(p.size(), 1u);
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_EQ(p[1], 0.0);
}

TEST(Oracle, HomogenizeSingleElement) {
  const auto d = DenseDistribution::from_weights(default_labels(1), {0.3, 0.7});
  const auto h = homogenize(d);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h.homogeneous_k, std::optional<std::size_t>(1));
  EXPECT_EQ(h.ground[1], "0~");
  EXPECT_NEAR(h[0b01], 0.7, 1e-15);
  EXPECT_NEAR(h[0b10], 0.3, 1e-15);
  EXPECT_LT(max_abs_diff(dehomogenize(h).weights, d.weights), 1e-15);
}

TEST(Oracle, BlowUpTrivialMultiplicity) {
  const auto d = random_distribution(3, 2);
  const std::vector<std::size_t> k{1, 1, 1};
  const auto b = blow_up(d, k);
  EXPECT_LT(max_abs_diff(b.weights, d.weights), 1e-15);
  EXPECT_LT(max_abs_diff(project_blow_up(blow_up(d, std::vector<std::size_t>{2, 1, 3}),
                                         std::vector<std::size_t>{2, 1, 3})
                             .weights,
                         d.weights),
            1e-14);
}

TEST(Oracle, DownOperator) {
  const auto d = random_distribution(3, 3);
  const auto h = homogenize(d);
  EXPECT_LT(max_abs_diff(down_apply(h, 3).weights, h.weights), 1e-15);

  std::vector<double> w(8, 0.0);
  w[0b110] = 1.0;
  const auto point = DenseDistribution::from_weights(default_labels(3), w);
  const auto one = down_apply(point, 1);
  EXPECT_NEAR(one[0b010], 0.5, 1e-15);
  EXPECT_NEAR(one[0b100], 0.5, 1e-15);
  EXPECT_NEAR(one[0b001], 0.0, 1e-15);
}

TEST(Oracle, DownOperatorComposition) {
  // A random law on the 4-subsets of 6 elements.
  Rng rng(4);
  std::vector<double> w(64, 0.0);
  for (Mask s = 0; s < 64; ++s) {
    if (std::popcount(s) == 4) w[s] = uniform01(rng) + 0.1;
  }
  const auto d = DenseDistribution::from_weights(default_labels(6), w);
  EXPECT_LT(max_abs_diff(down_apply(down_apply(d, 2), 1).weights, down_apply(d, 1).weights), 1e-15);
}

TEST(Oracle, DownUpIdentityAtTop) {
  const auto h = homogenize(random_distribution(3, 5));
  const auto T = down_up_walk(h, 3);
  EXPECT_LT((T.P - Eigen::MatrixXd::Identity(T.P.rows(), T.P.cols())).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Oracle, ProjectedBlockFullResample) {
  const auto d = random_distribution(3, 6);
  const auto T = projected_block_row(d, 1, 1.0);
  const auto mu = restrict_to(T, d);
  for (Eigen::Index r = 0; r < T.P.rows(); ++r) EXPECT_LT((T.P.row(r).transpose() - mu).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Oracle, ProjectedBlockMatchesLiteral) {
  const auto d = enumerate_model(HardcoreParams::uniform(3, 1.3), path_graph(3));
  for (std::size_t k : {1, 2}) {
    const auto a = projected_block_row(d, k, 0.5);
    const auto b = projected_block_literal(d, k, 0.5);
    EXPECT_LT((a.P - b.P).cwiseAbs().maxCoeff(), 1e-12) << k;
  }
}

TEST(Oracle, ChainMatrices) {
  const Graph g = cycle_graph(5);
  const Model m = TwoSpinParams{0.6, 0.6, 0.8};
  const auto mu = enumerate_model(m, g);
  const auto glauber = chain_transition_matrix(ChainSpec::parse("glauber"), m, g);
  EXPECT_LT(glauber.max_row_sum_error(), 1e-13);
  EXPECT_LT(stationarity_residual(glauber, mu), 1e-13);
  EXPECT_LT(detailed_balance_residual(glauber, mu), 1e-13);
  const auto field = chain_transition_matrix(ChainSpec::parse("field:theta=0.3,resampler=exact"), m, g);
  EXPECT_LT(detailed_balance_residual(field, mu), 1e-13);
  EXPECT_TRUE(is_irreducible(field));
  const auto scan = chain_transition_matrix(ChainSpec::parse("scan"), m, g);
  EXPECT_LT(stationarity_residual(scan, mu), 1e-13);
  EXPECT_THROW(chain_transition_matrix(ChainSpec::parse("balanced"), m, g), DomainError);
}

TEST(Oracle, DivergencesClosedForm) {
  const auto mu = DenseDistribution::from_weights(default_labels(3), std::vector<double>(8, 1.0));
  const auto same = divergences(mu, mu);
  EXPECT_NEAR(same.kl, 0.0, 1e-15);
  EXPECT_NEAR(same.tv, 0.0, 1e-15);
  std::vector<double> w(8, 0.0);
  w[5] = 1;
  const auto point = DenseDistribution::from_weights(default_labels(3), w);
  const auto div = divergences(point, mu);
  EXPECT_NEAR(div.kl, std::log(8.0), 1e-14);
  EXPECT_NEAR(div.tv, 7.0 / 8.0, 1e-15);
  EXPECT_NEAR(div.chi2, 7.0, 1e-13);
}

TEST(Oracle, EntropyFunctional) {
  // Ber(1/2) with f = (1, e): Ent = (e/2)(1) - ((1+e)/2) log((1+e)/2).
  const auto mu = DenseDistribution::from_weights(default_labels(1), {1.0, 1.0});
  const std::vector<double> f{1.0, std::exp(1.0)};
  const double mean = (1 + std::exp(1.0)) / 2;
  EXPECT_NEAR(entropy_functional(mu, f), std::exp(1.0) / 2 - mean * std::log(mean), 1e-14);
}

TEST(Oracle, CorrelationOfProductMeasure) {
  // Independent sites with P(i) = 0.2, 0.5, 0.7.
  const std::vector<double> p{0.2, 0.5, 0.7};
  std::vector<double> w(8);
  for (Mask s = 0; s < 8; ++s) {
    w[s] = 1;
    for (std::size_t i = 0; i < 3; ++i) w[s] *= (s >> i & 1) ? p[i] : 1 - p[i];
  }
  const auto d = DenseDistribution::from_weights(default_labels(3), w);
  const auto c = correlation_matrix(d);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(c.psi(i, i), 1 - p[i], 1e-14);
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) EXPECT_NEAR(c.psi(i, j), 0.0, 1e-14);
    }
  }
  EXPECT_NEAR(correlation_lambda_max(d), 0.8, 1e-14);
  const auto grid = FieldGrid::make(3, 0.1, 1, 20);
  for (double eta : {1.0, 2.0}) EXPECT_TRUE(certify_spectral_domination(d, eta, 0.1, grid).certified);
}

TEST(Oracle, SpectralHardcoreCycle) {
  const auto d = enumerate_model(HardcoreParams::uniform(5, 2.0), cycle_graph(5));
  const auto coarse = certify_spectral_domination(d, 100.0, 0.0, FieldGrid::make(5, 0.0, 1, 20));
  const auto fine = certify_spectral_domination(d, 100.0, 0.0, FieldGrid::make(5, 0.0, 1, 400));
  EXPECT_TRUE(std::isfinite(coarse.max_lambda));
  EXPECT_GE(fine.max_lambda, coarse.max_lambda - 1e-12);
  EXPECT_GT(fine.fields_checked, coarse.fields_checked);
}

TEST(Oracle, BoundedRatioOfSelf) {
  const auto d = random_distribution(3, 8);
  EXPECT_NEAR(bounded_ratio(d, d), 1.0, 1e-12);
  EXPECT_TRUE(certify_c_bounded(d, d, 1.0).passed);
}

TEST(Oracle, EntropyContraction) {
  const Graph g = cycle_graph(5);
  const Model m = HardcoreParams::uniform(5, 2.0);
  const auto mu = enumerate_model(m, g);
  std::vector<double> w(32, 0.0);
  w[0b00101] = 1;
  const auto point = DenseDistribution::from_weights(default_labels(5), w);
  const auto nu = push_forward(scan_matrix(mu, identity_order(5)), point);

  EXPECT_NEAR(entropy_contraction_ratio(nu, mu, 0).ratio, 1.0, 1e-12);
  EXPECT_NEAR(entropy_contraction_ratio(nu, mu, 5).ratio, 0.0, 1e-12);
  double prev = 1.0;
  for (std::size_t l = 1; l <= 5; ++l) {
    const double r = entropy_contraction_ratio(nu, mu, l).ratio;
    EXPECT_LT(r, 1.0);
    EXPECT_LE(r, prev + 1e-12) << l;
    prev = r;
  }
}

TEST(Oracle, DobrushinExactBelowBound) {
  const double exact = dobrushin_entry_exact(1.0, 0.9, 3);
  EXPECT_NEAR(exact, 1.0 / 19.0, 1e-7);
  EXPECT_LE(exact, dobrushin_entry_bound(1.0, 0.9, 3));
  EXPECT_NEAR(dobrushin_entry_exact(1.0, 1.0, 3), 0.0, 1e-15);
}

TEST(Oracle, EntCompareHolds) {
  Rng rng(12);
  for (int t = 0; t < 2000; ++t) {
    const double a = 0.01 + 5 * uniform01(rng), b = 0.01 + 5 * uniform01(rng);
    const double x = std::exp(8 * uniform01(rng) - 4), eta = std::exp(4 * uniform01(rng) - 2);
    const auto s = ent_compare_sides(a, b, x, eta);
    EXPECT_LE(s.lhs, s.rhs + 1e-12 * s.scale);
  }
}

TEST(Oracle, DirichletToEntropyTwoPointCounterexample) {
  // mu_+ = 1/2, f = (f_-, f_+) = (1, 1.2), C = 3/2, evaluated by hand.
  const double fm = 1.0, fp = 1.2, C = 1.5;
  const double mean = (fm + fp) / 2;
  const double ent = (fm * std::log(fm) + fp * std::log(fp)) / 2 - mean * std::log(mean);
  const double rhs = 0.25 * (fm - fp) * (std::log(fm) - std::log(fp));
  const auto s = dirichlet_to_entropy_sides(fp, fm, C, 0.5);
  EXPECT_NEAR(s.lhs, C * ent, 1e-15);
  EXPECT_NEAR(s.rhs, rhs, 1e-15);
  EXPECT_NEAR(s.lhs, 0.0068276, 1e-6);
  EXPECT_NEAR(s.rhs, 0.0091161, 1e-6);
  EXPECT_LT(s.lhs, s.rhs);
}

TEST(Oracle, DirichletFormBounds) {
  const auto mu = enumerate_model(HardcoreParams::uniform(4, 1.0), cycle_graph(4));
  const auto T = glauber_matrix(mu);
  const auto pi = restrict_to(T, mu);
  std::vector<double> pis(pi.data(), pi.data() + pi.size());
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> f(pis.size());
    for (auto& x : f) x = uniform01(rng) * 3;
    const double gamma = 0.1 + uniform01(rng);
    const auto c = dirichlet_check(T, pis, f, gamma);
    EXPECT_GE(c.dirichlet, -1e-15);
    EXPECT_LE(c.dirichlet, c.bound1 * (1 + 1e-12) + 1e-15);
    EXPECT_LE(c.dirichlet, c.bound2 * (1 + 1e-12) + 1e-15);
  }
}

TEST(Oracle, JsonRoundTrip) {
  const auto d = random_distribution(3, 9);
  const auto e = distribution_from_json(to_json(d));
  EXPECT_EQ(e.ground, d.ground);
  EXPECT_LT(max_abs_diff(e.weights, d.weights), 1e-15);
  EXPECT_THROW(distribution_from_json("{\"ground\": 3}"), Error);
}

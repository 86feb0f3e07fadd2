#include <bit>
#include <cmath>

#include "spinchain/errors.hpp"
#include "spinchain/oracle.hpp"

namespace spinchain {

namespace {

// Symmetric form A(i,j) = (P(ij) - P(i)P(j)) / sqrt(P(i)P(j)) over the kept elements.
Eigen::MatrixXd symmetric_correlation(const DenseDistribution& d, const std::vector<std::size_t>& kept,
                                      const std::vector<double>& p) {
  const auto m = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd pair = Eigen::MatrixXd::Zero(m, m);
  std::vector<Eigen::Index> pos(d.size(), -1);
  for (std::size_t a = 0; a < kept.size(); ++a) pos[kept[a]] = static_cast<Eigen::Index>(a);
  std::vector<Eigen::Index> present;
  for (Mask s = 0; s < d.weights.size(); ++s) {
    const double w = d.weights[s];
    if (w == 0.0) continue;
    present.clear();
    for (Mask r = s; r; r &= r - 1) {
      const auto e = pos[static_cast<std::size_t>(std::countr_zero(r))];
      if (e >= 0) present.push_back(e);
    }
    for (auto a : present) {
      for (auto b : present) pair(a, b) += w;
    }
  }
  Eigen::MatrixXd A(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      const double pa = p[kept[static_cast<std::size_t>(a)]], pb = p[kept[static_cast<std::size_t>(b)]];
      A(a, b) = (pair(a, b) - pa * pb) / std::sqrt(pa * pb);
    }
  }
  return 0.5 * (A + A.transpose());
}

}  // namespace

CorrelationMatrix correlation_matrix(const DenseDistribution& d) {
  const auto p = d.marginals();
  CorrelationMatrix out;
  for (std::size_t i = 0; i < d.size(); ++i) (p[i] > 0.0 ? out.kept : out.dropped).push_back(i);
  const Eigen::MatrixXd A = symmetric_correlation(d, out.kept, p);
  Eigen::VectorXd s(static_cast<Eigen::Index>(out.kept.size()));
  for (std::size_t a = 0; a < out.kept.size(); ++a) s[static_cast<Eigen::Index>(a)] = std::sqrt(p[out.kept[a]]);
  out.psi = s.cwiseInverse().asDiagonal() * A * s.asDiagonal();
  return out;
}

Eigen::VectorXd correlation_spectrum(const DenseDistribution& d) {
  const auto p = d.marginals();
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (p[i] > 0.0) kept.push_back(i);
  }
  if (kept.empty()) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric_correlation(d, kept, p), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double correlation_lambda_max(const DenseDistribution& d) {
  const Eigen::VectorXd e = correlation_spectrum(d);
  return e.size() == 0 ? 0.0 : e[e.size() - 1];
}

}  // namespace spinchain

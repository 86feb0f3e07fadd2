#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "spinchain/chains.hpp"
#include "spinchain/graph.hpp"
#include "spinchain/models.hpp"

namespace spinchain {

using Mask = std::uint64_t;

// Largest ground set a dense table may have (2^20 weights).
inline constexpr std::size_t kDenseCap = 20;
// Largest n for explicit transition matrices over 2^[n].
inline constexpr std::size_t kMatrixCap = 10;

// Probability table over subsets of a labelled ground set; bit i of the index is element i.
struct DenseDistribution {
  std::vector<std::string> ground;
  std::vector<double> weights;
  std::optional<std::size_t> homogeneous_k;

  std::size_t size() const { return ground.size(); }
  double operator[](Mask s) const { return weights[s]; }
  double total() const;
  double marginal(std::size_t i) const;
  std::vector<double> marginals() const;

  // Normalizes and recomputes homogeneous_k. Throws on zero mass.
  void normalize();

  static DenseDistribution from_weights(std::vector<std::string> ground, std::vector<double> weights);
};

std::vector<std::string> default_labels(std::size_t n);

DenseDistribution enumerate_model(const Model& m, const Graph& g, std::size_t cap = 14);

// P(S) ∝ mu(S) prod_{i in S} field_i.
DenseDistribution tilt(const DenseDistribution& d, std::span<const double> field);

// Per-element pinning: -1 free, 0 forced out, 1 forced in.
using Pinning = std::vector<int>;

// Conditional law on the free elements, relabelled in their original order.
DenseDistribution pin(const DenseDistribution& d, const Pinning& pinning);

// Ground [n] + [n]bar, labels "i" and "i~"; sigma maps to {i in sigma} ∪ {ibar : i not in sigma}.
DenseDistribution homogenize(const DenseDistribution& d);
DenseDistribution dehomogenize(const DenseDistribution& hom);

// Element i becomes k_i copies "(i,j)"; copy j of an occupied i is chosen uniformly.
DenseDistribution blow_up(const DenseDistribution& d, std::span<const std::size_t> k);
DenseDistribution project_blow_up(const DenseDistribution& dk, std::span<const std::size_t> k);
// Index of copy (i, j) in the blown-up ground set.
std::size_t blow_up_index(std::span<const std::size_t> k, std::size_t i, std::size_t j);

// mu_k D_{k->l}: each k-set passes its mass uniformly to its l-subsets.
DenseDistribution down_apply(const DenseDistribution& d, std::size_t l);

struct TransitionMatrix {
  std::vector<Mask> states;
  Eigen::MatrixXd P;

  std::size_t index_of(Mask s) const;
  double max_row_sum_error() const;
};

// Restriction of d to the states of P.
Eigen::VectorXd restrict_to(const TransitionMatrix& T, const DenseDistribution& d);
// nu P as a distribution over the same ground set as `like`.
DenseDistribution push_forward(const TransitionMatrix& T, const DenseDistribution& nu);

double stationarity_residual(const TransitionMatrix& T, const DenseDistribution& mu);
double detailed_balance_residual(const TransitionMatrix& T, const DenseDistribution& mu);
// Eigenvalues of a mu-reversible chain via the symmetrization D^{1/2} P D^{-1/2}, ascending.
Eigen::VectorXd reversible_spectrum(const TransitionMatrix& T, const DenseDistribution& mu);
// True if every mu-positive state reaches every other (single recurrent class).
bool is_irreducible(const TransitionMatrix& T);

TransitionMatrix down_up_walk(const DenseDistribution& d, std::size_t l);

// Projects a chain on the homogenized k-blow-up of a distribution over 2^[n] back to 2^[n].
TransitionMatrix project_homogenized_blow_up_chain(const TransitionMatrix& T, const DenseDistribution& hom_blow_up,
                                                   std::size_t n, std::size_t k);

// (k, ceil(theta k n))-projected block dynamics, computed through the removal-count reduction.
TransitionMatrix projected_block_row(const DenseDistribution& d, std::size_t k, double theta);
// The same chain built literally: blow-up, homogenize, down-up walk, project. Tiny sizes only.
TransitionMatrix projected_block_literal(const DenseDistribution& d, std::size_t k, double theta);

TransitionMatrix site_update_matrix(const DenseDistribution& mu, std::size_t v);
TransitionMatrix glauber_matrix(const DenseDistribution& mu);
TransitionMatrix scan_matrix(const DenseDistribution& mu, std::span<const Vertex> order);
TransitionMatrix field_dynamics_matrix(const DenseDistribution& mu, double theta);
TransitionMatrix product(const TransitionMatrix& a, const TransitionMatrix& b);

// glauber, scan[:order=identity|reverse], field:theta=..[,resampler=exact]. Balanced GD is rejected.
TransitionMatrix chain_transition_matrix(const ChainSpec& spec, const Model& m, const Graph& g);

struct Divergences {
  double kl;
  double tv;
  double chi2;
};

Divergences divergences(const DenseDistribution& nu, const DenseDistribution& mu);
double kl_divergence(std::span<const double> nu, std::span<const double> mu);
double entropy_functional(const DenseDistribution& mu, std::span<const double> f);

struct CorrelationMatrix {
  Eigen::MatrixXd psi;
  std::vector<std::size_t> kept;     // ground elements with P(i) > 0
  std::vector<std::size_t> dropped;  // ground elements with P(i) = 0
};

CorrelationMatrix correlation_matrix(const DenseDistribution& d);
// Eigenvalues of Psi, ascending, from the symmetric matrix (P(ij) - P(i)P(j)) / sqrt(P(i)P(j)).
Eigen::VectorXd correlation_spectrum(const DenseDistribution& d);
double correlation_lambda_max(const DenseDistribution& d);

struct FieldGrid {
  std::vector<std::vector<double>> fields;

  // Uniform fields at the 5 geometric points (1+eps)3^{-j}, the full per-coordinate product of those
  // points when it has at most 4096 members, and `random_count` random log-uniform product fields.
  static FieldGrid make(std::size_t n, double eps, std::uint64_t seed, std::size_t random_count = 200);
};

struct SpectralReport {
  double eta;
  double max_lambda;
  bool certified;
  std::size_t fields_checked;
  std::size_t pinnings_checked;
  bool heuristic = true;  // a finite grid never proves the continuum statement
};

SpectralReport certify_spectral_domination(const DenseDistribution& d, double eta, double eps, const FieldGrid& grid,
                                           bool complete = false);

struct BoundedReport {
  double C;
  double max_ratio;
  bool passed;
  std::size_t checks;
  bool heuristic;
};

// max_i nu(i)(1-mu(i)) / (mu(i)(1-nu(i))). The complete version also ranges over pinnings and
// fields from `grid` (which should live in (0,1]^n).
BoundedReport certify_c_bounded(const DenseDistribution& nu, const DenseDistribution& mu, double C,
                                bool complete = false, const FieldGrid* grid = nullptr);
double bounded_ratio(const DenseDistribution& nu, const DenseDistribution& mu);

struct ContractionReport {
  double ratio;
  double kl_before;
  double kl_after;
  std::optional<double> theoretical;  // 1 - (theta/3)^{eta'} with theta = l/n
};

// KL(nu^hom D_{n->n-l} || mu^hom D_{n->n-l}) / KL(nu || mu).
ContractionReport entropy_contraction_ratio(const DenseDistribution& nu, const DenseDistribution& mu, std::size_t l,
                                            std::optional<double> eta_prime = {});

// Exact Dobrushin influence of one neighbor on an Ising site of the given degree, from the
// enumerated star graph: max over the other neighbors of |P(+ | j = +) - P(+ | j = -)|.
double dobrushin_entry_exact(double lambda, double beta, int degree);

struct LemmaSides {
  double lhs;
  double rhs;
  double scale;
};

// Ent_{Ber(1/(x+1))}[f] and max(eta, 1/eta) Ent_{Ber(1/(eta x+1))}[f] for f = (a, b).
LemmaSides ent_compare_sides(double a, double b, double x, double eta);
// C * Ent and the Dirichlet-type term for the two-point law (mu_-, mu_+) and f = (f_-, f_+).
LemmaSides dirichlet_to_entropy_sides(double f_plus, double f_minus, double C, double mu_plus);

struct DirichletCheck {
  double dirichlet;  // E(e^{gamma f}, gamma f)
  double v1, v2, kappa;
  double bound1;  // gamma^2 v1 E[e^{gamma f}]
  double bound2;  // e^{gamma kappa} gamma^2 v2 E[e^{gamma f}]
};

double dirichlet_form(const TransitionMatrix& T, std::span<const double> pi, std::span<const double> f,
                      std::span<const double> g);
DirichletCheck dirichlet_check(const TransitionMatrix& T, std::span<const double> pi, std::span<const double> f,
                               double gamma);

std::string to_json(const DenseDistribution& d);
DenseDistribution distribution_from_json(const std::string& text);

}  // namespace spinchain

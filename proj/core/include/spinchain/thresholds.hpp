#pragma once

#include <string>
#include <vector>

#include "spinchain/models.hpp"

namespace spinchain {

// (D-1)^{D-1} / (D-2)^D.
double hardcore_critical_fugacity(int max_degree);

struct BetaInterval {
  double lo;
  double hi;
};

// [(D-2+gap)/(D-gap), (D-gap)/(D-2+gap)].
BetaInterval ising_worst_case_interval(int max_degree, double gap);

struct TreeFixpoint {
  double x_hat;
  double gap;  // 1 - |F_d'(x_hat)|, negative outside uniqueness
};

// Fixpoint of F_d(x) = lambda((beta x + 1)/(x + gamma))^d, requires beta*gamma <= 1.
TreeFixpoint tree_recursion_gap(const TwoSpinParams& p, double d);

struct UniquenessLambdas {
  bool case_two = false;  // false: every lambda is d-unique with gap delta
  double delta_bar = 0;   // (1 + sqrt(beta gamma)) / (1 - sqrt(beta gamma))
  double zeta = 0;
  double x1 = 0, x2 = 0;
  double lambda1 = 0, lambda2 = 0;
};

UniquenessLambdas antiferro_uniqueness_lambdas(double beta, double gamma, double delta, double d);

struct Lambda1Bounds {
  double lower;
  double value;
  double upper;
};

// (1-delta) gamma^{d+1}/zeta <= lambda1 <= 9 gamma^{d+1}/sqrt(beta gamma); case two only.
Lambda1Bounds lambda1_bounds_check(double beta, double gamma, double delta, double d);

// lambda |beta^2 - 1| max(beta^{D-2}, beta^{-D}).
double dobrushin_entry_bound(double lambda, double beta, int degree);
// max over 0 <= s < D of |lb^{D-2s}/(1+lb^{D-2s}) - lb^{D-2s-2}/(1+lb^{D-2s-2})| with l = lambda, b = beta.
double dobrushin_entry_max_form(double lambda, double beta, int degree);
// degree * entry bound; requires lambda <= 1.
double dobrushin_row_bound(const TwoSpinParams& p, int max_degree);

enum class Regime { hardcore_delta_unique, ising_worst_case_delta_unique, up_to_delta_unique, non_unique };

std::string regime_name(Regime r);

struct CriticalPair {
  int d;
  bool case_two;
  double lambda1;
  double lambda2;
};

struct UniquenessReport {
  std::string model;
  int max_degree = 0;
  double delta_requested = 0;
  double delta_gap = 0;  // achieved gap, clamped to [0, 1]
  Regime regime = Regime::non_unique;
  bool params_given = false;
  double lambda_critical = 0;  // hardcore only
  BetaInterval beta_interval{0, 0};  // Ising only
  std::vector<CriticalPair> critical;  // two-spin antiferro, d = 1..D-1
};

// Classifies given parameters. For hardcore the tightest gap is 1 - lambda/lambda_D.
UniquenessReport classify_uniqueness(const Model& m, int max_degree, double delta, bool params_given = true);

std::string to_json(const UniquenessReport& r);

}  // namespace spinchain

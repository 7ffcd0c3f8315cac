#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hazshift/dataset.hpp"
#include "hazshift/rng.hpp"
#include "hazshift/theta.hpp"

namespace hazshift {

// The two synthetic data-generating processes. Both use horizon tau = 2, an
// exponential initialization time given covariates, and a normal outcome
// whose mean decays with the untreated span (2 - min(T, 2)):
//
//   Main:  L ~ U(0,1);            rate = exp(0.25 L)
//          E[Y|T,L] = exp(1 - 1.5 L - (2 - min(T,2))),          sd 0.5
//   Multi: L1 ~ U(0,1), L2 ~ N(0.5, 0.25^2), L3 ~ Bernoulli(0.5);
//          rate = exp(0.1 L1 + 0.05 L2 + 0.1 L3)
//          E[Y|T,L] = exp(1 - (0.6 L1 + 0.3 L2 + 0.6 L3) - (2 - min(T,2))), sd 0.5
enum class DgpVariant { Main, Multi };

struct DgpSpec {
  DgpVariant variant = DgpVariant::Main;

  static DgpSpec main() { return {DgpVariant::Main}; }
  static DgpSpec multi() { return {DgpVariant::Multi}; }
  static DgpSpec from_name(const std::string& name);

  const char* name() const { return variant == DgpVariant::Main ? "main" : "multi"; }
  double tau() const { return 2.0; }
  double outcome_sd() const { return 0.5; }
  std::size_t dim() const { return variant == DgpVariant::Main ? 1 : 3; }
  std::vector<std::string> covariate_names() const;

  double rate(std::span<const double> l) const;
  double outcome_mean(double t, std::span<const double> l) const;
  void draw_covariates(RngStream& stream, std::vector<double>& out) const;
};

// Exact sampling (inverse-CDF initialization time, Box-Muller outcome noise);
// deterministic per seed.
Dataset generate(const DgpSpec& dgp, std::size_t n, std::uint64_t seed);

// True psi(theta) = E[ mu(T(theta) ^ 2, L) ] by nested adaptive quadrature on
// the closed-form conditional laws, the point mass at T >= tau handled
// explicitly. Independent of all estimation code.
double oracle_psi(const DgpSpec& dgp, const ThetaSpec& theta, double abs_tol = 1e-6);

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Secondary oracle: simulates T(theta) by inverse-CDF and averages the
// outcome mean. Cross-checks oracle_psi without sharing any code path.
MonteCarloEstimate mc_psi(const DgpSpec& dgp, const ThetaSpec& theta, std::size_t draws,
                          std::uint64_t seed);

// Radon-Nikodym weight with the TRUE cumulative hazard plugged in. E[w] = 1.
double true_ipw_weight(const DgpSpec& dgp, const ThetaSpec& theta, const SubjectRecord& r);

struct StudyRow {
  ThetaSpec theta;
  double true_psi = 0.0;
  double bias = 0.0;
  double pct_bias = 0.0;  // 100 * bias / true_psi
  double see = 0.0;       // empirical sd of the estimates
  double sd = 0.0;        // mean bootstrap standard error
  double cp = 0.0;        // Wald 95% coverage of the truth
};

struct StudyReport {
  std::string dgp;
  std::size_t n = 0;
  int R = 0;
  int B = 0;
  std::uint64_t seed = 0;
  int failed_replications = 0;
  std::vector<StudyRow> rows;
};

// Monte-Carlo study: R replications of generate -> fit -> bootstrap across the
// theta grid, aggregated against the quadrature oracle. Replications run in
// parallel, each on a seed derived from (seed, r); aggregation is ordered, so
// the report does not depend on scheduling.
StudyReport run_study(const DgpSpec& dgp, std::span<const ThetaSpec> thetas, std::size_t n,
                      int R, int B, std::uint64_t seed, int threads = 0);

// Table grids: the eight constants 1/3 ... 3 for Main, the nine loglinear
// coefficient triples for Multi.
std::vector<ThetaSpec> default_theta_grid(const DgpSpec& dgp);

}  // namespace hazshift

#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hazshift/dataset.hpp"

namespace hazshift {

inline constexpr int kCoxMaxIterations = 50;
inline constexpr double kCoxLoglikTol = 1e-9;   // relative log-likelihood change
inline constexpr double kCoxScoreTol = 1e-8;    // max-norm of the score
inline constexpr double kMonotoneLikelihoodBound = 15.0;
inline constexpr double kConditionNumberLimit = 1e10;

// Proportional-hazards fit: Lambda(t|l) = Lambda0(t) * exp(beta'l) with the
// Breslow step-function baseline evaluated at beta.
struct CoxFit {
  Eigen::VectorXd beta;
  std::vector<double> baseline_times;       // distinct event times, increasing
  std::vector<double> baseline_increments;  // Breslow jumps, all > 0
  double loglik = 0.0;
  int n_iter = 0;
  bool converged = false;

  std::size_t dim() const { return static_cast<std::size_t>(beta.size()); }
  // Lambda0(t): right-continuous, 0 before the first event time.
  double baseline_cumhaz(double t) const;
  std::string to_json() const;
};

// Partial-likelihood pieces at an arbitrary beta (original covariate scale).
struct CoxLoglik {
  double value = 0.0;
  Eigen::VectorXd score;
  Eigen::MatrixXd information;  // negative Hessian
};

// Per-dataset preprocessing shared by every weighted refit of the same data:
// sort order, tie groups and the risk-set layout do not depend on the case
// weights, so bootstrap loops construct this once.
//
// Columns are centered internally for Newton conditioning; beta and the
// baseline are reported on the original scale. Columns that are exactly
// constant carry no information for the partial likelihood and have their
// coefficient pinned to zero; near-constant or collinear columns (condition
// number above kConditionNumberLimit) raise DegenerateDesignError.
class CoxDesign {
 public:
  explicit CoxDesign(const Dataset& ds);

  // Maximizes the (optionally case-weighted) Breslow-ties partial likelihood
  // by Newton iteration with step-halving. Non-convergence at the iteration
  // cap or a monotone likelihood is reported via converged=false, not thrown.
  CoxFit fit(const std::vector<double>* case_weights = nullptr,
             const Eigen::VectorXd* beta_init = nullptr) const;

  CoxLoglik loglik_at(const Eigen::VectorXd& beta,
                      const std::vector<double>* case_weights = nullptr) const;

  std::size_t n() const { return n_; }
  std::size_t dim() const { return d_; }
  const std::vector<double>& event_times() const { return event_times_; }

 private:
  struct EventGroup {
    double time = 0.0;
    std::size_t risk_begin = 0;  // position in the descending-time order where the risk set starts
    std::vector<std::size_t> members;  // record indices with delta=1 at this time
  };

  struct Accumulated;
  void accumulate(const Eigen::VectorXd& beta_active, const std::vector<double>* case_weights,
                  bool need_derivatives, Accumulated& acc) const;

  std::size_t n_ = 0;
  std::size_t d_ = 0;         // full covariate dimension
  std::size_t d_active_ = 0;  // columns that actually enter the optimization
  std::vector<std::size_t> active_cols_;
  std::vector<char> is_active_;
  Eigen::MatrixXd x_centered_;  // n x d_active, centered
  Eigen::VectorXd col_means_;   // length d (zero for pinned columns)
  std::vector<std::size_t> order_desc_;  // record indices by t_obs descending
  std::vector<EventGroup> groups_;       // ascending event time
  std::vector<double> event_times_;
};

CoxFit fit_cox(const Dataset& ds, const std::vector<double>* case_weights = nullptr);

// Lambda0(t) * exp(beta'l); right-continuous in t.
double cumulative_hazard(const CoxFit& fit, double t, std::span<const double> l);

struct SchoenfeldReport {
  std::vector<double> event_times;  // ascending, one entry per delta=1 record
  Eigen::MatrixXd residuals;        // events x d
  std::vector<std::string> covariate_names;
  std::vector<double> rho;     // correlation of the residual with rank-transformed time
  std::vector<double> chisq;   // per-covariate score statistic (1 df)
  std::vector<double> p_value;
  double global_chisq = 0.0;
  int global_df = 0;
  double global_p = 1.0;
};

// Schoenfeld residuals at the fitted beta plus the score-type test of the
// proportional-hazards assumption against rank-transformed event time.
// Requires a converged fit.
SchoenfeldReport schoenfeld(const Dataset& ds, const CoxFit& fit);

}  // namespace hazshift

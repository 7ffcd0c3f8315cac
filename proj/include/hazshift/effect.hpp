#pragma once

#include <span>
#include <vector>

#include "hazshift/cox.hpp"
#include "hazshift/dataset.hpp"
#include "hazshift/theta.hpp"

namespace hazshift {

// Radon-Nikodym weights of the incremental intervention:
//   w_i = theta(t_i, l_i)^{delta_i}
//         * exp(-sum_{t_k <= t_i} (theta(t_k, l_i) - 1) dLambda0(t_k) exp(beta'l_i))
// The integral against the step-function baseline is the exact jump sum; jumps
// at t_k == t_i are included (closed upper limit). Every weight is strictly
// positive — no positivity assumption enters anywhere.
struct WeightVector {
  std::vector<double> weights;
  ThetaSpec theta;
  double max_weight = 0.0;
  double ess = 0.0;  // (sum w)^2 / sum w^2
};

WeightVector ipw_weights(const Dataset& ds, const CoxFit& fit, const ThetaSpec& theta);

// Plug-in IPW estimate: mean of w_i y_i, summed sequentially in record order
// (the determinism contract). With case weights: sum c_i w_i y_i / sum c_i.
double psi_hat(const Dataset& ds, const CoxFit& fit, const ThetaSpec& theta,
               const std::vector<double>* case_weights = nullptr);

// Shares the per-subject positioning against the event grid across a theta
// grid and across weighted refits of the same dataset (the event times of a
// positively-weighted refit never change), so bootstrap loops pay one binary
// search per subject for the whole run.
class PsiEngine {
 public:
  PsiEngine(const Dataset& ds, std::span<const ThetaSpec> thetas);

  // One psi per theta under the given fit. The fit's baseline_times must be
  // the dataset's own event-time grid.
  std::vector<double> psi(const CoxFit& fit, const std::vector<double>* case_weights = nullptr) const;

 private:
  const Dataset* ds_;
  std::vector<ThetaSpec> thetas_;
  std::vector<std::size_t> pos_;  // # event times <= t_obs_i
  std::size_t n_jumps_ = 0;
};

// lambda(t|l) = scale * t^power * exp(link'l)
struct AnalyticHazard {
  double scale = 1.0;
  double power = 0.0;
  std::vector<double> link;

  double operator()(double t, std::span<const double> l) const;
};

struct InterventionCurvePoint {
  double t = 0.0;
  double hazard = 0.0;   // theta(t,l) * lambda(t|l)
  double density = 0.0;  // hazard * exp(-integral_0^t theta*lambda)
};

// Hazard and density of the shifted initialization time T(theta) for one
// covariate value, on a strictly increasing time grid. The cumulative
// integral is evaluated by adaptive quadrature to absolute 1e-10.
std::vector<InterventionCurvePoint> intervention_curves(const AnalyticHazard& hazard,
                                                        const std::vector<double>& l,
                                                        const ThetaSpec& theta,
                                                        const std::vector<double>& grid);

}  // namespace hazshift

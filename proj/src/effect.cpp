#include "hazshift/effect.hpp"

#include <algorithm>
#include <cmath>

#include "hazshift/quadrature.hpp"

namespace hazshift {

namespace {

double exp_linear(const Eigen::VectorXd& beta, const std::vector<double>& l) {
  double dot = 0.0;
  for (std::size_t j = 0; j < l.size(); ++j) dot += beta[static_cast<Eigen::Index>(j)] * l[j];
  return std::exp(dot);
}

void check_dims(const Dataset& ds, const CoxFit& fit, const ThetaSpec& theta) {
  if (fit.dim() != ds.dim()) {
    throw DimensionMismatchError("fit dimension does not match the dataset");
  }
  if (theta.covariate_dim() != 0 && theta.covariate_dim() != ds.dim()) {
    throw DimensionMismatchError("theta coefficient length does not match the dataset");
  }
}

}  // namespace

WeightVector ipw_weights(const Dataset& ds, const CoxFit& fit, const ThetaSpec& theta) {
  check_dims(ds, fit, theta);

  WeightVector out;
  out.theta = theta;
  out.weights.resize(ds.size());

  double sum_w = 0.0;
  double sum_w2 = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const SubjectRecord& r = ds.records[i];
    const double risk = exp_linear(fit.beta, r.covariates);

    // exact jump-sum integral of (theta - 1) against the step baseline,
    // including a jump at t_k == t_obs
    double integral = 0.0;
    for (std::size_t k = 0; k < fit.baseline_times.size() && fit.baseline_times[k] <= r.t_obs; ++k) {
      const double th = theta(fit.baseline_times[k], r.covariates);
      const double shift = th - 1.0;
      if (shift != 0.0) integral += shift * fit.baseline_increments[k] * risk;
    }

    const double factor = r.delta == 1 ? theta(r.t_obs, r.covariates) : 1.0;
    const double w = factor * std::exp(-integral);
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error("NonFiniteWeight", "weight " + std::to_string(i) + " is not a positive finite real");
    }
    out.weights[i] = w;
    sum_w += w;
    sum_w2 += w * w;
    out.max_weight = std::max(out.max_weight, w);
  }
  out.ess = sum_w * sum_w / sum_w2;
  return out;
}

// ---------------------------------------------------------------------------
// PsiEngine
// ---------------------------------------------------------------------------

PsiEngine::PsiEngine(const Dataset& ds, std::span<const ThetaSpec> thetas)
    : ds_(&ds), thetas_(thetas.begin(), thetas.end()) {
  for (const ThetaSpec& th : thetas_) {
    if (th.covariate_dim() != 0 && th.covariate_dim() != ds.dim()) {
      throw DimensionMismatchError("theta coefficient length does not match the dataset");
    }
  }
  std::vector<double> event_times;
  for (const SubjectRecord& r : ds.records) {
    if (r.delta == 1) event_times.push_back(r.t_obs);
  }
  std::sort(event_times.begin(), event_times.end());
  event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());
  n_jumps_ = event_times.size();

  pos_.resize(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    pos_[i] = static_cast<std::size_t>(
        std::upper_bound(event_times.begin(), event_times.end(), ds.records[i].t_obs) -
        event_times.begin());
  }
}

std::vector<double> PsiEngine::psi(const CoxFit& fit, const std::vector<double>* case_weights) const {
  const Dataset& ds = *ds_;
  if (fit.dim() != ds.dim()) throw DimensionMismatchError("fit dimension does not match the dataset");
  if (fit.baseline_times.size() != n_jumps_) {
    throw DimensionMismatchError("fit baseline does not match the dataset's event-time grid");
  }
  if (case_weights && case_weights->size() != ds.size()) {
    throw InvalidWeightError("case weight vector length must equal the sample size");
  }

  const std::size_t n = ds.size();

  // prefix[k] = Lambda0 mass over the first k jumps
  std::vector<double> prefix(n_jumps_ + 1, 0.0);
  for (std::size_t k = 0; k < n_jumps_; ++k) prefix[k + 1] = prefix[k] + fit.baseline_increments[k];

  // per-subject baseline mass at t_obs, on the subject's own hazard scale
  std::vector<double> mass(n);
  for (std::size_t i = 0; i < n; ++i) {
    mass[i] = prefix[pos_[i]] * exp_linear(fit.beta, ds.records[i].covariates);
  }

  std::vector<double> theta_prefix;  // reused scratch for time-varying thetas
  std::vector<double> out(thetas_.size());
  for (std::size_t t = 0; t < thetas_.size(); ++t) {
    const ThetaSpec& theta = thetas_[t];
    double num = 0.0;
    double den = 0.0;

    if (theta.depends_on_time()) {
      theta_prefix.assign(n_jumps_ + 1, 0.0);
      for (std::size_t k = 0; k < n_jumps_; ++k) {
        theta_prefix[k + 1] = theta_prefix[k] + theta(fit.baseline_times[k], {}) * fit.baseline_increments[k];
      }
      for (std::size_t i = 0; i < n; ++i) {
        const SubjectRecord& r = ds.records[i];
        const double risk = exp_linear(fit.beta, r.covariates);
        const double integral = (theta_prefix[pos_[i]] - prefix[pos_[i]]) * risk;
        const double factor = r.delta == 1 ? theta(r.t_obs, r.covariates) : 1.0;
        const double w = factor * std::exp(-integral);
        const double c = case_weights ? (*case_weights)[i] : 1.0;
        num += c * (w * r.y);
        den += c;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const SubjectRecord& r = ds.records[i];
        const double th = theta(r.t_obs, r.covariates);
        const double shift = th - 1.0;
        const double integral = shift == 0.0 ? 0.0 : shift * mass[i];
        const double w = (r.delta == 1 ? th : 1.0) * std::exp(-integral);
        const double c = case_weights ? (*case_weights)[i] : 1.0;
        num += c * (w * r.y);
        den += c;
      }
    }
    out[t] = num / den;
  }
  return out;
}

double psi_hat(const Dataset& ds, const CoxFit& fit, const ThetaSpec& theta,
               const std::vector<double>* case_weights) {
  check_dims(ds, fit, theta);
  const PsiEngine engine(ds, std::span<const ThetaSpec>(&theta, 1));
  return engine.psi(fit, case_weights)[0];
}

// ---------------------------------------------------------------------------
// Intervention curves
// ---------------------------------------------------------------------------

double AnalyticHazard::operator()(double t, std::span<const double> l) const {
  double dot = 0.0;
  for (std::size_t j = 0; j < l.size(); ++j) dot += link[j] * l[j];
  return scale * std::pow(t, power) * std::exp(dot);
}

std::vector<InterventionCurvePoint> intervention_curves(const AnalyticHazard& hazard,
                                                        const std::vector<double>& l,
                                                        const ThetaSpec& theta,
                                                        const std::vector<double>& grid) {
  if (!(hazard.scale > 0.0) || !std::isfinite(hazard.scale) || !(hazard.power >= 0.0) ||
      !std::isfinite(hazard.power)) {
    throw Error("InvalidHazard", "analytic hazard needs scale > 0 and power >= 0");
  }
  for (const double c : hazard.link) {
    if (!std::isfinite(c)) throw Error("InvalidHazard", "analytic hazard link coefficients must be finite");
  }
  if (hazard.link.size() != l.size()) {
    throw DimensionMismatchError("covariate vector length does not match the hazard link");
  }
  if (theta.covariate_dim() != 0 && theta.covariate_dim() != l.size()) {
    throw DimensionMismatchError("theta coefficient length does not match the covariate vector");
  }
  if (grid.empty()) throw Error("InvalidGrid", "time grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] < 0.0) throw NegativeGridTimeError();
    if (k > 0 && grid[k] <= grid[k - 1]) throw Error("InvalidGrid", "time grid must be strictly increasing");
  }

  const auto shifted = [&](double t) { return theta(t, l) * hazard(t, l); };
  const double seg_tol = 1e-10 / static_cast<double>(grid.size() + 1);

  std::vector<InterventionCurvePoint> out;
  out.reserve(grid.size());
  double cum = 0.0;
  double prev_t = 0.0;
  for (const double t : grid) {
    if (t > prev_t) cum += integrate(shifted, prev_t, t, seg_tol);
    prev_t = t;
    InterventionCurvePoint p;
    p.t = t;
    p.hazard = shifted(t);
    p.density = p.hazard * std::exp(-cum);
    out.push_back(p);
  }
  return out;
}

}  // namespace hazshift

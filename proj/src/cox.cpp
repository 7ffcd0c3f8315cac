#include "hazshift/cox.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "hazshift/json_writer.hpp"

namespace hazshift {

namespace {

double chi_squared_tail(double x, int df) {
  if (!(x >= 0.0) || df < 1) return std::numeric_limits<double>::quiet_NaN();
  boost::math::chi_squared_distribution<double> dist(df);
  return boost::math::cdf(boost::math::complement(dist, x));
}

void check_case_weights(const std::vector<double>* w, std::size_t n) {
  if (!w) return;
  if (w->size() != n) throw InvalidWeightError("case weight vector length must equal the sample size");
  for (const double v : *w) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidWeightError("case weights must be strictly positive and finite");
  }
}

}  // namespace

double CoxFit::baseline_cumhaz(double t) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < baseline_times.size() && baseline_times[k] <= t; ++k) {
    sum += baseline_increments[k];
  }
  return sum;
}

std::string CoxFit::to_json() const {
  JsonWriter w;
  w.begin_object();
  w.key("beta").begin_array();
  for (Eigen::Index j = 0; j < beta.size(); ++j) w.value(beta[j]);
  w.end_array();
  w.key("baseline").begin_array();
  for (std::size_t k = 0; k < baseline_times.size(); ++k) {
    w.begin_array().value(baseline_times[k]).value(baseline_increments[k]).end_array();
  }
  w.end_array();
  w.key("loglik").value(loglik);
  w.key("converged").value(converged);
  w.key("n_iter").value(n_iter);
  w.end_object();
  return w.str();
}

// ---------------------------------------------------------------------------
// CoxDesign
// ---------------------------------------------------------------------------

struct CoxDesign::Accumulated {
  double ll = 0.0;
  Eigen::VectorXd score;
  Eigen::MatrixXd information;
  std::vector<double> group_s0;    // risk-set sum at each event group
  std::vector<double> group_dsum;  // weighted event mass at each event group
  bool with_derivatives = false;
};

CoxDesign::CoxDesign(const Dataset& ds) {
  n_ = ds.size();
  d_ = ds.dim();
  if (n_ == 0) throw Error("EmptyDataset", "cannot fit on an empty dataset");

  std::size_t n_events = 0;
  for (const SubjectRecord& r : ds.records) n_events += r.delta == 1;
  if (n_events == 0) throw NoEventsError();

  // Center columns; detect exactly constant columns (pinned, coefficient 0)
  // and near-constant ones (rejected).
  x_centered_.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(d_));
  col_means_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d_));
  is_active_.assign(d_, 0);
  for (std::size_t j = 0; j < d_; ++j) {
    double mean = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double scale = 1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double v = ds.records[i].covariates[j];
      mean += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      scale = std::max(scale, std::fabs(v));
    }
    mean /= static_cast<double>(n_);
    const double spread = hi - lo;
    if (spread == 0.0) {
      // informationless column: the partial likelihood does not depend on it
      col_means_[static_cast<Eigen::Index>(j)] = 0.0;
      for (std::size_t i = 0; i < n_; ++i) x_centered_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 0.0;
      continue;
    }
    if (spread <= 1e-10 * scale) {
      throw DegenerateDesignError("covariate '" + ds.covariate_names[j] + "' is constant up to tolerance");
    }
    col_means_[static_cast<Eigen::Index>(j)] = mean;
    for (std::size_t i = 0; i < n_; ++i) {
      x_centered_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ds.records[i].covariates[j] - mean;
    }
    active_cols_.push_back(j);
    is_active_[j] = 1;
  }
  d_active_ = active_cols_.size();

  // Collinearity screen on the correlation matrix of the active columns.
  if (d_active_ >= 2) {
    Eigen::MatrixXd corr(static_cast<Eigen::Index>(d_active_), static_cast<Eigen::Index>(d_active_));
    std::vector<double> norms(d_active_);
    for (std::size_t a = 0; a < d_active_; ++a) {
      norms[a] = x_centered_.col(static_cast<Eigen::Index>(active_cols_[a])).norm();
    }
    for (std::size_t a = 0; a < d_active_; ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        const double dot = x_centered_.col(static_cast<Eigen::Index>(active_cols_[a]))
                               .dot(x_centered_.col(static_cast<Eigen::Index>(active_cols_[b])));
        const double c = dot / (norms[a] * norms[b]);
        corr(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = c;
        corr(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = c;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kConditionNumberLimit) {
      throw DegenerateDesignError("design matrix is collinear (condition number above threshold)");
    }
  }

  // Records by observed time, descending: every risk set is a prefix.
  order_desc_.resize(n_);
  std::iota(order_desc_.begin(), order_desc_.end(), std::size_t{0});
  std::stable_sort(order_desc_.begin(), order_desc_.end(), [&ds](std::size_t a, std::size_t b) {
    return ds.records[a].t_obs > ds.records[b].t_obs;
  });

  // Distinct event times ascending, with member records and risk-set extent.
  std::vector<std::size_t> event_idx;
  event_idx.reserve(n_events);
  for (std::size_t i = 0; i < n_; ++i) {
    if (ds.records[i].delta == 1) event_idx.push_back(i);
  }
  std::stable_sort(event_idx.begin(), event_idx.end(), [&ds](std::size_t a, std::size_t b) {
    return ds.records[a].t_obs < ds.records[b].t_obs;
  });
  for (std::size_t k = 0; k < event_idx.size();) {
    EventGroup g;
    g.time = ds.records[event_idx[k]].t_obs;
    while (k < event_idx.size() && ds.records[event_idx[k]].t_obs == g.time) {
      g.members.push_back(event_idx[k]);
      ++k;
    }
    groups_.push_back(std::move(g));
    event_times_.push_back(groups_.back().time);
  }
  // risk_begin: number of records with t_obs >= group time.
  {
    std::size_t p = 0;
    for (auto it = groups_.rbegin(); it != groups_.rend(); ++it) {
      while (p < n_ && ds.records[order_desc_[p]].t_obs >= it->time) ++p;
      it->risk_begin = p;  // prefix length of the risk set
    }
  }
}

void CoxDesign::accumulate(const Eigen::VectorXd& beta, const std::vector<double>* case_weights,
                           bool need_derivatives, Accumulated& acc) const {
  const Eigen::Index d = static_cast<Eigen::Index>(d_);
  acc.ll = 0.0;
  acc.with_derivatives = need_derivatives;
  if (need_derivatives) {
    acc.score = Eigen::VectorXd::Zero(d);
    acc.information = Eigen::MatrixXd::Zero(d, d);
    acc.group_s0.assign(groups_.size(), 0.0);
    acc.group_dsum.assign(groups_.size(), 0.0);
  }

  Eigen::VectorXd eta = x_centered_ * beta;
  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd s2;
  if (need_derivatives) s2 = Eigen::MatrixXd::Zero(d, d);

  std::size_t p = 0;
  for (std::size_t gi = groups_.size(); gi-- > 0;) {
    const EventGroup& g = groups_[gi];
    while (p < g.risk_begin) {
      const std::size_t rec = order_desc_[p];
      const double w = case_weights ? (*case_weights)[rec] : 1.0;
      const double r = w * std::exp(eta[static_cast<Eigen::Index>(rec)]);
      s0 += r;
      if (need_derivatives) {
        s1.noalias() += r * x_centered_.row(static_cast<Eigen::Index>(rec)).transpose();
        s2.noalias() += r * x_centered_.row(static_cast<Eigen::Index>(rec)).transpose() *
                        x_centered_.row(static_cast<Eigen::Index>(rec));
      }
      ++p;
    }
    double dsum = 0.0;
    double eta_events = 0.0;
    for (const std::size_t m : g.members) {
      const double w = case_weights ? (*case_weights)[m] : 1.0;
      dsum += w;
      eta_events += w * eta[static_cast<Eigen::Index>(m)];
    }
    acc.ll += eta_events - dsum * std::log(s0);
    if (need_derivatives) {
      acc.group_s0[gi] = s0;
      acc.group_dsum[gi] = dsum;
      Eigen::VectorXd xsum = Eigen::VectorXd::Zero(d);
      for (const std::size_t m : g.members) {
        const double w = case_weights ? (*case_weights)[m] : 1.0;
        xsum.noalias() += w * x_centered_.row(static_cast<Eigen::Index>(m)).transpose();
      }
      const Eigen::VectorXd mu = s1 / s0;
      acc.score.noalias() += xsum - dsum * mu;
      acc.information.noalias() += dsum * (s2 / s0 - mu * mu.transpose());
    }
  }
}

CoxLoglik CoxDesign::loglik_at(const Eigen::VectorXd& beta,
                               const std::vector<double>* case_weights) const {
  if (beta.size() != static_cast<Eigen::Index>(d_)) {
    throw DimensionMismatchError("beta length does not match the covariate dimension");
  }
  check_case_weights(case_weights, n_);
  Accumulated acc;
  accumulate(beta, case_weights, true, acc);
  return {acc.ll, acc.score, acc.information};
}

CoxFit CoxDesign::fit(const std::vector<double>* case_weights,
                      const Eigen::VectorXd* beta_init) const {
  check_case_weights(case_weights, n_);
  const Eigen::Index d = static_cast<Eigen::Index>(d_);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  if (beta_init) {
    if (beta_init->size() != d) throw DimensionMismatchError("beta_init length does not match");
    beta = *beta_init;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!is_active_[static_cast<std::size_t>(j)]) beta[j] = 0.0;  // pinned
    }
  }

  Accumulated acc;
  accumulate(beta, case_weights, true, acc);

  bool converged = false;
  bool monotone = false;
  int iter = 0;

  if (d_active_ == 0) {
    converged = true;
  } else {
    const Eigen::Index da = static_cast<Eigen::Index>(d_active_);
    for (iter = 0; iter < kCoxMaxIterations; ++iter) {
      // gather the active block of the score / information
      Eigen::VectorXd u(da);
      Eigen::MatrixXd info(da, da);
      for (Eigen::Index a = 0; a < da; ++a) {
        u[a] = acc.score[static_cast<Eigen::Index>(active_cols_[static_cast<std::size_t>(a)])];
        for (Eigen::Index b = 0; b < da; ++b) {
          info(a, b) = acc.information(static_cast<Eigen::Index>(active_cols_[static_cast<std::size_t>(a)]),
                                       static_cast<Eigen::Index>(active_cols_[static_cast<std::size_t>(b)]));
        }
      }
      if (u.lpNorm<Eigen::Infinity>() < kCoxScoreTol) {
        converged = true;
        break;
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
      if (ldlt.info() != Eigen::Success) break;
      Eigen::VectorXd step = ldlt.solve(u);
      if (!step.allFinite()) break;

      // step-halving on the log-likelihood
      const double ll_prev = acc.ll;
      Eigen::VectorXd trial;
      double ll_trial = -std::numeric_limits<double>::infinity();
      double scale = 1.0;
      for (int h = 0; h <= 30; ++h) {
        trial = beta;
        for (Eigen::Index a = 0; a < da; ++a) {
          trial[static_cast<Eigen::Index>(active_cols_[static_cast<std::size_t>(a)])] += scale * step[a];
        }
        Accumulated probe;
        accumulate(trial, case_weights, false, probe);
        ll_trial = probe.ll;
        if (std::isfinite(ll_trial) && ll_trial >= ll_prev) break;
        scale *= 0.5;
      }
      if (!std::isfinite(ll_trial)) break;

      beta = trial;
      accumulate(beta, case_weights, true, acc);
      if (beta.lpNorm<Eigen::Infinity>() > kMonotoneLikelihoodBound) {
        monotone = true;  // separable data: likelihood is monotone in beta
        ++iter;
        break;
      }
      if (std::fabs(acc.ll - ll_prev) <= kCoxLoglikTol * (std::fabs(ll_prev) + 1.0)) {
        converged = true;
        ++iter;
        break;
      }
    }
  }
  if (monotone) converged = false;

  CoxFit out;
  out.beta = beta;
  out.loglik = acc.ll;
  out.n_iter = iter;
  out.converged = converged;

  // Breslow baseline at the fitted beta, rescaled from the centered parameterization.
  const double shift = std::exp(-beta.dot(col_means_));
  out.baseline_times = event_times_;
  out.baseline_increments.resize(groups_.size());
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    out.baseline_increments[gi] = shift * acc.group_dsum[gi] / acc.group_s0[gi];
  }
  return out;
}

CoxFit fit_cox(const Dataset& ds, const std::vector<double>* case_weights) {
  return CoxDesign(ds).fit(case_weights);
}

double cumulative_hazard(const CoxFit& fit, double t, std::span<const double> l) {
  if (l.size() != fit.dim()) {
    throw DimensionMismatchError("covariate vector length does not match the fit dimension");
  }
  if (!(t >= 0.0)) throw Error("InvalidTime", "time must be nonnegative");
  double dot = 0.0;
  for (std::size_t j = 0; j < l.size(); ++j) dot += fit.beta[static_cast<Eigen::Index>(j)] * l[j];
  return fit.baseline_cumhaz(t) * std::exp(dot);
}

// ---------------------------------------------------------------------------
// Schoenfeld residuals and proportional-hazards test
// ---------------------------------------------------------------------------

SchoenfeldReport schoenfeld(const Dataset& ds, const CoxFit& fit) {
  if (!fit.converged) throw NotConvergedError();
  if (fit.dim() != ds.dim()) throw DimensionMismatchError("fit dimension does not match the dataset");

  const std::size_t n = ds.size();
  const std::size_t d = ds.dim();

  // Events ascending in time; each event record gets its own residual row.
  std::vector<std::size_t> events;
  for (std::size_t i = 0; i < n; ++i) {
    if (ds.records[i].delta == 1) events.push_back(i);
  }
  if (events.empty()) throw NoEventsError();
  std::stable_sort(events.begin(), events.end(), [&ds](std::size_t a, std::size_t b) {
    return ds.records[a].t_obs < ds.records[b].t_obs;
  });
  const std::size_t m = events.size();

  // exp(beta'l) per record on the original scale.
  std::vector<double> risk(n);
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < d; ++j) dot += fit.beta[static_cast<Eigen::Index>(j)] * ds.records[i].covariates[j];
    risk[i] = std::exp(dot);
  }

  // Walk events from the largest time down, growing the risk-set sums.
  std::vector<std::size_t> order_desc(n);
  std::iota(order_desc.begin(), order_desc.end(), std::size_t{0});
  std::stable_sort(order_desc.begin(), order_desc.end(), [&ds](std::size_t a, std::size_t b) {
    return ds.records[a].t_obs > ds.records[b].t_obs;
  });

  SchoenfeldReport rep;
  rep.covariate_names = ds.covariate_names;
  rep.event_times.resize(m);
  rep.residuals.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));

  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  double s0 = 0.0;
  std::size_t p = 0;
  for (std::size_t k = m; k-- > 0;) {
    const std::size_t rec = events[k];
    const double t = ds.records[rec].t_obs;
    while (p < n && ds.records[order_desc[p]].t_obs >= t) {
      const std::size_t r = order_desc[p];
      s0 += risk[r];
      for (std::size_t j = 0; j < d; ++j) s1[static_cast<Eigen::Index>(j)] += risk[r] * ds.records[r].covariates[j];
      ++p;
    }
    rep.event_times[k] = t;
    for (std::size_t j = 0; j < d; ++j) {
      rep.residuals(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          ds.records[rec].covariates[j] - s1[static_cast<Eigen::Index>(j)] / s0;
    }
  }

  // Score-type test against rank-transformed event time: with g the centered
  // ranks, u = sum_i g_i r_i, statistic = m * u' I^{-1} u / sum g^2.
  Eigen::VectorXd g(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) g[static_cast<Eigen::Index>(k)] = static_cast<double>(k + 1);
  g.array() -= g.mean();
  const double g2 = g.squaredNorm();

  const CoxDesign design(ds);
  const CoxLoglik at_beta = design.loglik_at(fit.beta);
  const Eigen::MatrixXd& info = at_beta.information;

  Eigen::VectorXd u = rep.residuals.transpose() * g;

  rep.rho.assign(d, std::numeric_limits<double>::quiet_NaN());
  rep.chisq.assign(d, std::numeric_limits<double>::quiet_NaN());
  rep.p_value.assign(d, std::numeric_limits<double>::quiet_NaN());

  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < d; ++j) {
    const double ijj = info(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
    if (ijj > 0.0) active.push_back(j);
  }

  if (m >= 2 && g2 > 0.0) {
    for (const std::size_t j : active) {
      const Eigen::Index jj = static_cast<Eigen::Index>(j);
      const double ijj = info(jj, jj);
      rep.chisq[j] = static_cast<double>(m) * u[jj] * u[jj] / (ijj * g2);
      rep.p_value[j] = chi_squared_tail(rep.chisq[j], 1);
      Eigen::VectorXd col = rep.residuals.col(jj);
      col.array() -= col.mean();
      const double denom = std::sqrt(g2 * col.squaredNorm());
      rep.rho[j] = denom > 0.0 ? g.dot(col) / denom : std::numeric_limits<double>::quiet_NaN();
    }
    if (!active.empty()) {
      const Eigen::Index na = static_cast<Eigen::Index>(active.size());
      Eigen::MatrixXd ia(na, na);
      Eigen::VectorXd ua(na);
      for (Eigen::Index a = 0; a < na; ++a) {
        ua[a] = u[static_cast<Eigen::Index>(active[static_cast<std::size_t>(a)])];
        for (Eigen::Index b = 0; b < na; ++b) {
          ia(a, b) = info(static_cast<Eigen::Index>(active[static_cast<std::size_t>(a)]),
                          static_cast<Eigen::Index>(active[static_cast<std::size_t>(b)]));
        }
      }
      const Eigen::VectorXd z = ia.ldlt().solve(ua);
      rep.global_chisq = static_cast<double>(m) * ua.dot(z) / g2;
      rep.global_df = static_cast<int>(active.size());
      rep.global_p = chi_squared_tail(rep.global_chisq, rep.global_df);
    }
  }
  return rep;
}

}  // namespace hazshift

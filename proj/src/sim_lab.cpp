#include "hazshift/sim_lab.hpp"

#include <algorithm>
#include <cmath>

#include "hazshift/cox.hpp"
#include "hazshift/effect.hpp"
#include "hazshift/inference.hpp"
#include "hazshift/parallel.hpp"
#include "hazshift/quadrature.hpp"

namespace hazshift {

namespace {
constexpr std::uint64_t kGenerateSalt = 0x67656eULL;
constexpr std::uint64_t kMcSalt = 0x6d63ULL;
constexpr std::uint64_t kStudyDataSalt = 0x7364ULL;
constexpr std::uint64_t kStudyBootSalt = 0x7362ULL;

// L2 is unbounded; +-8 sd leaves mass below 1e-15.
constexpr double kL2Center = 0.5;
constexpr double kL2Sd = 0.25;
constexpr double kL2HalfWidth = 8.0 * kL2Sd;

double normal_pdf(double x, double mean, double sd) {
  constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
  const double z = (x - mean) / sd;
  return inv_sqrt_2pi / sd * std::exp(-0.5 * z * z);
}

}  // namespace

DgpSpec DgpSpec::from_name(const std::string& name) {
  if (name == "main") return main();
  if (name == "multi") return multi();
  throw Error("InvalidDgp", "unknown DGP variant: " + name + " (expected 'main' or 'multi')");
}

std::vector<std::string> DgpSpec::covariate_names() const {
  if (variant == DgpVariant::Main) return {"l1"};
  return {"l1", "l2", "l3"};
}

double DgpSpec::rate(std::span<const double> l) const {
  if (variant == DgpVariant::Main) return std::exp(0.25 * l[0]);
  return std::exp(0.1 * l[0] + 0.05 * l[1] + 0.1 * l[2]);
}

double DgpSpec::outcome_mean(double t, std::span<const double> l) const {
  const double tc = std::min(t, 2.0);
  if (variant == DgpVariant::Main) return std::exp(1.0 - 1.5 * l[0] - (2.0 - tc));
  return std::exp(1.0 - (0.6 * l[0] + 0.3 * l[1] + 0.6 * l[2]) - (2.0 - tc));
}

void DgpSpec::draw_covariates(RngStream& stream, std::vector<double>& out) const {
  out.resize(dim());
  if (variant == DgpVariant::Main) {
    out[0] = stream.uniform();
    return;
  }
  out[0] = stream.uniform();
  out[1] = kL2Center + kL2Sd * stream.normal();
  out[2] = stream.bernoulli(0.5) ? 1.0 : 0.0;
}

Dataset generate(const DgpSpec& dgp, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error("InvalidSize", "n must be at least 1");
  RngStream stream(derive_seed(seed, 0, kGenerateSalt));

  Dataset ds;
  ds.tau = dgp.tau();
  ds.covariate_names = dgp.covariate_names();
  ds.records.resize(n);
  for (SubjectRecord& r : ds.records) {
    dgp.draw_covariates(stream, r.covariates);
    const double t = stream.exponential() / dgp.rate(r.covariates);
    r.delta = t < dgp.tau() ? 1 : 0;
    r.t_obs = r.delta ? t : dgp.tau();
    r.y = dgp.outcome_mean(r.t_obs, r.covariates) + dgp.outcome_sd() * stream.normal();
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

namespace {

// E[ mu(T(theta) ^ tau, L) | L = l ]: the shifted time has survival
// exp(-rate(l) * int_0^t theta), so the density term integrates over [0, tau]
// and the atom at T >= tau carries the remaining mass.
double conditional_psi(const DgpSpec& dgp, const ThetaSpec& theta, std::span<const double> l,
                       double t_tol) {
  const double rate = dgp.rate(l);
  const double tau = dgp.tau();
  const auto integrand = [&](double t) {
    const double cumulative = rate * theta.time_integral(t, l);
    return dgp.outcome_mean(t, l) * theta(t, l) * rate * std::exp(-cumulative);
  };
  const double body = integrate(integrand, 0.0, tau, t_tol);
  const double atom = std::exp(-rate * theta.time_integral(tau, l)) * dgp.outcome_mean(tau, l);
  return body + atom;
}

}  // namespace

double oracle_psi(const DgpSpec& dgp, const ThetaSpec& theta, double abs_tol) {
  if (!(abs_tol > 0.0)) throw QuadratureError("tolerance must be positive");
  const double t_tol = std::min(1e-9, abs_tol * 1e-3);

  if (dgp.variant == DgpVariant::Main) {
    return integrate(
        [&](double l1) {
          const double l[1] = {l1};
          return conditional_psi(dgp, theta, l, t_tol);
        },
        0.0, 1.0, abs_tol * 0.5);
  }

  // Multi: exact enumeration over L3, quadrature over L2 (truncated) and L1.
  const double l2_tol = abs_tol * 0.02;
  double total = 0.0;
  for (const double l3 : {0.0, 1.0}) {
    total += 0.5 * integrate(
                       [&](double l1) {
                         return integrate(
                             [&](double l2) {
                               const double l[3] = {l1, l2, l3};
                               return normal_pdf(l2, kL2Center, kL2Sd) *
                                      conditional_psi(dgp, theta, l, t_tol);
                             },
                             kL2Center - kL2HalfWidth, kL2Center + kL2HalfWidth, l2_tol);
                       },
                       0.0, 1.0, abs_tol * 0.2);
  }
  return total;
}

MonteCarloEstimate mc_psi(const DgpSpec& dgp, const ThetaSpec& theta, std::size_t draws,
                          std::uint64_t seed) {
  if (draws < 2) throw Error("InvalidSize", "draws must be at least 2");
  RngStream stream(derive_seed(seed, 0, kMcSalt));
  std::vector<double> l;
  double sum = 0.0;
  double sumsq = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    dgp.draw_covariates(stream, l);
    // T(theta): solve rate * int_0^t theta = Exp(1)
    const double t = theta.invert_time_integral(stream.exponential() / dgp.rate(l), l);
    const double v = dgp.outcome_mean(std::min(t, dgp.tau()), l);
    sum += v;
    sumsq += v * v;
  }
  const double m = static_cast<double>(draws);
  const double mean = sum / m;
  const double var = (sumsq - m * mean * mean) / (m - 1.0);
  return {mean, std::sqrt(var / m)};
}

double true_ipw_weight(const DgpSpec& dgp, const ThetaSpec& theta, const SubjectRecord& r) {
  const double rate = dgp.rate(r.covariates);
  const double integral = rate * (theta.time_integral(r.t_obs, r.covariates) - r.t_obs);
  const double factor = r.delta == 1 ? theta(r.t_obs, r.covariates) : 1.0;
  return factor * std::exp(-integral);
}

// ---------------------------------------------------------------------------
// Study runner
// ---------------------------------------------------------------------------

StudyReport run_study(const DgpSpec& dgp, std::span<const ThetaSpec> thetas, std::size_t n,
                      int R, int B, std::uint64_t seed, int threads) {
  if (R < 2) throw Error("InvalidSize", "R must be at least 2");
  if (thetas.empty()) throw Error("EmptyGrid", "theta grid is empty");

  const std::size_t T = thetas.size();
  std::vector<double> truth(T);
  for (std::size_t t = 0; t < T; ++t) truth[t] = oracle_psi(dgp, thetas[t]);

  const std::size_t nr = static_cast<std::size_t>(R);
  std::vector<double> psis(nr * T, 0.0);
  std::vector<double> ses(nr * T, 0.0);
  std::vector<char> failed(nr, 0);

  parallel_for(nr, resolve_threads(threads), [&](std::size_t r) {
    try {
      const Dataset ds = generate(dgp, n, derive_seed(seed, r, kStudyDataSalt));
      const std::vector<EffectEstimate> est =
          effect_curve(ds, thetas, B, derive_seed(seed, r, kStudyBootSalt), 1);
      for (std::size_t t = 0; t < T; ++t) {
        psis[r * T + t] = est[t].psi_hat;
        ses[r * T + t] = est[t].se;
      }
    } catch (const Error&) {
      failed[r] = 1;
    }
  });

  StudyReport report;
  report.dgp = dgp.name();
  report.n = n;
  report.R = R;
  report.B = B;
  report.seed = seed;
  for (const char f : failed) report.failed_replications += f;
  const int kept = R - report.failed_replications;
  if (kept < 2) throw TooFewReplicatesError("fewer than 2 study replications survived");

  report.rows.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    StudyRow& row = report.rows[t];
    row.theta = thetas[t];
    row.true_psi = truth[t];

    double mean_psi = 0.0;
    double mean_se = 0.0;
    for (std::size_t r = 0; r < nr; ++r) {
      if (failed[r]) continue;
      mean_psi += psis[r * T + t];
      mean_se += ses[r * T + t];
    }
    mean_psi /= kept;
    mean_se /= kept;

    double ss = 0.0;
    int covered = 0;
    for (std::size_t r = 0; r < nr; ++r) {
      if (failed[r]) continue;
      const double psi = psis[r * T + t];
      const double se = ses[r * T + t];
      const double dev = psi - mean_psi;
      ss += dev * dev;
      if (psi - kWald95 * se <= truth[t] && truth[t] <= psi + kWald95 * se) ++covered;
    }
    row.bias = mean_psi - truth[t];
    row.pct_bias = 100.0 * row.bias / truth[t];
    row.see = std::sqrt(ss / (kept - 1));
    row.sd = mean_se;
    row.cp = static_cast<double>(covered) / kept;
  }
  return report;
}

std::vector<ThetaSpec> default_theta_grid(const DgpSpec& dgp) {
  std::vector<ThetaSpec> grid;
  if (dgp.variant == DgpVariant::Main) {
    for (const char* token : {"1/3", "1/2.5", "1/2", "1/1.5", "1.5", "2", "2.5", "3"}) {
      grid.push_back(ThetaSpec::parse_token(token));
    }
  } else {
    const double coefs[9][3] = {{0.1, 0.1, 0.1}, {0.2, 0.2, 0.2}, {0.5, 0.5, 0.5},
                                {0.1, 0.2, 0.5}, {0.1, 0.5, 0.2}, {0.2, 0.1, 0.5},
                                {0.2, 0.5, 0.1}, {0.5, 0.1, 0.2}, {0.5, 0.2, 0.1}};
    for (const auto& c : coefs) {
      grid.push_back(ThetaSpec::loglinear({c[0], c[1], c[2]}));
    }
  }
  return grid;
}

}  // namespace hazshift

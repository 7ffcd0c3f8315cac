// Acceptance suite: one pass/fail line per criterion.
//
//   acceptance --cli <path-to-hazshift-binary> [--only 1,4,9] [--threads N]
//
// Criteria 2 and 3 run full desk-scale Monte-Carlo studies and dominate the
// runtime (a few minutes on one core).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hazshift/cox.hpp"
#include "hazshift/dataset.hpp"
#include "hazshift/effect.hpp"
#include "hazshift/inference.hpp"
#include "hazshift/json_writer.hpp"
#include "hazshift/kaplan_meier.hpp"
#include "hazshift/parallel.hpp"
#include "hazshift/rng.hpp"
#include "hazshift/sim_lab.hpp"

namespace fs = std::filesystem;
using namespace hazshift;

namespace {

std::string g_cli;
int g_threads = 0;
int g_failures = 0;

void report(int num, const std::string& name, bool ok) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", num, name.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

bool check(bool ok, const std::string& detail) {
  if (!ok) std::printf("    FAILED: %s\n", detail.c_str());
  return ok;
}

// ---------------------------------------------------------------------------
// 1. Oracle fidelity against the published psi rows.
//    The tables print three decimals, so the printed reference itself carries
//    up to 5e-4 rounding; the oracle gets a 5e-4 budget on top of that.
// ---------------------------------------------------------------------------

bool criterion1() {
  bool ok = true;
  const DgpSpec main_dgp = DgpSpec::main();
  const char* tokens[8] = {"1/3", "1/2.5", "1/2", "1/1.5", "1.5", "2", "2.5", "3"};
  const double table1[8] = {0.957, 0.893, 0.808, 0.694, 0.404, 0.336, 0.297, 0.273};
  for (int k = 0; k < 8; ++k) {
    const double psi = oracle_psi(main_dgp, ThetaSpec::parse_token(tokens[k]));
    const double diff = std::fabs(psi - table1[k]);
    std::printf("    main  theta=%-6s oracle=%.6f table=%.3f diff=%.2e\n", tokens[k], psi, table1[k], diff);
    ok = check(diff <= 1e-3, std::string("table-1 entry ") + tokens[k]) && ok;
  }

  const DgpSpec multi = DgpSpec::multi();
  const auto grid = default_theta_grid(multi);
  const double table3[9] = {0.474, 0.436, 0.348, 0.424, 0.408, 0.426, 0.405, 0.413, 0.408};
  for (int k = 0; k < 9; ++k) {
    const double psi = oracle_psi(multi, grid[static_cast<std::size_t>(k)]);
    const double diff = std::fabs(psi - table3[k]);
    std::printf("    multi beta_%d oracle=%.6f table=%.3f diff=%.2e\n", k + 1, psi, table3[k], diff);
    ok = check(diff <= 1e-3, "table-3 entry " + std::to_string(k + 1)) && ok;
  }

  // dual route: the independent Monte-Carlo sampler must agree
  const MonteCarloEstimate mc = mc_psi(main_dgp, ThetaSpec::constant(2.0), 1000000, 31337);
  const double quad = oracle_psi(main_dgp, ThetaSpec::constant(2.0));
  std::printf("    cross-check theta=2: quadrature=%.6f sampler=%.6f (se %.2e)\n", quad, mc.value,
              mc.std_error);
  ok = check(std::fabs(mc.value - quad) <= 3.0 * mc.std_error + 1e-6, "sampler vs quadrature") && ok;
  return ok;
}

// ---------------------------------------------------------------------------
// 2./3. Study reproduction: per theta |bias| <= 3*SEE/sqrt(R), sd/see within
//       [0.9, 1.1], coverage within the 99% binomial band [0.926, 0.966].
// ---------------------------------------------------------------------------

bool study_bands(const StudyReport& rep) {
  bool ok = true;
  for (const StudyRow& row : rep.rows) {
    const double band = 3.0 * row.see / std::sqrt(static_cast<double>(rep.R));
    const double ratio = row.sd / row.see;
    const bool ok_bias = std::fabs(row.bias) <= band;
    const bool ok_ratio = ratio >= 0.9 && ratio <= 1.1;
    const bool ok_cp = row.cp >= 0.926 && row.cp <= 0.966;
    std::printf("    theta=%-22s bias=%+.5f (band %.5f) sd/see=%.3f cp=%.3f %s\n",
                row.theta.label().c_str(), row.bias, band, ratio, row.cp,
                ok_bias && ok_ratio && ok_cp ? "ok" : "VIOLATION");
    ok = ok && ok_bias && ok_ratio && ok_cp;
  }
  ok = check(rep.failed_replications == 0, "replication failures") && ok;
  return ok;
}

bool criterion2() {
  const DgpSpec dgp = DgpSpec::main();
  const auto grid = default_theta_grid(dgp);
  std::printf("    [n=5000, R=500, B=200]\n");
  const StudyReport big = run_study(dgp, grid, 5000, 500, 200, 20240802, g_threads);
  bool ok = study_bands(big);
  std::printf("    [n=1000, R=500, B=200]\n");
  const StudyReport mid = run_study(dgp, grid, 1000, 500, 200, 20240801, g_threads);
  ok = study_bands(mid) && ok;
  return ok;
}

bool criterion3() {
  const DgpSpec dgp = DgpSpec::multi();
  const auto grid = default_theta_grid(dgp);
  std::printf("    [multi, n=1000, R=500, B=50]\n");
  const StudyReport rep = run_study(dgp, grid, 1000, 500, 50, 20240803, g_threads);
  return study_bands(rep);
}

// ---------------------------------------------------------------------------
// 4. Radon-Nikodym identity: with the TRUE hazard plugged in, weights have
//    mean 1 over 1e6 simulated subjects, within 3 Monte-Carlo standard errors.
// ---------------------------------------------------------------------------

bool criterion4() {
  const DgpSpec dgp = DgpSpec::main();
  const Dataset ds = generate(dgp, 1000000, 606060);
  bool ok = true;
  for (const char* token : {"1/3", "1", "2", "3"}) {
    const ThetaSpec theta = ThetaSpec::parse_token(token);
    double sw = 0.0, sw2 = 0.0;
    for (const SubjectRecord& r : ds.records) {
      const double w = true_ipw_weight(dgp, theta, r);
      sw += w;
      sw2 += w * w;
    }
    const double n = static_cast<double>(ds.size());
    const double mean = sw / n;
    const double se = std::sqrt(std::max(0.0, sw2 / n - mean * mean) / n);
    std::printf("    theta=%-5s mean(w)=%.6f se=%.2e\n", token, mean, se);
    ok = check(std::fabs(mean - 1.0) <= 3.0 * se, std::string("mean weight at theta=") + token) && ok;
  }
  return ok;
}

// ---------------------------------------------------------------------------
// 5. Estimator identity: psi(1) equals the sequential sample mean, bitwise.
// ---------------------------------------------------------------------------

bool criterion5() {
  std::vector<Dataset> datasets;
  datasets.push_back(generate(DgpSpec::main(), 1000, 70707));
  datasets.push_back(generate(DgpSpec::multi(), 500, 70708));

  // through the CSV surface as well
  const fs::path dir = fs::temp_directory_path() / "hazshift_acceptance";
  fs::create_directories(dir);
  const fs::path csv = dir / "identity.csv";
  write_csv(datasets[0], csv.string());
  datasets.push_back(load_csv(csv.string(), 2.0));

  // handcrafted extremes
  Dataset weird;
  weird.tau = 2.0;
  weird.covariate_names = {"x"};
  RngStream s(515151);
  for (int i = 0; i < 57; ++i) {
    SubjectRecord r;
    r.y = (s.uniform() - 0.5) * std::exp(18.0 * (s.uniform() - 0.5));
    const double t = s.exponential() * 0.8;
    r.delta = t < 2.0 ? 1 : 0;
    r.t_obs = r.delta ? t : 2.0;
    r.covariates = {s.normal() * 3.0};
    weird.records.push_back(r);
  }
  datasets.push_back(weird);

  bool ok = true;
  const ThetaSpec one = ThetaSpec::constant(1.0);
  for (std::size_t k = 0; k < datasets.size(); ++k) {
    const Dataset& ds = datasets[k];
    const CoxFit fit = fit_cox(ds);
    double sum = 0.0;
    for (const SubjectRecord& r : ds.records) sum += r.y;
    const double mean = sum / static_cast<double>(ds.size());
    const double psi = psi_hat(ds, fit, one);
    std::printf("    dataset %zu: psi(1)=%s mean=%s\n", k, JsonWriter::format_double(psi).c_str(),
                JsonWriter::format_double(mean).c_str());
    ok = check(psi == mean, "bitwise identity on dataset " + std::to_string(k)) && ok;
  }
  return ok;
}

// ---------------------------------------------------------------------------
// 6. Cox solver against the grid-search oracle plus finite differences.
// ---------------------------------------------------------------------------

double breslow_loglik_1d(const Dataset& ds, double beta) {
  double ll = 0.0;
  for (const SubjectRecord& rec : ds.records) {
    if (rec.delta != 1) continue;
    double s0 = 0.0;
    for (const SubjectRecord& other : ds.records) {
      if (other.t_obs >= rec.t_obs) s0 += std::exp(beta * other.covariates[0]);
    }
    ll += beta * rec.covariates[0] - std::log(s0);
  }
  return ll;
}

bool criterion6() {
  bool ok = true;

  // 100 non-separable random instances, n <= 6, d = 1, no ties
  RngStream s(818181);
  int kept = 0;
  int attempts = 0;
  double worst = 0.0;
  while (kept < 100 && attempts < 3000) {
    ++attempts;
    const int n = 2 + static_cast<int>(s.uniform() * 5.0);
    Dataset ds;
    ds.tau = 2.0;
    ds.covariate_names = {"x"};
    int events = 0;
    std::set<double> seen;
    bool tied = false;
    for (int i = 0; i < n; ++i) {
      SubjectRecord r;
      r.y = 0.0;
      const bool event = s.bernoulli(0.75);
      r.delta = event ? 1 : 0;
      r.t_obs = event ? 1.9 * s.uniform() : 2.0;
      if (event && !seen.insert(r.t_obs).second) tied = true;
      r.covariates = {s.normal()};
      events += r.delta;
      ds.records.push_back(r);
    }
    if (events == 0 || tied) continue;

    double grid_best = -10.0;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (double b = -10.0; b <= 10.0 + 5e-5; b += 1e-4) {
      const double ll = breslow_loglik_1d(ds, b);
      if (ll > best_ll) {
        best_ll = ll;
        grid_best = b;
      }
    }
    if (std::fabs(grid_best) > 8.0) continue;  // effectively separable draw

    ++kept;
    const CoxFit fit = fit_cox(ds);
    const double diff = std::fabs(fit.beta[0] - grid_best);
    worst = std::max(worst, diff);
    if (!fit.converged || diff > 1e-3) {
      ok = check(false, "instance " + std::to_string(kept) + ": newton " +
                            std::to_string(fit.beta[0]) + " vs grid " + std::to_string(grid_best));
    }
  }
  std::printf("    %d instances (from %d draws), worst |newton - grid| = %.2e\n", kept, attempts, worst);
  ok = check(kept == 100, "collected 100 usable instances") && ok;

  // finite-difference check of the analytic derivatives
  RngStream fd(828282);
  double worst_rel = 0.0;
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 5 + static_cast<std::size_t>(fd.uniform() * 16.0);
    const std::size_t d = 1 + static_cast<std::size_t>(fd.uniform() * 3.0);
    Dataset ds;
    ds.tau = 2.0;
    for (std::size_t j = 0; j < d; ++j) ds.covariate_names.push_back("x" + std::to_string(j));
    int events = 0;
    for (std::size_t i = 0; i < n; ++i) {
      SubjectRecord r;
      const double t = fd.exponential();
      r.delta = t < 2.0 ? 1 : 0;
      r.t_obs = r.delta ? t : 2.0;
      for (std::size_t j = 0; j < d; ++j) r.covariates.push_back(fd.normal());
      events += r.delta;
      ds.records.push_back(r);
    }
    if (events == 0) continue;
    const CoxDesign design(ds);
    Eigen::VectorXd beta(static_cast<Eigen::Index>(d));
    for (Eigen::Index j = 0; j < beta.size(); ++j) beta[j] = 2.0 * fd.uniform() - 1.0;
    const CoxLoglik at = design.loglik_at(beta);
    const double h = 1e-5;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      Eigen::VectorXd up = beta, dn = beta;
      up[j] += h;
      dn[j] -= h;
      const CoxLoglik lu = design.loglik_at(up);
      const CoxLoglik ld = design.loglik_at(dn);
      const double fd_grad = (lu.value - ld.value) / (2.0 * h);
      const double rel_g = std::fabs(at.score[j] - fd_grad) / std::max(1.0, std::fabs(fd_grad));
      worst_rel = std::max(worst_rel, rel_g);
      for (Eigen::Index k = 0; k < beta.size(); ++k) {
        const double fd_hess = -(lu.score[k] - ld.score[k]) / (2.0 * h);
        const double rel_h =
            std::fabs(at.information(j, k) - fd_hess) / std::max(1.0, std::fabs(fd_hess));
        worst_rel = std::max(worst_rel, rel_h);
      }
    }
  }
  std::printf("    worst finite-difference relative error = %.2e\n", worst_rel);
  ok = check(worst_rel < 1e-4, "finite differences") && ok;
  return ok;
}

// ---------------------------------------------------------------------------
// 7. Diagnostics calibration under proportional hazards.
// ---------------------------------------------------------------------------

bool criterion7() {
  const DgpSpec dgp = DgpSpec::main();
  const int reps = 200;
  std::vector<double> pvals(reps, 1.0);
  std::vector<double> colsums(reps, 0.0);
  parallel_for(static_cast<std::size_t>(reps), resolve_threads(g_threads), [&](std::size_t r) {
    const Dataset ds = generate(dgp, 300, derive_seed(909090, r));
    const CoxFit fit = fit_cox(ds);
    const SchoenfeldReport rep = schoenfeld(ds, fit);
    pvals[r] = rep.global_p;
    colsums[r] = rep.residuals.colwise().sum().lpNorm<Eigen::Infinity>();
  });
  int rejections = 0;
  double worst_sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    rejections += pvals[static_cast<std::size_t>(r)] < 0.05;
    worst_sum = std::max(worst_sum, colsums[static_cast<std::size_t>(r)]);
  }
  const double rate = static_cast<double>(rejections) / reps;
  std::printf("    rejection rate at 0.05: %.3f (%d/%d), worst residual column sum %.2e\n", rate,
              rejections, reps, worst_sum);
  bool ok = check(rate >= 0.02 && rate <= 0.09, "rejection rate in [0.02, 0.09]");
  ok = check(worst_sum < 1e-6, "residual column sums") && ok;
  return ok;
}

// ---------------------------------------------------------------------------
// 8. Kaplan-Meier oracle.
// ---------------------------------------------------------------------------

bool criterion8() {
  bool ok = true;
  Dataset ds;
  ds.tau = 2.0;
  ds.records = {{0.0, 1.0, 1, {}}, {0.0, 2.0, 0, {}}, {0.0, 1.5, 1, {}}};
  const auto km = kaplan_meier(ds);
  ok = check(km.survival.times == std::vector<double>{1.0, 1.5}, "jump times") && ok;
  ok = check(km.survival.values[0] == 2.0 / 3.0, "S(1) = 2/3 exactly") && ok;
  ok = check(km.survival.values[1] == 1.0 / 3.0, "S(1.5) = 1/3 exactly") && ok;

  RngStream s(929292);
  Dataset all_events;
  all_events.tau = 2.0;
  for (int i = 0; i < 80; ++i) all_events.records.push_back({0.0, 1.9 * s.uniform(), 1, {}});
  const auto km2 = kaplan_meier(all_events);
  const double n = static_cast<double>(all_events.size());
  for (std::size_t k = 0; k < km2.survival.times.size(); ++k) {
    std::size_t count = 0;
    for (const auto& r : all_events.records) count += r.t_obs <= km2.survival.times[k];
    if (1.0 - km2.survival.values[k] != static_cast<double>(count) / n) {
      ok = check(false, "empirical CDF mismatch at jump " + std::to_string(k));
    }
  }
  std::printf("    product-limit and empirical-CDF identities hold exactly\n");
  return ok;
}

// ---------------------------------------------------------------------------
// 9. Byte-identical seeded CLI outputs across runs and thread counts {1, 8}.
// ---------------------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " >/dev/null 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

bool criterion9() {
  if (g_cli.empty()) {
    std::printf("    no --cli given\n");
    return false;
  }
  const fs::path dir = fs::temp_directory_path() / "hazshift_acceptance";
  fs::create_directories(dir);
  bool ok = true;

  const fs::path sim1 = dir / "det_sim1.csv";
  const fs::path sim2 = dir / "det_sim2.csv";
  ok = check(run_cli("simulate --dgp main --n 400 --seed 11 --out " + sim1.string()) == 0, "simulate run 1") && ok;
  ok = check(run_cli("simulate --dgp main --n 400 --seed 11 --out " + sim2.string()) == 0, "simulate run 2") && ok;
  ok = check(read_file(sim1.string()) == read_file(sim2.string()), "simulate bytes") && ok;

  const std::string est = "estimate --input " + sim1.string() + " --tau 2 --theta 0.5,1,2 --B 50 --seed 7";
  const fs::path e1 = dir / "det_est1";
  const fs::path e2 = dir / "det_est2";
  const fs::path e8 = dir / "det_est8";
  ok = check(run_cli(est + " --threads 1 --out " + e1.string()) == 0, "estimate t1 run 1") && ok;
  ok = check(run_cli(est + " --threads 1 --out " + e2.string()) == 0, "estimate t1 run 2") && ok;
  ok = check(run_cli(est + " --threads 8 --out " + e8.string()) == 0, "estimate t8") && ok;
  ok = check(read_file(e1.string() + ".json") == read_file(e2.string() + ".json"), "estimate bytes across runs") && ok;
  ok = check(read_file(e1.string() + ".json") == read_file(e8.string() + ".json"), "estimate bytes across threads") && ok;
  ok = check(read_file(e1.string() + ".csv") == read_file(e8.string() + ".csv"), "estimate csv bytes") && ok;

  const std::string study = "study --dgp main --n 120 --R 4 --B 8 --seed 3 --theta 1,2";
  const fs::path s1 = dir / "det_study1";
  const fs::path s8 = dir / "det_study8";
  ok = check(run_cli(study + " --threads 1 --out " + s1.string()) == 0, "study t1") && ok;
  ok = check(run_cli(study + " --threads 8 --out " + s8.string()) == 0, "study t8") && ok;
  ok = check(read_file(s1.string() + ".json") == read_file(s8.string() + ".json"), "study bytes across threads") && ok;
  ok = check(read_file(s1.string() + ".csv") == read_file(s8.string() + ".csv"), "study csv bytes") && ok;

  std::printf("    seeded outputs are byte-identical across runs and thread counts\n");
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      g_cli = argv[++i];
    } else if (arg == "--threads" && i + 1 < argc) {
      g_threads = std::atoi(argv[++i]);
    } else if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string piece;
      while (std::getline(ss, piece, ',')) only.insert(std::atoi(piece.c_str()));
    }
  }

  struct Entry {
    int num;
    const char* name;
    bool (*fn)();
  };
  const Entry entries[] = {
      {1, "oracle fidelity (table psi rows)", criterion1},
      {2, "table-1 reproduction at desk scale (main DGP)", criterion2},
      {3, "table-3 reproduction (multi DGP)", criterion3},
      {4, "Radon-Nikodym identity (true-hazard weights)", criterion4},
      {5, "estimator identity psi(1) == mean(Y), bitwise", criterion5},
      {6, "Cox solver vs grid-search oracle + finite differences", criterion6},
      {7, "diagnostics calibration under proportional hazards", criterion7},
      {8, "Kaplan-Meier oracle", criterion8},
      {9, "seeded determinism of CLI outputs", criterion9},
  };

  for (const Entry& e : entries) {
    if (!only.empty() && only.count(e.num) == 0) continue;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = e.fn();
    } catch (const std::exception& ex) {
      std::printf("    EXCEPTION: %s\n", ex.what());
      ok = false;
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    std::printf("    (%.1f s)\n", dt.count());
    report(e.num, e.name, ok);
  }
  return g_failures == 0 ? 0 : 1;
}

#include "hazshift/inference.hpp"

#include <cmath>

#include "hazshift/cox.hpp"
#include "hazshift/effect.hpp"
#include "hazshift/parallel.hpp"
#include "hazshift/rng.hpp"

namespace hazshift {

namespace {
constexpr std::uint64_t kMultiplierSalt = 0x6d756c74ULL;  // substream tag
}

std::vector<double> multiplier_block(std::uint64_t seed, std::uint64_t replicate, std::size_t n) {
  RngStream stream(derive_seed(seed, replicate, kMultiplierSalt));
  std::vector<double> m(n);
  for (double& v : m) v = stream.exponential();
  return m;
}

std::vector<EffectEstimate> effect_curve(const Dataset& ds, std::span<const ThetaSpec> thetas,
                                         int B, std::uint64_t seed, int threads) {
  if (thetas.empty()) throw Error("EmptyGrid", "theta grid is empty");
  if (B != 0 && B < 2) throw TooFewReplicatesError("B must be 0 or at least 2");

  const CoxDesign design(ds);
  const CoxFit base = design.fit();
  const PsiEngine engine(ds, thetas);
  const std::vector<double> point = engine.psi(base);

  const std::size_t T = thetas.size();
  std::vector<EffectEstimate> out(T);
  for (std::size_t t = 0; t < T; ++t) {
    out[t].theta = thetas[t];
    out[t].psi_hat = point[t];
    out[t].B = B;
    out[t].seed = seed;
    out[t].ci_low = point[t];
    out[t].ci_high = point[t];
  }
  if (B == 0) return out;

  const std::size_t nb = static_cast<std::size_t>(B);
  std::vector<double> rep_psi(nb * T, 0.0);
  std::vector<char> rep_failed(nb, 0);

  parallel_for(nb, resolve_threads(threads), [&](std::size_t b) {
    const std::vector<double> mult = multiplier_block(seed, b, ds.size());
    try {
      const CoxFit wfit = design.fit(&mult, &base.beta);
      if (!wfit.converged) {
        rep_failed[b] = 1;
        return;
      }
      const std::vector<double> p = engine.psi(wfit, &mult);
      for (std::size_t t = 0; t < T; ++t) rep_psi[b * T + t] = p[t];
    } catch (const Error&) {
      rep_failed[b] = 1;
    }
  });

  int dropped = 0;
  for (const char f : rep_failed) dropped += f;
  const int kept = B - dropped;
  if (kept < 2) {
    throw TooFewReplicatesError("fewer than 2 bootstrap replicates survived (" +
                                std::to_string(dropped) + " of " + std::to_string(B) + " dropped)");
  }
  const bool flagged = dropped > 0.05 * B;

  for (std::size_t t = 0; t < T; ++t) {
    double mean = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      if (!rep_failed[b]) mean += rep_psi[b * T + t];
    }
    mean /= kept;
    double ss = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      if (!rep_failed[b]) {
        const double dev = rep_psi[b * T + t] - mean;
        ss += dev * dev;
      }
    }
    const double se = std::sqrt(ss / (kept - 1));
    out[t].se = se;
    out[t].ci_low = out[t].psi_hat - kWald95 * se;
    out[t].ci_high = out[t].psi_hat + kWald95 * se;
    out[t].dropped = dropped;
    out[t].flagged = flagged;
  }
  return out;
}

EffectEstimate multiplier_bootstrap(const Dataset& ds, const ThetaSpec& theta, int B,
                                    std::uint64_t seed, int threads) {
  if (B < 2) throw TooFewReplicatesError("multiplier bootstrap needs B >= 2");
  return effect_curve(ds, std::span<const ThetaSpec>(&theta, 1), B, seed, threads)[0];
}

}  // namespace hazshift

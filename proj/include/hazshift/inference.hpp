#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hazshift/dataset.hpp"
#include "hazshift/theta.hpp"

namespace hazshift {

// Fixed 95% normal quantile for bit-exact interval reproducibility.
inline constexpr double kWald95 = 1.959964;

struct EffectEstimate {
  ThetaSpec theta;
  double psi_hat = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int B = 0;
  int dropped = 0;      // replicates whose weighted Cox fit failed
  bool flagged = false; // more than 5% of replicates dropped
  std::uint64_t seed = 0;
};

// The i.i.d. standard-exponential multiplier block (mean 1, variance 1,
// strictly positive) for one bootstrap replicate. Stream-stable: it depends
// only on (seed, replicate, n), so batches B1 then B2 reproduce the first
// B1+B2 replicates of a single run.
std::vector<double> multiplier_block(std::uint64_t seed, std::uint64_t replicate, std::size_t n);

// Multiplier bootstrap around the plug-in IPW estimate: every replicate
// refits the Cox model with the multipliers as case weights and recomputes
// psi with the same multipliers, so the nuisance contribution to the variance
// is kept. The point estimate is the unweighted psi. Requires B >= 2.
EffectEstimate multiplier_bootstrap(const Dataset& ds, const ThetaSpec& theta, int B,
                                    std::uint64_t seed, int threads = 0);

// One estimate per theta. The baseline fit is computed once and multiplier
// draws are shared across the grid within a replicate, so the pointwise
// bands along the curve are internally consistent. B = 0 skips the bootstrap
// (se = 0, degenerate interval).
std::vector<EffectEstimate> effect_curve(const Dataset& ds, std::span<const ThetaSpec> thetas,
                                         int B, std::uint64_t seed, int threads = 0);

}  // namespace hazshift

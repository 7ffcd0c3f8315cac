#pragma once

#include <vector>

#include "hazshift/dataset.hpp"

namespace hazshift {

// Right-continuous step function: value(t) is values[k] for the largest
// times[k] <= t, and `origin` before the first grid time.
struct StepCurve {
  std::vector<double> times;   // strictly increasing
  std::vector<double> values;
  std::vector<double> lower;   // optional pointwise band (empty when absent)
  std::vector<double> upper;
  double origin = 1.0;

  bool has_bands() const { return !lower.empty(); }
  double value_at(double t) const;
};

struct KaplanMeierResult {
  StepCurve survival;    // S(t) = P(T > t), origin 1, nonincreasing
  StepCurve cumulative;  // P(T <= t) = 1 - S(t), origin 0
  bool no_events = false;  // all delta = 0: flat curve, bands undefined
};

// Product-limit estimate of the treatment-initialization distribution with
// Greenwood variance and pointwise 95% bands on the log(-log) scale. Tied
// event times collapse into one multiplicity-weighted jump; records censored
// at tau contribute to risk sets only.
KaplanMeierResult kaplan_meier(const Dataset& ds);

}  // namespace hazshift

#include "hazshift/kaplan_meier.hpp"

#include <algorithm>
#include <cmath>

namespace hazshift {

namespace {
constexpr double kZ95 = 1.959964;
}

double StepCurve::value_at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return origin;
  return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

KaplanMeierResult kaplan_meier(const Dataset& ds) {
  std::vector<double> event_times;
  event_times.reserve(ds.size());
  for (const SubjectRecord& r : ds.records) {
    if (r.delta == 1) event_times.push_back(r.t_obs);
  }

  KaplanMeierResult out;
  out.survival.origin = 1.0;
  out.cumulative.origin = 0.0;
  if (event_times.empty()) {
    out.no_events = true;  // S(t) = 1 for t < tau; bands undefined
    return out;
  }
  std::sort(event_times.begin(), event_times.end());

  const std::size_t n = ds.size();
  StepCurve& s = out.survival;

  // Censoring happens only at tau and event times are strictly below tau, so
  // the risk set at every event time is exactly the subjects not yet treated:
  // the product-limit value telescopes to an integer count over n.
  std::size_t remaining = n;
  double greenwood = 0.0;
  for (std::size_t k = 0; k < event_times.size();) {
    std::size_t d = 1;
    while (k + d < event_times.size() && event_times[k + d] == event_times[k]) ++d;
    const std::size_t at_risk = remaining;
    remaining -= d;
    const double surv = static_cast<double>(remaining) / static_cast<double>(n);

    s.times.push_back(event_times[k]);
    s.values.push_back(surv);

    if (remaining > 0) {
      greenwood += static_cast<double>(d) /
                   (static_cast<double>(at_risk) * static_cast<double>(at_risk - d));
      const double se = surv * std::sqrt(greenwood);
      // log(-log S) transform keeps the band inside [0,1].
      const double se_loglog = se / (surv * std::fabs(std::log(surv)));
      s.lower.push_back(std::pow(surv, std::exp(kZ95 * se_loglog)));
      s.upper.push_back(std::pow(surv, std::exp(-kZ95 * se_loglog)));
    } else {
      s.lower.push_back(0.0);
      s.upper.push_back(0.0);
    }
    k += d;
  }

  StepCurve& c = out.cumulative;
  c.times = s.times;
  c.values.reserve(s.values.size());
  c.lower.reserve(s.values.size());
  c.upper.reserve(s.values.size());
  // rebuild P(T <= t) from the integer counts so it equals the empirical CDF
  // exactly when nothing is censored, rather than rounding 1 - S again
  std::size_t treated = 0;
  std::size_t k = 0;
  for (std::size_t e = 0; e < event_times.size();) {
    std::size_t d = 1;
    while (e + d < event_times.size() && event_times[e + d] == event_times[e]) ++d;
    treated += d;
    c.values.push_back(static_cast<double>(treated) / static_cast<double>(n));
    c.lower.push_back(1.0 - s.upper[k]);
    c.upper.push_back(1.0 - s.lower[k]);
    ++k;
    e += d;
  }
  return out;
}

}  // namespace hazshift

#include "fracsurv/km.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fracsurv/error.hpp"

namespace fracsurv {

KmCurve fit_km(const Dataset& ds) {
  const std::size_t n = ds.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Sort by time; within ties, events (status 1) first.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ds[a].time != ds[b].time) return ds[a].time < ds[b].time;
    return ds[a].status > ds[b].status;
  });

  KmCurve curve;
  curve.n = n;
  double survival = 1.0;
  double greenwood = 0.0;
  std::size_t i = 0;
  while (i < n) {
    const double t = ds[order[i]].time;
    const std::size_t at_risk = n - i;
    std::size_t events = 0;
    std::size_t j = i;
    for (; j < n && ds[order[j]].time == t; ++j) {
      if (ds[order[j]].status == 1) {
        ++events;
      } else {
        curve.censored_times.push_back(t);
      }
    }
    if (events > 0) {
      const std::size_t survivors = at_risk - events;
      survival = survival * static_cast<double>(survivors) / static_cast<double>(at_risk);
      greenwood += survivors == 0
                       ? std::numeric_limits<double>::infinity()
                       : static_cast<double>(events) /
                             (static_cast<double>(at_risk) * static_cast<double>(survivors));
      curve.steps.push_back({t, at_risk, events, survival, greenwood});
    }
    i = j;
  }
  return curve;
}

namespace {

// Index of the last step with time <= t, or -1.
std::ptrdiff_t step_index(const KmCurve& curve, double t) {
  const auto it = std::upper_bound(curve.steps.begin(), curve.steps.end(), t,
                                   [](double v, const KmStep& s) { return v < s.time; });
  return (it - curve.steps.begin()) - 1;
}

}  // namespace

double survival_at(const KmCurve& curve, double t) {
  const auto idx = step_index(curve, t);
  return idx < 0 ? 1.0 : curve.steps[static_cast<std::size_t>(idx)].survival;
}

double greenwood_at(const KmCurve& curve, double t) {
  const auto idx = step_index(curve, t);
  return idx < 0 ? 0.0 : curve.steps[static_cast<std::size_t>(idx)].greenwood;
}

std::optional<double> quantile(const KmCurve& curve, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("quantile order must lie in (0, 1]");
  const double level = 1.0 - p + kSurvivalTolerance;
  const auto it = std::find_if(curve.steps.begin(), curve.steps.end(),
                               [&](const KmStep& s) { return s.survival <= level; });
  if (it == curve.steps.end()) return std::nullopt;
  return it->time;
}

}  // namespace fracsurv

#include "fracsurv/band.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracsurv/error.hpp"

namespace fracsurv {

namespace {

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double variance_weight(double greenwood, std::size_t n) {
  const double ns2 = static_cast<double>(n) * greenwood;
  return ns2 / (1.0 + ns2);
}

std::size_t knot_index(const std::vector<double>& times, double t) {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  return static_cast<std::size_t>(it - times.begin()) - 1;
}

}  // namespace

double BandPair::lower_at(double t) const {
  if (!in_range(t)) throw DomainError("time outside band range");
  return lower[knot_index(times, t)];
}

double BandPair::upper_at(double t) const {
  if (!in_range(t)) throw DomainError("time outside band range");
  return upper[knot_index(times, t)];
}

double ep_critical_value(double a_lower, double a_upper, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("band level must lie in (0, 1)");
  if (!(a_lower > 0.0 && a_lower < a_upper && a_upper < 1.0)) {
    throw BandUndefinedError("band range needs 0 < a_L < a_U < 1");
  }
  const double alpha = 1.0 - level;
  const double log_ratio = std::log(a_upper * (1.0 - a_lower) / (a_lower * (1.0 - a_upper)));
  const auto tail = [&](double c) {
    const double phi = normal_pdf(c);
    return 4.0 * phi / c + phi * (c - 1.0 / c) * log_ratio;
  };

  // The tail approximation is decreasing for c >= 1.
  double lo = 1.0;
  double hi = 40.0;
  if (tail(lo) <= alpha) return lo;
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

BandPair ep_band(const KmCurve& curve, double level,
                 std::optional<std::pair<double, double>> range) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("band level must lie in (0, 1)");

  double t_lower = 0.0;
  double t_upper = 0.0;
  if (range) {
    std::tie(t_lower, t_upper) = *range;
    if (!(t_lower < t_upper)) throw BandUndefinedError("empty band range");
  } else {
    const auto interior = [](const KmStep& s) { return s.survival > 0.0 && s.survival < 1.0; };
    const auto first = std::find_if(curve.steps.begin(), curve.steps.end(), interior);
    const auto last = std::find_if(curve.steps.rbegin(), curve.steps.rend(), interior);
    if (first == curve.steps.end()) throw BandUndefinedError("curve has no interior steps");
    t_lower = first->time;
    t_upper = last->time;
    if (!(t_lower < t_upper)) throw BandUndefinedError("band needs at least two interior steps");
  }

  BandPair band;
  band.level = level;
  band.t_lower = t_lower;
  band.t_upper = t_upper;
  band.a_lower = variance_weight(greenwood_at(curve, t_lower), curve.n);
  band.a_upper = variance_weight(greenwood_at(curve, t_upper), curve.n);
  if (!(band.a_lower > 0.0 && band.a_upper < 1.0)) {
    throw BandUndefinedError("survival must lie strictly inside (0, 1) over the band range");
  }
  band.coefficient = ep_critical_value(band.a_lower, band.a_upper, level);

  const auto push_knot = [&](double t, double s, double s2) {
    const double half = band.coefficient * s * std::sqrt(s2);
    band.times.push_back(t);
    band.lower.push_back(std::clamp(s - half, 0.0, 1.0));
    band.upper.push_back(std::clamp(s + half, 0.0, 1.0));
  };
  push_knot(t_lower, survival_at(curve, t_lower), greenwood_at(curve, t_lower));
  for (const auto& step : curve.steps) {
    if (step.time > t_lower && step.time <= t_upper) {
      push_knot(step.time, step.survival, step.greenwood);
    }
  }
  return band;
}

}  // namespace fracsurv

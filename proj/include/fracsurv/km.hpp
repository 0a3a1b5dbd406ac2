#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fracsurv/dataset.hpp"

namespace fracsurv {

/// Absolute slack used when comparing a fitted survival value against a
/// target level, so that exact hits are not lost to rounding.
inline constexpr double kSurvivalTolerance = 1e-12;

/// One distinct event time of the product-limit curve.
struct KmStep {
  double time = 0.0;
  std::size_t at_risk = 0;
  std::size_t events = 0;
  double survival = 1.0;
  /// Cumulative Greenwood sum: sum over earlier steps of d / (n (n - d)).
  /// Infinite once a step removes the whole risk set.
  double greenwood = 0.0;
};

/// Right-continuous step function with S(t) = 1 before the first step.
struct KmCurve {
  std::vector<KmStep> steps;
  std::size_t n = 0;
  std::vector<double> censored_times;
};

/// Product-limit fit. At tied times events are processed before censorings,
/// so observations censored at an event time stay in that time's risk set.
KmCurve fit_km(const Dataset& ds);

double survival_at(const KmCurve& curve, double t);
double greenwood_at(const KmCurve& curve, double t);

/// Smallest step time y with S(y) <= 1 - p, or nullopt when the curve never
/// gets that low. Throws DomainError unless p is in (0, 1].
std::optional<double> quantile(const KmCurve& curve, double p);

}  // namespace fracsurv

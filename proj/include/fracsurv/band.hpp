#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "fracsurv/km.hpp"

namespace fracsurv {

inline constexpr std::string_view kBandVariant = "equal-precision, untransformed";

/// Simultaneous equal-precision band S(t) -/+ c * S(t) * sqrt(greenwood(t)),
/// clamped to [0, 1], on [t_lower, t_upper]. The edges are step functions
/// sharing the knots in `times` (the first knot is t_lower).
struct BandPair {
  double level = 0.95;
  double coefficient = 0.0;
  double t_lower = 0.0;
  double t_upper = 0.0;
  /// Variance weights a(t) = n s2 / (1 + n s2) at the range ends.
  double a_lower = 0.0;
  double a_upper = 0.0;
  std::vector<double> times;
  std::vector<double> lower;
  std::vector<double> upper;

  bool in_range(double t) const { return t >= t_lower && t <= t_upper; }
  /// Edge values at t; t must be in range.
  double lower_at(double t) const;
  double upper_at(double t) const;
};

/// Critical value c for which the standardized Brownian bridge satisfies
/// P(sup over [a_lower, a_upper] of |B(a)| / sqrt(a (1 - a)) > c) = 1 - level,
/// using the boundary-crossing approximation
///   P ~ 4 phi(c) / c + phi(c) (c - 1/c) log(a_U (1 - a_L) / (a_L (1 - a_U))).
/// Solved by bisection to 1e-6. Requires 0 < a_lower < a_upper < 1.
double ep_critical_value(double a_lower, double a_upper, double level);

/// Builds the band over `range` (default: first event time to the last event
/// time with S > 0). Throws DomainError for level outside (0, 1) and
/// BandUndefinedError when the range is degenerate (for example one event).
BandPair ep_band(const KmCurve& curve, double level,
                 std::optional<std::pair<double, double>> range = std::nullopt);

}  // namespace fracsurv

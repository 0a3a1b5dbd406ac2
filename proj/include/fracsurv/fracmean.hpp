#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fracsurv/band.hpp"
#include "fracsurv/km.hpp"

namespace fracsurv {

/// Proportions 0 = l_0 < l_1 < ... < l_K <= 1 splitting the population into
/// survival-ordered fractions. The survival-scale level of knot k is 1 - l_k.
class FractionGrid {
 public:
  /// `lambdas` must start at 0; use from_knots() to have it prepended.
  explicit FractionGrid(std::vector<double> lambdas);

  /// Accepts upper knots with or without the leading 0.
  static FractionGrid from_knots(std::vector<double> knots);
  /// {0, 0.1, 0.2, ...} up to the largest decile not above `max_fraction`.
  /// When `max_fraction` < 0.1 the grid is the single fraction {0, max_fraction}.
  static FractionGrid deciles_up_to(double max_fraction);

  std::size_t size() const noexcept { return lambdas_.size() - 1; }
  std::span<const double> lambdas() const noexcept { return lambdas_; }
  double lambda(std::size_t k) const { return lambdas_.at(k); }
  double gamma(std::size_t k) const { return 1.0 - lambdas_.at(k); }
  double width(std::size_t k) const { return lambdas_.at(k) - lambdas_.at(k - 1); }

  /// Drops knots above `max_fraction` (within tolerance). Throws DomainError
  /// if no fraction would remain.
  FractionGrid truncated(double max_fraction) const;

  friend bool operator==(const FractionGrid&, const FractionGrid&) = default;

 private:
  std::vector<double> lambdas_;
};

struct FractionBounds {
  /// Integral of the lower band edge's quantile function. Marked incomplete
  /// when even the estimate does not reach the fraction's upper knot.
  double lower = 0.0;
  bool lower_complete = true;
  /// +inf when the upper edge never reaches the level inside the band range.
  double upper = 0.0;
  bool upper_finite() const;
};

/// Estimates for fraction k, covering proportions (lambda_lo, lambda_hi].
struct FractionEstimate {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  /// Integral of the step quantile function over the fraction. When not
  /// computable this is the partial sum up to the last observed event.
  double mu = 0.0;
  /// mu / (lambda_hi - lambda_lo): mean survival time inside the fraction.
  double mu_bar = 0.0;
  bool computable = false;
  /// KM steps whose survival drop overlaps the fraction.
  std::size_t events = 0;
  std::optional<FractionBounds> bounds;
};

struct FractionMeans {
  std::vector<FractionEstimate> fractions;
};

/// 1 - S(last event time): the largest proportion observed to fail.
double max_observed_fraction(const KmCurve& curve);

/// Survival-increment form:
///   mu_k = sum_j y_j [min(S(y_{j-1}), g_{k-1}) - max(S(y_j), g_k)]+
/// with S(y_0) = 1.
FractionMeans fraction_means(const KmCurve& curve, const FractionGrid& grid);

/// Step-quantile form: sum of Q(p) (p_j - p_{j-1}) over the quantile
/// function's pieces, evaluating Q through quantile(). Same values as
/// fraction_means up to rounding.
std::vector<double> fraction_means_quantile_form(const KmCurve& curve,
                                                 const FractionGrid& grid);

/// Integrates the quantile functions of the band's edges over each fraction.
std::vector<FractionBounds> fraction_mean_bounds(const KmCurve& curve,
                                                 const BandPair& band,
                                                 const FractionGrid& grid);

/// fraction_means with bounds attached from ep_band(curve, level). If the
/// band is undefined the bounds stay empty.
FractionMeans fraction_means_with_bounds(const KmCurve& curve,
                                         const FractionGrid& grid, double level);

/// Area under the KM curve on [0, horizon]. Throws DomainError if horizon <= 0.
double restricted_mean(const KmCurve& curve, double horizon);

/// The largest proportion observed in every curve: min of max_observed_fraction.
double common_max_fraction(std::span<const KmCurve> curves);

}  // namespace fracsurv

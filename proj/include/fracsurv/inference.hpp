#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fracsurv/dataset.hpp"
#include "fracsurv/fracmean.hpp"

namespace fracsurv {

struct BootstrapOptions {
  std::size_t replicates = 2000;
  double level = 0.95;
  std::uint64_t seed = 1;
  /// Worker threads; 0 uses every core. Never affects results.
  unsigned threads = 0;
  /// A fraction whose effective replicate count falls below
  /// reliability_floor * replicates is flagged unreliable.
  double reliability_floor = 0.5;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Difference (group 1 minus group 0) for one statistic.
struct DiffEstimate {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double estimate0 = 0.0;
  double estimate1 = 0.0;
  double point = 0.0;
  /// Percentile interval; empty when no replicate was usable.
  std::optional<Interval> ci;
  std::size_t effective_replicates = 0;
  std::size_t requested_replicates = 0;
  bool reliable = false;

  friend bool operator==(const DiffEstimate&, const DiffEstimate&) = default;
};

struct FractionComparison {
  std::vector<DiffEstimate> fractions;
  /// Replicates dropped because a resampled group had no events.
  std::size_t discarded_replicates = 0;
};

/// Percentile interval from replicate values: the ceil(a B)-th and
/// (B + 1 - ceil(a B))-th order statistics (1-based) with a = (1 - level) / 2.
/// Reorders `values`.
Interval percentile_interval(std::span<double> values, double level);

/// Stratified bootstrap of mu_bar(group 1) - mu_bar(group 0) per fraction.
/// The grid must not extend past the common maximal observed fraction.
/// Deterministic in (inputs, replicates, level, seed).
FractionComparison bootstrap_fraction_diff(const Dataset& g0, const Dataset& g1,
                                           const FractionGrid& grid,
                                           const BootstrapOptions& options);

/// Same scheme for restricted_mean(horizon) of group 1 minus group 0.
DiffEstimate bootstrap_restricted_mean_diff(const Dataset& g0, const Dataset& g1,
                                            double horizon, const BootstrapOptions& options);

}  // namespace fracsurv

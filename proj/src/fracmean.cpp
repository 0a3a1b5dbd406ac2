#include "fracsurv/fracmean.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracsurv/error.hpp"

namespace fracsurv {

FractionGrid::FractionGrid(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
  if (lambdas_.size() < 2) throw DomainError("grid needs at least one fraction");
  if (lambdas_.front() != 0.0) throw DomainError("grid must start at 0");
  for (std::size_t k = 1; k < lambdas_.size(); ++k) {
    if (!(lambdas_[k] > lambdas_[k - 1])) {
      throw DomainError("grid proportions must be strictly increasing");
    }
  }
  if (!(lambdas_.back() <= 1.0)) throw DomainError("grid proportions must not exceed 1");
}

FractionGrid FractionGrid::from_knots(std::vector<double> knots) {
  if (knots.empty() || knots.front() != 0.0) knots.insert(knots.begin(), 0.0);
  return FractionGrid(std::move(knots));
}

FractionGrid FractionGrid::deciles_up_to(double max_fraction) {
  if (!(max_fraction > 0.0 && max_fraction <= 1.0)) {
    throw DomainError("maximal fraction must lie in (0, 1]");
  }
  std::vector<double> lambdas{0.0};
  for (int k = 1; k <= 10; ++k) {
    const double knot = static_cast<double>(k) / 10.0;
    if (knot > max_fraction + kSurvivalTolerance) break;
    lambdas.push_back(knot);
  }
  if (lambdas.size() == 1) lambdas.push_back(max_fraction);
  return FractionGrid(std::move(lambdas));
}

FractionGrid FractionGrid::truncated(double max_fraction) const {
  std::vector<double> kept;
  for (double l : lambdas_) {
    if (l <= max_fraction + kSurvivalTolerance) kept.push_back(l);
  }
  if (kept.size() < 2) {
    throw DomainError("no fraction of the grid lies below the maximal observed fraction");
  }
  return FractionGrid(std::move(kept));
}

bool FractionBounds::upper_finite() const { return std::isfinite(upper); }

namespace {

struct StepIntegral {
  double value = 0.0;
  bool attained = false;
  std::size_t steps = 0;
};

// Integral over (1 - level_hi, 1 - level_lo] of the quantile function of a
// nonincreasing step function that starts at 1 and takes value levels[j]
// from times[j] on.
StepIntegral integrate_quantile(std::span<const double> times,
                                std::span<const double> levels, double level_hi,
                                double level_lo) {
  StepIntegral out;
  double prev = 1.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double drop = std::min(prev, level_hi) - std::max(levels[j], level_lo);
    if (drop > 0.0) {
      out.value += times[j] * drop;
      if (drop > kSurvivalTolerance) ++out.steps;
    }
    if (levels[j] <= level_lo + kSurvivalTolerance) {
      out.attained = true;
      break;
    }
    prev = levels[j];
  }
  return out;
}

void running_min(std::vector<double>& values) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    values[i] = std::min(values[i], values[i - 1]);
  }
}

}  // namespace

double max_observed_fraction(const KmCurve& curve) {
  if (curve.steps.empty()) return 0.0;
  return 1.0 - curve.steps.back().survival;
}

FractionMeans fraction_means(const KmCurve& curve, const FractionGrid& grid) {
  std::vector<double> times;
  std::vector<double> levels;
  times.reserve(curve.steps.size());
  levels.reserve(curve.steps.size());
  for (const auto& s : curve.steps) {
    times.push_back(s.time);
    levels.push_back(s.survival);
  }

  FractionMeans out;
  out.fractions.reserve(grid.size());
  for (std::size_t k = 1; k <= grid.size(); ++k) {
    const auto part = integrate_quantile(times, levels, grid.gamma(k - 1), grid.gamma(k));
    FractionEstimate est;
    est.lambda_lo = grid.lambda(k - 1);
    est.lambda_hi = grid.lambda(k);
    est.mu = part.value;
    est.mu_bar = part.value / grid.width(k);
    est.computable = part.attained;
    est.events = part.steps;
    out.fractions.push_back(est);
  }
  return out;
}

std::vector<double> fraction_means_quantile_form(const KmCurve& curve,
                                                 const FractionGrid& grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (std::size_t k = 1; k <= grid.size(); ++k) {
    const double lo = grid.lambda(k - 1);
    const double hi = grid.lambda(k);
    // Jump points of Q inside the fraction are the orders p_j = 1 - S(y_j).
    std::vector<double> breaks{lo};
    for (const auto& s : curve.steps) {
      const double p = 1.0 - s.survival;
      if (p > lo && p < hi) breaks.push_back(p);
    }
    breaks.push_back(hi);

    double total = 0.0;
    for (std::size_t i = 1; i < breaks.size(); ++i) {
      const double width = breaks[i] - breaks[i - 1];
      if (!(width > 0.0)) continue;
      const auto q = quantile(curve, breaks[i - 1] + 0.5 * width);
      if (!q) break;
      total += *q * width;
    }
    out.push_back(total);
  }
  return out;
}

std::vector<FractionBounds> fraction_mean_bounds(const KmCurve& curve,
                                                 const BandPair& band,
                                                 const FractionGrid& grid) {
  // Lower edge: S before the band, the band's lower edge inside it, and
  // min(lower(t_U), S) after it, so the edge never exceeds S.
  std::vector<double> lower_times;
  for (const auto& s : curve.steps) lower_times.push_back(s.time);
  lower_times.insert(lower_times.end(), band.times.begin(), band.times.end());
  std::sort(lower_times.begin(), lower_times.end());
  lower_times.erase(std::unique(lower_times.begin(), lower_times.end()), lower_times.end());

  std::vector<double> lower_levels;
  lower_levels.reserve(lower_times.size());
  for (double t : lower_times) {
    if (t < band.t_lower) {
      lower_levels.push_back(survival_at(curve, t));
    } else if (t <= band.t_upper) {
      lower_levels.push_back(band.lower_at(t));
    } else {
      lower_levels.push_back(std::min(band.lower.back(), survival_at(curve, t)));
    }
  }
  running_min(lower_levels);

  // Upper edge: defined on the band range only.
  std::vector<double> upper_levels = band.upper;
  running_min(upper_levels);

  std::vector<FractionBounds> out;
  out.reserve(grid.size());
  for (std::size_t k = 1; k <= grid.size(); ++k) {
    const auto lo = integrate_quantile(lower_times, lower_levels, grid.gamma(k - 1), grid.gamma(k));
    const auto hi = integrate_quantile(band.times, upper_levels, grid.gamma(k - 1), grid.gamma(k));
    FractionBounds b;
    b.lower = lo.value;
    b.lower_complete = lo.attained;
    b.upper = hi.attained ? hi.value : std::numeric_limits<double>::infinity();
    out.push_back(b);
  }
  return out;
}

FractionMeans fraction_means_with_bounds(const KmCurve& curve,
                                         const FractionGrid& grid, double level) {
  auto means = fraction_means(curve, grid);
  try {
    const auto band = ep_band(curve, level);
    const auto bounds = fraction_mean_bounds(curve, band, grid);
    for (std::size_t k = 0; k < bounds.size(); ++k) means.fractions[k].bounds = bounds[k];
  } catch (const BandUndefinedError&) {
    // no bounds for this curve
  }
  return means;
}

double restricted_mean(const KmCurve& curve, double horizon) {
  if (!(horizon > 0.0)) throw DomainError("restricted-mean horizon must be positive");
  double area = 0.0;
  double prev_time = 0.0;
  double prev_surv = 1.0;
  for (const auto& s : curve.steps) {
    if (s.time >= horizon) break;
    area += prev_surv * (s.time - prev_time);
    prev_time = s.time;
    prev_surv = s.survival;
  }
  return area + prev_surv * (horizon - prev_time);
}

double common_max_fraction(std::span<const KmCurve> curves) {
  double m = 1.0;
  for (const auto& c : curves) m = std::min(m, max_observed_fraction(c));
  return m;
}

}  // namespace fracsurv

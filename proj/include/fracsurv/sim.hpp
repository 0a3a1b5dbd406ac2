#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fracsurv/dataset.hpp"
#include "fracsurv/fracmean.hpp"

namespace fracsurv {

/// Monte Carlo design: log-logistic(alpha, beta) event times, independent
/// uniform(0, censor_upper) censoring. Defaults reproduce the reference
/// study (5000 datasets of 200, alpha = 1, beta = 2, censoring on (0, 7/3)).
struct SimConfig {
  std::size_t n_datasets = 5000;
  std::size_t n = 200;
  double alpha = 1.0;
  double beta = 2.0;
  double censor_upper = 7.0 / 3.0;
  FractionGrid grid{{0.0, 0.2, 0.4, 0.6, 0.8, 0.95}};
  double band_level = 0.95;
  std::uint64_t seed = 1;
  /// Worker threads; 0 uses every core. Never affects results.
  unsigned threads = 0;

  /// Throws DomainError on invalid parameters.
  void validate() const;
};

/// Reads `key = value` lines (keys: n_datasets, n, alpha, beta,
/// censor_upper, lambdas, band_level, seed, threads) over `base`. Blank
/// lines and '#' comments are ignored; unknown keys are an error.
SimConfig parse_sim_config(std::istream& in, SimConfig base = {});

/// alpha (p / (1 - p))^(1 / beta). Throws DomainError unless p in (0, 1).
double loglogistic_quantile(double alpha, double beta, double p);

/// Integral of the log-logistic quantile function over each fraction, by
/// adaptive Gauss-Kronrod quadrature to 1e-8. Throws DivergenceError when
/// the grid reaches 1 and beta <= 1 (infinite mean).
std::vector<double> true_fraction_means(double alpha, double beta, const FractionGrid& grid);

/// The raw draws of replicate `index`; deterministic in (seed, index).
std::vector<Observation> generate_observations(const SimConfig& cfg, std::size_t index);

/// generate_observations as a Dataset. Throws EmptyEventsError when every
/// draw is censored.
Dataset generate_replicate(const SimConfig& cfg, std::size_t index);

struct SimFraction {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double true_mu = 0.0;
  /// Averages over computable replicates; empty when there are none.
  std::optional<double> mean_estimate;
  std::optional<double> mean_events;
  /// Lower bounds averaged over computable replicates with a band.
  std::optional<double> mean_lower;
  /// Upper bounds averaged over finite values only.
  std::optional<double> mean_upper;
  /// mean_upper, or +inf when most replicates with a band had an infinite
  /// upper bound.
  double reported_upper = 0.0;
  std::size_t computable = 0;
  std::size_t upper_finite = 0;
  double computable_share = 0.0;
  /// Share of replicates with a defined band whose upper bound is finite.
  double upper_finite_share = 0.0;
};

struct SimSummary {
  std::vector<SimFraction> fractions;
  std::size_t n_datasets = 0;
  double censoring_rate = 0.0;
  /// Replicates with no observed event (skipped entirely).
  std::size_t no_event_replicates = 0;
  /// Replicates whose band could not be built (excluded from bound averages).
  std::size_t band_undefined = 0;
};

SimSummary run_study(const SimConfig& cfg);

}  // namespace fracsurv

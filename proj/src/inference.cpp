#include "fracsurv/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "fracsurv/error.hpp"
#include "fracsurv/km.hpp"
#include "fracsurv/parallel.hpp"
#include "fracsurv/rng.hpp"

namespace fracsurv {

Interval percentile_interval(std::span<double> values, double level) {
  if (values.empty()) throw DomainError("percentile interval of an empty sample");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("level must lie in (0, 1)");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const double tail = 0.5 * (1.0 - level) * static_cast<double>(n);
  // 1-based rank of the lower endpoint; the upper one mirrors it.
  std::size_t rank = static_cast<std::size_t>(std::ceil(tail - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return {values[rank - 1], values[n - rank]};
}

namespace {

// Per-replicate statistic: one optional value per output slot.
using Statistic = std::function<std::vector<std::optional<double>>(const KmCurve&)>;

void check_options(const BootstrapOptions& options) {
  if (options.replicates < 100) throw DomainError("bootstrap needs at least 100 replicates");
  if (!(options.level > 0.0 && options.level < 1.0)) {
    throw DomainError("confidence level must lie in (0, 1)");
  }
}

// Orders the two samples by content so the resampling stream a sample gets
// does not depend on which side of the comparison it was passed as.
bool content_less(const Dataset& a, const Dataset& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].time != b[i].time) return a[i].time < b[i].time;
    if (a[i].status != b[i].status) return a[i].status < b[i].status;
  }
  return false;
}

std::vector<Observation> resample(const Dataset& ds, CounterStream& stream) {
  std::vector<Observation> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& o = ds[stream.next_below(ds.size())];
    out.push_back({o.time, o.status, std::nullopt});
  }
  return out;
}

bool has_event(const std::vector<Observation>& obs) {
  return std::any_of(obs.begin(), obs.end(), [](const Observation& o) { return o.status == 1; });
}

struct BootstrapDraws {
  // diffs[slot] holds replicate differences in replicate order.
  std::vector<std::vector<double>> diffs;
  std::size_t discarded = 0;
};

BootstrapDraws run_bootstrap(const Dataset& g0, const Dataset& g1, std::size_t slots,
                             const Statistic& statistic, const BootstrapOptions& options) {
  const bool g0_first = !content_less(g1, g0);
  const std::uint32_t stratum0 = g0_first ? 0 : 1;
  const std::uint32_t stratum1 = g0_first ? 1 : 0;

  struct Replicate {
    bool discarded = false;
    std::vector<std::optional<double>> diff;
  };
  std::vector<Replicate> reps(options.replicates);
  parallel_for(options.replicates, options.threads, [&](std::size_t r) {
    CounterStream s0(options.seed, r, stratum0);
    CounterStream s1(options.seed, r, stratum1);
    auto obs0 = resample(g0, s0);
    auto obs1 = resample(g1, s1);
    if (!has_event(obs0) || !has_event(obs1)) {
      reps[r].discarded = true;
      return;
    }
    const auto v0 = statistic(fit_km(Dataset(std::move(obs0))));
    const auto v1 = statistic(fit_km(Dataset(std::move(obs1))));
    reps[r].diff.resize(slots);
    for (std::size_t k = 0; k < slots; ++k) {
      if (v0[k] && v1[k]) reps[r].diff[k] = *v1[k] - *v0[k];
    }
  });

  BootstrapDraws out;
  out.diffs.resize(slots);
  for (const auto& rep : reps) {
    if (rep.discarded) {
      ++out.discarded;
      continue;
    }
    for (std::size_t k = 0; k < slots; ++k) {
      if (rep.diff[k]) out.diffs[k].push_back(*rep.diff[k]);
    }
  }
  return out;
}

void summarize(DiffEstimate& est, std::vector<double>& draws, const BootstrapOptions& options) {
  est.requested_replicates = options.replicates;
  est.effective_replicates = draws.size();
  if (!draws.empty()) est.ci = percentile_interval(draws, options.level);
  est.reliable = static_cast<double>(est.effective_replicates) >=
                 options.reliability_floor * static_cast<double>(options.replicates);
}

}  // namespace

FractionComparison bootstrap_fraction_diff(const Dataset& g0, const Dataset& g1,
                                           const FractionGrid& grid,
                                           const BootstrapOptions& options) {
  check_options(options);
  const KmCurve curves[] = {fit_km(g0), fit_km(g1)};
  if (grid.lambda(grid.size()) > common_max_fraction(curves) + kSurvivalTolerance) {
    throw DomainError("grid extends past the last fraction observed in both groups");
  }
  const auto base0 = fraction_means(curves[0], grid);
  const auto base1 = fraction_means(curves[1], grid);

  const Statistic statistic = [&grid](const KmCurve& curve) {
    const auto means = fraction_means(curve, grid);
    std::vector<std::optional<double>> out;
    out.reserve(means.fractions.size());
    for (const auto& f : means.fractions) {
      out.push_back(f.computable ? std::optional<double>(f.mu_bar) : std::nullopt);
    }
    return out;
  };
  auto draws = run_bootstrap(g0, g1, grid.size(), statistic, options);

  FractionComparison out;
  out.discarded_replicates = draws.discarded;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    DiffEstimate est;
    est.lambda_lo = grid.lambda(k);
    est.lambda_hi = grid.lambda(k + 1);
    est.estimate0 = base0.fractions[k].mu_bar;
    est.estimate1 = base1.fractions[k].mu_bar;
    est.point = est.estimate1 - est.estimate0;
    summarize(est, draws.diffs[k], options);
    out.fractions.push_back(est);
  }
  return out;
}

DiffEstimate bootstrap_restricted_mean_diff(const Dataset& g0, const Dataset& g1,
                                            double horizon, const BootstrapOptions& options) {
  check_options(options);
  if (!(horizon > 0.0)) throw DomainError("restricted-mean horizon must be positive");
  const Statistic statistic = [horizon](const KmCurve& curve) {
    return std::vector<std::optional<double>>{restricted_mean(curve, horizon)};
  };
  auto draws = run_bootstrap(g0, g1, 1, statistic, options);

  DiffEstimate est;
  est.estimate0 = restricted_mean(fit_km(g0), horizon);
  est.estimate1 = restricted_mean(fit_km(g1), horizon);
  est.point = est.estimate1 - est.estimate0;
  summarize(est, draws.diffs[0], options);
  return est;
}

}  // namespace fracsurv

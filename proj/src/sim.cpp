#include "fracsurv/sim.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <string>

#include "fracsurv/error.hpp"
#include "fracsurv/km.hpp"
#include "fracsurv/parallel.hpp"
#include "fracsurv/quadrature.hpp"
#include "fracsurv/rng.hpp"

namespace fracsurv {

void SimConfig::validate() const {
  if (n_datasets < 1) throw DomainError("n_datasets must be at least 1");
  if (n < 2) throw DomainError("n must be at least 2");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
  if (!(censor_upper > 0.0) || !std::isfinite(censor_upper)) {
    throw DomainError("censor_upper must be positive");
  }
  if (!(band_level > 0.0 && band_level < 1.0)) throw DomainError("band_level must lie in (0, 1)");
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DomainError("config: cannot parse " + key + " = '" + text + "'");
  }
  return value;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, trim(item)));
  return out;
}

}  // namespace

SimConfig parse_sim_config(std::istream& in, SimConfig cfg) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "n_datasets") {
      cfg.n_datasets = parse_number<std::size_t>(key, value);
    } else if (key == "n") {
      cfg.n = parse_number<std::size_t>(key, value);
    } else if (key == "alpha") {
      cfg.alpha = parse_number<double>(key, value);
    } else if (key == "beta") {
      cfg.beta = parse_number<double>(key, value);
    } else if (key == "censor_upper") {
      cfg.censor_upper = parse_number<double>(key, value);
    } else if (key == "lambdas") {
      cfg.grid = FractionGrid::from_knots(parse_list(key, value));
    } else if (key == "band_level") {
      cfg.band_level = parse_number<double>(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "threads") {
      cfg.threads = parse_number<unsigned>(key, value);
    } else {
      throw DomainError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

double loglogistic_quantile(double alpha, double beta, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("log-logistic quantile order must lie in (0, 1)");
  return alpha * std::pow(p / (1.0 - p), 1.0 / beta);
}

std::vector<double> true_fraction_means(double alpha, double beta, const FractionGrid& grid) {
  constexpr double kTolerance = 1e-8;
  std::vector<double> out;
  out.reserve(grid.size());
  for (std::size_t k = 1; k <= grid.size(); ++k) {
    const double lo = grid.lambda(k - 1);
    const double hi = grid.lambda(k);
    QuadratureResult r;
    if (hi < 1.0) {
      r = integrate_adaptive([&](double p) { return loglogistic_quantile(alpha, beta, p); },
                             lo, hi, 0.01 * kTolerance, 5000);
    } else {
      if (beta <= 1.0) throw DivergenceError("log-logistic mean is infinite for beta <= 1");
      // p = 1 - s^m removes the (1 - p)^(-1/beta) singularity at p = 1:
      // Q(1 - s^m) m s^(m-1) = alpha m (1 - s^m)^(1/beta) s^(m - 1 - m/beta).
      const double m = std::ceil(2.0 * beta / (beta - 1.0));
      const double exponent = m - 1.0 - m / beta;
      const auto integrand = [&](double s) {
        const double sm = std::pow(s, m);
        return alpha * m * std::pow(1.0 - sm, 1.0 / beta) * std::pow(s, exponent);
      };
      r = integrate_adaptive(integrand, 0.0, std::pow(1.0 - lo, 1.0 / m), 0.01 * kTolerance, 5000);
    }
    if (!r.converged && r.error > kTolerance) {
      throw DivergenceError("quadrature did not reach tolerance on fraction " + std::to_string(k));
    }
    out.push_back(r.value);
  }
  return out;
}

std::vector<Observation> generate_observations(const SimConfig& cfg, std::size_t index) {
  CounterStream events(cfg.seed, index, 0);
  CounterStream censoring(cfg.seed, index, 1);
  std::vector<Observation> obs(cfg.n);
  for (auto& o : obs) {
    const double t = loglogistic_quantile(cfg.alpha, cfg.beta, events.next_open01());
    const double c = cfg.censor_upper * censoring.next_open01();
    o.time = std::min(t, c);
    o.status = t <= c ? 1 : 0;
  }
  return obs;
}

Dataset generate_replicate(const SimConfig& cfg, std::size_t index) {
  return Dataset(generate_observations(cfg, index));
}

namespace {

struct ReplicateResult {
  double censored_share = 0.0;
  bool has_events = false;
  bool has_band = false;
  FractionMeans means;
};

}  // namespace

SimSummary run_study(const SimConfig& cfg) {
  cfg.validate();
  const auto truth = true_fraction_means(cfg.alpha, cfg.beta, cfg.grid);

  std::vector<ReplicateResult> results(cfg.n_datasets);
  parallel_for(cfg.n_datasets, cfg.threads, [&](std::size_t i) {
    auto obs = generate_observations(cfg, i);
    std::size_t censored = 0;
    for (const auto& o : obs) censored += o.status == 0 ? 1 : 0;
    auto& r = results[i];
    r.censored_share = static_cast<double>(censored) / static_cast<double>(obs.size());
    if (censored == obs.size()) return;
    r.has_events = true;
    const auto curve = fit_km(Dataset(std::move(obs)));
    r.means = fraction_means_with_bounds(curve, cfg.grid, cfg.band_level);
    r.has_band = !r.means.fractions.empty() && r.means.fractions.front().bounds.has_value();
  });

  SimSummary summary;
  summary.n_datasets = cfg.n_datasets;
  const std::size_t K = cfg.grid.size();
  std::vector<double> sum_mu(K), sum_events(K), sum_lower(K), sum_upper(K);
  std::vector<std::size_t> n_lower(K);
  std::size_t with_band = 0;
  summary.fractions.resize(K);
  double censored_total = 0.0;

  for (const auto& r : results) {
    censored_total += r.censored_share;
    if (!r.has_events) {
      ++summary.no_event_replicates;
      continue;
    }
    if (r.has_band) {
      ++with_band;
    } else {
      ++summary.band_undefined;
    }
    for (std::size_t k = 0; k < K; ++k) {
      const auto& est = r.means.fractions[k];
      auto& out = summary.fractions[k];
      if (est.computable) {
        ++out.computable;
        sum_mu[k] += est.mu;
        sum_events[k] += static_cast<double>(est.events);
      }
      if (!est.bounds) continue;
      if (est.computable) {
        sum_lower[k] += est.bounds->lower;
        ++n_lower[k];
      }
      if (est.bounds->upper_finite()) {
        ++out.upper_finite;
        sum_upper[k] += est.bounds->upper;
      }
    }
  }

  const auto n_total = static_cast<double>(cfg.n_datasets);
  summary.censoring_rate = censored_total / n_total;
  for (std::size_t k = 0; k < K; ++k) {
    auto& out = summary.fractions[k];
    out.lambda_lo = cfg.grid.lambda(k);
    out.lambda_hi = cfg.grid.lambda(k + 1);
    out.true_mu = truth[k];
    out.computable_share = static_cast<double>(out.computable) / n_total;
    if (out.computable > 0) {
      out.mean_estimate = sum_mu[k] / static_cast<double>(out.computable);
      out.mean_events = sum_events[k] / static_cast<double>(out.computable);
    }
    if (n_lower[k] > 0) out.mean_lower = sum_lower[k] / static_cast<double>(n_lower[k]);
    if (out.upper_finite > 0) out.mean_upper = sum_upper[k] / static_cast<double>(out.upper_finite);
    out.upper_finite_share =
        with_band > 0 ? static_cast<double>(out.upper_finite) / static_cast<double>(with_band) : 0.0;
    out.reported_upper = out.mean_upper && out.upper_finite_share >= 0.5
                             ? *out.mean_upper
                             : std::numeric_limits<double>::infinity();
  }
  return summary;
}

}  // namespace fracsurv

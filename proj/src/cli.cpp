#include "fracsurv/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>

#include <CLI11.hpp>

#include "fracsurv/band.hpp"
#include "fracsurv/error.hpp"
#include "fracsurv/fracmean.hpp"
#include "fracsurv/inference.hpp"
#include "fracsurv/km.hpp"

namespace fracsurv::cli {

using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kTieRule = "events before censorings at tied times";
constexpr const char* kQuantileRule = "Q(p) = inf{t : S(t) <= 1 - p}";
constexpr const char* kBandRange = "first event time to last event time with S > 0";

Cell num(double v) { return v; }
Cell num(std::size_t v) { return static_cast<std::int64_t>(v); }
Cell opt(const std::optional<double>& v) {
  return v ? Cell{*v} : Cell{std::monostate{}};
}

OutputDocument make_document(std::string command) {
  OutputDocument doc;
  doc.command = std::move(command);
  doc.metadata["version"] = FRACSURV_VERSION;
  return doc;
}

ojson lambdas_json(const FractionGrid& grid) {
  return ojson(std::vector<double>(grid.lambdas().begin(), grid.lambdas().end()));
}

}  // namespace

OutputDocument cmd_estimate(const EstimateArgs& args) {
  const auto ds = read_csv_file(args.input, args.schema);
  const auto curve = fit_km(ds);
  const double max_fraction = max_observed_fraction(curve);
  const auto grid = args.lambdas ? FractionGrid::from_knots(*args.lambdas)
                                 : FractionGrid::deciles_up_to(max_fraction);

  auto doc = make_document("estimate");
  doc.metadata["input"] = args.input;
  doc.metadata["n"] = ds.size();
  doc.metadata["events"] = ds.event_count();
  doc.metadata["max_observed_fraction"] = max_fraction;
  doc.metadata["lambdas"] = lambdas_json(grid);
  doc.metadata["band_level"] = args.band_level;
  doc.metadata["conventions"] = {{"tie_rule", kTieRule},
                                 {"quantile", kQuantileRule},
                                 {"band_variant", std::string(kBandVariant)},
                                 {"band_range", kBandRange}};

  auto means = fraction_means(curve, grid);
  DataTable table;
  table.name = "fraction_means";
  table.columns = {"k", "lambda", "mu_hat", "mu_bar", "lower", "upper", "upper_finite",
                   "computable", "events"};
  try {
    const auto band = ep_band(curve, args.band_level);
    doc.metadata["band_coefficient"] = band.coefficient;
    doc.metadata["band_time_range"] = {band.t_lower, band.t_upper};
    const auto bounds = fraction_mean_bounds(curve, band, grid);
    for (std::size_t k = 0; k < bounds.size(); ++k) means.fractions[k].bounds = bounds[k];
  } catch (const BandUndefinedError& e) {
    table.notes.push_back(std::string("confidence band undefined: ") + e.what());
  }

  for (std::size_t k = 0; k < means.fractions.size(); ++k) {
    const auto& f = means.fractions[k];
    std::vector<Cell> row{num(k + 1), num(f.lambda_hi), num(f.mu), num(f.mu_bar)};
    if (f.bounds) {
      row.insert(row.end(), {num(f.bounds->lower), num(f.bounds->upper), f.bounds->upper_finite()});
    } else {
      row.insert(row.end(), {std::monostate{}, std::monostate{}, std::monostate{}});
    }
    row.insert(row.end(), {f.computable, num(f.events)});
    table.rows.push_back(std::move(row));
    if (!f.computable) {
      table.notes.push_back("fraction " + std::to_string(k + 1) +
                            " not computable: the curve does not reach S = " +
                            format_double(1.0 - f.lambda_hi) + "; mu_hat is a partial sum");
    }
  }
  doc.tables.push_back(std::move(table));
  return doc;
}

OutputDocument cmd_compare(const CompareArgs& args) {
  if (!args.schema.group) throw DomainError("compare needs a group column");
  const auto ds = read_csv_file(args.input, args.schema);
  const auto groups = split_by_group(ds);

  const auto ref = groups.find(args.ref_group);
  if (ref == groups.end()) throw DomainError("reference group '" + args.ref_group + "' not found");
  std::string other_label;
  if (args.other_group) {
    other_label = *args.other_group;
  } else {
    if (groups.size() != 2) {
      throw DomainError("data has " + std::to_string(groups.size()) +
                        " groups; name the comparison arm with --group");
    }
    for (const auto& [label, _] : groups) {
      if (label != args.ref_group) other_label = label;
    }
  }
  const auto other = groups.find(other_label);
  if (other == groups.end() || other_label == args.ref_group) {
    throw DomainError("comparison group '" + other_label + "' not found");
  }
  const Dataset& g0 = ref->second;
  const Dataset& g1 = other->second;
  const KmCurve curves[] = {fit_km(g0), fit_km(g1)};
  const double common = common_max_fraction(curves);

  auto doc = make_document("compare");
  std::vector<std::string> notes;
  FractionGrid grid = FractionGrid::deciles_up_to(common);
  if (args.lambdas) {
    const auto requested = FractionGrid::from_knots(*args.lambdas);
    grid = requested.truncated(common);
    if (grid.size() < requested.size()) {
      notes.push_back("grid truncated at the last fraction observed in both groups (" +
                      format_double(common) + ")");
    }
  }

  BootstrapOptions options;
  options.replicates = args.bootstrap;
  options.level = args.level;
  options.seed = args.seed;
  options.threads = args.threads;

  doc.metadata["input"] = args.input;
  doc.metadata["group_column"] = *args.schema.group;
  doc.metadata["reference_group"] = args.ref_group;
  doc.metadata["comparison_group"] = other_label;
  doc.metadata["n_reference"] = g0.size();
  doc.metadata["n_comparison"] = g1.size();
  doc.metadata["common_max_fraction"] = common;
  doc.metadata["lambdas"] = lambdas_json(grid);
  doc.metadata["bootstrap_replicates"] = args.bootstrap;
  doc.metadata["level"] = args.level;
  doc.metadata["seed"] = args.seed;
  doc.metadata["conventions"] = {{"tie_rule", kTieRule},
                                 {"quantile", kQuantileRule},
                                 {"difference", "comparison minus reference"},
                                 {"bootstrap", "stratified nonparametric, percentile interval"},
                                 {"non_computable_replicates", "dropped per fraction"}};
  doc.notes = notes;

  const auto cmp = bootstrap_fraction_diff(g0, g1, grid, options);
  doc.metadata["discarded_replicates"] = cmp.discarded_replicates;
  DataTable table;
  table.name = "fraction_differences";
  table.columns = {"k", "lambda", "mu_bar_reference", "mu_bar_comparison", "difference",
                   "ci_lower", "ci_upper", "effective_replicates", "reliable"};
  for (std::size_t k = 0; k < cmp.fractions.size(); ++k) {
    const auto& d = cmp.fractions[k];
    table.rows.push_back({num(k + 1), num(d.lambda_hi), num(d.estimate0), num(d.estimate1),
                          num(d.point), d.ci ? num(d.ci->lower) : Cell{},
                          d.ci ? num(d.ci->upper) : Cell{}, num(d.effective_replicates),
                          d.reliable});
    if (!d.reliable) {
      table.notes.push_back("fraction " + std::to_string(k + 1) + ": only " +
                            std::to_string(d.effective_replicates) + " of " +
                            std::to_string(d.requested_replicates) +
                            " replicates usable; interval unreliable");
    }
  }
  doc.tables.push_back(std::move(table));

  if (args.restricted_mean) {
    const double horizon =
        args.horizon.value_or(std::min(curves[0].steps.back().time, curves[1].steps.back().time));
    const auto rm = bootstrap_restricted_mean_diff(g0, g1, horizon, options);
    DataTable rmt;
    rmt.name = "restricted_mean_difference";
    rmt.columns = {"horizon", "rmean_reference", "rmean_comparison", "difference",
                   "ci_lower", "ci_upper", "effective_replicates", "reliable"};
    rmt.rows.push_back({num(horizon), num(rm.estimate0), num(rm.estimate1), num(rm.point),
                        rm.ci ? num(rm.ci->lower) : Cell{}, rm.ci ? num(rm.ci->upper) : Cell{},
                        num(rm.effective_replicates), rm.reliable});
    doc.tables.push_back(std::move(rmt));
  }
  return doc;
}

OutputDocument cmd_simulate(const SimulateArgs& args) {
  const auto& cfg = args.config;
  const auto summary = run_study(cfg);

  auto doc = make_document("simulate");
  doc.metadata["n_datasets"] = cfg.n_datasets;
  doc.metadata["n"] = cfg.n;
  doc.metadata["alpha"] = cfg.alpha;
  doc.metadata["beta"] = cfg.beta;
  doc.metadata["censor_upper"] = cfg.censor_upper;
  doc.metadata["lambdas"] = lambdas_json(cfg.grid);
  doc.metadata["band_level"] = cfg.band_level;
  doc.metadata["seed"] = cfg.seed;
  doc.metadata["censoring_rate"] = summary.censoring_rate;
  doc.metadata["no_event_replicates"] = summary.no_event_replicates;
  doc.metadata["band_undefined_replicates"] = summary.band_undefined;
  doc.metadata["conventions"] = {
      {"tie_rule", kTieRule},
      {"band_variant", std::string(kBandVariant)},
      {"band_range", kBandRange},
      {"estimate_averaging", "mean over replicates where the fraction is computable"},
      {"bound_averaging",
       "lower over computable replicates; upper over finite values only (see upper_finite_share)"},
      {"reported_upper", "inf when most replicates have an infinite upper bound"}};

  DataTable table;
  table.name = "simulation";
  table.columns = {"k", "lambda", "true_mu", "mean_mu_hat", "mean_lower", "mean_upper",
                   "reported_upper", "upper_finite_share", "nsim", "events"};
  for (std::size_t k = 0; k < summary.fractions.size(); ++k) {
    const auto& f = summary.fractions[k];
    table.rows.push_back({num(k + 1), num(f.lambda_hi), num(f.true_mu), opt(f.mean_estimate),
                          opt(f.mean_lower), opt(f.mean_upper), num(f.reported_upper),
                          num(f.upper_finite_share), num(f.computable_share),
                          opt(f.mean_events)});
    if (f.upper_finite > 0 && f.upper_finite_share < 1.0 && std::isfinite(f.reported_upper)) {
      table.notes.push_back("fraction " + std::to_string(k + 1) + ": upper bound finite in " +
                            format_double(100.0 * f.upper_finite_share) +
                            "% of replicates; mean_upper averages those only");
    }
  }
  doc.tables.push_back(std::move(table));
  return doc;
}

OutputDocument cmd_km_curve(const KmCurveArgs& args) {
  const auto ds = read_csv_file(args.input, args.schema);
  std::vector<std::pair<std::string, Dataset>> parts;
  if (args.schema.group) {
    for (auto& [label, sub] : split_by_group(ds)) parts.emplace_back(label, std::move(sub));
  } else {
    parts.emplace_back("", ds);
  }

  auto doc = make_document("km-curve");
  doc.metadata["input"] = args.input;
  if (args.band_level) doc.metadata["band_level"] = *args.band_level;
  doc.metadata["conventions"] = {{"tie_rule", kTieRule},
                                 {"band_variant", std::string(kBandVariant)},
                                 {"band_range", kBandRange}};

  for (const auto& [label, sub] : parts) {
    const auto curve = fit_km(sub);
    DataTable table;
    table.name = "km_curve";
    if (args.schema.group) table.labels["group"] = label;
    table.columns = {"time", "survival", "at_risk", "events", "greenwood", "lower", "upper"};

    std::optional<BandPair> band;
    if (args.band_level) {
      try {
        band = ep_band(curve, *args.band_level);
        table.labels["band_coefficient"] = band->coefficient;
      } catch (const BandUndefinedError& e) {
        table.notes.push_back(std::string("confidence band undefined: ") + e.what());
      }
    }
    table.rows.push_back({num(0.0), num(1.0), num(curve.n), num(std::size_t{0}), num(0.0),
                          Cell{}, Cell{}});
    for (const auto& s : curve.steps) {
      const bool in_band = band && band->in_range(s.time);
      table.rows.push_back({num(s.time), num(s.survival), num(s.at_risk), num(s.events),
                            num(s.greenwood), in_band ? num(band->lower_at(s.time)) : Cell{},
                            in_band ? num(band->upper_at(s.time)) : Cell{}});
    }
    doc.tables.push_back(std::move(table));
  }
  return doc;
}

namespace {

void add_schema_options(CLI::App* cmd, CsvSchema& schema) {
  cmd->add_option("--time-col", schema.time, "Name of the time column")->capture_default_str();
  cmd->add_option("--status-col", schema.status, "Name of the event indicator column (1 = event)")
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean survival time by ordered fractions of a population"};
  app.require_subcommand(1);

  std::string format_name = "table";
  if (const char* env = std::getenv(kFormatEnvVar); env && parse_format(env)) format_name = env;
  app.add_option("--format", format_name, "Output format: table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Fraction means with band-integrated bounds");
  estimate->add_option("--input", est.input, "CSV file")->required();
  add_schema_options(estimate, est.schema);
  std::vector<double> est_lambdas;
  estimate->add_option("--lambdas", est_lambdas, "Comma-separated upper proportions")
      ->delimiter(',');
  estimate->add_option("--band-level", est.band_level, "Band confidence level")
      ->capture_default_str();
  estimate->add_option("--format", format_name, "Output format: table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));

  CompareArgs cmp;
  std::string cmp_group_col;
  std::vector<double> cmp_lambdas;
  std::string cmp_other;
  double cmp_horizon = 0.0;
  auto* compare = app.add_subcommand("compare", "Bootstrap comparison of two groups");
  compare->add_option("--input", cmp.input, "CSV file")->required();
  add_schema_options(compare, cmp.schema);
  compare->add_option("--group-col", cmp_group_col, "Name of the group column")->required();
  compare->add_option("--ref-group", cmp.ref_group, "Reference group label")->required();
  compare->add_option("--group", cmp_other, "Comparison group label (default: the other one)");
  compare->add_option("--lambdas", cmp_lambdas, "Comma-separated upper proportions")
      ->delimiter(',');
  compare->add_option("--bootstrap", cmp.bootstrap, "Bootstrap replicates")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{100}, std::numeric_limits<std::size_t>::max()));
  compare->add_option("--seed", cmp.seed, "Master seed")->capture_default_str();
  compare->add_option("--level", cmp.level, "Confidence level")->capture_default_str();
  compare->add_option("--threads", cmp.threads, "Worker threads (0 = all cores)");
  compare->add_flag("--restricted-mean", cmp.restricted_mean,
                    "Also compare restricted means");
  auto* horizon_opt =
      compare->add_option("--horizon", cmp_horizon, "Restricted-mean horizon");
  compare->add_option("--format", format_name, "Output format: table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));

  SimulateArgs sim;
  std::string sim_config_path;
  std::optional<std::size_t> sim_n_datasets, sim_n;
  std::optional<double> sim_alpha, sim_beta, sim_censor, sim_level;
  std::optional<std::uint64_t> sim_seed;
  std::optional<unsigned> sim_threads;
  std::vector<double> sim_lambdas;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study of the estimator");
  simulate->add_option("--config", sim_config_path, "key = value configuration file")
      ->check(CLI::ExistingFile);
  simulate->add_option("--n-datasets", sim_n_datasets, "Number of simulated datasets");
  simulate->add_option("--n", sim_n, "Observations per dataset");
  simulate->add_option("--alpha", sim_alpha, "Log-logistic scale");
  simulate->add_option("--beta", sim_beta, "Log-logistic shape");
  simulate->add_option("--censor-upper", sim_censor, "Upper end of the uniform censoring law");
  simulate->add_option("--lambdas", sim_lambdas, "Comma-separated upper proportions")
      ->delimiter(',');
  simulate->add_option("--band-level", sim_level, "Band confidence level");
  simulate->add_option("--seed", sim_seed, "Master seed");
  simulate->add_option("--threads", sim_threads, "Worker threads (0 = all cores)");
  simulate->add_option("--format", format_name, "Output format: table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));

  KmCurveArgs km;
  std::string km_group_col;
  double km_level = 0.95;
  auto* km_curve = app.add_subcommand("km-curve", "Kaplan-Meier step coordinates");
  km_curve->add_option("--input", km.input, "CSV file")->required();
  add_schema_options(km_curve, km.schema);
  km_curve->add_option("--group-col", km_group_col, "One curve per group");
  auto* km_level_opt = km_curve->add_option("--band-level", km_level, "Add a confidence band");
  km_curve->add_option("--format", format_name, "Output format: table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    OutputDocument doc;
    if (*estimate) {
      if (!est_lambdas.empty()) est.lambdas = est_lambdas;
      doc = cmd_estimate(est);
    } else if (*compare) {
      cmp.schema.group = cmp_group_col;
      if (!cmp_lambdas.empty()) cmp.lambdas = cmp_lambdas;
      if (!cmp_other.empty()) cmp.other_group = cmp_other;
      if (horizon_opt->count() > 0) cmp.horizon = cmp_horizon;
      doc = cmd_compare(cmp);
    } else if (*simulate) {
      if (!sim_config_path.empty()) {
        std::ifstream in(sim_config_path);
        if (!in) throw Error("cannot open '" + sim_config_path + "'");
        sim.config = parse_sim_config(in);
      }
      auto& c = sim.config;
      if (sim_n_datasets) c.n_datasets = *sim_n_datasets;
      if (sim_n) c.n = *sim_n;
      if (sim_alpha) c.alpha = *sim_alpha;
      if (sim_beta) c.beta = *sim_beta;
      if (sim_censor) c.censor_upper = *sim_censor;
      if (!sim_lambdas.empty()) c.grid = FractionGrid::from_knots(sim_lambdas);
      if (sim_level) c.band_level = *sim_level;
      if (sim_seed) c.seed = *sim_seed;
      if (sim_threads) c.threads = *sim_threads;
      c.validate();
      doc = cmd_simulate(sim);
    } else {
      if (!km_group_col.empty()) km.schema.group = km_group_col;
      if (km_level_opt->count() > 0) km.band_level = km_level;
      doc = cmd_km_curve(km);
    }
    out << render(doc, *parse_format(format_name));
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace fracsurv::cli

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracsurv/dataset.hpp"
#include "fracsurv/document.hpp"
#include "fracsurv/sim.hpp"

namespace fracsurv::cli {

inline constexpr const char* kFormatEnvVar = "FRACSURV_FORMAT";

struct EstimateArgs {
  std::string input;
  CsvSchema schema;
  /// Upper knots; default: deciles up to the maximal observed fraction.
  std::optional<std::vector<double>> lambdas;
  double band_level = 0.95;
};

struct CompareArgs {
  std::string input;
  CsvSchema schema;  // schema.group is required
  std::string ref_group;
  /// The other arm; may be omitted when the data has exactly two groups.
  std::optional<std::string> other_group;
  std::optional<std::vector<double>> lambdas;
  std::size_t bootstrap = 2000;
  std::uint64_t seed = 1;
  double level = 0.95;
  unsigned threads = 0;
  bool restricted_mean = false;
  /// Default: the earlier of the two groups' last event times.
  std::optional<double> horizon;
};

struct SimulateArgs {
  SimConfig config;
};

struct KmCurveArgs {
  std::string input;
  CsvSchema schema;
  std::optional<double> band_level;
};

OutputDocument cmd_estimate(const EstimateArgs& args);
OutputDocument cmd_compare(const CompareArgs& args);
OutputDocument cmd_simulate(const SimulateArgs& args);
OutputDocument cmd_km_curve(const KmCurveArgs& args);

/// Full command-line entry point. Returns the process exit code: 0 on
/// success, 2 on usage or input errors, 1 on anything unexpected.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fracsurv::cli

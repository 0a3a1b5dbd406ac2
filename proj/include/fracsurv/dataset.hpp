#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fracsurv {

/// One right-censored observation: time = min(T, C), status = 1 when the
/// event was observed (T <= C) and 0 when censored.
struct Observation {
  double time = 0.0;
  int status = 0;
  std::optional<std::string> group;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Immutable, validated sample. Construction enforces: nonempty, every
/// time finite and >= 0, status in {0, 1}, and at least one event.
class Dataset {
 public:
  explicit Dataset(std::vector<Observation> observations,
                   std::string time_unit = {});

  std::span<const Observation> observations() const noexcept {
    return observations_;
  }
  const Observation& operator[](std::size_t i) const { return observations_[i]; }
  std::size_t size() const noexcept { return observations_.size(); }
  std::size_t event_count() const noexcept { return events_; }
  const std::string& time_unit() const noexcept { return time_unit_; }

  /// Copy with every time multiplied by `factor` (> 0).
  Dataset scaled(double factor) const;

 private:
  std::vector<Observation> observations_;
  std::string time_unit_;
  std::size_t events_ = 0;
};

/// Column-name mapping for delimited input.
struct CsvSchema {
  std::string time = "time";
  std::string status = "status";
  std::optional<std::string> group;
};

/// Parses comma-separated text with a header row. Columns are located by
/// name. Throws SchemaError, ParseError, ValidationError or EmptyEventsError.
Dataset parse_csv(std::istream& source, const CsvSchema& schema = {});
Dataset read_csv_file(const std::filesystem::path& path,
                      const CsvSchema& schema = {});

/// Writes the dataset back as CSV using the schema's column names. Times use
/// the shortest decimal text that parses back to the same double.
void write_csv(std::ostream& out, const Dataset& ds, const CsvSchema& schema = {});

/// Partitions by group label. Every observation must carry a group and each
/// group must contain at least one event.
std::map<std::string, Dataset> split_by_group(const Dataset& ds);

}  // namespace fracsurv

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace fracsurv {

enum class Format { Table, Csv, Json };

std::optional<Format> parse_format(std::string_view name);

/// A table cell. Non-finite doubles are kept as doubles in memory; +/-inf
/// serialize as "inf" / "-inf" and NaN as null.
using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

struct DataTable {
  std::string name;
  /// Extra identification, e.g. {"group": "allo"}.
  nlohmann::ordered_json labels = nlohmann::ordered_json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;
};

/// Shared model behind every output format; renderers differ only in layout.
struct OutputDocument {
  std::string command;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
  std::vector<DataTable> tables;
  std::vector<std::string> notes;
};

nlohmann::ordered_json to_json(const OutputDocument& doc);
/// Inverse of to_json; "inf" / "-inf" strings come back as infinite doubles.
OutputDocument document_from_json(const nlohmann::ordered_json& j);

std::string render(const OutputDocument& doc, Format format);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace fracsurv

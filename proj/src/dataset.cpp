#include "fracsurv/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <system_error>

#include "fracsurv/error.hpp"

namespace fracsurv {

namespace {

void validate(const Observation& obs, std::size_t row) {
  if (!std::isfinite(obs.time)) {
    throw ValidationError(row, "time is not finite");
  }
  if (obs.time < 0.0) {
    throw ValidationError(row, "negative time");
  }
  if (obs.status != 0 && obs.status != 1) {
    throw ValidationError(row, "status must be 0 or 1");
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splits one CSV record. Handles double-quoted fields with "" escapes; a
// quoted field may not span lines.
std::vector<std::string> split_record(std::string_view line, std::size_t row) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && trim(field).empty()) {
      field.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError(row, "unterminated quoted field");
  fields.push_back(was_quoted ? field : std::string(trim(field)));
  return fields;
}

std::size_t find_column(const std::vector<std::string>& header,
                        const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw SchemaError(name);
}

double parse_time(std::string_view cell, std::size_t row) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  // from_chars rejects a leading '+', which some exporters emit.
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc{} || ptr != end) {
    throw ParseError(row, "cannot parse time '" + std::string(cell) + "'");
  }
  return value;
}

int parse_status(std::string_view cell, std::size_t row) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw ParseError(row, "cannot parse status '" + std::string(cell) + "'");
  }
  return value;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos && trim(s) == s) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

Dataset::Dataset(std::vector<Observation> observations, std::string time_unit)
    : observations_(std::move(observations)), time_unit_(std::move(time_unit)) {
  for (std::size_t i = 0; i < observations_.size(); ++i) {
    validate(observations_[i], i + 1);
    events_ += static_cast<std::size_t>(observations_[i].status);
  }
  if (events_ == 0) throw EmptyEventsError();
}

Dataset Dataset::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw DomainError("scale factor must be positive and finite");
  }
  std::vector<Observation> out(observations_.begin(), observations_.end());
  for (auto& obs : out) obs.time *= factor;
  return Dataset(std::move(out), time_unit_);
}

Dataset parse_csv(std::istream& source, const CsvSchema& schema) {
  std::string line;
  if (!std::getline(source, line)) throw SchemaError(schema.time);
  // UTF-8 byte order mark
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  if (line.ends_with('\r')) line.pop_back();
  const auto header = split_record(line, 0);

  const std::size_t time_col = find_column(header, schema.time);
  const std::size_t status_col = find_column(header, schema.status);
  std::optional<std::size_t> group_col;
  if (schema.group) group_col = find_column(header, *schema.group);

  std::vector<Observation> observations;
  std::size_t row = 0;
  while (std::getline(source, line)) {
    if (line.ends_with('\r')) line.pop_back();
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_record(line, row);
    if (fields.size() != header.size()) {
      throw ParseError(row, "expected " + std::to_string(header.size()) +
                                " fields, found " + std::to_string(fields.size()));
    }
    Observation obs;
    obs.time = parse_time(fields[time_col], row);
    obs.status = parse_status(fields[status_col], row);
    if (group_col) {
      if (fields[*group_col].empty()) throw ValidationError(row, "missing group label");
      obs.group = fields[*group_col];
    }
    validate(obs, row);
    observations.push_back(std::move(obs));
  }
  return Dataset(std::move(observations));
}

Dataset read_csv_file(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return parse_csv(in, schema);
}

void write_csv(std::ostream& out, const Dataset& ds, const CsvSchema& schema) {
  const bool with_group = schema.group.has_value();
  out << schema.time << ',' << schema.status;
  if (with_group) out << ',' << *schema.group;
  out << '\n';
  char buf[64];
  for (const auto& obs : ds.observations()) {
    const auto res = std::to_chars(buf, buf + sizeof buf, obs.time);
    out.write(buf, res.ptr - buf);
    out << ',' << obs.status;
    if (with_group) {
      if (!obs.group) throw Error("observation without group label");
      out << ',' << quote_if_needed(*obs.group);
    }
    out << '\n';
  }
}

std::map<std::string, Dataset> split_by_group(const Dataset& ds) {
  std::map<std::string, std::vector<Observation>> parts;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& obs = ds[i];
    if (!obs.group) throw ValidationError(i + 1, "missing group label");
    parts[*obs.group].push_back(obs);
  }
  std::map<std::string, Dataset> out;
  for (auto& [label, observations] : parts) {
    try {
      out.emplace(label, Dataset(std::move(observations), ds.time_unit()));
    } catch (const EmptyEventsError&) {
      throw EmptyEventsError(label);
    }
  }
  return out;
}

}  // namespace fracsurv

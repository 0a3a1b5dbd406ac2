#include "fracsurv/document.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fracsurv/error.hpp"

namespace fracsurv {

using ojson = nlohmann::ordered_json;

std::optional<Format> parse_format(std::string_view name) {
  if (name == "table") return Format::Table;
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  return std::nullopt;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

ojson cell_to_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> ojson {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (std::isnan(v)) return nullptr;
          if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
          return v;
        } else {
          return v;
        }
      },
      cell);
}

Cell cell_from_json(const ojson& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return s;
}

std::string cell_text(const Cell& cell, bool full_precision) {
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return full_precision ? "" : "-";
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          if (full_precision || !std::isfinite(v)) return format_double(v);
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.6g", v);
          return buf;
        } else {
          return v;
        }
      },
      cell);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string scalar_text(const ojson& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_float()) return format_double(j.get<double>());
  return j.dump();
}

void write_metadata(std::ostringstream& out, const OutputDocument& doc) {
  out << "# fracsurv " << doc.command << '\n';
  for (const auto& [key, value] : doc.metadata.items()) {
    if (value.is_object()) {
      for (const auto& [sub, v] : value.items()) {
        out << "# " << key << '.' << sub << ": " << scalar_text(v) << '\n';
      }
    } else {
      out << "# " << key << ": " << scalar_text(value) << '\n';
    }
  }
  for (const auto& note : doc.notes) out << "# note: " << note << '\n';
}

std::string labels_text(const DataTable& t) {
  std::string out;
  for (const auto& [key, value] : t.labels.items()) {
    out += " " + key + "=" + scalar_text(value);
  }
  return out;
}

std::string render_csv(const OutputDocument& doc) {
  std::ostringstream out;
  write_metadata(out, doc);
  for (const auto& t : doc.tables) {
    out << "# table: " << t.name << labels_text(t) << '\n';
    for (const auto& note : t.notes) out << "# note: " << note << '\n';
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      out << (c ? "," : "") << csv_escape(t.columns[c]);
    }
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        out << (c ? "," : "") << csv_escape(cell_text(row[c], true));
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string render_table(const OutputDocument& doc) {
  std::ostringstream out;
  write_metadata(out, doc);
  for (const auto& t : doc.tables) {
    out << '\n' << "[" << t.name << labels_text(t) << "]\n";
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> widths(t.columns.size());
    for (std::size_t c = 0; c < t.columns.size(); ++c) widths[c] = t.columns[c].size();
    for (const auto& row : t.rows) {
      auto& texts = cells.emplace_back();
      for (std::size_t c = 0; c < row.size(); ++c) {
        texts.push_back(cell_text(row[c], false));
        widths[c] = std::max(widths[c], texts.back().size());
      }
    }
    const auto emit = [&](const std::vector<std::string>& texts) {
      for (std::size_t c = 0; c < texts.size(); ++c) {
        if (c) out << "  ";
        out << std::string(widths[c] - texts[c].size(), ' ') << texts[c];
      }
      out << '\n';
    };
    emit(t.columns);
    for (const auto& texts : cells) emit(texts);
    for (const auto& note : t.notes) out << "note: " << note << '\n';
  }
  return out.str();
}

}  // namespace

ojson to_json(const OutputDocument& doc) {
  ojson j;
  j["tool"] = "fracsurv";
  j["command"] = doc.command;
  j["metadata"] = doc.metadata;
  j["notes"] = doc.notes;
  ojson tables = ojson::array();
  for (const auto& t : doc.tables) {
    ojson jt;
    jt["name"] = t.name;
    jt["labels"] = t.labels;
    jt["columns"] = t.columns;
    ojson rows = ojson::array();
    for (const auto& row : t.rows) {
      ojson jr = ojson::object();
      for (std::size_t c = 0; c < row.size(); ++c) jr[t.columns[c]] = cell_to_json(row[c]);
      rows.push_back(std::move(jr));
    }
    jt["rows"] = std::move(rows);
    jt["notes"] = t.notes;
    tables.push_back(std::move(jt));
  }
  j["tables"] = std::move(tables);
  return j;
}

OutputDocument document_from_json(const ojson& j) {
  OutputDocument doc;
  doc.command = j.at("command").get<std::string>();
  doc.metadata = j.at("metadata");
  doc.notes = j.at("notes").get<std::vector<std::string>>();
  for (const auto& jt : j.at("tables")) {
    DataTable t;
    t.name = jt.at("name").get<std::string>();
    t.labels = jt.at("labels");
    t.columns = jt.at("columns").get<std::vector<std::string>>();
    for (const auto& jr : jt.at("rows")) {
      auto& row = t.rows.emplace_back();
      for (const auto& col : t.columns) row.push_back(cell_from_json(jr.at(col)));
    }
    t.notes = jt.at("notes").get<std::vector<std::string>>();
    doc.tables.push_back(std::move(t));
  }
  return doc;
}

std::string render(const OutputDocument& doc, Format format) {
  switch (format) {
    case Format::Json:
      return to_json(doc).dump(2) + '\n';
    case Format::Csv:
      return render_csv(doc);
    case Format::Table:
      return render_table(doc);
  }
  throw Error("unknown output format");
}

}  // namespace fracsurv

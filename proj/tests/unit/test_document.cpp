#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "fracsurv/document.hpp"

using namespace fracsurv;

namespace {

OutputDocument sample() {
  OutputDocument doc;
  doc.command = "estimate";
  doc.metadata["seed"] = 7;
  doc.metadata["conventions"] = {{"tie_rule", "events first"}};
  doc.notes = {"top note"};
  DataTable t;
  t.name = "fraction_means";
  t.labels["group"] = "a,b";
  t.columns = {"k", "value", "flag", "missing", "label"};
  t.rows.push_back({std::int64_t{1}, 0.1, true, std::monostate{}, std::string("x")});
  t.rows.push_back({std::int64_t{2}, std::numeric_limits<double>::infinity(), false,
                    std::numeric_limits<double>::quiet_NaN(), std::string("y,z")});
  t.rows.push_back({std::int64_t{3}, -std::numeric_limits<double>::infinity(), false, 1.0 / 3.0,
                    std::string("w")});
  t.notes = {"table note"};
  doc.tables.push_back(t);
  return doc;
}

}  // namespace

TEST_CASE("parse_format") {
  CHECK(parse_format("table") == Format::Table);
  CHECK(parse_format("csv") == Format::Csv);
  CHECK(parse_format("json") == Format::Json);
  CHECK_FALSE(parse_format("xml").has_value());
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("JSON encodes infinities as strings and NaN as null") {
  const auto j = to_json(sample());
  CHECK(j["tool"] == "fracsurv");
  const auto& rows = j["tables"][0]["rows"];
  CHECK(rows[1]["value"] == "inf");
  CHECK(rows[2]["value"] == "-inf");
  CHECK(rows[1]["missing"].is_null());
  CHECK(rows[0]["missing"].is_null());
  CHECK(rows[0]["flag"] == true);
  CHECK(rows[0]["k"] == 1);
}

TEST_CASE("JSON round trip") {
  const auto doc = sample();
  const auto text = render(doc, Format::Json);
  const auto back = document_from_json(nlohmann::ordered_json::parse(text));
  CHECK(back.command == doc.command);
  CHECK(back.metadata == doc.metadata);
  CHECK(back.notes == doc.notes);
  REQUIRE(back.tables.size() == 1);
  const auto& t = back.tables[0];
  CHECK(t.columns == doc.tables[0].columns);
  CHECK(t.labels == doc.tables[0].labels);
  CHECK(std::get<double>(t.rows[0][1]) == 0.1);
  CHECK(std::isinf(std::get<double>(t.rows[1][1])));
  CHECK(std::get<double>(t.rows[2][1]) < 0);
  CHECK(std::holds_alternative<std::monostate>(t.rows[1][3]));
  CHECK(std::get<double>(t.rows[2][3]) == 1.0 / 3.0);
  CHECK(std::get<std::string>(t.rows[1][4]) == "y,z");
  CHECK(to_json(back) == nlohmann::ordered_json::parse(text));
}

TEST_CASE("CSV rendering") {
  const auto text = render(sample(), Format::Csv);
  CHECK(text.find("# fracsurv estimate\n") == 0);
  CHECK(text.find("# seed: 7\n") != std::string::npos);
  CHECK(text.find("# conventions.tie_rule: events first\n") != std::string::npos);
  CHECK(text.find("# note: top note\n") != std::string::npos);
  CHECK(text.find("# table: fraction_means group=a,b\n") != std::string::npos);
  CHECK(text.find("k,value,flag,missing,label\n") != std::string::npos);
  CHECK(text.find("1,0.1,true,,x\n") != std::string::npos);
  CHECK(text.find("2,inf,false,nan,\"y,z\"\n") != std::string::npos);
  CHECK(text.find("3,-inf,false,0.3333333333333333,w\n") != std::string::npos);
}

TEST_CASE("table rendering aligns columns") {
  const auto text = render(sample(), Format::Table);
  CHECK(text.find("[fraction_means group=a,b]") != std::string::npos);
  CHECK(text.find("0.333333") != std::string::npos);
  CHECK(text.find("0.3333333333") == std::string::npos);
  CHECK(text.find("note: table note") != std::string::npos);
  CHECK(text.find("k  value   flag   missing  label\n") != std::string::npos);
}

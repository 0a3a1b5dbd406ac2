#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "fracsurv/dataset.hpp"
#include "fracsurv/error.hpp"

using namespace fracsurv;

namespace {

Dataset parse(const std::string& text, const CsvSchema& schema = {}) {
  std::istringstream in(text);
  return parse_csv(in, schema);
}

}  // namespace

TEST_CASE("parse_csv maps rows to observations in order") {
  const auto ds = parse("time,status\n2,1\n3,1\n1,0\n");
  REQUIRE(ds.size() == 3);
  CHECK(ds.event_count() == 2);
  CHECK(ds[0] == Observation{2.0, 1, std::nullopt});
  CHECK(ds[1] == Observation{3.0, 1, std::nullopt});
  CHECK(ds[2] == Observation{1.0, 0, std::nullopt});
}

TEST_CASE("parse_csv locates columns through the schema") {
  CsvSchema schema{"t", "d", std::string("arm")};
  const auto ds = parse("arm,d,t\nallo,1,5\nauto,0,7\n", schema);
  REQUIRE(ds.size() == 2);
  CHECK(ds[0].time == 5.0);
  CHECK(ds[0].group == "allo");
  CHECK(ds[1].status == 0);
  CHECK(ds[1].group == "auto");
}

TEST_CASE("parse_csv tolerates CRLF, BOM, blank lines and quoted fields") {
  CsvSchema schema{"time", "status", std::string("group")};
  const auto ds = parse("\xEF\xBB\xBFtime,status,group\r\n1.5,1,\"a, b\"\r\n\r\n2,0,c\r\n", schema);
  REQUIRE(ds.size() == 2);
  CHECK(ds[0].group == "a, b");
  CHECK(ds[1].group == "c");
}

TEST_CASE("parse_csv errors carry the row index") {
  SUBCASE("negative time") {
    try {
      parse("time,status\n-1,1\n");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.row() == 1);
    }
  }
  SUBCASE("bad status value") {
    try {
      parse("time,status\n1,1\n2,2\n");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.row() == 2);
    }
  }
  SUBCASE("unparsable time") {
    try {
      parse("time,status\n1,1\n2,1\nabc,0\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row() == 3);
    }
  }
  SUBCASE("unparsable status") {
    CHECK_THROWS_AS(parse("time,status\n1,yes\n"), ParseError);
  }
  SUBCASE("non-finite time") {
    CHECK_THROWS_AS(parse("time,status\ninf,1\n"), ValidationError);
  }
  SUBCASE("ragged row") {
    CHECK_THROWS_AS(parse("time,status\n1,1,3\n"), ParseError);
  }
}

TEST_CASE("parse_csv schema and event errors") {
  try {
    parse("time,event\n1,1\n");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.column() == "status");
  }
  CHECK_THROWS_AS(parse("time,status\n1,0\n2,0\n"), EmptyEventsError);
  CHECK_THROWS_AS(parse("time,status\n"), EmptyEventsError);
  CsvSchema grouped{"time", "status", std::string("g")};
  CHECK_THROWS_AS(parse("time,status,g\n1,1,\n", grouped), ValidationError);
}

TEST_CASE("split_by_group partitions observations") {
  CsvSchema schema{"time", "status", std::string("g")};
  SUBCASE("two groups") {
    const auto parts = split_by_group(parse("time,status,g\n1,1,a\n2,1,a\n3,1,b\n4,1,b\n", schema));
    REQUIRE(parts.size() == 2);
    CHECK(parts.at("a").size() == 2);
    CHECK(parts.at("b").size() == 2);
  }
  SUBCASE("group without events") {
    try {
      split_by_group(parse("time,status,g\n1,1,a\n2,1,a\n3,0,b\n4,0,b\n", schema));
      FAIL("expected EmptyEventsError");
    } catch (const EmptyEventsError& e) {
      CHECK(e.group() == "b");
    }
  }
  SUBCASE("single group") {
    const auto parts = split_by_group(parse("time,status,g\n1,1,a\n2,0,a\n", schema));
    CHECK(parts.size() == 1);
  }
  SUBCASE("ungrouped dataset") {
    CHECK_THROWS_AS(split_by_group(parse("time,status\n1,1\n")), ValidationError);
  }
}

TEST_CASE("property: group sizes sum to the dataset size") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
    std::vector<Observation> obs(n);
    for (auto& o : obs) {
      o.time = std::uniform_real_distribution<double>(0, 10)(rng);
      o.status = 1;
      o.group = std::string(1, static_cast<char>('a' + rng() % 4));
    }
    const Dataset ds(std::move(obs));
    std::size_t total = 0;
    for (const auto& [label, part] : split_by_group(ds)) total += part.size();
    CHECK(total == ds.size());
  }
}

TEST_CASE("property: write_csv then parse_csv reproduces times and statuses exactly") {
  std::mt19937_64 rng(5);
  CsvSchema schema{"t", "d", std::string("arm")};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 30)(rng);
    std::vector<Observation> obs(n);
    for (auto& o : obs) {
      // Mix of arbitrary doubles and short decimals.
      o.time = rng() % 2 ? std::uniform_real_distribution<double>(0, 1e4)(rng)
                         : static_cast<double>(rng() % 10000) / 100.0;
      o.status = static_cast<int>(rng() % 2);
      o.group = rng() % 2 ? "x" : "y,z";
    }
    obs[0].status = 1;
    const Dataset ds(std::move(obs));
    std::ostringstream out;
    write_csv(out, ds, schema);
    const auto back = parse(out.str(), schema);
    REQUIRE(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(back[i] == ds[i]);
  }
}

TEST_CASE("write_csv emits short decimals verbatim") {
  const auto ds = parse("time,status\n2.5,1\n0.1,0\n1e-3,1\n");
  std::ostringstream out;
  write_csv(out, ds);
  CHECK(out.str() == "time,status\n2.5,1\n0.1,0\n0.001,1\n");
}

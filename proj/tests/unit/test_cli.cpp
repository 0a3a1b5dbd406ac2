#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracsurv/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "fracsurv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = fracsurv::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

ordered_json run_json(std::vector<std::string> args) {
  args.push_back("--format");
  args.push_back("json");
  const auto r = run(args);
  INFO(r.err);
  REQUIRE(r.code == 0);
  return ordered_json::parse(r.out);
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("fracsurv_test_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

 private:
  fs::path path_;
};

const std::string kDemo = std::string(FRACSURV_DATA_DIR) + "/two_arm_demo.csv";

}  // namespace

TEST_CASE("estimate on a hand-checkable sample") {
  TempDir dir;
  const auto csv = dir.write("s.csv", "time,status\n1,1\n2,1\n3,1\n4,1\n");
  const auto j = run_json({"estimate", "--input", csv, "--lambdas", "0.5,1"});
  CHECK(j["command"] == "estimate");
  CHECK(j["metadata"].contains("version"));
  const auto& rows = j["tables"][0]["rows"];
  REQUIRE(rows.size() == 2);
  CHECK(rows[0]["mu_hat"] == 0.75);
  CHECK(rows[1]["mu_hat"] == 1.75);
  CHECK(rows[0]["mu_bar"] == 1.5);
  CHECK(rows[1]["mu_bar"] == 3.5);
  CHECK(rows[0]["computable"] == true);
  CHECK(rows[0]["lambda"] == 0.5);
}

TEST_CASE("estimate output matches the golden document") {
  TempDir dir;
  const auto csv = dir.write("s.csv", "time,status\n1,1\n2,1\n3,1\n4,1\n");
  auto j = run_json({"estimate", "--input", csv, "--lambdas", "0.5,1"});
  j["metadata"].erase("input");
  j["metadata"].erase("version");
  std::ifstream in(std::string(FRACSURV_TEST_DATA_DIR) + "/golden/estimate_1234.json");
  REQUIRE(in);
  CHECK(j == ordered_json::parse(in));
}

TEST_CASE("estimate flags a fraction the curve never reaches") {
  TempDir dir;
  const auto csv = dir.write("p.csv", "time,status\n1,1\n5,0\n6,0\n");
  const auto j = run_json({"estimate", "--input", csv, "--lambdas", "0.2,0.9"});
  const auto& t = j["tables"][0];
  CHECK(t["rows"][0]["computable"] == true);
  CHECK(t["rows"][1]["computable"] == false);
  CHECK_FALSE(t["notes"].empty());
}

TEST_CASE("estimate default grid and custom columns") {
  const auto j = run_json({"estimate", "--input", kDemo, "--time-col", "days", "--status-col",
                           "relapse"});
  const double max_fraction = j["metadata"]["max_observed_fraction"];
  const auto& rows = j["tables"][0]["rows"];
  CHECK(rows.size() == static_cast<std::size_t>(std::floor(max_fraction * 10 + 1e-9)));
  CHECK(rows[0]["lambda"] == 0.1);
}

TEST_CASE("usage and input errors exit with status 2") {
  CHECK(run({"estimate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"estimate", "--input", "/nonexistent/file.csv"}).code == 2);
  CHECK(run({"estimate", "--input", kDemo}).code == 2);  // no "time" column
  CHECK(run({"estimate", "--input", kDemo, "--time-col", "days", "--status-col", "relapse",
             "--format", "xml"})
            .code == 2);
  CHECK(run({"--help"}).code == 0);

  TempDir dir;
  const auto bad = dir.write("b.csv", "time,status\n1,1\n2,x\n");
  const auto r = run({"estimate", "--input", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("row 2") != std::string::npos);
}

TEST_CASE("compare is reproducible and exposes the common grid") {
  const std::vector<std::string> args{"compare",   "--input",     kDemo,     "--time-col",
                                      "days",      "--status-col", "relapse", "--group-col",
                                      "arm",       "--ref-group",  "arm_a",   "--bootstrap",
                                      "200",       "--seed",       "7",       "--format",
                                      "json"};
  const auto a = run(args);
  const auto b = run(args);
  INFO(a.err);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = ordered_json::parse(a.out);
  CHECK(j["metadata"]["seed"] == 7);
  CHECK(j["metadata"]["comparison_group"] == "arm_b");
  for (const auto& row : j["tables"][0]["rows"]) {
    CHECK(row["difference"].get<double>() ==
          row["mu_bar_comparison"].get<double>() - row["mu_bar_reference"].get<double>());
  }

  auto with_rm = args;
  with_rm.push_back("--restricted-mean");
  const auto r = run(with_rm);
  REQUIRE(r.code == 0);
  const auto jr = ordered_json::parse(r.out);
  REQUIRE(jr["tables"].size() == 2);
  CHECK(jr["tables"][1]["name"] == "restricted_mean_difference");

  CHECK(run({"compare", "--input", kDemo, "--time-col", "days", "--status-col", "relapse",
             "--group-col", "arm", "--ref-group", "nope"})
            .code == 2);
}

TEST_CASE("simulate scales with alpha") {
  TempDir dir;
  const auto base = dir.write("a.conf", "n_datasets = 20\nn = 60\nalpha = 1\ncensor_upper = 2\n");
  const auto doubled =
      dir.write("b.conf", "n_datasets = 20\nn = 60\nalpha = 2\ncensor_upper = 4\n");
  const auto j1 = run_json({"simulate", "--config", base});
  const auto j2 = run_json({"simulate", "--config", doubled});
  const auto& r1 = j1["tables"][0]["rows"];
  const auto& r2 = j2["tables"][0]["rows"];
  REQUIRE(r1.size() == r2.size());
  for (std::size_t k = 0; k < r1.size(); ++k) {
    CAPTURE(k);
    CHECK(r2[k]["true_mu"].get<double>() ==
          doctest::Approx(2 * r1[k]["true_mu"].get<double>()).epsilon(1e-9));
    if (r1[k]["mean_mu_hat"].is_number()) {
      CHECK(r2[k]["mean_mu_hat"].get<double>() == 2 * r1[k]["mean_mu_hat"].get<double>());
    }
  }
  CHECK(j1["metadata"]["censoring_rate"] == j2["metadata"]["censoring_rate"]);

  const auto override_run = run_json({"simulate", "--config", base, "--n-datasets", "5"});
  CHECK(override_run["metadata"]["n_datasets"] == 5);
  CHECK(run({"simulate", "--config", dir.write("c.conf", "bogus = 1\n")}).code == 2);
  CHECK(run({"simulate", "--config", "/nonexistent.conf"}).code == 2);
}

TEST_CASE("km-curve coordinates, groups and band notes") {
  TempDir dir;
  const auto csv = dir.write("k.csv", "time,status\n1,0\n2,1\n3,1\n");
  const auto j = run_json({"km-curve", "--input", csv});
  const auto& rows = j["tables"][0]["rows"];
  REQUIRE(rows.size() == 3);
  CHECK(rows[0]["time"] == 0.0);
  CHECK(rows[0]["survival"] == 1.0);
  CHECK(rows[1]["time"] == 2.0);
  CHECK(rows[1]["survival"] == 0.5);
  CHECK(rows[2]["time"] == 3.0);
  CHECK(rows[2]["survival"] == 0.0);

  const auto banded = run_json({"km-curve", "--input", csv, "--band-level", "0.95"});
  CHECK_FALSE(banded["tables"][0]["notes"].empty());

  const auto groups = run_json({"km-curve", "--input", kDemo, "--time-col", "days",
                                "--status-col", "relapse", "--group-col", "arm",
                                "--band-level", "0.95"});
  REQUIRE(groups["tables"].size() == 2);
  CHECK(groups["tables"][0]["labels"]["group"] == "arm_a");
  CHECK(groups["tables"][1]["labels"]["group"] == "arm_b");
}

TEST_CASE("output format from the environment") {
  TempDir dir;
  const auto csv = dir.write("s.csv", "time,status\n1,1\n2,1\n3,1\n4,1\n");
  ::setenv(fracsurv::cli::kFormatEnvVar, "csv", 1);
  const auto r = run({"estimate", "--input", csv, "--lambdas", "0.5,1"});
  ::unsetenv(fracsurv::cli::kFormatEnvVar);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("k,lambda,mu_hat") != std::string::npos);
  const auto t = run({"estimate", "--input", csv, "--lambdas", "0.5,1"});
  CHECK(t.out.find("[fraction_means]") != std::string::npos);
}

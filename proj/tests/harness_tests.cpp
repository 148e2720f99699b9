#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "lpplab/environments.hpp"
#include "lpplab/harness.hpp"
#include "lpplab/lattice.hpp"
#include "lpplab/rng.hpp"

using namespace lpplab;

TEST_CASE("config json round trip and validation") {
  ExperimentConfig cfg;
  cfg.suite = "burke";
  cfg.seed = 99;
  cfg.directions = {0.5, 2.0};
  nlohmann::json j = cfg.to_json();
  ExperimentConfig back = ExperimentConfig::from_json(j);
  CHECK(back.suite == "burke");
  CHECK(back.seed == 99);
  CHECK(back.directions == std::vector<double>{0.5, 2.0});
  CHECK_NOTHROW(back.validate());

  ExperimentConfig bad;
  bad.suite = "nonsense";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  ExperimentConfig bad2;
  bad2.directions = {2.0, 1.0};
  CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
  ExperimentConfig bad3;
  bad3.heights = {128, 128};
  CHECK_THROWS_AS(bad3.validate(), std::invalid_argument);
}

TEST_CASE("enumeration oracle agrees with the dp") {
  RngStream rng(701);
  WeightGrid w = sample_iid_exp1(GridBox{{1, 1}, {4, 3}}, rng);
  CHECK(enumerate_last_passage(w, {1, 1}, {4, 3}) ==
        doctest::Approx(last_passage(w, {1, 1}, {4, 3})).epsilon(1e-12));
  CHECK(enumerate_last_passage(w, {3, 2}, {1, 1}) == kNegInf);
}

TEST_CASE("energy test detects a broken rate permutation") {
  // Negative control for the invariance machinery: a pair that straddles the
  // swapped columns from inside changes law, and the test must see it.
  const int m = 8;
  RateProfile base;
  base.a = {0.0, 0.0, -0.5, 0.0, 0.0, 1.0, 0.0, 0.0};
  base.b = std::vector<double>(m, 1.0);
  RateProfile swapped = base;
  std::swap(swapped.a[2], swapped.a[5]);  // columns 3 and 6

  GridBox box{{1, 1}, {m, m}};
  GridPoint x{1, 1}, y{4, 8};  // y1 = 4 lies strictly between the columns
  int n = 1000;
  RngStream rng_a(801), rng_b(802);
  Sample sa{{}, 1}, sb{{}, 1};
  sa.values.resize(n);
  sb.values.resize(n);
  for (int g = 0; g < n; ++g) {
    sa.values[g] =
        last_passage(sample_inhomogeneous(base, box, rng_a.with_replica(g)), x, y);
    sb.values[g] = last_passage(
        sample_inhomogeneous(swapped, box, rng_b.with_replica(g)), x, y);
  }
  TestReport report = energy_distance_test(sa, sb, 1999, 803);
  CHECK_FALSE(report.pass);
  CHECK(*report.p_value < 0.001);
}

TEST_CASE("deterministic suite passes in quick mode") {
  ExperimentConfig cfg;
  cfg.suite = "deterministic";
  cfg.quick = true;
  cfg.seed = 7;
  SuiteReport report = run_suite(cfg);
  CHECK(report.pass);
  CHECK(report.cases.size() >= 5);
  for (const TestReport& c : report.cases) CHECK(c.pass);
}

TEST_CASE("suite reports are reproducible modulo runtime") {
  ExperimentConfig cfg;
  cfg.suite = "cdf";
  cfg.quick = true;
  cfg.seed = 11;
  SuiteReport a = run_suite(cfg);
  SuiteReport b = run_suite(cfg);
  REQUIRE(a.cases.size() == b.cases.size());
  for (std::size_t i = 0; i < a.cases.size(); ++i) {
    CHECK(a.cases[i].statistic == b.cases[i].statistic);
    CHECK(a.cases[i].pass == b.cases[i].pass);
  }
}

TEST_CASE("suite report serialization") {
  ExperimentConfig cfg;
  cfg.suite = "lln";
  cfg.quick = true;
  cfg.seed = 5;
  cfg.out = "lln_report_test.json";
  SuiteReport report = run_suite(cfg);
  nlohmann::json j = report.to_json();
  CHECK(j.contains("suite"));
  CHECK(j.contains("config"));
  CHECK(j.contains("cases"));
  CHECK(j.contains("pass"));
  CHECK(j["cases"].is_array());
  std::ifstream is(cfg.out);
  CHECK(is.good());
  nlohmann::json from_file = nlohmann::json::parse(is);
  CHECK(from_file["suite"] == "lln");
  std::remove(cfg.out.c_str());

  std::string csv = report.to_csv();
  CHECK(csv.find("name,statistic,threshold") == 0);
}

TEST_CASE("sample export") {
  ExperimentConfig cfg;
  cfg.k = 2;
  cfg.ell = 2;
  cfg.d = 2;
  cfg.directions = {1.0, 4.0};
  cfg.replicas = 50;
  cfg.seed = 17;
  cfg.out = "export_test.csv";
  sample_export(cfg, "exact", true);

  auto read_all = [](const std::string& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  std::string first = read_all(cfg.out);
  int lines = 0;
  for (char ch : first)
    if (ch == '\n') ++lines;
  CHECK(lines == 51);  // header + one row per replica
  // Columns: (k-1)*ell + k*(ell-1) edges per direction.
  std::string header = first.substr(0, first.find('\n'));
  int commas = 0;
  for (char ch : header)
    if (ch == ',') ++commas;
  CHECK(commas == 8);

  sample_export(cfg, "exact", true);
  CHECK(read_all(cfg.out) == first);  // byte-identical re-run

  std::ifstream hist(cfg.out + ".hist.csv");
  CHECK(hist.good());
  std::string hline;
  std::getline(hist, hline);
  CHECK(hline == "column,bin_lo,bin_hi,count");

  std::remove(cfg.out.c_str());
  std::remove((cfg.out + ".hist.csv").c_str());

  ExperimentConfig bad = cfg;
  bad.out = "";
  CHECK_THROWS_AS(sample_export(bad, "exact", false), std::invalid_argument);
  CHECK_THROWS_AS(sample_export(cfg, "sideways", false), std::invalid_argument);
  std::remove(cfg.out.c_str());
}

TEST_CASE("prelimit export works for a single-direction config") {
  ExperimentConfig cfg;
  cfg.k = 2;
  cfg.ell = 1;
  cfg.d = 1;
  cfg.directions = {1.0};
  cfg.heights = {32};
  cfg.replicas = 10;
  cfg.seed = 23;
  cfg.out = "export_prelimit_test.csv";
  sample_export(cfg, "prelimit", false);
  std::ifstream is(cfg.out);
  CHECK(is.good());
  std::string header;
  std::getline(is, header);
  CHECK(header == "replica,I_c1r1_p1");
  std::remove(cfg.out.c_str());
}

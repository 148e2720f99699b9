#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "lpplab/grid.hpp"
#include "lpplab/stats.hpp"

namespace lpplab {

struct ExperimentConfig {
  std::string suite{"all"};
  int k{3};
  int ell{1};
  int d{2};
  std::vector<double> directions{1.0, 4.0};
  std::vector<int> heights{128, 256, 512};
  int replicas{5000};
  // Default seed matches the calibrated acceptance run, so a full-size
  // `run --suite all` is green out of the box.
  std::uint64_t seed{3};
  int burn_in{64};
  std::string out;
  std::string format{"json"};
  int jobs{0};
  bool quick{false};

  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct SuiteReport {
  std::string suite;
  ExperimentConfig config;
  std::vector<TestReport> cases;
  bool pass{true};
  double wall_ms{0.0};

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

extern const std::vector<std::string> kSuiteNames;

// Named experiment groups. Each returns one TestReport per check, with
// thresholds pinned to the stated acceptance sizes (quick mode rescales both
// sizes and thresholds for smoke runs).
std::vector<TestReport> det_brute_force(const ExperimentConfig& cfg);
std::vector<TestReport> det_increment_algebra(const ExperimentConfig& cfg);
std::vector<TestReport> det_induced_identity(const ExperimentConfig& cfg);
std::vector<TestReport> det_two_row_swap(const ExperimentConfig& cfg);
std::vector<TestReport> burke_suite(const ExperimentConfig& cfg);
std::vector<TestReport> busmar_d1_suite(const ExperimentConfig& cfg);
std::vector<TestReport> busmar_prelimit_suite(const ExperimentConfig& cfg);
std::vector<TestReport> cdf_suite(const ExperimentConfig& cfg);
std::vector<TestReport> independence_suite(const ExperimentConfig& cfg);
std::vector<TestReport> shen_suite(const ExperimentConfig& cfg);
std::vector<TestReport> invariance_deterministic(const ExperimentConfig& cfg);
std::vector<TestReport> invariance_distributional(const ExperimentConfig& cfg);
std::vector<TestReport> thin_suite(const ExperimentConfig& cfg);
std::vector<TestReport> lln_suite(const ExperimentConfig& cfg);

SuiteReport run_suite(const ExperimentConfig& cfg);

// CSV of exact or prelimit replicas, one row per replica, one column per
// (edge, direction); optionally a 64-bin histogram side file over [0, q99].
void sample_export(const ExperimentConfig& cfg, const std::string& kind,
                   bool with_histogram);

// Exhaustive up-right path enumeration; the independent oracle behind the
// deterministic suite. Exponential in the box size, only for tiny grids.
double enumerate_last_passage(const WeightGrid& w, GridPoint u, GridPoint v);

}  // namespace lpplab

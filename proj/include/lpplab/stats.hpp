#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace lpplab {

// Finite real observations; dim > 1 packs vector-valued observations
// row-major.
struct Sample {
  std::vector<double> values;
  int dim{1};

  int n() const { return static_cast<int>(values.size()) / dim; }
  const double* row(int i) const { return values.data() + static_cast<std::size_t>(i) * dim; }
  void validate() const;
};

struct TestReport {
  std::string name;
  double statistic{0.0};
  double threshold{0.0};
  std::optional<double> p_value;
  bool pass{false};
  std::vector<int> n;
  std::uint64_t seed{0};
  double runtime_ms{0.0};

  nlohmann::json to_json() const;
};

double ks_statistic_exp(std::vector<double> values, double rate);
double ks_statistic_two(std::vector<double> a, std::vector<double> b);

// Sup distance between the empirical CDF and 1 - e^{-rate x}; default
// threshold 1.95/sqrt(n) (alpha ~ 0.001).
TestReport ks_one_sample_exp(const Sample& sample, double rate,
                             double threshold = 0.0,
                             const std::string& name = "ks_one_sample_exp");

TestReport ks_two_sample(const Sample& a, const Sample& b, double threshold,
                         const std::string& name = "ks_two_sample");

// Mixed law check: binomial test of the mass at zero (|x| < 1e-9) plus a KS
// test of the positive part against Exp{tail_rate}. The reported statistic is
// the worse of the two normalized ratios, so pass <=> statistic <= 1.
TestReport atom_tail_test(const Sample& sample, double atom_mass,
                          double tail_rate, double atom_tol = 0.02,
                          double tail_ks_threshold = 0.02,
                          const std::string& name = "atom_tail_test");

// Two-sample energy statistic 2E|X-Y| - E|X-X'| - E|Y-Y'| with a label-
// permutation p-value. pass <=> p >= significance. Distances are cached in
// single precision once the matrix exceeds 1e7 entries.
TestReport energy_distance_test(const Sample& a, const Sample& b,
                                int permutations, std::uint64_t seed,
                                double significance = 0.001, int jobs = 0,
                                const std::string& name = "energy_distance");

// Distance correlation with a permutation p-value; constant input yields
// dCor = 0 and a pass.
TestReport independence_test(const Sample& x, const Sample& y,
                             int permutations, std::uint64_t seed,
                             double significance = 0.001, int jobs = 0,
                             const std::string& name = "independence");

double pearson_correlation(const std::vector<double>& x,
                           const std::vector<double>& y);

// Deterministic Fisher-Yates driven by the splitmix chain; identical output
// on every platform for a given seed.
void deterministic_shuffle(std::vector<int>& items, std::uint64_t seed);

}  // namespace lpplab

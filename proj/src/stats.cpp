#include "lpplab/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lpplab/grid.hpp"
#include "lpplab/parallel.hpp"
#include "lpplab/rng.hpp"

namespace lpplab {

void Sample::validate() const {
  if (dim < 1) throw std::invalid_argument("sample dimension must be positive");
  if (values.empty() || values.size() % dim != 0)
    throw std::invalid_argument("sample size must be a positive multiple of dim");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("sample values must be finite");
}

nlohmann::json TestReport::to_json() const {
  nlohmann::json j{{"name", name},
                   {"statistic", statistic},
                   {"threshold", threshold},
                   {"pass", pass},
                   {"n", n},
                   {"seed", seed},
                   {"runtime_ms", runtime_ms}};
  if (p_value)
    j["p_value"] = *p_value;
  else
    j["p_value"] = nullptr;
  return j;
}

double ks_statistic_exp(std::vector<double> values, double rate) {
  if (values.empty()) throw std::invalid_argument("empty sample");
  std::sort(values.begin(), values.end());
  double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double f = 1.0 - std::exp(-rate * values[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double ks_statistic_two(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na -
                             static_cast<double>(ib) / nb));
  }
  return d;
}

TestReport ks_one_sample_exp(const Sample& sample, double rate, double threshold,
                             const std::string& name) {
  sample.validate();
  if (sample.dim != 1) throw std::invalid_argument("scalar sample required");
  if (!(rate > 0.0)) throw std::invalid_argument("rate must be positive");
  if (sample.n() < 100) throw std::invalid_argument("need at least 100 observations");
  bool degenerate = true;
  for (double v : sample.values)
    if (v != sample.values.front()) {
      degenerate = false;
      break;
    }
  if (degenerate && sample.n() >= 1000)
    throw std::invalid_argument("degenerate sample");
  TestReport report;
  report.name = name;
  report.n = {sample.n()};
  report.threshold = threshold > 0.0 ? threshold : 1.95 / std::sqrt(sample.n());
  report.statistic = ks_statistic_exp(sample.values, rate);
  report.pass = report.statistic <= report.threshold;
  return report;
}

TestReport ks_two_sample(const Sample& a, const Sample& b, double threshold,
                         const std::string& name) {
  a.validate();
  b.validate();
  if (a.dim != 1 || b.dim != 1) throw std::invalid_argument("scalar samples required");
  TestReport report;
  report.name = name;
  report.n = {a.n(), b.n()};
  report.threshold = threshold;
  report.statistic = ks_statistic_two(a.values, b.values);
  report.pass = report.statistic <= report.threshold;
  return report;
}

TestReport atom_tail_test(const Sample& sample, double atom_mass, double tail_rate,
                          double atom_tol, double tail_ks_threshold,
                          const std::string& name) {
  sample.validate();
  if (sample.dim != 1) throw std::invalid_argument("scalar sample required");
  if (!(atom_mass > 0.0) || !(atom_mass <= 1.0))
    throw std::invalid_argument("atom mass must lie in (0, 1]");
  for (double v : sample.values)
    if (v < -1e-9) throw std::invalid_argument("sample must be nonnegative");

  std::vector<double> tail;
  std::size_t atoms = 0;
  for (double v : sample.values) {
    if (std::abs(v) < 1e-9)
      ++atoms;
    else
      tail.push_back(v);
  }

  TestReport report;
  report.name = name;
  report.n = {sample.n(), static_cast<int>(tail.size())};
  report.threshold = 1.0;

  double frac = static_cast<double>(atoms) / sample.n();
  double atom_ratio = std::abs(frac - atom_mass) / atom_tol;

  if (sample.n() >= 10000 && (atoms == 0 || (atom_mass < 1.0 && tail.empty()))) {
    report.name += " [empty partition]";
    report.statistic = kPosInf;
    report.pass = false;
    return report;
  }

  double tail_ratio = 0.0;
  if (atom_mass < 1.0 && !tail.empty()) {
    if (!(tail_rate > 0.0)) throw std::invalid_argument("tail rate must be positive");
    tail_ratio = ks_statistic_exp(tail, tail_rate) / tail_ks_threshold;
  }

  report.statistic = std::max(atom_ratio, tail_ratio);
  report.pass = report.statistic <= report.threshold;
  return report;
}

void deterministic_shuffle(std::vector<int>& items, std::uint64_t seed) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::uint64_t word = mix64(seed + 0x632b'e59b'd9b4'e019ULL * i);
    // Lemire-style bounded draw; the O(n/2^64) bias is immaterial here.
    std::size_t j = static_cast<std::size_t>(
        (static_cast<unsigned __int128>(word) * i) >> 64);
    std::swap(items[i - 1], items[j]);
  }
}

namespace {

double row_distance(const Sample& s, int i, int j) {
  const double* a = s.row(i);
  const double* b = s.row(j);
  double sq = 0.0;
  for (int t = 0; t < s.dim; ++t) {
    double diff = a[t] - b[t];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

// Pooled pairwise distances for the energy test. Pairs are scanned
// sequentially and binned by how many of the two labels fall in group A, so a
// permutation costs one cache-friendly pass.
template <typename Real>
struct PairTable {
  int n;
  std::vector<Real> d;  // upper triangle, row-major

  explicit PairTable(const Sample& a, const Sample& b, int jobs) {
    n = a.n() + b.n();
    d.assign(static_cast<std::size_t>(n) * (n - 1) / 2, Real(0));
    int na = a.n();
    auto point = [&](int i) { return i < na ? a.row(i) : b.row(i - na); };
    int dim = a.dim;
    parallel_for(n - 1, jobs, [&](std::int64_t i) {
      std::size_t base = static_cast<std::size_t>(i) * (2 * n - i - 1) / 2;
      const double* pi = point(static_cast<int>(i));
      for (int j = static_cast<int>(i) + 1; j < n; ++j) {
        const double* pj = point(j);
        double sq = 0.0;
        for (int t = 0; t < dim; ++t) {
          double diff = pi[t] - pj[t];
          sq += diff * diff;
        }
        d[base + (j - i - 1)] = static_cast<Real>(std::sqrt(sq));
      }
    });
  }

  // sums[g] collects pair distances with g in-A endpoints (g in {0, 1, 2}).
  void label_sums(const std::vector<char>& in_a, double sums[3]) const {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    std::size_t idx = 0;
    for (int i = 0; i < n - 1; ++i) {
      char li = in_a[i];
      for (int j = i + 1; j < n; ++j, ++idx) {
        double v = static_cast<double>(d[idx]);
        switch (li + in_a[j]) {
          case 2: s2 += v; break;
          case 1: s1 += v; break;
          default: s0 += v; break;
        }
      }
    }
    sums[0] = s0;
    sums[1] = s1;
    sums[2] = s2;
  }
};

template <typename Real>
TestReport energy_test_impl(const Sample& a, const Sample& b, int permutations,
                            std::uint64_t seed, double significance, int jobs,
                            const std::string& name) {
  PairTable<Real> table(a, b, jobs);
  int na = a.n(), nb = b.n(), n = na + nb;

  auto energy = [&](const double sums[3]) {
    // Pair sums count unordered pairs; diagonals are zero, so the V-statistic
    // means are 2*S/(n*n) within groups and S/(na*nb) across.
    double within_a = 2.0 * sums[2] / (static_cast<double>(na) * na);
    double within_b = 2.0 * sums[0] / (static_cast<double>(nb) * nb);
    double cross = sums[1] / (static_cast<double>(na) * nb);
    return 2.0 * cross - within_a - within_b;
  };

  std::vector<char> labels(n, 0);
  std::fill(labels.begin(), labels.begin() + na, 1);
  double sums[3];
  table.label_sums(labels, sums);
  double observed = energy(sums);

  std::vector<int> exceed(permutations, 0);
  parallel_for(permutations, jobs, [&](std::int64_t p) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    deterministic_shuffle(order, mix64(seed ^ (0x9e37u + p)));
    std::vector<char> lab(n, 0);
    for (int i = 0; i < na; ++i) lab[order[i]] = 1;
    double s[3];
    table.label_sums(lab, s);
    if (energy(s) >= observed - 1e-12) exceed[p] = 1;
  });
  int count = std::accumulate(exceed.begin(), exceed.end(), 0);

  TestReport report;
  report.name = name;
  report.n = {na, nb};
  report.seed = seed;
  report.statistic = observed;
  report.threshold = significance;
  report.p_value = (1.0 + count) / (1.0 + permutations);
  report.pass = *report.p_value >= significance;
  return report;
}

// Double-centered distance matrix for distance covariance.
std::vector<double> centered_distances(const Sample& s, int jobs) {
  int n = s.n();
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  parallel_for(n, jobs, [&](std::int64_t i) {
    for (int j = 0; j < n; ++j)
      m[static_cast<std::size_t>(i) * n + j] = row_distance(s, static_cast<int>(i), j);
  });
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += m[static_cast<std::size_t>(i) * n + j];
    row_mean[i] = sum / n;
    grand += sum;
  }
  grand /= static_cast<double>(n) * n;
  parallel_for(n, jobs, [&](std::int64_t i) {
    for (int j = 0; j < n; ++j)
      m[static_cast<std::size_t>(i) * n + j] +=
          grand - row_mean[i] - row_mean[j];
  });
  return m;
}

}  // namespace

TestReport energy_distance_test(const Sample& a, const Sample& b, int permutations,
                                std::uint64_t seed, double significance, int jobs,
                                const std::string& name) {
  a.validate();
  b.validate();
  if (a.dim != b.dim) throw std::invalid_argument("dimension mismatch");
  if (a.n() > 5000 || b.n() > 5000)
    throw std::invalid_argument("energy test capped at 5000 observations per side");
  std::size_t pairs = static_cast<std::size_t>(a.n() + b.n());
  pairs *= pairs;
  if (pairs > 10'000'000)
    return energy_test_impl<float>(a, b, permutations, seed, significance, jobs, name);
  return energy_test_impl<double>(a, b, permutations, seed, significance, jobs, name);
}

TestReport independence_test(const Sample& x, const Sample& y, int permutations,
                             std::uint64_t seed, double significance, int jobs,
                             const std::string& name) {
  x.validate();
  y.validate();
  if (x.n() != y.n()) throw std::invalid_argument("samples must have equal length");
  int n = x.n();

  TestReport report;
  report.name = name;
  report.n = {n, n};
  report.seed = seed;
  report.threshold = significance;

  bool const_x = true, const_y = true;
  for (int i = 1; i < n; ++i) {
    if (row_distance(x, 0, i) != 0.0) const_x = false;
    if (row_distance(y, 0, i) != 0.0) const_y = false;
  }
  if (const_x || const_y) {
    report.statistic = 0.0;
    report.p_value = 1.0;
    report.pass = true;
    return report;
  }

  std::vector<double> A = centered_distances(x, jobs);
  std::vector<double> B = centered_distances(y, jobs);

  auto dcov2 = [&](const std::vector<int>* perm) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      int pi = perm ? (*perm)[i] : i;
      const double* arow = A.data() + static_cast<std::size_t>(i) * n;
      const double* brow = B.data() + static_cast<std::size_t>(pi) * n;
      if (perm) {
        for (int j = 0; j < n; ++j)
          sum += arow[j] * brow[(*perm)[j]];
      } else {
        for (int j = 0; j < n; ++j) sum += arow[j] * brow[j];
      }
    }
    return sum / (static_cast<double>(n) * n);
  };

  double vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    vx += A[i] * A[i];
    vy += B[i] * B[i];
  }
  vx /= static_cast<double>(n) * n;
  vy /= static_cast<double>(n) * n;

  double observed = dcov2(nullptr);
  double denom = std::sqrt(vx * vy);
  report.statistic = denom > 0.0 ? std::sqrt(std::max(0.0, observed / denom)) : 0.0;

  std::vector<int> exceed(permutations, 0);
  parallel_for(permutations, jobs, [&](std::int64_t p) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    deterministic_shuffle(perm, mix64(seed ^ (0xd1ceu + p)));
    if (dcov2(&perm) >= observed - 1e-15) exceed[p] = 1;
  });
  int count = std::accumulate(exceed.begin(), exceed.end(), 0);
  report.p_value = (1.0 + count) / (1.0 + permutations);
  report.pass = *report.p_value >= significance;
  return report;
}

double pearson_correlation(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("correlation needs equal nonempty vectors");
  double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace lpplab

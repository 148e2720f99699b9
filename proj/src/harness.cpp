#include "lpplab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lpplab/busemann.hpp"
#include "lpplab/coupling.hpp"
#include "lpplab/environments.hpp"
#include "lpplab/lattice.hpp"
#include "lpplab/parallel.hpp"
#include "lpplab/rng.hpp"
#include "lpplab/shape.hpp"

namespace lpplab {

namespace {

// Substream tags, one per experiment, so criteria draw independent variates
// from a single master seed.
enum RngTag : std::uint64_t {
  kTagBrute = 1,
  kTagIncrement = 2,
  kTagInduced = 3,
  kTagSwap = 4,
  kTagBurke = 5,
  kTagD1 = 6,
  kTagExact = 7,
  kTagPrelimit = 8,
  kTagCdf = 10,
  kTagIndep = 11,
  kTagShen = 12,
  kTagInvDet = 13,
  kTagInvFreshA = 14,
  kTagInvFreshB = 15,
  kTagThinEq = 16,
  kTagThinMarginal = 17,
  kTagLln = 18,
  kTagPinning = 19,
  kTagExport = 20,
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

int scaled_n(const ExperimentConfig& cfg, int full, int floor_n = 100) {
  return cfg.quick ? std::max(floor_n, full / 50) : full;
}

// Quick mode rescales a KS threshold to the smaller sample and doubles it:
// smoke runs check wiring, not the calibrated statistical margins.
double scaled_ks_threshold(double full_threshold, int full_n, int actual_n) {
  if (actual_n >= full_n) return full_threshold;
  return 2.0 * full_threshold * std::sqrt(static_cast<double>(full_n) / actual_n);
}

TestReport make_report(const std::string& name, double statistic, double threshold,
                       std::vector<int> n, std::uint64_t seed,
                       Clock::time_point start) {
  TestReport report;
  report.name = name;
  report.statistic = statistic;
  report.threshold = threshold;
  report.n = std::move(n);
  report.seed = seed;
  report.pass = statistic <= threshold;
  report.runtime_ms = ms_since(start);
  return report;
}

void stamp(std::vector<TestReport>& reports, std::uint64_t seed,
           Clock::time_point start) {
  for (auto& r : reports) {
    r.seed = seed;
    if (r.runtime_ms == 0.0) r.runtime_ms = ms_since(start);
  }
}

}  // namespace

double enumerate_last_passage(const WeightGrid& w, GridPoint u, GridPoint v) {
  if (!w.box().contains(u) || !w.box().contains(v))
    throw std::invalid_argument("point outside grid box");
  if (!leq(u, v)) return kNegInf;
  if (u == v) return w.at(u);
  double best = kNegInf;
  if (u.col < v.col)
    best = std::max(best, enumerate_last_passage(w, u + GridPoint{1, 0}, v));
  if (u.row < v.row)
    best = std::max(best, enumerate_last_passage(w, u + GridPoint{0, 1}, v));
  return w.at(u) + best;
}

std::vector<TestReport> det_brute_force(const ExperimentConfig& cfg) {
  auto start = Clock::now();
  RngStream rng = RngStream(cfg.seed).fork(kTagBrute);
  int grids = scaled_n(cfg, 1000, 100);
  double worst = 0.0;
  for (int g = 0; g < grids; ++g) {
    RngStream r = rng.with_replica(g);
    int wx = 1 + static_cast<int>(r.bits(1'000'001) % 4);
    int wy = 1 + static_cast<int>(r.bits(1'000'002) % 4);
    WeightGrid w = sample_iid_exp1(GridBox{{1, 1}, {wx, wy}}, r);
    for (int uc = 1; uc <= wx; ++uc)
      for (int ur = 1; ur <= wy; ++ur)
        for (int vc = uc; vc <= wx; ++vc)
          for (int vr = ur; vr <= wy; ++vr) {
            GridPoint u{uc, ur}, v{vc, vr};
            worst = std::max(worst, std::abs(last_passage(w, u, v) -
                                             enumerate_last_passage(w, u, v)));
          }
  }
  return {make_report("lpp vs exhaustive enumeration", worst, 1e-9, {grids},
                      cfg.seed, start)};
}

std::vector<TestReport> det_increment_algebra(const ExperimentConfig& cfg) {
  auto start = Clock::now();
  RngStream rng = RngStream(cfg.seed).fork(kTagIncrement);
  int grids = scaled_n(cfg, 100, 20);
  const int m = 12;
  double worst_rec = 0.0, worst_wrec = 0.0, worst_mono = 0.0;
  for (int g = 0; g < grids; ++g) {
    WeightGrid w = sample_iid_exp1(GridBox{{1, 1}, {m, m}}, rng.with_replica(g));
    GridPoint z{m, m};
    IncrementField f = increments_to_terminal(w, z);
    IncrementField f_right = increments_to_terminal(w, {m - 1, m});
    IncrementField f_up = increments_to_terminal(w, {m, m - 1});
    IncrementField b = increments_from_initial(w, {1, 1});
    for (int i = 1; i <= m; ++i) {
      for (int j = 1; j <= m; ++j) {
        GridPoint x{i, j};
        if (i + 1 <= m && j + 1 <= m) {
          double upI = f.I({i, j + 1});
          double rightJ = f.J({i + 1, j});
          double expect_i = w.at(x) + std::max(upI - rightJ, 0.0);
          double expect_j = w.at(x) + std::max(rightJ - upI, 0.0);
          worst_rec = std::max(worst_rec, std::abs(f.I(x) - expect_i));
          worst_rec = std::max(worst_rec, std::abs(f.J(x) - expect_j));
        }
        if (i >= 2 && j >= 2) {
          double downI = b.I({i, j - 1});
          double leftJ = b.J({i - 1, j});
          double expect_i = w.at(x) + std::max(downI - leftJ, 0.0);
          double expect_j = w.at(x) + std::max(leftJ - downI, 0.0);
          worst_rec = std::max(worst_rec, std::abs(b.I(x) - expect_i));
          worst_rec = std::max(worst_rec, std::abs(b.J(x) - expect_j));
        }
        if (x != z)
          worst_wrec = std::max(worst_wrec,
                                std::abs(std::min(f.I(x), f.J(x)) - w.at(x)));
        if (!(x == GridPoint{1, 1}))
          worst_wrec = std::max(worst_wrec,
                                std::abs(std::min(b.I(x), b.J(x)) - w.at(x)));
        // Terminal shifts: larger terminal column lowers I and raises J,
        // larger terminal row does the opposite.
        if (i <= m - 1) {
          double Ia = f_right.I(x), Ja = f_right.J(x);
          if (std::isfinite(Ia) && std::isfinite(f.I(x)))
            worst_mono = std::max(worst_mono, f.I(x) - Ia);
          if (std::isfinite(Ja) && std::isfinite(f.J(x)))
            worst_mono = std::max(worst_mono, Ja - f.J(x));
        }
        if (j <= m - 1) {
          double Ib = f_up.I(x), Jb = f_up.J(x);
          if (std::isfinite(Ib) && std::isfinite(f.I(x)))
            worst_mono = std::max(worst_mono, Ib - f.I(x));
          if (std::isfinite(Jb) && std::isfinite(f.J(x)))
            worst_mono = std::max(worst_mono, f.J(x) - Jb);
        }
      }
    }
  }
  return {make_report("increment recursions", worst_rec, 1e-9, {grids}, cfg.seed, start),
          make_report("weight recovery", worst_wrec, 1e-9, {grids}, cfg.seed, start),
          make_report("increment monotonicity", worst_mono, 1e-9, {grids}, cfg.seed,
                      start)};
}

std::vector<TestReport> det_induced_identity(const ExperimentConfig& cfg) {
  auto start = Clock::now();
  RngStream rng = RngStream(cfg.seed).fork(kTagInduced);
  int grids = scaled_n(cfg, 100, 20);
  const int m = 10;
  double worst = 0.0;
  for (int g = 0; g < grids; ++g) {
    RngStream r = rng.with_replica(g);
    WeightGrid w = sample_iid_exp1(GridBox{{1, 1}, {m, m}}, r);
    GridPoint y{1 + static_cast<int>(r.bits(2'000'001) % m),
                1 + static_cast<int>(r.bits(2'000'002) % m)};
    GridPoint z{y.col + static_cast<int>(r.bits(2'000'003) % (m - y.col + 1)),
                y.row + static_cast<int>(r.bits(2'000'004) % (m - y.row + 1))};
    WeightGrid induced = induced_weights(w, y, z);
    PassageField L_ind = passage_to(induced, y);
    PassageField L_w = passage_to(w, z);
    double L_yz = L_w.at(y);
    for (int i = 1; i <= y.col; ++i)
      for (int j = 1; j <= y.row; ++j)
        worst = std::max(worst, std::abs(L_ind.at({i, j}) -
                                         (L_w.at({i, j}) - L_yz)));
  }
  return {make_report("induced-weight identity", worst, 1e-9, {grids}, cfg.seed,
                      start)};
}

namespace {

// All passage times from row 1 to row 2 of a strip via prefix sums; an
// algebraic route independent of the coupling code.
std::vector<double> strip_passage_all_pairs(const TwoRowStrip& strip) {
  int n = strip.length();
  std::vector<double> ps(n + 1, 0.0), pa(n + 1, 0.0);
  for (int t = 0; t < n; ++t) {
    ps[t + 1] = ps[t] + strip.service[t];
    pa[t + 1] = pa[t] + strip.arrivals[t];
  }
  std::vector<double> L(static_cast<std::size_t>(n) * n, kNegInf);
  for (int i = 0; i < n; ++i) {
    double best = kNegInf;
    for (int j = i; j < n; ++j) {
      best = std::max(best, ps[j + 1] - ps[i] - pa[j]);
      L[static_cast<std::size_t>(i) * n + j] = best + pa[j + 1];
    }
  }
  return L;
}

}  // namespace

std::vector<TestReport> det_two_row_swap(const ExperimentConfig& cfg) {
  auto start = Clock::now();
  RngStream rng = RngStream(cfg.seed).fork(kTagSwap);
  int strips = scaled_n(cfg, 1000, 100);
  const int n = 64;
  double worst_L = 0.0, worst_sum = 0.0;
  bool minimizer_ok = true;
  for (int g = 0; g < strips; ++g) {
    RngStream r = rng.with_replica(g);
    TwoRowStrip strip;
    strip.col_lo = 1;
    strip.service.resize(n);
    strip.arrivals.resize(n);
    for (int t = 0; t < n; ++t) {
      strip.service[t] = r.exponential(1.0, RngStream::cell_key(t + 1, 1));
      strip.arrivals[t] = r.exponential(1.5, RngStream::cell_key(t + 1, 2));
    }
    TwoRowStrip swapped = two_row_swap(strip);
    std::vector<double> before = strip_passage_all_pairs(strip);
    std::vector<double> after = strip_passage_all_pairs(swapped);
    for (std::size_t idx = 0; idx < before.size(); ++idx)
      if (std::isfinite(before[idx]))
        worst_L = std::max(worst_L, std::abs(before[idx] - after[idx]));
    for (int t = 0; t < n; ++t)
      worst_sum = std::max(worst_sum,
                           std::abs((swapped.service[t] + swapped.arrivals[t]) -
                                    (strip.service[t] + strip.arrivals[t])));
    UnusedService us = unused_service(strip);
    int x0 = -1;
    for (int t = 0; t < n; ++t)
      if (us.U[t] > 0.0) {
        x0 = strip.col_lo + t;
        break;
      }
    if (x0 >= 0)
      for (int t = x0 + 1 - strip.col_lo; t < n; ++t)
        if (us.minimizer[t] < x0) minimizer_ok = false;
  }
  auto reports = std::vector<TestReport>{
      make_report("two-row swap preserves passage times", worst_L, 1e-9, {strips},
                  cfg.seed, start),
      make_report("two-row swap conserves column sums", worst_sum, 1e-9, {strips},
                  cfg.seed, start),
      make_report("window infimum attained past first positive column",
                  minimizer_ok ? 0.0 : 1.0, 0.5, {strips}, cfg.seed, start)};
  return reports;
}

std::vector<TestReport> burke_suite(const ExperimentConfig& cfg) {
  auto start = Clock::now();
  const double b1 = 1.0, b2 = 1.5;
  if (!(b2 > b1)) throw std::invalid_argument("queue coupling requires b2 > b1");
  int burn = cfg.burn_in;
  int replicas = scaled_n(cfg, 200000, 4000);
  RngStream rng = RngStream(cfg.seed).fork(kTagBurke);

  std::vector<double> Q(replicas), Z1(replicas), D1(replicas), Z2(replicas),
      D2(replicas);
  parallel_for(replicas, cfg.jobs, [&](std::int64_t g) {
    RngStream r = rng.with_replica(g);
    int len = burn + 2;
    TwoRowStrip strip;
    strip.col_lo = 1;
    strip.service.resize(len);
    strip.arrivals.resize(len);
    for (int t = 0; t < len; ++t) {
      strip.service[t] = r.exponential(b1, RngStream::cell_key(t + 1, 1));
      strip.arrivals[t] = r.exponential(b2, RngStream::cell_key(t + 1, 2));
    }
    QueueTrace trace = queue_trace(strip, 0.0);
    Q[g] = trace.Q[burn];
    Z1[g] = strip.arrivals[burn] + trace.U[burn];
    D1[g] = trace.D[burn];
    Z2[g] = strip.arrivals[burn + 1] + trace.U[burn + 1];
    D2[g] = trace.D[burn + 1];
  });

  double ks_thr = scaled_ks_threshold(0.006, 200000, replicas);
  std::vector<TestReport> reports;
  reports.push_back(ks_one_sample_exp({Q, 1}, b2 - b1, ks_thr,
                                      "queue length marginal vs Exp{b2-b1}"));
  reports.push_back(ks_one_sample_exp({Z1, 1}, b1, ks_thr,
                                      "output A+U marginal vs Exp{b1}"));
  reports.push_back(ks_one_sample_exp({D1, 1}, b2, ks_thr,
                                      "departure marginal vs Exp{b2}"));
  double corr = std::abs(pearson_correlation(Z1, D1));
  corr = std::max(corr, std::abs(pearson_correlation(Z1, Z2)));
  corr = std::max(corr, std::abs(pearson_correlation(D1, D2)));
  corr = std::max(corr, std::abs(pearson_correlation(Z1, D2)));
  corr = std::max(corr, std::abs(pearson_correlation(D1, Z2)));
  double corr_thr =
      replicas >= 200000 ? 0.01 : 0.01 * std::sqrt(200000.0 / replicas);
  reports.push_back(make_report("output lag-1 and cross correlations", corr,
                                corr_thr, {replicas}, cfg.seed, start));
  stamp(reports, cfg.seed, start);
  return reports;
}

std::vector<TestReport> busmar_d1_suite(const ExperimentConfig& cfg) {
  auto start = Clock::now();
  int replicas = scaled_n(cfg, 200000, 4000);
  double ks_thr = scaled_ks_threshold(0.006, 200000, replicas);
  std::vector<TestReport> reports;
  for (double r_dir : cfg.directions) {
    EtaSpec spec{2, 2, 1, {r_dir}};
    RngStream rng = RngStream(cfg.seed).fork(kTagD1 + static_cast<std::uint64_t>(
                                                          r_dir * 1000));
    std::vector<double> I_in(replicas), I_bd(replicas), J_in(replicas),
        J_bd(replicas);
    parallel_for(replicas, cfg.jobs, [&](std::int64_t g) {
      BusemannSample s = exact_busemann_sample(spec, rng.with_replica(g));
      I_in[g] = s.I_at({1, 1}, 1);
      I_bd[g] = s.I_at({1, 2}, 1);
      J_in[g] = s.J_at({1, 1}, 1);
      J_bd[g] = s.J_at({2, 1}, 1);
    });
    double zr = zeta(r_dir);
    char label[96];
    std::snprintf(label, sizeof(label), "d=1 r=%g ", r_dir);
    reports.push_back(ks_one_sample_exp({I_in, 1}, zr, ks_thr,
                                        std::string(label) + "interior I vs Exp{zeta}"));
    reports.push_back(ks_one_sample_exp({I_bd, 1}, zr, ks_thr,
                                        std::string(label) + "boundary I vs Exp{zeta}"));
    reports.push_back(ks_one_sample_exp({J_in, 1}, 1.0 - zr, ks_thr,
                                        std::string(label) + "interior J vs Exp{1-zeta}"));
    reports.push_back(ks_one_sample_exp({J_bd, 1}, 1.0 - zr, ks_thr,
                                        std::string(label) + "boundary J vs Exp{1-zeta}"));
  }
  stamp(reports, cfg.seed, start);
  return reports;
}

std::vector<TestReport> busmar_prelimit_suite(const ExperimentConfig& cfg) {
  auto start = Clock::now();
  int k = cfg.k, ell = cfg.ell, d = cfg.d;
  EtaSpec spec{k, ell, d, cfg.directions};
  spec.validate();
  int replicas = scaled_n(cfg, cfg.replicas, 400);
  std::vector<int> heights = cfg.heights;
  if (cfg.quick)
    for (int& h : heights) h = std::max(32, h / 4);

  // Component layout: all I edges then all J edges, per direction.
  int n_I = (k - 1) * ell, n_J = k * (ell - 1);
  int comps = (n_I + n_J) * d;
  auto component_name = [&](int c) {
    int per_dir = n_I + n_J;
    int p = c / per_dir + 1;
    int e = c % per_dir;
    char buf[64];
    if (e < n_I)
      std::snprintf(buf, sizeof(buf), "I(%d,%d) dir %d", e % (k - 1) + 1,
                    e / (k - 1) + 1, p);
    else {
      e -= n_I;
      std::snprintf(buf, sizeof(buf), "J(%d,%d) dir %d", e % k + 1, e / k + 1, p);
    }
    return std::string(buf);
  };

  RngStream exact_rng = RngStream(cfg.seed).fork(kTagExact);
  std::vector<std::vector<double>> exact(comps, std::vector<double>(replicas));
  parallel_for(replicas, cfg.jobs, [&](std::int64_t g) {
    BusemannSample s = exact_busemann_sample(spec, exact_rng.with_replica(g));
    int c = 0;
    for (int p = 1; p <= d; ++p) {
      for (int j = 1; j <= ell; ++j)
        for (int i = 1; i < k; ++i) exact[c++][g] = s.I_at({i, j}, p);
      for (int j = 1; j < ell; ++j)
        for (int i = 1; i <= k; ++i) exact[c++][g] = s.J_at({i, j}, p);
    }
  });

  // One nested environment per replica: the same (seed, replica, cell) keys
  // serve every height, so convergence is monitored along a single
  // realization.
  RngStream pre_rng = RngStream(cfg.seed).fork(kTagPrelimit);
  std::vector<std::vector<std::vector<double>>> pre(
      heights.size(),
      std::vector<std::vector<double>>(comps, std::vector<double>(replicas)));
  for (std::size_t h = 0; h < heights.size(); ++h) {
    parallel_for(replicas, cfg.jobs, [&](std::int64_t g) {
      PrelimitSample s = prelimit_busemann_sample(k, ell, cfg.directions,
                                                  heights[h], pre_rng.with_replica(g));
      int c = 0;
      for (int p = 1; p <= d; ++p) {
        for (int j = 1; j <= ell; ++j)
          for (int i = 1; i < k; ++i) pre[h][c++][g] = s.I_at({i, j}, p);
        for (int j = 1; j < ell; ++j)
          for (int i = 1; i <= k; ++i) pre[h][c++][g] = s.J_at({i, j}, p);
      }
    });
  }

  double ks_thr = cfg.quick ? scaled_ks_threshold(0.03, 5000, replicas) : 0.03;
  double slack = cfg.quick ? scaled_ks_threshold(0.005, 5000, replicas) : 0.005;
  std::vector<TestReport> reports;
  for (int c = 0; c < comps; ++c) {
    std::vector<double> ks_by_height(heights.size());
    for (std::size_t h = 0; h < heights.size(); ++h)
      ks_by_height[h] = ks_statistic_two(pre[h][c], exact[c]);
    TestReport final_ks = ks_two_sample({pre.back()[c], 1}, {exact[c], 1}, ks_thr,
                                        "prelimit vs exact KS, " + component_name(c));
    reports.push_back(final_ks);
    double worst_increase = 0.0;
    for (std::size_t h = 1; h < heights.size(); ++h)
      worst_increase = std::max(worst_increase, ks_by_height[h] - ks_by_height[h - 1]);
    reports.push_back(make_report("KS trend across heights, " + component_name(c),
                                  worst_increase, slack, {replicas}, cfg.seed, start));
  }

  int n_energy = std::min(2000, replicas);
  Sample joint_pre{{}, comps}, joint_exact{{}, comps};
  joint_pre.values.reserve(static_cast<std::size_t>(n_energy) * comps);
  joint_exact.values.reserve(static_cast<std::size_t>(n_energy) * comps);
  for (int g = 0; g < n_energy; ++g)
    for (int c = 0; c < comps; ++c) {
      joint_pre.values.push_back(pre.back()[c][g]);
      joint_exact.values.push_back(exact[c][g]);
    }
  int perms = cfg.quick ? 399 : 1999;
  reports.push_back(energy_distance_test(joint_pre, joint_exact, perms,
                                         mix64(cfg.seed ^ 0xE17), 0.001, cfg.jobs,
                                         "joint prelimit vs exact energy distance"));
  stamp(reports, cfg.seed, start);
  return reports;
}

std::vector<TestReport> cdf_suite(const ExperimentConfig& cfg) {
  auto start = Clock::now();
  double r_lo = cfg.directions.front(), r_hi = cfg.directions.back();
  EtaSpec spec{2, 1, 2, {r_lo, r_hi}};
  int replicas = scaled_n(cfg, 10000, 500);
  RngStream rng = RngStream(cfg.seed).fork(kTagCdf);
  std::vector<double> diffs(replicas);
  parallel_for(replicas, cfg.jobs, [&](std::int64_t g) {
    BusemannSample s = exact_busemann_sample(spec, rng.with_replica(g));
    diffs[g] = s.I_at({1, 1}, 1) - s.I_at({1, 1}, 2);
  });
  double atom_mass = zeta(r_lo) / zeta(r_hi);
  double scale = replicas >= 10000 ? 1.0 : 2.0 * std::sqrt(10000.0 / replicas);
  std::vector<TestReport> reports;
  reports.push_back(atom_tail_test({diffs, 1}, atom_mass, zeta(r_lo),
                                   0.02 * scale, 0.02 * scale,
                                   "increment difference atom+tail law"));
  double x_probe = 1.0;
  double expect = increment_cdf_complement(r_lo, r_hi, x_probe);
  std::size_t above = 0;
  for (double v : diffs)
    if (v >= x_probe) ++above;
  double frac = static_cast<double>(above) / replicas;
  reports.push_back(make_report("complement CDF at x=1 matches closed form",
                                std::abs(frac - expect), 0.02 * scale, {replicas},
                                cfg.seed, start));
  stamp(reports, cfg.seed, start);
  return reports;
}

std::vector<TestReport> independence_suite(const ExperimentConfig& cfg) {
  auto start = Clock::now();
  EtaSpec spec{2, 1, 3, {1.0, 2.0, 4.0}};
  int replicas = scaled_n(cfg, 2000, 300);
  int perms = cfg.quick ? 399 : 1999;
  RngStream rng = RngStream(cfg.seed).fork(kTagIndep);
  std::vector<double> x1(replicas), x2(replicas), x3(replicas);
  parallel_for(replicas, cfg.jobs, [&](std::int64_t g) {
    BusemannSample s = exact_busemann_sample(spec, rng.with_replica(g));
    double i1 = s.I_at({1, 1}, 1), i2 = s.I_at({1, 1}, 2), i3 = s.I_at({1, 1}, 3);
    x1[g] = i1 - i2;
    x2[g] = i2 - i3;
    x3[g] = i3;
  });
  std::vector<TestReport> reports;
  reports.push_back(independence_test({x1, 1}, {x2, 1}, perms, mix64(cfg.seed ^ 0x91),
                                      0.001, cfg.jobs,
                                      "increment diffs 1-2 vs 2-3 independent"));
  reports.push_back(independence_test({x1, 1}, {x3, 1}, perms, mix64(cfg.seed ^ 0x92),
                                      0.001, cfg.jobs,
                                      "increment diff 1-2 vs top increment independent"));
  reports.push_back(independence_test({x2, 1}, {x3, 1}, perms, mix64(cfg.seed ^ 0x93),
                                      0.001, cfg.jobs,
                                      "increment diff 2-3 vs top increment independent"));

  // Boundary independence for a single direction: an I on the north row and
  // a J on the east column are separate environment cells.
  EtaSpec spec1{3, 2, 1, {2.0}};
  std::vector<double> bi(replicas), bj(replicas);
  RngStream rng1 = rng.fork(77);
  parallel_for(replicas, cfg.jobs, [&](std::int64_t g) {
    BusemannSample s = exact_busemann_sample(spec1, rng1.with_replica(g));
    bi[g] = s.I_at({1, 2}, 1);
    bj[g] = s.J_at({3, 1}, 1);
  });
  reports.push_back(independence_test({bi, 1}, {bj, 1}, perms, mix64(cfg.seed ^ 0x94),
                                      0.001, cfg.jobs,
                                      "d=1 boundary I vs J independent"));
  stamp(reports, cfg.seed, start);
  return reports;
}

std::vector<TestReport> shen_suite(const ExperimentConfig& cfg) {
  auto start = Clock::now();
  // Directions s = (4, 4, 1) at consecutive first-row vertices; two distinct
  // values, so d = 2 with k = 4, ell = 1.
  EtaSpec spec{4, 1, 2, {1.0, 4.0}};
  int replicas = scaled_n(cfg, 2000, 300);
  int perms = cfg.quick ? 399 : 1999;
  RngStream rng = RngStream(cfg.seed).fork(kTagShen);
  std::vector<double> x1(replicas), x2(replicas), x3(replicas);
  parallel_for(replicas, cfg.jobs, [&](std::int64_t g) {
    BusemannSample s = exact_busemann_sample(spec, rng.with_replica(g));
    x1[g] = s.I_at({1, 1}, 2);  // direction 4
    x2[g] = s.I_at({2, 1}, 2);  // direction 4
    x3[g] = s.I_at({3, 1}, 1);  // direction 1
  });
  std::vector<TestReport> reports;
  reports.push_back(independence_test({x1, 1}, {x2, 1}, perms, mix64(cfg.seed ^ 0xA1),
                                      0.001, cfg.jobs, "shen pair (1,1)-(2,1)"));
  reports.push_back(independence_test({x1, 1}, {x3, 1}, perms, mix64(cfg.seed ^ 0xA2),
                                      0.001, cfg.jobs, "shen pair (1,1)-(3,1)"));
  reports.push_back(independence_test({x2, 1}, {x3, 1}, perms, mix64(cfg.seed ^ 0xA3),
                                      0.001, cfg.jobs, "shen pair (2,1)-(3,1)"));
  stamp(reports, cfg.seed, start);
  return reports;
}

std::vector<TestReport> invariance_deterministic(const ExperimentConfig& cfg) {
  auto start = Clock::now();
  RngStream rng = RngStream(cfg.seed).fork(kTagInvDet);
  int grids = scaled_n(cfg, 200, 40);
  const int m = 10;
  double worst = 0.0;
  int pairs_checked = 0;
  for (int g = 0; g < grids; ++g) {
    RngStream r = rng.with_replica(g);
    RateProfile profile;
    profile.a.resize(m);
    profile.b.resize(m);
    for (int i = 0; i < m; ++i) {
      profile.a[i] = -0.3 + 0.7 * r.uniform(RngStream::cell_key(i + 1, 900));
      profile.b[i] = 0.7 + 0.6 * r.uniform(RngStream::cell_key(i + 1, 901));
    }
    WeightGrid w = sample_inhomogeneous(profile, GridBox{{1, 1}, {m, m}}, r);

    int c1 = 2 + static_cast<int>(r.bits(3'000'001) % 4);       // 2..5
    int c2 = c1 + 1 + static_cast<int>(r.bits(3'000'002) % 3);  // c1+1..c1+3
    FinitePermutation sigma = FinitePermutation::transposition(c1, c2);
    FinitePermutation tau;
    int r1 = 2 + static_cast<int>(r.bits(3'000'003) % 4);
    int r2 = r1 + 1 + static_cast<int>(r.bits(3'000'004) % 3);
    if (g % 2 == 0) {
      tau = FinitePermutation::transposition(r1, r2);
    } else {
      // 3-cycle on consecutive rows to exercise longer decompositions
      tau = FinitePermutation::from_window(r1, {r1 + 1, r1 + 2, r1});
    }

    std::vector<EndpointPair> candidates;
    const GridPoint xs[] = {{1, 1}, {2, 2}, {1, 3}, {2, 1}, {1, 2}};
    const GridPoint ys[] = {{10, 10}, {9, 9}, {10, 8}, {8, 10}, {9, 10}};
    for (GridPoint x : xs)
      for (GridPoint y : ys)
        if (leq(x, y)) candidates.emplace_back(x, y);
    std::vector<EndpointPair> protected_pairs;
    for (const EndpointPair& pair : candidates)
      if (is_admissible(sigma, tau, pair)) protected_pairs.push_back(pair);

    WeightGrid permuted = permute_column_rates(w, sigma, protected_pairs);
    permuted = permute_row_rates(permuted, tau, protected_pairs);
    for (const EndpointPair& pair : protected_pairs) {
      worst = std::max(worst, std::abs(last_passage(w, pair.x, pair.y) -
                                       last_passage(permuted, pair.x, pair.y)));
      ++pairs_checked;
    }
  }
  return {make_report("coupled permutation preserves protected passage times",
                      worst, 1e-9, {grids, pairs_checked}, cfg.seed, start)};
}

std::vector<TestReport> invariance_distributional(const ExperimentConfig& cfg) {
  auto start = Clock::now();
  const int m = 8;
  RateProfile base;
  base.a = {0.0, 0.15, -0.2, 0.3, 0.05, -0.1, 0.2, 0.1};
  base.b = std::vector<double>(m, 1.0);
  FinitePermutation sigma = FinitePermutation::transposition(3, 6);
  RateProfile swapped = base;
  for (int i = 1; i <= m; ++i) swapped.a[i - 1] = base.a[sigma(i) - 1];

  std::vector<EndpointPair> pairs{{{1, 1}, {8, 8}}, {{2, 2}, {7, 7}},
                                  {{3, 1}, {6, 8}}, {{1, 4}, {8, 6}},
                                  {{2, 3}, {6, 4}}, {{3, 5}, {7, 8}}};
  for (const EndpointPair& pair : pairs)
    if (!is_admissible(sigma, FinitePermutation(), pair))
      throw std::logic_error("invariance pair not admissible");

  int replicas = scaled_n(cfg, 2000, 300);
  int perms = cfg.quick ? 399 : 1999;
  GridBox box{{1, 1}, {m, m}};
  auto collect = [&](const RateProfile& profile, std::uint64_t tag) {
    RngStream rng = RngStream(cfg.seed).fork(tag);
    Sample joint{{}, static_cast<int>(pairs.size())};
    joint.values.resize(static_cast<std::size_t>(replicas) * pairs.size());
    parallel_for(replicas, cfg.jobs, [&](std::int64_t g) {
      WeightGrid w = sample_inhomogeneous(profile, box, rng.with_replica(g));
      for (std::size_t q = 0; q < pairs.size(); ++q)
        joint.values[static_cast<std::size_t>(g) * pairs.size() + q] =
            last_passage(w, pairs[q].x, pairs[q].y);
    });
    return joint;
  };
  Sample a_side = collect(base, kTagInvFreshA);
  Sample b_side = collect(swapped, kTagInvFreshB);
  std::vector<TestReport> reports;
  reports.push_back(energy_distance_test(a_side, b_side, perms,
                                         mix64(cfg.seed ^ 0xB7), 0.001, cfg.jobs,
                                         "column swap leaves admissible joint law"));
  stamp(reports, cfg.seed, start);
  return reports;
}

std::vector<TestReport> thin_suite(const ExperimentConfig& cfg) {
  auto start = Clock::now();
  std::vector<TestReport> reports;

  {  // Thin limits collapse to the recurrence column, sample by sample.
    // Strict gaps between the column rates keep the prelimit plateaus short
    // enough for the doubling certificate.
    RateProfile profile;
    profile.a = {0.0, -0.4, -0.1, -0.5};
    profile.b = {1.0};
    int i = 1, k = 3;
    int m = recurrence_index(profile.a, i, k);
    int replicas = scaled_n(cfg, 200, 40);
    RngStream rng = RngStream(cfg.seed).fork(kTagThinEq);
    std::vector<double> diff(replicas, 0.0);
    std::vector<int> converged(replicas, 0);
    parallel_for(replicas, cfg.jobs, [&](std::int64_t g) {
      RngStream r = rng.with_replica(g);
      ThinBusemannResult full = thin_busemann(profile, {i, 1}, ThinAxis::up, k,
                                              ThinKind::horizontal, 8192, r);
      ThinBusemannResult rec = thin_busemann(profile, {i, 1}, ThinAxis::up, m,
                                             ThinKind::horizontal, 8192, r);
      if (full.converged && rec.converged) {
        converged[g] = 1;
        diff[g] = std::abs(full.value - rec.value);
      }
    });
    int conv = std::accumulate(converged.begin(), converged.end(), 0);
    double worst = *std::max_element(diff.begin(), diff.end());
    reports.push_back(make_report("thin limit equals recurrence-column limit",
                                  worst, 1e-9, {replicas, conv}, cfg.seed, start));
    reports.push_back(make_report("thin limit convergence fraction",
                                  1.0 - static_cast<double>(conv) / replicas, 0.1,
                                  {replicas}, cfg.seed, start));
  }

  {  // Marginal of the thin limit for a two-step column profile.
    RateProfile profile;
    profile.a = {0.0, 0.0, -0.4};
    profile.b = {1.0};
    int replicas = scaled_n(cfg, 10000, 500);
    RngStream rng = RngStream(cfg.seed).fork(kTagThinMarginal);
    std::vector<double> values(replicas);
    parallel_for(replicas, cfg.jobs, [&](std::int64_t g) {
      ThinBusemannResult res = thin_busemann(profile, {1, 1}, ThinAxis::up, 3,
                                             ThinKind::horizontal, 8192,
                                             rng.with_replica(g));
      values[g] = res.value;
    });
    double rate = profile.a[0] - *std::min_element(profile.a.begin(), profile.a.end());
    double thr = replicas >= 10000 ? 0.01 : scaled_ks_threshold(0.01, 10000, replicas);
    reports.push_back(ks_one_sample_exp({values, 1}, rate, thr,
                                        "thin limit marginal vs Exp{a_i - min a}"));
  }
  stamp(reports, cfg.seed, start);
  return reports;
}

std::vector<TestReport> lln_suite(const ExperimentConfig& cfg) {
  auto start = Clock::now();
  RateProfile profile;
  profile.a = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -0.5};
  profile.b = {1.0};
  const int m = 8;
  int n = cfg.quick ? 1000 : 4000;
  double min_a = *std::min_element(profile.a.begin(), profile.a.end());
  double slope = lln_slope_vertical(FiniteMeasure::point(1.0), min_a);

  std::vector<TestReport> reports;
  {
    RngStream rng = RngStream(cfg.seed).fork(kTagLln);
    WeightGrid w = sample_inhomogeneous(profile, GridBox{{1, 1}, {m, n}},
                                        rng.with_replica(0));
    double ratio = last_passage(w, {1, 1}, {m, n}) / n;
    reports.push_back(make_report("vertical LLN slope matches B(-min a)",
                                  std::abs(ratio - slope) / slope, 0.05, {n},
                                  cfg.seed, start));
  }
  {
    int replicas = scaled_n(cfg, 500, 50);
    RngStream rng = RngStream(cfg.seed).fork(kTagPinning);
    std::vector<int> pinned(replicas, 0);
    parallel_for(replicas, cfg.jobs, [&](std::int64_t g) {
      WeightGrid w = sample_inhomogeneous(profile, GridBox{{1, 1}, {m, n}},
                                          rng.with_replica(g));
      auto path = geodesic(w, {1, 1}, {m, n});
      for (const GridPoint& p : path)
        if (p == GridPoint{m, n - 1}) {
          pinned[g] = 1;
          break;
        }
    });
    double freq = std::accumulate(pinned.begin(), pinned.end(), 0) /
                  static_cast<double>(replicas);
    reports.push_back(make_report("geodesic pinned to the favored column",
                                  1.0 - freq, 0.01, {replicas}, cfg.seed, start));
  }
  stamp(reports, cfg.seed, start);
  return reports;
}

const std::vector<std::string> kSuiteNames = {
    "deterministic", "busmar", "invariance", "burke", "cdf",
    "independence",  "shen",   "thin",       "lln",   "all"};

void ExperimentConfig::validate() const {
  if (std::find(kSuiteNames.begin(), kSuiteNames.end(), suite) == kSuiteNames.end())
    throw std::invalid_argument("unknown suite: " + suite);
  if (k < 1 || ell < 1 || d < 1)
    throw std::invalid_argument("k, ell, d must be positive");
  if (replicas < 1) throw std::invalid_argument("replicas must be positive");
  if (burn_in < 1) throw std::invalid_argument("burn-in must be positive");
  double prev = 0.0;
  for (double r : directions) {
    if (!(r > prev)) throw std::invalid_argument("directions must be strictly increasing");
    prev = r;
  }
  int prev_h = 0;
  for (int h : heights) {
    if (h <= prev_h) throw std::invalid_argument("heights must be strictly increasing");
    prev_h = h;
  }
  if (format != "json" && format != "csv")
    throw std::invalid_argument("format must be json or csv");
}

nlohmann::json ExperimentConfig::to_json() const {
  return nlohmann::json{{"suite", suite},       {"k", k},
                        {"l", ell},             {"d", d},
                        {"r", directions},      {"heights", heights},
                        {"replicas", replicas}, {"seed", seed},
                        {"burn_in", burn_in},   {"out", out},
                        {"format", format},     {"jobs", jobs},
                        {"quick", quick}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("suite")) cfg.suite = j.at("suite").get<std::string>();
  if (j.contains("k")) cfg.k = j.at("k").get<int>();
  if (j.contains("l")) cfg.ell = j.at("l").get<int>();
  if (j.contains("d")) cfg.d = j.at("d").get<int>();
  if (j.contains("r")) cfg.directions = j.at("r").get<std::vector<double>>();
  if (j.contains("heights")) cfg.heights = j.at("heights").get<std::vector<int>>();
  if (j.contains("replicas")) cfg.replicas = j.at("replicas").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("burn_in")) cfg.burn_in = j.at("burn_in").get<int>();
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
  if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
  if (j.contains("quick")) cfg.quick = j.at("quick").get<bool>();
  return cfg;
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json cases_json = nlohmann::json::array();
  for (const TestReport& c : cases) cases_json.push_back(c.to_json());
  return nlohmann::json{{"suite", suite},
                        {"config", config.to_json()},
                        {"cases", cases_json},
                        {"pass", pass},
                        {"wall_ms", wall_ms}};
}

std::string SuiteReport::to_csv() const {
  std::ostringstream os;
  os << "name,statistic,threshold,p_value,pass,n,seed,runtime_ms\n";
  for (const TestReport& c : cases) {
    os << '"' << c.name << "\"," << c.statistic << ',' << c.threshold << ',';
    if (c.p_value)
      os << *c.p_value;
    os << ',' << (c.pass ? 1 : 0) << ",\"";
    for (std::size_t i = 0; i < c.n.size(); ++i) os << (i ? ";" : "") << c.n[i];
    os << "\"," << c.seed << ',' << c.runtime_ms << '\n';
  }
  return os.str();
}

SuiteReport run_suite(const ExperimentConfig& cfg) {
  cfg.validate();
  auto start = Clock::now();
  SuiteReport report;
  report.suite = cfg.suite;
  report.config = cfg;

  auto append = [&](std::vector<TestReport> reports) {
    for (TestReport& r : reports) report.cases.push_back(std::move(r));
  };
  auto want = [&](const char* name) {
    return cfg.suite == "all" || cfg.suite == name;
  };

  if (want("deterministic")) {
    append(det_brute_force(cfg));
    append(det_increment_algebra(cfg));
    append(det_induced_identity(cfg));
    append(det_two_row_swap(cfg));
  }
  if (want("burke")) append(burke_suite(cfg));
  if (want("busmar")) {
    append(busmar_d1_suite(cfg));
    append(busmar_prelimit_suite(cfg));
  }
  if (want("cdf")) append(cdf_suite(cfg));
  if (want("independence")) append(independence_suite(cfg));
  if (want("shen")) append(shen_suite(cfg));
  if (want("invariance")) {
    append(invariance_deterministic(cfg));
    append(invariance_distributional(cfg));
  }
  if (want("thin")) append(thin_suite(cfg));
  if (want("lln")) append(lln_suite(cfg));

  report.pass = true;
  for (const TestReport& c : report.cases) report.pass = report.pass && c.pass;
  report.wall_ms = ms_since(start);

  if (!cfg.out.empty()) {
    std::ofstream os(cfg.out);
    if (!os) throw std::runtime_error("cannot write report to " + cfg.out);
    if (cfg.format == "json")
      os << report.to_json().dump(2) << '\n';
    else
      os << report.to_csv();
  }
  return report;
}

void sample_export(const ExperimentConfig& cfg, const std::string& kind,
                   bool with_histogram) {
  cfg.validate();
  if (cfg.out.empty()) throw std::invalid_argument("export requires an output path");
  if (kind != "exact" && kind != "prelimit")
    throw std::invalid_argument("export kind must be exact or prelimit");

  EtaSpec spec{cfg.k, cfg.ell, cfg.d, cfg.directions};
  spec.validate();
  int replicas = cfg.replicas;
  RngStream rng = RngStream(cfg.seed).fork(kTagExport);

  std::vector<std::string> headers;
  for (int p = 1; p <= cfg.d; ++p) {
    for (int j = 1; j <= cfg.ell; ++j)
      for (int i = 1; i < cfg.k; ++i)
        headers.push_back("I_c" + std::to_string(i) + "r" + std::to_string(j) +
                          "_p" + std::to_string(p));
    for (int j = 1; j < cfg.ell; ++j)
      for (int i = 1; i <= cfg.k; ++i)
        headers.push_back("J_c" + std::to_string(i) + "r" + std::to_string(j) +
                          "_p" + std::to_string(p));
  }
  int comps = static_cast<int>(headers.size());
  if (comps == 0) throw std::invalid_argument("empty edge sets for the export grid");

  std::vector<std::vector<double>> columns(comps, std::vector<double>(replicas));
  int n_prelimit = cfg.heights.empty() ? 512 : cfg.heights.back();
  parallel_for(replicas, cfg.jobs, [&](std::int64_t g) {
    int c = 0;
    if (kind == "exact") {
      BusemannSample s = exact_busemann_sample(spec, rng.with_replica(g));
      for (int p = 1; p <= cfg.d; ++p) {
        for (int j = 1; j <= cfg.ell; ++j)
          for (int i = 1; i < cfg.k; ++i) columns[c++][g] = s.I_at({i, j}, p);
        for (int j = 1; j < cfg.ell; ++j)
          for (int i = 1; i <= cfg.k; ++i) columns[c++][g] = s.J_at({i, j}, p);
      }
    } else {
      PrelimitSample s = prelimit_busemann_sample(cfg.k, cfg.ell, cfg.directions,
                                                  n_prelimit, rng.with_replica(g));
      for (int p = 1; p <= cfg.d; ++p) {
        for (int j = 1; j <= cfg.ell; ++j)
          for (int i = 1; i < cfg.k; ++i) columns[c++][g] = s.I_at({i, j}, p);
        for (int j = 1; j < cfg.ell; ++j)
          for (int i = 1; i <= cfg.k; ++i) columns[c++][g] = s.J_at({i, j}, p);
      }
    }
  });

  std::ofstream os(cfg.out);
  if (!os) throw std::runtime_error("cannot write samples to " + cfg.out);
  os << "replica";
  for (const std::string& h : headers) os << ',' << h;
  os << '\n';
  char buf[40];
  for (int g = 0; g < replicas; ++g) {
    os << g;
    for (int c = 0; c < comps; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", columns[c][g]);
      os << ',' << buf;
    }
    os << '\n';
  }

  if (with_histogram) {
    std::ofstream hs(cfg.out + ".hist.csv");
    if (!hs) throw std::runtime_error("cannot write histogram side file");
    hs << "column,bin_lo,bin_hi,count\n";
    const int bins = 64;
    for (int c = 0; c < comps; ++c) {
      std::vector<double> sorted = columns[c];
      std::sort(sorted.begin(), sorted.end());
      double q99 = sorted[static_cast<std::size_t>(0.99 * (sorted.size() - 1))];
      if (q99 <= 0.0) q99 = sorted.back() > 0.0 ? sorted.back() : 1.0;
      std::vector<int> counts(bins, 0);
      for (double v : columns[c]) {
        if (v < 0.0 || v > q99) continue;
        int b = std::min(bins - 1, static_cast<int>(v / q99 * bins));
        ++counts[b];
      }
      for (int b = 0; b < bins; ++b) {
        std::snprintf(buf, sizeof(buf), "%.17g", q99 * b / bins);
        hs << headers[c] << ',' << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", q99 * (b + 1) / bins);
        hs << buf << ',' << counts[b] << '\n';
      }
    }
  }
}

}  // namespace lpplab

#include <cmath>

#include "doctest.h"

#include "lpplab/busemann.hpp"
#include "lpplab/environments.hpp"
#include "lpplab/rng.hpp"
#include "lpplab/stats.hpp"

using namespace lpplab;

TEST_CASE("iid sampler determinism and law") {
  GridBox box{{1, 1}, {500, 400}};  // 2e5 cells
  RngStream rng(201);
  WeightGrid a = sample_iid_exp1(box, rng);
  WeightGrid b = sample_iid_exp1(box, rng);
  CHECK(a.values() == b.values());  // bit-identical

  CHECK(ks_statistic_exp(a.values(), 1.0) < 0.006);

  WeightGrid big = sample_iid_exp1(GridBox{{1, 1}, {1000, 1000}}, rng.fork(9));
  double mean = 0.0;
  for (double v : big.values()) mean += v;
  mean /= static_cast<double>(big.values().size());
  CHECK(std::abs(mean - 1.0) < 0.01);
}

TEST_CASE("grid extension keeps existing draws") {
  RngStream rng(202);
  WeightGrid small = sample_iid_exp1(GridBox{{1, 1}, {4, 4}}, rng);
  WeightGrid large = sample_iid_exp1(GridBox{{1, 1}, {8, 9}}, rng);
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) CHECK(small.at(i, j) == large.at(i, j));
}

TEST_CASE("inhomogeneous sampler") {
  RngStream rng(203);
  RateProfile unit{{0.0}, {1.0}};
  GridBox box{{1, 1}, {10, 10}};
  // Rate 1 everywhere reproduces the iid sampler draw for draw.
  CHECK(sample_inhomogeneous(unit, box, rng).values() ==
        sample_iid_exp1(box, rng).values());

  RateProfile two_col{{0.0, -0.5}, {1.0, 1.0}};
  GridBox tall{{1, 1}, {2, 100000}};
  WeightGrid w = sample_inhomogeneous(two_col, tall, rng);
  double mean2 = 0.0;
  for (int j = 1; j <= 100000; ++j) mean2 += w.at(2, j);
  mean2 /= 100000.0;
  CHECK(std::abs(mean2 - 2.0) / 2.0 < 0.02);

  RateProfile bad{{-1.0}, {1.0}};
  CHECK_THROWS_AS(sample_inhomogeneous(bad, box, rng), std::invalid_argument);
}

TEST_CASE("eta rates reproduce the two-direction corner example") {
  EtaSpec spec{2, 2, 2, {1.0, 4.0}};
  RateProfile p = build_eta_rates(spec);
  double z1 = zeta(1.0), z2 = zeta(4.0);
  CHECK(p.rate_at(1, 2) == doctest::Approx(z2));
  CHECK(p.rate_at(1, 3) == doctest::Approx(z1));
  CHECK(p.rate_at(2, 1) == doctest::Approx(1.0 - z1));
  CHECK(p.rate_at(3, 1) == doctest::Approx(1.0 - z2));
  CHECK(p.rate_at(2, 2) == doctest::Approx(z2 - z1));
  CHECK(p.rate_at(2, 3) == 0.0);
  CHECK(p.rate_at(3, 2) == 0.0);
  CHECK(p.rate_at(3, 3) < 0.0);
}

TEST_CASE("eta rates collapse for one direction") {
  EtaSpec spec{4, 3, 1, {2.0}};
  RateProfile p = build_eta_rates(spec);
  for (int i = 1; i < 4; ++i) CHECK(p.a[i - 1] == 0.0);
  CHECK(p.a[3] == doctest::Approx(-zeta(2.0)));
  for (int j = 1; j < 3; ++j) CHECK(p.b[j - 1] == 1.0);
  CHECK(p.b[2] == doctest::Approx(zeta(2.0)));
}

TEST_CASE("eta zero region matches the rate sign exactly") {
  EtaSpec spec{3, 2, 3, {0.5, 1.5, 5.0}};
  RateProfile p = build_eta_rates(spec);
  GridBox box = spec.grid();
  for (int i = 1; i <= box.hi.col; ++i)
    for (int j = 1; j <= box.hi.row; ++j)
      CHECK(eta_zero_cell(spec, i, j) == !(p.rate_at(i, j) > 0.0));
}

TEST_CASE("eta sample has zero corners and nonnegative weights") {
  EtaSpec spec{2, 2, 2, {1.0, 4.0}};
  RngStream rng(204);
  WeightGrid eta = sample_eta(spec, rng);
  CHECK(eta.at(2, 3) == 0.0);
  CHECK(eta.at(3, 2) == 0.0);
  CHECK(eta.at(3, 3) == 0.0);
  for (double v : eta.values()) {
    CHECK(v >= 0.0);
    CHECK(std::isfinite(v));
  }
}

TEST_CASE("eta spec validation") {
  EtaSpec decreasing{2, 2, 2, {4.0, 1.0}};
  CHECK_THROWS_AS(decreasing.validate(), std::invalid_argument);
  EtaSpec zero_k{0, 2, 1, {1.0}};
  CHECK_THROWS_AS(zero_k.validate(), std::invalid_argument);
  EtaSpec negative{2, 2, 1, {-1.0}};
  CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
  EtaSpec good{2, 2, 2, {1.0, 4.0}};
  CHECK_NOTHROW(good.validate());
}

TEST_CASE("column and row modified environments") {
  GridBox box{{1, 1}, {2, 100000}};
  RngStream rng(205);
  // Single modified column at direction 1: rate 1/2, mean 2.
  WeightGrid w = sample_column_modified({2}, {1.0}, box, rng);
  double mean = 0.0;
  for (int j = 1; j <= 100000; ++j) mean += w.at(2, j);
  mean /= 100000.0;
  CHECK(std::abs(mean - 2.0) / 2.0 < 0.02);

  // Empty list falls back to iid draws.
  CHECK(sample_column_modified({}, {}, box, rng).values() ==
        sample_iid_exp1(box, rng).values());

  CHECK_THROWS_AS(sample_column_modified({3, 2}, {1.0, 2.0}, box, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_row_modified({2, 3}, {1.0, 2.0}, box, rng),
                  std::invalid_argument);
  CHECK_NOTHROW(sample_row_modified({3, 2}, {1.0, 2.0}, box, rng));
}

TEST_CASE("per-rate-class marginals at full size") {
  // One KS check per distinct rate class, each at the alpha=0.001 critical
  // value for N=2e5.
  const int n = 200000;
  double crit = 1.95 / std::sqrt(static_cast<double>(n));
  auto column_of = [](const WeightGrid& w, int col) {
    std::vector<double> out;
    out.reserve(w.box().height());
    for (int j = w.box().lo.row; j <= w.box().hi.row; ++j)
      out.push_back(w.at(col, j));
    return out;
  };

  GridBox tall{{1, 1}, {2, n}};
  RngStream rng(207);
  // Inhomogeneous class a_2 + b = 0.7.
  RateProfile profile{{0.0, -0.3}, {1.0}};
  WeightGrid inhom = sample_inhomogeneous(profile, tall, rng);
  CHECK(ks_statistic_exp(column_of(inhom, 2), 0.7) < crit);

  // Column-modified class 1 - zeta(2).
  WeightGrid col_mod = sample_column_modified({1}, {2.0}, tall, rng.fork(1));
  CHECK(ks_statistic_exp(column_of(col_mod, 1), 1.0 - zeta(2.0)) < crit);

  // Row-modified class zeta(2).
  WeightGrid row_mod =
      sample_row_modified({1}, {2.0}, GridBox{{1, 1}, {n, 1}}, rng.fork(2));
  CHECK(ks_statistic_exp(row_mod.values(), zeta(2.0)) < crit);

  // Interior eta class zeta(r2) - zeta(r1), one draw per replica.
  EtaSpec spec{2, 1, 2, {1.0, 4.0}};
  RngStream eta_rng = rng.fork(3);
  std::vector<double> interior(n);
  for (int g = 0; g < n; ++g)
    interior[g] = sample_eta(spec, eta_rng.with_replica(g)).at(2, 1);
  CHECK(ks_statistic_exp(interior, zeta(4.0) - zeta(1.0)) < crit);
}

TEST_CASE("rate profile and eta spec round-trip through json") {
  RateProfile profile{{0.0, -0.25}, {1.0, 0.5, 1.0}};
  nlohmann::json jp = profile;
  RateProfile back = jp.get<RateProfile>();
  CHECK(back.a == profile.a);
  CHECK(back.b == profile.b);

  EtaSpec spec{3, 2, 2, {1.0, 4.0}};
  nlohmann::json js = spec;
  EtaSpec spec_back = js.get<EtaSpec>();
  CHECK(spec_back.k == 3);
  CHECK(spec_back.ell == 2);
  CHECK(spec_back.d == 2);
  CHECK(spec_back.directions == spec.directions);
  // The flattened fields match the harness config schema keys.
  CHECK(js.contains("k"));
  CHECK(js.contains("l"));
  CHECK(js.contains("r"));
}

TEST_CASE("d=1 north boundary marginal") {
  // Boundary weights on row ell carry rate zeta(r).
  EtaSpec spec{2, 2, 1, {1.0}};
  RngStream rng(206);
  int n = 20000;
  std::vector<double> vals(n);
  for (int g = 0; g < n; ++g)
    vals[g] = sample_eta(spec, rng.with_replica(g)).at(1, 2);
  CHECK(ks_statistic_exp(vals, zeta(1.0)) < 1.95 / std::sqrt(n));
}

#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "oracle.hpp"

#include "lpplab/coupling.hpp"
#include "lpplab/environments.hpp"
#include "lpplab/lattice.hpp"
#include "lpplab/rng.hpp"

using namespace lpplab;

namespace {

TwoRowStrip make_strip(std::vector<double> row1, std::vector<double> row2) {
  TwoRowStrip s;
  s.col_lo = 1;
  s.service = std::move(row1);
  s.arrivals = std::move(row2);
  return s;
}

}  // namespace

TEST_CASE("diagonal differences") {
  CHECK(diag_diffs(make_strip({5, 1, 5}, {1, 1, 1})) ==
        std::vector<double>{0.0, 4.0});
  // Second row equal to the first shifted left: all differences vanish.
  CHECK(diag_diffs(make_strip({7, 3, 9}, {3, 9, 2})) ==
        std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(diag_diffs(make_strip({1}, {1})), std::invalid_argument);

  // Swapping rows and reversing columns negates and reverses c.
  RngStream rng(301);
  std::vector<double> r1(8), r2(8);
  for (int t = 0; t < 8; ++t) {
    r1[t] = rng.exponential(1.0, 2 * t);
    r2[t] = rng.exponential(1.0, 2 * t + 1);
  }
  auto c = diag_diffs(make_strip(r1, r2));
  std::vector<double> rr1(r2.rbegin(), r2.rend());
  std::vector<double> rr2(r1.rbegin(), r1.rend());
  auto cr = diag_diffs(make_strip(rr1, rr2));
  for (std::size_t t = 0; t < c.size(); ++t)
    CHECK(cr[t] == doctest::Approx(-c[c.size() - 1 - t]).epsilon(1e-12));
}

TEST_CASE("unused service") {
  UnusedService us = unused_service(make_strip({5, 1, 5}, {1, 1, 1}));
  CHECK(us.U == std::vector<double>{0.0, 0.0, 4.0});

  // All differences nonnegative: U is the smallest trailing sum.
  UnusedService inc = unused_service(make_strip({0, 1, 2}, {0, 0, 0}));
  CHECK(inc.U[0] == 0.0);  // window edge convention
  CHECK(inc.U[1] == doctest::Approx(1.0));
  CHECK(inc.U[2] == doctest::Approx(2.0));

  // Boundary flags clear once the minimizer moves past the guard margin.
  RngStream rng(302);
  std::vector<double> s(100), a(100);
  for (int t = 0; t < 100; ++t) {
    s[t] = rng.exponential(1.0, 2 * t);
    a[t] = rng.exponential(1.5, 2 * t + 1);
  }
  UnusedService big = unused_service(make_strip(s, a), 8);
  bool saw_clear = false;
  for (int t = 0; t < 100; ++t) {
    if (!big.boundary[t]) saw_clear = true;
    CHECK(big.boundary[t] == (big.minimizer[t] - 1 < 8));
  }
  CHECK(saw_clear);
}

TEST_CASE("two-row swap worked example") {
  TwoRowStrip strip = make_strip({5, 1, 5}, {1, 1, 1});
  TwoRowStrip swapped = two_row_swap(strip);
  CHECK(swapped.service == std::vector<double>{5.0, 1.0, 1.0});
  CHECK(swapped.arrivals == std::vector<double>{1.0, 1.0, 5.0});

  WeightGrid before = strip.to_grid();
  WeightGrid after = swapped.to_grid();
  CHECK(last_passage(before, {1, 1}, {3, 2}) == doctest::Approx(12.0));
  CHECK(last_passage(after, {1, 1}, {3, 2}) == doctest::Approx(12.0));
  CHECK(last_passage(before, {2, 1}, {3, 2}) == doctest::Approx(7.0));
  CHECK(last_passage(after, {2, 1}, {3, 2}) == doctest::Approx(7.0));
  for (int t = 0; t < 3; ++t)
    CHECK(swapped.service[t] + swapped.arrivals[t] ==
          doctest::Approx(strip.service[t] + strip.arrivals[t]));

  // Arrivals dominating keeps U at zero and the transform is the identity.
  TwoRowStrip idle = make_strip({1, 1, 1}, {5, 5, 5});
  TwoRowStrip same = two_row_swap(idle);
  CHECK(same.service == idle.service);
  CHECK(same.arrivals == idle.arrivals);
}

TEST_CASE("two-row swap preserves all passage times on random strips") {
  RngStream rng(303);
  for (int g = 0; g < 30; ++g) {
    RngStream r = rng.with_replica(g);
    int n = 12;
    std::vector<double> s(n), a(n);
    for (int t = 0; t < n; ++t) {
      s[t] = r.exponential(1.0, 2 * t);
      a[t] = r.exponential(1.5, 2 * t + 1);
    }
    TwoRowStrip strip = make_strip(s, a);
    WeightGrid before = strip.to_grid();
    WeightGrid after = two_row_swap(strip).to_grid();
    for (int i = 1; i <= n; ++i)
      for (int j = i; j <= n; ++j)
        CHECK(last_passage(before, {i, 1}, {j, 2}) ==
              doctest::Approx(last_passage(after, {i, 1}, {j, 2})).epsilon(1e-12));
  }
}

TEST_CASE("queue trace") {
  QueueTrace t = queue_trace(make_strip({2}, {1}), 0.0);
  CHECK(t.D[0] == 0.0);
  CHECK(t.U[0] == doctest::Approx(2.0));
  CHECK(t.Q[1] == doctest::Approx(1.0));

  // Balanced flow above saturation: constant queue, full service.
  QueueTrace flat = queue_trace(make_strip({3, 3, 3}, {3, 3, 3}), 10.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(flat.Q[i] == doctest::Approx(10.0));
    CHECK(flat.D[i] == doctest::Approx(3.0));
    CHECK(flat.U[i] == 0.0);
  }

  // U recomputed from definitions along a random trace.
  RngStream rng(304);
  std::vector<double> s(40), a(40);
  for (int t2 = 0; t2 < 40; ++t2) {
    s[t2] = rng.exponential(1.0, 2 * t2);
    a[t2] = rng.exponential(1.3, 2 * t2 + 1);
  }
  QueueTrace trace = queue_trace(make_strip(s, a), 0.0);
  for (int t2 = 0; t2 < 40; ++t2)
    CHECK(trace.U[t2] == doctest::Approx(std::max(s[t2] - trace.Q[t2], 0.0)));

  CHECK_THROWS_AS(queue_trace(make_strip({1}, {1}), -0.5), std::invalid_argument);
}

TEST_CASE("queue trace U matches the window infimum formula") {
  RngStream rng(305);
  std::vector<double> s(64), a(64);
  for (int t = 0; t < 64; ++t) {
    s[t] = rng.exponential(1.0, 2 * t);
    a[t] = rng.exponential(1.5, 2 * t + 1);
  }
  TwoRowStrip strip = make_strip(s, a);
  QueueTrace trace = queue_trace(strip, 0.0);
  UnusedService us = unused_service(strip);
  // At the window edge the conventions differ: an empty queue leaves the
  // whole first service unused, while the window infimum is pinned to zero.
  CHECK(trace.U[0] == doctest::Approx(s[0]));
  CHECK(us.U[0] == 0.0);
  for (int t = 1; t < 64; ++t)
    CHECK(trace.U[t] == doctest::Approx(us.U[t]).epsilon(1e-12));
}

TEST_CASE("finite permutations") {
  FinitePermutation id;
  CHECK(id.is_identity());
  CHECK(id(5) == 5);
  CHECK(id.adjacent_transpositions().empty());

  FinitePermutation swap35 = FinitePermutation::transposition(3, 5);
  CHECK(swap35(3) == 5);
  CHECK(swap35(5) == 3);
  CHECK(swap35(4) == 4);
  CHECK(swap35.support() == std::vector<int>{3, 5});
  CHECK(swap35.preserves_below(3));
  CHECK_FALSE(swap35.preserves_below(4));
  CHECK(swap35.preserves_above(5));
  CHECK_FALSE(swap35.preserves_above(3));

  // The cached decomposition recomposes to the map.
  FinitePermutation cycle = FinitePermutation::from_window(2, {3, 4, 2});
  std::vector<int> labels{2, 3, 4};
  for (int r : cycle.adjacent_transpositions())
    std::swap(labels[r - 2], labels[r - 1]);
  for (int i = 2; i <= 4; ++i) CHECK(labels[i - 2] == cycle(i));

  CHECK_THROWS_AS(FinitePermutation::from_window(1, {1, 1, 2}),
                  std::invalid_argument);
}

TEST_CASE("admissibility") {
  FinitePermutation id;
  CHECK(is_admissible(id, id, {{2, 3}, {7, 8}}));

  FinitePermutation sigma = FinitePermutation::transposition(3, 6);
  CHECK(is_admissible(sigma, id, {{3, 1}, {6, 5}}));   // x1 <= 3, y1 >= 6
  CHECK(is_admissible(sigma, id, {{7, 1}, {9, 5}}));   // fully right
  CHECK(is_admissible(sigma, id, {{1, 1}, {2, 5}}));   // fully left
  CHECK_FALSE(is_admissible(sigma, id, {{4, 1}, {5, 5}}));  // strictly inside
  CHECK_FALSE(is_admissible(sigma, id, {{4, 1}, {8, 5}}));
  CHECK(is_admissible(id, sigma, {{1, 3}, {5, 6}}));   // row version
  CHECK_FALSE(is_admissible(id, sigma, {{1, 4}, {5, 5}}));
}

TEST_CASE("row rate permutation equals a direct strip swap") {
  RngStream rng(306);
  WeightGrid w = sample_iid_exp1(GridBox{{1, 1}, {6, 4}}, rng);
  FinitePermutation tau = FinitePermutation::transposition(2, 3);
  WeightGrid permuted = permute_row_rates(w, tau, {});
  WeightGrid direct = apply_two_row_swap(w, 2);
  for (int i = 1; i <= 6; ++i)
    for (int j = 1; j <= 4; ++j) CHECK(permuted.at(i, j) == direct.at(i, j));
  // Identity leaves the grid untouched.
  WeightGrid same = permute_row_rates(w, FinitePermutation(), {});
  CHECK(same.values() == w.values());
}

TEST_CASE("protected passage times survive a row permutation") {
  RngStream rng(307);
  WeightGrid w = sample_iid_exp1(GridBox{{1, 1}, {8, 8}}, rng);
  FinitePermutation tau = FinitePermutation::transposition(3, 5);
  std::vector<EndpointPair> pairs{{{1, 1}, {8, 8}}, {{2, 3}, {7, 5}},
                                  {{1, 2}, {8, 6}}};
  WeightGrid permuted = permute_row_rates(w, tau, pairs);
  for (const EndpointPair& pair : pairs)
    CHECK(last_passage(w, pair.x, pair.y) ==
          doctest::Approx(last_passage(permuted, pair.x, pair.y)).epsilon(1e-12));

  // A pair straddling the permuted rows from inside is rejected.
  std::vector<EndpointPair> bad{{{1, 4}, {8, 4}}};
  CHECK_THROWS_AS(permute_row_rates(w, tau, bad), std::invalid_argument);
}

TEST_CASE("column permutation matches the transposed row permutation") {
  RngStream rng(308);
  WeightGrid w = sample_iid_exp1(GridBox{{1, 1}, {7, 5}}, rng);
  FinitePermutation sigma = FinitePermutation::transposition(2, 4);
  std::vector<EndpointPair> pairs{{{1, 1}, {7, 5}}, {{2, 2}, {5, 4}}};
  WeightGrid by_cols = permute_column_rates(w, sigma, pairs);
  WeightGrid by_rows =
      permute_row_rates(w.transposed(), sigma,
                        {{{1, 1}, {5, 7}}, {{2, 2}, {4, 5}}})
          .transposed();
  for (int i = 1; i <= 7; ++i)
    for (int j = 1; j <= 5; ++j) CHECK(by_cols.at(i, j) == by_rows.at(i, j));
  for (const EndpointPair& pair : pairs)
    CHECK(last_passage(w, pair.x, pair.y) ==
          doctest::Approx(last_passage(by_cols, pair.x, pair.y)).epsilon(1e-12));
}

TEST_CASE("strip and trace csv") {
  TwoRowStrip strip = make_strip({1, 2}, {3, 4});
  std::ostringstream ss;
  strip.to_csv(ss);
  CHECK(ss.str().find("col,service,arrival") == 0);
  QueueTrace trace = queue_trace(strip, 0.0);
  std::ostringstream ts;
  trace.to_csv(ts);
  CHECK(ts.str().find("col,Q,D,U,c") == 0);
}

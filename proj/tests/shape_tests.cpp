#include <cmath>

#include "doctest.h"

#include "lpplab/busemann.hpp"
#include "lpplab/environments.hpp"
#include "lpplab/lattice.hpp"
#include "lpplab/rng.hpp"
#include "lpplab/shape.hpp"

using namespace lpplab;

namespace {

ShapeProfile homogeneous() {
  return {FiniteMeasure::point(0.0), FiniteMeasure::point(1.0), 0.0, 1.0};
}

}  // namespace

TEST_CASE("A and B integrals") {
  FiniteMeasure d0 = FiniteMeasure::point(0.0);
  FiniteMeasure d1 = FiniteMeasure::point(1.0);
  CHECK(A_integral(d0, 2.0) == doctest::Approx(0.5));
  CHECK(B_integral(d1, 0.5) == doctest::Approx(2.0));
  FiniteMeasure two{{{0.0, 0.5}, {-0.2, 0.5}}};
  CHECK(A_integral(two, 1.0) == doctest::Approx(1.125));
  CHECK_THROWS_AS(A_integral(d0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(B_integral(d1, 1.0), std::invalid_argument);
}

TEST_CASE("measure validation and empirical construction") {
  FiniteMeasure duplicated{{{0.0, 0.6}, {0.0, 0.4}}};
  CHECK_THROWS_AS(duplicated.validate(), std::invalid_argument);
  FiniteMeasure heavy{{{0.0, 1.5}}};
  CHECK_THROWS_AS(heavy.validate(), std::invalid_argument);
  FiniteMeasure emp = FiniteMeasure::empirical({0.0, 0.0, 1.0, 2.0});
  CHECK(emp.atoms.size() == 3);
  CHECK(emp.total_mass() == doctest::Approx(1.0));
  CHECK(emp.min_location() == 0.0);
}

TEST_CASE("rho closes the loop with zeta") {
  ShapeProfile hom = homogeneous();
  CHECK(rho(hom.alpha, hom.beta, 0.5) == doctest::Approx(1.0));
  for (double r : {0.05, 0.3, 1.0, 2.0, 7.0, 40.0}) {
    double z = zeta(r);
    CHECK(rho(hom.alpha, hom.beta, z) == doctest::Approx(r).epsilon(1e-10));
    CHECK(rho_inverse(hom, r) == doctest::Approx(z).epsilon(1e-7));
  }
}

TEST_CASE("rho is strictly increasing") {
  FiniteMeasure alpha{{{0.0, 0.4}, {0.2, 0.6}}};
  FiniteMeasure beta{{{1.0, 0.5}, {1.5, 0.5}}};
  double prev = 0.0;
  for (int t = 1; t < 1000; ++t) {
    double z = -0.0 + (1.0 - 1e-6) * t / 1000.0;
    double val = rho(alpha, beta, z);
    CHECK(val > prev);
    prev = val;
  }
}

TEST_CASE("rho inverse then rho is the identity") {
  FiniteMeasure alpha{{{0.1, 0.5}, {0.4, 0.5}}};
  FiniteMeasure beta{{{0.9, 0.7}, {1.3, 0.3}}};
  ShapeProfile profile{alpha, beta, 0.1, 0.9};
  for (double r : {0.2, 0.8, 1.7, 5.0}) {
    double z = rho_inverse(profile, r);
    CHECK(rho(alpha, beta, z) == doctest::Approx(r).epsilon(1e-6));
  }
}

TEST_CASE("critical directions") {
  // inf_a strictly below the alpha support: finite positive c_ver.
  double zq = zeta(4.0);
  ShapeProfile pulled{FiniteMeasure::point(0.0), FiniteMeasure::point(1.0), -zq, 1.0};
  CriticalDirections crit = critical_directions(pulled);
  CHECK(crit.c_ver == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(crit.c_hor == kPosInf);  // beta atom sits at inf_b

  // Homogeneous: atom at inf_a degenerates c_ver to zero.
  CriticalDirections hom = critical_directions(homogeneous());
  CHECK(hom.c_ver == 0.0);
  CHECK(hom.c_hor == kPosInf);
}

TEST_CASE("shape minimizer") {
  ShapeProfile hom = homogeneous();
  for (double r : {0.0, 0.1, 1.0, 4.0, 25.0})
    CHECK(zeta_ab(hom, r) == doctest::Approx(zeta(r)).epsilon(1e-7));

  double zq = zeta(4.0);
  ShapeProfile pulled{FiniteMeasure::point(0.0), FiniteMeasure::point(1.0), -zq, 1.0};
  CHECK(zeta_ab(pulled, 2.0) == doctest::Approx(zq));   // flat below c_ver = 4
  CHECK(zeta_ab(pulled, 0.01) == doctest::Approx(zq));
  // Continuity across the breakpoint.
  CHECK(std::abs(zeta_ab(pulled, 4.0 - 1e-9) - zeta_ab(pulled, 4.0 + 1e-9)) < 1e-4);
  CHECK(zeta_ab(pulled, 9.0) == doctest::Approx(zeta(9.0)).epsilon(1e-7));
}

TEST_CASE("vertical LLN slope") {
  FiniteMeasure d1 = FiniteMeasure::point(1.0);
  CHECK(lln_slope_vertical(d1, 0.0) == doctest::Approx(1.0));
  CHECK(lln_slope_vertical(d1, -0.5) == doctest::Approx(2.0));
  CHECK_THROWS_AS(lln_slope_vertical(d1, -1.0), std::invalid_argument);
}

TEST_CASE("LLN simulation in a pinned environment") {
  RateProfile profile{{0.0, 0.0, 0.0, -0.5}, {1.0}};
  RngStream rng(501);
  int n = 1200;
  WeightGrid w = sample_inhomogeneous(profile, GridBox{{1, 1}, {4, n}}, rng);
  double slope = lln_slope_vertical(FiniteMeasure::point(1.0), -0.5);
  double ratio = last_passage(w, {1, 1}, {4, n}) / n;
  CHECK(std::abs(ratio - slope) / slope < 0.1);
}

TEST_CASE("homogeneous strip carries the square-root correction") {
  // For a fixed-width homogeneous strip the passage time per row exceeds the
  // LLN slope by about 2*sqrt(m/n) at finite heights.
  RateProfile profile{{0.0}, {1.0}};
  RngStream rng(502);
  const int m = 8, n = 4000;
  WeightGrid w = sample_inhomogeneous(profile, GridBox{{1, 1}, {m, n}}, rng);
  double ratio = last_passage(w, {1, 1}, {m, n}) / n;
  double predicted = 1.0 + 2.0 * std::sqrt(static_cast<double>(m) / n);
  CHECK(std::abs(ratio - predicted) < 0.05);
}

TEST_CASE("profile validation") {
  CHECK_THROWS_AS(
      (ShapeProfile{FiniteMeasure::point(0.0), FiniteMeasure::point(1.0), -1.0, 1.0})
          .validate(),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (ShapeProfile{FiniteMeasure::point(0.0), FiniteMeasure::point(1.0), 0.5, 1.0})
          .validate(),
      std::invalid_argument);
}

#pragma once

#include <vector>

#include "lpplab/grid.hpp"

namespace lpplab {

// Finitely supported subprobability measure; the empirical limit measures of
// constant-tail parameter sequences are of this form.
struct FiniteMeasure {
  struct Atom {
    double location;
    double mass;
  };
  std::vector<Atom> atoms;

  void validate() const;
  double min_location() const;
  double total_mass() const;
  bool has_atom_at(double location) const;

  static FiniteMeasure point(double location, double mass = 1.0);
  // Empirical measure of a finite sequence, each value weighted 1/n.
  static FiniteMeasure empirical(const std::vector<double>& values);
};

// A(z) = sum mass/(loc + z), defined for z > -min support.
double A_integral(const FiniteMeasure& alpha, double z);
// B(z) = sum mass/(loc - z), defined for z < min support.
double B_integral(const FiniteMeasure& beta, double z);

// Ratio of second-moment integrals, continuous and strictly increasing on
// the open interval between the poles.
double rho(const FiniteMeasure& alpha, const FiniteMeasure& beta, double z);

struct ShapeProfile {
  FiniteMeasure alpha;
  FiniteMeasure beta;
  double inf_a{0.0};  // tail infimum of the column rates
  double inf_b{1.0};  // tail infimum of the row rates

  void validate() const;
};

struct CriticalDirections {
  double c_ver;  // 0 when alpha carries an atom at inf_a (divergent integral)
  double c_hor;  // POS_INF when beta carries an atom at inf_b
};

CriticalDirections critical_directions(const ShapeProfile& profile);

// Inverse of rho by bisection on (-inf_a, inf_b); tolerance 1e-10.
double rho_inverse(const ShapeProfile& profile, double r);

// Shape minimizer: -inf_a below c_ver, rho^{-1}(r) in between, inf_b above
// c_hor. Recovers zeta(r) for the homogeneous profile.
double zeta_ab(const ShapeProfile& profile, double r);

// B(-min_a): the a.s. limit of L_{(i,j),(m,n)}/n at fixed m.
double lln_slope_vertical(const FiniteMeasure& beta, double min_a);

}  // namespace lpplab

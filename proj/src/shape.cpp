#include "lpplab/shape.hpp"

#include <algorithm>
#include <cmath>

namespace lpplab {

void FiniteMeasure::validate() const {
  if (atoms.empty()) throw std::invalid_argument("measure must carry at least one atom");
  double total = 0.0;
  for (const Atom& atom : atoms) {
    if (!std::isfinite(atom.location)) throw std::invalid_argument("atom location must be finite");
    if (!(atom.mass > 0.0)) throw std::invalid_argument("atom masses must be positive");
    total += atom.mass;
  }
  if (total > 1.0 + 1e-12) throw std::invalid_argument("total mass exceeds 1");
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      if (atoms[i].location == atoms[j].location)
        throw std::invalid_argument("atom locations must be distinct");
}

double FiniteMeasure::min_location() const {
  double m = atoms.front().location;
  for (const Atom& atom : atoms) m = std::min(m, atom.location);
  return m;
}

double FiniteMeasure::total_mass() const {
  double total = 0.0;
  for (const Atom& atom : atoms) total += atom.mass;
  return total;
}

bool FiniteMeasure::has_atom_at(double location) const {
  for (const Atom& atom : atoms)
    if (atom.location == location) return true;
  return false;
}

FiniteMeasure FiniteMeasure::point(double location, double mass) {
  FiniteMeasure m{{{location, mass}}};
  m.validate();
  return m;
}

FiniteMeasure FiniteMeasure::empirical(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("empty value list");
  FiniteMeasure m;
  double unit = 1.0 / static_cast<double>(values.size());
  for (double v : values) {
    bool merged = false;
    for (Atom& atom : m.atoms)
      if (atom.location == v) {
        atom.mass += unit;
        merged = true;
        break;
      }
    if (!merged) m.atoms.push_back({v, unit});
  }
  m.validate();
  return m;
}

double A_integral(const FiniteMeasure& alpha, double z) {
  alpha.validate();
  if (!(z > -alpha.min_location()))
    throw std::invalid_argument("z outside the domain of A");
  double sum = 0.0;
  for (const auto& atom : alpha.atoms) sum += atom.mass / (atom.location + z);
  return sum;
}

double B_integral(const FiniteMeasure& beta, double z) {
  beta.validate();
  if (!(z < beta.min_location()))
    throw std::invalid_argument("z outside the domain of B");
  double sum = 0.0;
  for (const auto& atom : beta.atoms) sum += atom.mass / (atom.location - z);
  return sum;
}

double rho(const FiniteMeasure& alpha, const FiniteMeasure& beta, double z) {
  alpha.validate();
  beta.validate();
  if (!(z > -alpha.min_location()) || !(z < beta.min_location()))
    throw std::invalid_argument("z outside the domain of rho");
  double num = 0.0, den = 0.0;
  for (const auto& atom : beta.atoms) {
    double g = atom.location - z;
    num += atom.mass / (g * g);
  }
  for (const auto& atom : alpha.atoms) {
    double g = atom.location + z;
    den += atom.mass / (g * g);
  }
  return num / den;
}

void ShapeProfile::validate() const {
  alpha.validate();
  beta.validate();
  if (!(inf_a + inf_b > 0.0))
    throw std::invalid_argument("tail infima must satisfy inf_a + inf_b > 0");
  if (inf_a > alpha.min_location() + 1e-15 || inf_b > beta.min_location() + 1e-15)
    throw std::invalid_argument("tail infimum exceeds the measure support infimum");
}

CriticalDirections critical_directions(const ShapeProfile& profile) {
  profile.validate();
  CriticalDirections crit{};
  // An atom exactly at the tail infimum makes the second-moment integral
  // diverge, which degenerates the critical direction.
  crit.c_ver = profile.alpha.has_atom_at(profile.inf_a)
                   ? 0.0
                   : rho(profile.alpha, profile.beta, -profile.inf_a);
  crit.c_hor = profile.beta.has_atom_at(profile.inf_b)
                   ? kPosInf
                   : rho(profile.alpha, profile.beta, profile.inf_b);
  return crit;
}

double rho_inverse(const ShapeProfile& profile, double r) {
  profile.validate();
  if (!(r > 0.0) || !std::isfinite(r))
    throw std::invalid_argument("rho inverse needs a positive finite direction");
  double lo = -profile.inf_a;
  double hi = profile.inf_b;
  // rho is strictly increasing on (lo, hi); plain bisection on midpoints
  // never touches the possible poles at the endpoints.
  for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (rho(profile.alpha, profile.beta, mid) < r)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double zeta_ab(const ShapeProfile& profile, double r) {
  profile.validate();
  if (std::isnan(r) || r < 0.0) throw std::invalid_argument("direction must be nonnegative");
  CriticalDirections crit = critical_directions(profile);
  if (r <= crit.c_ver) return -profile.inf_a;
  if (r >= crit.c_hor) return profile.inf_b;
  return rho_inverse(profile, r);
}

double lln_slope_vertical(const FiniteMeasure& beta, double min_a) {
  return B_integral(beta, -min_a);
}

}  // namespace lpplab

#pragma once

#include <vector>

#include "lpplab/environments.hpp"
#include "lpplab/grid.hpp"
#include "lpplab/lattice.hpp"
#include "lpplab/rng.hpp"

namespace lpplab {

// Direction-to-rate map sqrt(r)/(1+sqrt(r)); 0 at 0, 1 at infinity.
double zeta(double r);

// Strictly increasing positive directions with cached zeta values.
struct DirectionSet {
  std::vector<double> r;
  std::vector<double> zeta_r;

  explicit DirectionSet(std::vector<double> directions);
};

// Joint sample of horizontal increments over the right-edge set
// [k-1] x [ell] and vertical increments over the up-edge set [k] x [ell-1],
// one layer per direction.
struct BusemannSample {
  int k{1}, ell{1}, d{1};
  std::vector<double> I;  // (k-1)*ell*d values
  std::vector<double> J;  // k*(ell-1)*d values

  double I_at(GridPoint u, int p) const;  // u in [k-1] x [ell], p in [1, d]
  double J_at(GridPoint v, int p) const;  // v in [k] x [ell-1]
  double& I_ref(GridPoint u, int p);
  double& J_ref(GridPoint v, int p);
};

// Exact-in-law sampler: draws the eta environment and returns its increment
// fields to the antidiagonal terminals z_p.
BusemannSample exact_busemann_sample(const EtaSpec& spec, const RngStream& rng);

// Finite-height approximation from one i.i.d. Exp{1} environment: increments
// to the terminals (round(r_p * n), n), consecutive terminals kept at least
// min_gap columns apart. Same (seed, replica) at different heights reuses the
// same underlying environment.
struct PrelimitSample {
  int k{1}, ell{1}, d{1}, n{0};
  std::vector<int> terminals;  // terminal column per direction
  std::vector<double> I;
  std::vector<double> J;

  double I_at(GridPoint u, int p) const;
  double J_at(GridPoint v, int p) const;
};

PrelimitSample prelimit_busemann_sample(int k, int ell,
                                        const std::vector<double>& directions,
                                        int n, const RngStream& rng,
                                        int min_gap = 2);

// P{I^r - I^s >= x} = 1{x=0} zeta(r)/zeta(s) + (1 - zeta(r)/zeta(s)) e^{-x zeta(r)}.
double increment_cdf_complement(double r, double s, double x);

// min{k' >= i : min a_{i:k'} = min a_{i:k}} for the 1-based sequence a.
int recurrence_index(const std::vector<double>& a, int i, int k);

enum class ThinAxis { up, right };
enum class ThinKind { horizontal, vertical };  // I or J

struct ThinBusemannResult {
  double value{0.0};
  bool converged{false};
  int height_used{0};
};

// Limit of increments along a fixed column (up) or row (right), computed by
// doubling the truncation extent until the value is stable to 1e-9. The
// monotone direction depends on the variant: I^{k,up} and J^{ell,right} are
// sups, J^{k,up} and I^{ell,right} are infs.
ThinBusemannResult thin_busemann(const RateProfile& profile, GridPoint u,
                                 ThinAxis axis, int target, ThinKind which,
                                 int max_extent, const RngStream& rng);

}  // namespace lpplab

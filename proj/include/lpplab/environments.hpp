#pragma once

#include <vector>

#include "json.hpp"

#include "lpplab/grid.hpp"
#include "lpplab/rng.hpp"

namespace lpplab {

// Column rates (a_i) and row rates (b_j), 1-based. Sequences extend past
// their stored length by repeating the final value (constant tails), which is
// what the thin-Busemann computations need for unbounded heights.
struct RateProfile {
  std::vector<double> a;  // column rates
  std::vector<double> b;  // row rates

  double a_at(int i) const;
  double b_at(int j) const;
  double rate_at(int i, int j) const { return a_at(i) + b_at(j); }
};

void to_json(nlohmann::json& j, const RateProfile& profile);
void from_json(const nlohmann::json& j, RateProfile& profile);

// Parameters of the finite inhomogeneous environment coupling d directions
// of Busemann increments on a k x ell grid. The derived grid is
// (k+d-1) x (ell+d-1) and the terminal points sit on its antidiagonal.
struct EtaSpec {
  int k{1};
  int ell{1};
  int d{1};
  std::vector<double> directions;  // strictly increasing, positive, finite

  void validate() const;
  GridBox grid() const {
    return GridBox{{1, 1}, {k + d - 1, ell + d - 1}};
  }
  GridPoint terminal(int p) const {  // p in [1, d]
    return GridPoint{k + p - 1, ell + d - p};
  }
};

void to_json(nlohmann::json& j, const EtaSpec& spec);
void from_json(const nlohmann::json& j, EtaSpec& spec);

WeightGrid sample_iid_exp1(const GridBox& box, const RngStream& rng);

// Independent Exp{a_i + b_j}; every cell rate must be strictly positive.
WeightGrid sample_inhomogeneous(const RateProfile& profile, const GridBox& box,
                                const RngStream& rng);

// Column rates 0 then -zeta(r_p) on the last d columns; row rates 1 then
// zeta(r_{ell+d-j}) on the top d rows.
RateProfile build_eta_rates(const EtaSpec& spec);

// Closed form for the cells where a_i + b_j <= 0.
bool eta_zero_cell(const EtaSpec& spec, int i, int j);

// Exp{a_i + b_j} where the rate is positive, exact 0 elsewhere.
WeightGrid sample_eta(const EtaSpec& spec, const RngStream& rng);

// Rate 1 - zeta(r_p) on column cols[p], rate 1 elsewhere; cols strictly
// increasing.
WeightGrid sample_column_modified(const std::vector<int>& cols,
                                  const std::vector<double>& directions,
                                  const GridBox& box, const RngStream& rng);

// Rate zeta(r_p) on row rows[p], rate 1 elsewhere; rows strictly decreasing.
WeightGrid sample_row_modified(const std::vector<int>& rows,
                               const std::vector<double>& directions,
                               const GridBox& box, const RngStream& rng);

}  // namespace lpplab

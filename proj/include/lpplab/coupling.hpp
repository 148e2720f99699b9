#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lpplab/grid.hpp"

namespace lpplab {

// Two adjacent rows of weights over a column window. Row 1 plays the service
// sequence S, row 2 the arrival sequence A of the associated queue.
struct TwoRowStrip {
  int col_lo{1};
  std::vector<double> service;   // row 1
  std::vector<double> arrivals;  // row 2

  int length() const { return static_cast<int>(service.size()); }
  int col_hi() const { return col_lo + length() - 1; }
  void validate() const;

  WeightGrid to_grid() const;
  // Rows (lower_row, lower_row+1) of a grid, full column range.
  static TwoRowStrip from_grid_rows(const WeightGrid& w, int lower_row);

  void to_csv(std::ostream& os) const;
};

// c_t = service_{t+1} - arrivals_t for t in [col_lo, col_hi-1].
std::vector<double> diag_diffs(const TwoRowStrip& strip);

struct UnusedService {
  int col_lo{1};
  std::vector<double> U;       // U[t - col_lo]; U at col_lo is 0 by convention
  std::vector<int> minimizer;  // start column attaining the window infimum
  std::vector<bool> boundary;  // minimizer within the guard margin of col_lo
};

// U_t = (min over s in [col_lo, t) of sum_{i=s}^{t-1} c_i)_+, with the
// window-left-edge convention U_{col_lo} = 0 (equivalently: the coupled queue
// starts empty at col_lo). Flags entries whose minimizer hugs the window edge.
UnusedService unused_service(const TwoRowStrip& strip, int guard_margin = 8);

// row1* = row1 - U, row2* = row2 + U. Preserves every passage time from
// (i, row1) to (j, row2) inside the window, and every per-column sum.
TwoRowStrip two_row_swap(const TwoRowStrip& strip);

struct QueueTrace {
  int col_lo{1};
  std::vector<double> Q;  // length n+1, Q[0] = initial queue length
  std::vector<double> D;  // departures, length n
  std::vector<double> U;  // unused service, length n
  std::vector<double> c;  // diagonal differences, length n-1

  void to_csv(std::ostream& os) const;
};

// Forward recursion Q_{t+1} = (Q_t - S_t)_+ + A_t with D_t = min(S_t, Q_t)
// and U_t = S_t - D_t.
QueueTrace queue_trace(const TwoRowStrip& strip, double q_init);

// Bijection of the integers equal to the identity outside a finite window.
class FinitePermutation {
 public:
  FinitePermutation() = default;  // identity
  static FinitePermutation transposition(int a, int b);
  // image[i - lo] = sigma(lo + i); must be a bijection of [lo, lo+size).
  static FinitePermutation from_window(int lo, std::vector<int> image);

  int operator()(int i) const;
  bool is_identity() const { return image_.empty(); }
  std::vector<int> support() const;

  // sigma(Z_{<x}) == Z_{<x} and sigma(Z_{>y}) == Z_{>y}.
  bool preserves_below(int x) const;
  bool preserves_above(int y) const;

  // Adjacent transpositions (r, r+1), bubble-sort order: applying the swaps
  // in sequence to the identity labelling l[j] = j yields l[j] = sigma(j).
  const std::vector<int>& adjacent_transpositions() const { return swaps_; }

 private:
  int lo_{0};
  std::vector<int> image_;
  std::vector<int> swaps_;
  void rebuild_swaps();
};

struct EndpointPair {
  GridPoint x;
  GridPoint y;

  EndpointPair(GridPoint x_, GridPoint y_) : x(x_), y(y_) {
    if (!leq(x, y)) throw std::invalid_argument("endpoint pair must satisfy x <= y");
  }
};

// True iff sigma preserves Z_{<x1}, Z_{>y1} and tau preserves Z_{<x2}, Z_{>y2}.
bool is_admissible(const FinitePermutation& sigma, const FinitePermutation& tau,
                   const EndpointPair& pair);

// One two-row coupling step applied to grid rows (lower_row, lower_row+1).
WeightGrid apply_two_row_swap(const WeightGrid& w, int lower_row);

// Applies the adjacent-transposition decomposition of tau to the grid rows.
// Every protected pair keeps its passage time exactly; the row rate
// parameters are permuted by tau in distribution. Errors if a needed
// transposition would touch a protected pair from inside.
WeightGrid permute_row_rates(const WeightGrid& w, const FinitePermutation& tau,
                             const std::vector<EndpointPair>& protected_pairs);

// Column version: transpose, delegate to permute_row_rates, transpose back.
WeightGrid permute_column_rates(const WeightGrid& w, const FinitePermutation& sigma,
                                const std::vector<EndpointPair>& protected_pairs);

}  // namespace lpplab

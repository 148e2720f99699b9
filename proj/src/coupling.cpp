#include "lpplab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace lpplab {

void TwoRowStrip::validate() const {
  if (service.size() != arrivals.size())
    throw std::invalid_argument("strip rows must have equal length");
  if (service.empty()) throw std::invalid_argument("empty strip");
  for (double v : service)
    if (!std::isfinite(v)) throw std::invalid_argument("strip entries must be finite");
  for (double v : arrivals)
    if (!std::isfinite(v)) throw std::invalid_argument("strip entries must be finite");
}

WeightGrid TwoRowStrip::to_grid() const {
  validate();
  WeightGrid g(GridBox{{col_lo, 1}, {col_hi(), 2}});
  for (int t = 0; t < length(); ++t) {
    g.at(col_lo + t, 1) = service[t];
    g.at(col_lo + t, 2) = arrivals[t];
  }
  return g;
}

TwoRowStrip TwoRowStrip::from_grid_rows(const WeightGrid& w, int lower_row) {
  const GridBox& box = w.box();
  if (lower_row < box.lo.row || lower_row + 1 > box.hi.row)
    throw std::invalid_argument("row pair outside grid box");
  TwoRowStrip strip;
  strip.col_lo = box.lo.col;
  strip.service.reserve(box.width());
  strip.arrivals.reserve(box.width());
  for (int i = box.lo.col; i <= box.hi.col; ++i) {
    strip.service.push_back(w.at(i, lower_row));
    strip.arrivals.push_back(w.at(i, lower_row + 1));
  }
  return strip;
}

void TwoRowStrip::to_csv(std::ostream& os) const {
  os << "col,service,arrival\n";
  char buf[96];
  for (int t = 0; t < length(); ++t) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g", col_lo + t, service[t],
                  arrivals[t]);
    os << buf << '\n';
  }
}

std::vector<double> diag_diffs(const TwoRowStrip& strip) {
  strip.validate();
  if (strip.length() < 2)
    throw std::invalid_argument("diagonal differences need at least two columns");
  std::vector<double> c(strip.length() - 1);
  for (int t = 0; t + 1 < strip.length(); ++t)
    c[t] = strip.service[t + 1] - strip.arrivals[t];
  return c;
}

UnusedService unused_service(const TwoRowStrip& strip, int guard_margin) {
  strip.validate();
  int n = strip.length();
  UnusedService out;
  out.col_lo = strip.col_lo;
  out.U.assign(n, 0.0);
  out.minimizer.assign(n, strip.col_lo);
  out.boundary.assign(n, true);
  if (n == 1) return out;

  std::vector<double> c = diag_diffs(strip);
  // Prefix sums P_t = sum_{i=col_lo}^{t-1} c_i; the window infimum of
  // sum_{i=s}^{t-1} c_i over s < t is P_t minus the running max of P.
  double prefix = 0.0;       // P_t for the current t
  double best = 0.0;         // max_{s in [col_lo, t)} P_s
  int best_at = strip.col_lo;  // largest s attaining the max
  for (int t = 1; t < n; ++t) {
    prefix += c[t - 1];
    // The entry at offset t-1 corresponds to s = col_lo + t - 1; fold it into
    // the running max before evaluating U at column col_lo + t.
    if (t >= 2) {
      double p_prev = prefix - c[t - 1];
      if (p_prev >= best) {
        best = p_prev;
        best_at = strip.col_lo + t - 1;
      }
    }
    double inf_sum = prefix - best;
    out.U[t] = inf_sum > 0.0 ? inf_sum : 0.0;
    out.minimizer[t] = best_at;
    out.boundary[t] = (best_at - strip.col_lo) < guard_margin;
  }
  return out;
}

TwoRowStrip two_row_swap(const TwoRowStrip& strip) {
  UnusedService us = unused_service(strip);
  TwoRowStrip out = strip;
  for (int t = 0; t < strip.length(); ++t) {
    out.service[t] = strip.service[t] - us.U[t];
    out.arrivals[t] = strip.arrivals[t] + us.U[t];
  }
  return out;
}

QueueTrace queue_trace(const TwoRowStrip& strip, double q_init) {
  strip.validate();
  if (!(q_init >= 0.0)) throw std::invalid_argument("queue must start nonnegative");
  int n = strip.length();
  QueueTrace trace;
  trace.col_lo = strip.col_lo;
  trace.Q.resize(n + 1);
  trace.D.resize(n);
  trace.U.resize(n);
  trace.Q[0] = q_init;
  for (int t = 0; t < n; ++t) {
    double s = strip.service[t];
    double a = strip.arrivals[t];
    double q = trace.Q[t];
    trace.D[t] = std::min(s, q);
    trace.U[t] = s - trace.D[t];
    trace.Q[t + 1] = std::max(q - s, 0.0) + a;
  }
  if (n >= 2) trace.c = diag_diffs(strip);
  return trace;
}

void QueueTrace::to_csv(std::ostream& os) const {
  os << "col,Q,D,U,c\n";
  char buf[160];
  for (std::size_t t = 0; t < D.size(); ++t) {
    if (t < c.size())
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g",
                    col_lo + static_cast<int>(t), Q[t], D[t], U[t], c[t]);
    else
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,",
                    col_lo + static_cast<int>(t), Q[t], D[t], U[t]);
    os << buf << '\n';
  }
}

FinitePermutation FinitePermutation::transposition(int a, int b) {
  if (a == b) return FinitePermutation();
  if (a > b) std::swap(a, b);
  FinitePermutation sigma;
  sigma.lo_ = a;
  sigma.image_.resize(b - a + 1);
  std::iota(sigma.image_.begin(), sigma.image_.end(), a);
  sigma.image_.front() = b;
  sigma.image_.back() = a;
  sigma.rebuild_swaps();
  return sigma;
}

FinitePermutation FinitePermutation::from_window(int lo, std::vector<int> image) {
  std::vector<int> sorted = image;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != lo + static_cast<int>(i))
      throw std::invalid_argument("window image is not a bijection of the window");
  FinitePermutation sigma;
  sigma.lo_ = lo;
  sigma.image_ = std::move(image);
  sigma.rebuild_swaps();
  return sigma;
}

int FinitePermutation::operator()(int i) const {
  if (image_.empty() || i < lo_ || i >= lo_ + static_cast<int>(image_.size()))
    return i;
  return image_[i - lo_];
}

std::vector<int> FinitePermutation::support() const {
  std::vector<int> s;
  for (std::size_t k = 0; k < image_.size(); ++k)
    if (image_[k] != lo_ + static_cast<int>(k)) s.push_back(lo_ + static_cast<int>(k));
  return s;
}

bool FinitePermutation::preserves_below(int x) const {
  for (int i : support())
    if ((i < x) != ((*this)(i) < x)) return false;
  return true;
}

bool FinitePermutation::preserves_above(int y) const {
  for (int i : support())
    if ((i > y) != ((*this)(i) > y)) return false;
  return true;
}

void FinitePermutation::rebuild_swaps() {
  swaps_.clear();
  if (image_.empty()) return;
  int lo = lo_;
  int hi = lo + static_cast<int>(image_.size()) - 1;
  std::vector<int> cur(image_.size());
  std::iota(cur.begin(), cur.end(), lo);
  // Settle positions left to right; each needed label bubbles down through
  // adjacent swaps, matching the proof's freedom to pick transpositions.
  for (int j = lo; j <= hi; ++j) {
    int want = image_[j - lo];
    if (cur[j - lo] == want) continue;
    int p = j + 1;
    while (p <= hi && cur[p - lo] != want) ++p;
    for (int q = p - 1; q >= j; --q) {
      swaps_.push_back(q);
      std::swap(cur[q - lo], cur[q + 1 - lo]);
    }
  }
}

bool is_admissible(const FinitePermutation& sigma, const FinitePermutation& tau,
                   const EndpointPair& pair) {
  return sigma.preserves_below(pair.x.col) && sigma.preserves_above(pair.y.col) &&
         tau.preserves_below(pair.x.row) && tau.preserves_above(pair.y.row);
}

WeightGrid apply_two_row_swap(const WeightGrid& w, int lower_row) {
  TwoRowStrip strip = TwoRowStrip::from_grid_rows(w, lower_row);
  TwoRowStrip swapped = two_row_swap(strip);
  WeightGrid out = w;
  for (int t = 0; t < strip.length(); ++t) {
    out.at(strip.col_lo + t, lower_row) = swapped.service[t];
    out.at(strip.col_lo + t, lower_row + 1) = swapped.arrivals[t];
  }
  return out;
}

WeightGrid permute_row_rates(const WeightGrid& w, const FinitePermutation& tau,
                             const std::vector<EndpointPair>& protected_pairs) {
  if (tau.is_identity()) return w;
  for (int i : tau.support())
    if (i < w.box().lo.row || i > w.box().hi.row)
      throw std::invalid_argument("permutation support leaves the grid rows");
  for (const EndpointPair& pair : protected_pairs) {
    if (!is_admissible(FinitePermutation(), tau, pair))
      throw std::invalid_argument("protected pair not admissible for the row permutation");
  }
  // A swap of rows (r, r+1) breaks passage times that start on row r+1 or end
  // on row r; every transposition in the decomposition must avoid both.
  for (int r : tau.adjacent_transpositions()) {
    for (const EndpointPair& pair : protected_pairs) {
      if (pair.x.row == r + 1 || pair.y.row == r)
        throw std::invalid_argument(
            "protected pair (" + std::to_string(pair.x.col) + "," +
            std::to_string(pair.x.row) + ")->(" + std::to_string(pair.y.col) +
            "," + std::to_string(pair.y.row) + ") conflicts with row transposition (" +
            std::to_string(r) + "," + std::to_string(r + 1) + ")");
    }
  }
  WeightGrid out = w;
  for (int r : tau.adjacent_transpositions()) out = apply_two_row_swap(out, r);
  return out;
}

WeightGrid permute_column_rates(const WeightGrid& w, const FinitePermutation& sigma,
                                const std::vector<EndpointPair>& protected_pairs) {
  if (sigma.is_identity()) return w;
  std::vector<EndpointPair> transposed_pairs;
  transposed_pairs.reserve(protected_pairs.size());
  for (const EndpointPair& pair : protected_pairs)
    transposed_pairs.emplace_back(GridPoint{pair.x.row, pair.x.col},
                                  GridPoint{pair.y.row, pair.y.col});
  return permute_row_rates(w.transposed(), sigma, transposed_pairs).transposed();
}

}  // namespace lpplab

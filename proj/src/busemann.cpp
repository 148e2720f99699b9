#include "lpplab/busemann.hpp"

#include <algorithm>
#include <cmath>

namespace lpplab {

double zeta(double r) {
  if (std::isnan(r) || r < 0.0)
    throw std::invalid_argument("direction must be nonnegative");
  if (std::isinf(r)) return 1.0;
  double s = std::sqrt(r);
  return s / (1.0 + s);
}

DirectionSet::DirectionSet(std::vector<double> directions) : r(std::move(directions)) {
  double prev = 0.0;
  for (double x : r) {
    if (!(x > prev)) throw std::invalid_argument("directions must be positive and strictly increasing");
    prev = x;
  }
  zeta_r.reserve(r.size());
  for (double x : r) zeta_r.push_back(zeta(x));
}

namespace {

std::size_t edge_index(int cols, int rows, GridPoint p, int layer, const char* what) {
  if (p.col < 1 || p.col > cols || p.row < 1 || p.row > rows)
    throw std::invalid_argument(std::string(what) + " outside edge set");
  return static_cast<std::size_t>(layer) * cols * rows +
         static_cast<std::size_t>(p.row - 1) * cols + (p.col - 1);
}

}  // namespace

double BusemannSample::I_at(GridPoint u, int p) const {
  return I[edge_index(k - 1, ell, u, p - 1, "horizontal edge")];
}
double BusemannSample::J_at(GridPoint v, int p) const {
  return J[edge_index(k, ell - 1, v, p - 1, "vertical edge")];
}
double& BusemannSample::I_ref(GridPoint u, int p) {
  return I[edge_index(k - 1, ell, u, p - 1, "horizontal edge")];
}
double& BusemannSample::J_ref(GridPoint v, int p) {
  return J[edge_index(k, ell - 1, v, p - 1, "vertical edge")];
}

BusemannSample exact_busemann_sample(const EtaSpec& spec, const RngStream& rng) {
  spec.validate();
  WeightGrid eta = sample_eta(spec, rng);
  BusemannSample sample;
  sample.k = spec.k;
  sample.ell = spec.ell;
  sample.d = spec.d;
  sample.I.assign(static_cast<std::size_t>(spec.k - 1) * spec.ell * spec.d, 0.0);
  sample.J.assign(static_cast<std::size_t>(spec.k) * (spec.ell - 1) * spec.d, 0.0);
  for (int p = 1; p <= spec.d; ++p) {
    IncrementField field = increments_to_terminal(eta, spec.terminal(p));
    for (int j = 1; j <= spec.ell; ++j)
      for (int i = 1; i + 1 <= spec.k; ++i)
        sample.I_ref({i, j}, p) = field.I({i, j});
    for (int j = 1; j + 1 <= spec.ell; ++j)
      for (int i = 1; i <= spec.k; ++i)
        sample.J_ref({i, j}, p) = field.J({i, j});
  }
  return sample;
}

double PrelimitSample::I_at(GridPoint u, int p) const {
  return I[edge_index(k - 1, ell, u, p - 1, "horizontal edge")];
}
double PrelimitSample::J_at(GridPoint v, int p) const {
  return J[edge_index(k, ell - 1, v, p - 1, "vertical edge")];
}

namespace {

// Backward DP to the terminal (m, n) over i.i.d. Exp{1} weights generated on
// the fly; records the passage-time subtable on [1, k] x [1, ell]. A single
// column buffer keeps memory at O(n) regardless of m.
void prelimit_subtable(int m, int n, int k, int ell, const RngStream& rng,
                       std::vector<double>& L_sub) {
  L_sub.assign(static_cast<std::size_t>(k) * ell, 0.0);
  std::vector<double> buf(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = m; i >= 1; --i) {
    for (int j = n; j >= 1; --j) {
      double right = (i < m) ? buf[j] : kNegInf;
      double up = (j < n) ? buf[j + 1] : kNegInf;
      double best = std::max(right, up);
      double w = rng.exponential(1.0, RngStream::cell_key(i, j));
      buf[j] = w + (best == kNegInf ? 0.0 : best);
      if (i <= k && j <= ell)
        L_sub[static_cast<std::size_t>(j - 1) * k + (i - 1)] = buf[j];
    }
  }
}

}  // namespace

PrelimitSample prelimit_busemann_sample(int k, int ell,
                                        const std::vector<double>& directions,
                                        int n, const RngStream& rng, int min_gap) {
  if (k < 1 || ell < 1) throw std::invalid_argument("k, ell must be positive");
  if (n < ell) throw std::invalid_argument("height must be at least ell");
  DirectionSet dirs(directions);
  int d = static_cast<int>(directions.size());

  PrelimitSample sample;
  sample.k = k;
  sample.ell = ell;
  sample.d = d;
  sample.n = n;
  sample.terminals.resize(d);
  for (int p = 0; p < d; ++p) {
    int col = static_cast<int>(std::llround(directions[p] * n));
    if (p == 0 && col < k)
      throw std::invalid_argument("height incompatible with smallest direction");
    if (p > 0) col = std::max(col, sample.terminals[p - 1] + min_gap);
    sample.terminals[p] = col;
  }

  sample.I.assign(static_cast<std::size_t>(k - 1) * ell * d, 0.0);
  sample.J.assign(static_cast<std::size_t>(k) * (ell - 1) * d, 0.0);
  std::vector<double> L_sub;
  for (int p = 1; p <= d; ++p) {
    prelimit_subtable(sample.terminals[p - 1], n, k, ell, rng, L_sub);
    auto L = [&](int i, int j) {
      return L_sub[static_cast<std::size_t>(j - 1) * k + (i - 1)];
    };
    for (int j = 1; j <= ell; ++j)
      for (int i = 1; i + 1 <= k; ++i)
        sample.I[edge_index(k - 1, ell, {i, j}, p - 1, "horizontal edge")] =
            L(i, j) - L(i + 1, j);
    for (int j = 1; j + 1 <= ell; ++j)
      for (int i = 1; i <= k; ++i)
        sample.J[edge_index(k, ell - 1, {i, j}, p - 1, "vertical edge")] =
            L(i, j) - L(i, j + 1);
  }
  return sample;
}

double increment_cdf_complement(double r, double s, double x) {
  if (!(r > 0.0) || !(s > 0.0) || !std::isfinite(r) || !std::isfinite(s))
    throw std::invalid_argument("directions must be positive and finite");
  if (!(r < s)) throw std::invalid_argument("directions must satisfy r < s");
  if (!(x >= 0.0)) throw std::invalid_argument("x must be nonnegative");
  double ratio = zeta(r) / zeta(s);
  double tail = (1.0 - ratio) * std::exp(-x * zeta(r));
  return x == 0.0 ? ratio + tail : tail;
}

int recurrence_index(const std::vector<double>& a, int i, int k) {
  if (i < 1 || k > static_cast<int>(a.size()) || i > k)
    throw std::invalid_argument("recurrence index requires 1 <= i <= k <= len(a)");
  double target = a[i - 1];
  for (int t = i; t <= k; ++t) target = std::min(target, a[t - 1]);
  double running = a[i - 1];
  for (int t = i; t <= k; ++t) {
    running = std::min(running, a[t - 1]);
    if (running == target) return t;
  }
  return k;
}

namespace {

// One truncated increment along the thin direction. For axis up the box is
// [u, (target, extent)]; for axis right it is [u, (extent, target)].
double thin_value(const RateProfile& profile, GridPoint u, ThinAxis axis,
                  int target, ThinKind which, int extent, const RngStream& rng) {
  GridPoint hi = (axis == ThinAxis::up) ? GridPoint{target, extent}
                                        : GridPoint{extent, target};
  // Needs one extra column (I) or row (J) beyond u.
  GridPoint shifted = (which == ThinKind::horizontal) ? u + GridPoint{1, 0}
                                                      : u + GridPoint{0, 1};
  if (!leq(shifted, hi)) return kPosInf;

  int n_rows = hi.row - u.row + 1;
  std::vector<double> buf(static_cast<std::size_t>(n_rows) + 1, 0.0);
  double L_u = 0.0, L_shift = 0.0;
  for (int i = hi.col; i >= u.col; --i) {
    for (int j = hi.row; j >= u.row; --j) {
      std::size_t jj = static_cast<std::size_t>(j - u.row);
      double right = (i < hi.col) ? buf[jj] : kNegInf;
      double up = (j < hi.row) ? buf[jj + 1] : kNegInf;
      double best = std::max(right, up);
      double rate = profile.rate_at(i, j);
      if (!(rate > 0.0)) throw std::invalid_argument("nonpositive rate in thin environment");
      double w = rng.exponential(rate, RngStream::cell_key(i, j));
      buf[jj] = w + (best == kNegInf ? 0.0 : best);
      GridPoint here{i, j};
      if (here == u) L_u = buf[jj];
      if (here == shifted) L_shift = buf[jj];
    }
  }
  return L_u - L_shift;
}

}  // namespace

ThinBusemannResult thin_busemann(const RateProfile& profile, GridPoint u,
                                 ThinAxis axis, int target, ThinKind which,
                                 int max_extent, const RngStream& rng) {
  int along_start = (axis == ThinAxis::up) ? u.row : u.col;
  int across = (axis == ThinAxis::up) ? u.col : u.row;
  if (across > target)
    throw std::invalid_argument("target line must not precede the start point");

  // Degenerate increments against an absent path stay at the sentinel.
  if ((axis == ThinAxis::up && which == ThinKind::horizontal && u.col == target) ||
      (axis == ThinAxis::right && which == ThinKind::vertical && u.row == target))
    return {kPosInf, true, along_start};

  // The truncated increment is monotone in the extent but can sit on long
  // plateaus before reaching its limit, so stabilization demands agreement
  // across two consecutive doublings, not one.
  int extent = std::max(32, 2 * along_start + 8);
  if (max_extent < extent) max_extent = extent;
  double prev = thin_value(profile, u, axis, target, which, extent, rng);
  int stable = 0;
  while (2 * extent <= max_extent) {
    extent *= 2;
    double cur = thin_value(profile, u, axis, target, which, extent, rng);
    if (std::abs(cur - prev) <= 1e-9 * (1.0 + std::abs(cur))) {
      if (++stable >= 2) return {cur, true, extent};
    } else {
      stable = 0;
    }
    prev = cur;
  }
  return {prev, false, extent};
}

}  // namespace lpplab

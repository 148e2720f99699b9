#pragma once

#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lpplab {

// Explicit sentinels. NEG_INF marks an absent path (incomparable endpoints),
// POS_INF marks an increment taken against an absent path. They are only ever
// assigned, never the result of overflow. IEEE rules give the documented
// arithmetic: NEG_INF absorbs addition, real - NEG_INF = POS_INF.
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// 1-based lattice point, column first.
struct GridPoint {
  int col{1};
  int row{1};

  friend bool operator==(GridPoint a, GridPoint b) {
    return a.col == b.col && a.row == b.row;
  }
  friend bool operator!=(GridPoint a, GridPoint b) { return !(a == b); }
};

// Componentwise partial order.
inline bool leq(GridPoint a, GridPoint b) {
  return a.col <= b.col && a.row <= b.row;
}

inline GridPoint operator+(GridPoint a, GridPoint b) {
  return {a.col + b.col, a.row + b.row};
}
inline GridPoint operator-(GridPoint a, GridPoint b) {
  return {a.col - b.col, a.row - b.row};
}

struct GridBox {
  GridPoint lo{1, 1};
  GridPoint hi{1, 1};

  bool valid() const { return leq(lo, hi); }
  bool contains(GridPoint p) const { return leq(lo, p) && leq(p, hi); }
  int width() const { return hi.col - lo.col + 1; }
  int height() const { return hi.row - lo.row + 1; }
  long long cells() const { return 1LL * width() * height(); }
};

// Dense rectangular field of real weights over a GridBox.
class WeightGrid {
 public:
  WeightGrid() = default;
  explicit WeightGrid(GridBox box, double fill = 0.0);
  WeightGrid(GridBox box, std::vector<double> row_major);

  const GridBox& box() const { return box_; }

  double at(GridPoint p) const { return values_[index(p)]; }
  double& at(GridPoint p) { return values_[index(p)]; }
  double at(int col, int row) const { return at(GridPoint{col, row}); }
  double& at(int col, int row) { return at(GridPoint{col, row}); }

  const std::vector<double>& values() const { return values_; }

  WeightGrid transposed() const;
  WeightGrid rotated180() const;

  // Row-major CSV with a box-bounds header, lowest row first.
  void to_csv(std::ostream& os) const;
  static WeightGrid from_csv(std::istream& is);

 private:
  std::size_t index(GridPoint p) const {
    if (!box_.contains(p)) throw std::invalid_argument("point outside grid box");
    return static_cast<std::size_t>(p.row - box_.lo.row) * box_.width() +
           static_cast<std::size_t>(p.col - box_.lo.col);
  }

  GridBox box_{};
  std::vector<double> values_;
};

}  // namespace lpplab

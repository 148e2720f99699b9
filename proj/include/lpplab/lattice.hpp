#pragma once

#include <vector>

#include "lpplab/grid.hpp"

namespace lpplab {

enum class PassageMode { to_terminal, from_initial };

// Table of last-passage times with one endpoint pinned at the anchor.
// NEG_INF exactly at points incomparable with the anchor.
class PassageField {
 public:
  PassageField(GridPoint anchor, PassageMode mode, GridBox box)
      : anchor_(anchor), mode_(mode), box_(box),
        values_(static_cast<std::size_t>(box.cells()), kNegInf) {}

  GridPoint anchor() const { return anchor_; }
  PassageMode mode() const { return mode_; }
  const GridBox& box() const { return box_; }

  double at(GridPoint p) const { return values_[index(p)]; }
  double& at(GridPoint p) { return values_[index(p)]; }

 private:
  std::size_t index(GridPoint p) const {
    if (!box_.contains(p)) throw std::invalid_argument("point outside field box");
    return static_cast<std::size_t>(p.row - box_.lo.row) * box_.width() +
           static_cast<std::size_t>(p.col - box_.lo.col);
  }

  GridPoint anchor_;
  PassageMode mode_;
  GridBox box_;
  std::vector<double> values_;
};

enum class IncrementOrientation { initial_point, terminal_point };

// Horizontal (I) and vertical (J) last-passage increments to a fixed
// terminal point (initial_point orientation) or from a fixed initial point
// (terminal_point orientation). Entries whose shifted endpoint leaves the
// comparable region carry the POS_INF sentinel.
class IncrementField {
 public:
  IncrementField(GridPoint anchor, IncrementOrientation orientation, GridBox box)
      : anchor_(anchor), orientation_(orientation), box_(box),
        I_(static_cast<std::size_t>(box.cells()), kPosInf),
        J_(static_cast<std::size_t>(box.cells()), kPosInf) {}

  GridPoint anchor() const { return anchor_; }
  IncrementOrientation orientation() const { return orientation_; }
  const GridBox& box() const { return box_; }

  double I(GridPoint p) const { return I_[index(p)]; }
  double J(GridPoint p) const { return J_[index(p)]; }
  double& I(GridPoint p) { return I_[index(p)]; }
  double& J(GridPoint p) { return J_[index(p)]; }

 private:
  std::size_t index(GridPoint p) const {
    if (!box_.contains(p)) throw std::invalid_argument("point outside field box");
    return static_cast<std::size_t>(p.row - box_.lo.row) * box_.width() +
           static_cast<std::size_t>(p.col - box_.lo.col);
  }

  GridPoint anchor_;
  IncrementOrientation orientation_;
  GridBox box_;
  std::vector<double> I_, J_;
};

// Maximum over up-right paths of summed vertex weights; NEG_INF when the
// endpoints are incomparable. Both endpoints must lie in the grid box.
double last_passage(const WeightGrid& w, GridPoint u, GridPoint v);

// One backward sweep: L_{x,z} for every x in the box with x <= z.
PassageField passage_to(const WeightGrid& w, GridPoint z);
// One forward sweep: L_{u,y} for every y in the box with y >= u.
PassageField passage_from(const WeightGrid& w, GridPoint u);

// Increments with varying initial point: I_x = L_{x,z} - L_{x+(1,0),z},
// J_x = L_{x,z} - L_{x+(0,1),z}, over the box [lo, z].
IncrementField increments_to_terminal(const WeightGrid& w, GridPoint z);
// Increments with varying terminal point: I_y = L_{u,y} - L_{u,y-(1,0)},
// J_y = L_{u,y} - L_{u,y-(0,1)}, over the box [u, hi].
IncrementField increments_from_initial(const WeightGrid& w, GridPoint u);

// Weight map whose passage times to y reproduce increments of passage times
// to z: unchanged strictly southwest of y, increments to z on y's row and
// column, zero at y itself. Output box is [lo, y].
WeightGrid induced_weights(const WeightGrid& w, GridPoint y, GridPoint z);

// An argmax up-right path from u to v; ties prefer the up step.
std::vector<GridPoint> geodesic(const WeightGrid& w, GridPoint u, GridPoint v);

}  // namespace lpplab

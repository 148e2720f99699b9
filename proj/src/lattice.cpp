#include "lpplab/lattice.hpp"

#include <algorithm>

namespace lpplab {

namespace {

void require_inside(const WeightGrid& w, GridPoint p, const char* what) {
  if (!w.box().contains(p))
    throw std::invalid_argument(std::string(what) + " outside grid box");
}

}  // namespace

double last_passage(const WeightGrid& w, GridPoint u, GridPoint v) {
  require_inside(w, u, "initial point");
  require_inside(w, v, "terminal point");
  if (!leq(u, v)) return kNegInf;
  // Rolling column buffer, filled right to left; buf[j] holds L_{(i+1,j),v}
  // before the update at (i, j) and L_{(i,j),v} after.
  std::vector<double> buf(static_cast<std::size_t>(v.row - u.row + 1));
  for (int i = v.col; i >= u.col; --i) {
    for (int j = v.row; j >= u.row; --j) {
      std::size_t jj = static_cast<std::size_t>(j - u.row);
      double right = (i < v.col) ? buf[jj] : kNegInf;
      double up = (j < v.row) ? buf[jj + 1] : kNegInf;
      double best = std::max(right, up);
      buf[jj] = w.at(i, j) + (best == kNegInf ? 0.0 : best);
    }
  }
  return buf[0];
}

PassageField passage_to(const WeightGrid& w, GridPoint z) {
  require_inside(w, z, "terminal point");
  PassageField field(z, PassageMode::to_terminal, w.box());
  GridPoint lo = w.box().lo;
  for (int i = z.col; i >= lo.col; --i) {
    for (int j = z.row; j >= lo.row; --j) {
      double right = (i < z.col) ? field.at({i + 1, j}) : kNegInf;
      double up = (j < z.row) ? field.at({i, j + 1}) : kNegInf;
      double best = std::max(right, up);
      field.at({i, j}) = w.at(i, j) + (best == kNegInf ? 0.0 : best);
    }
  }
  return field;
}

PassageField passage_from(const WeightGrid& w, GridPoint u) {
  require_inside(w, u, "initial point");
  PassageField field(u, PassageMode::from_initial, w.box());
  GridPoint hi = w.box().hi;
  for (int i = u.col; i <= hi.col; ++i) {
    for (int j = u.row; j <= hi.row; ++j) {
      double left = (i > u.col) ? field.at({i - 1, j}) : kNegInf;
      double down = (j > u.row) ? field.at({i, j - 1}) : kNegInf;
      double best = std::max(left, down);
      field.at({i, j}) = w.at(i, j) + (best == kNegInf ? 0.0 : best);
    }
  }
  return field;
}

IncrementField increments_to_terminal(const WeightGrid& w, GridPoint z) {
  require_inside(w, z, "terminal point");
  PassageField L = passage_to(w, z);
  IncrementField field(z, IncrementOrientation::initial_point,
                       GridBox{w.box().lo, z});
  for (int i = w.box().lo.col; i <= z.col; ++i) {
    for (int j = w.box().lo.row; j <= z.row; ++j) {
      GridPoint x{i, j};
      field.I(x) = (i < z.col) ? L.at(x) - L.at({i + 1, j}) : kPosInf;
      field.J(x) = (j < z.row) ? L.at(x) - L.at({i, j + 1}) : kPosInf;
    }
  }
  return field;
}

IncrementField increments_from_initial(const WeightGrid& w, GridPoint u) {
  require_inside(w, u, "initial point");
  PassageField L = passage_from(w, u);
  IncrementField field(u, IncrementOrientation::terminal_point,
                       GridBox{u, w.box().hi});
  for (int i = u.col; i <= w.box().hi.col; ++i) {
    for (int j = u.row; j <= w.box().hi.row; ++j) {
      GridPoint y{i, j};
      field.I(y) = (i > u.col) ? L.at(y) - L.at({i - 1, j}) : kPosInf;
      field.J(y) = (j > u.row) ? L.at(y) - L.at({i, j - 1}) : kPosInf;
    }
  }
  return field;
}

WeightGrid induced_weights(const WeightGrid& w, GridPoint y, GridPoint z) {
  require_inside(w, y, "corner point");
  require_inside(w, z, "terminal point");
  if (!leq(y, z)) throw std::invalid_argument("induced weights require y <= z");
  PassageField L = passage_to(w, z);
  GridBox out_box{w.box().lo, y};
  WeightGrid out(out_box);
  for (int i = out_box.lo.col; i <= y.col; ++i) {
    for (int j = out_box.lo.row; j <= y.row; ++j) {
      GridPoint x{i, j};
      if (i == y.col && j == y.row) {
        out.at(x) = 0.0;
      } else if (j == y.row) {
        out.at(x) = L.at(x) - L.at({i + 1, j});  // horizontal increment to z
      } else if (i == y.col) {
        out.at(x) = L.at(x) - L.at({i, j + 1});  // vertical increment to z
      } else {
        out.at(x) = w.at(x);
      }
    }
  }
  return out;
}

std::vector<GridPoint> geodesic(const WeightGrid& w, GridPoint u, GridPoint v) {
  require_inside(w, u, "initial point");
  require_inside(w, v, "terminal point");
  if (!leq(u, v)) throw std::invalid_argument("geodesic requires u <= v");
  PassageField L = passage_to(w, v);
  std::vector<GridPoint> path;
  path.reserve(static_cast<std::size_t>((v.col - u.col) + (v.row - u.row) + 1));
  GridPoint x = u;
  path.push_back(x);
  while (x != v) {
    bool can_up = x.row < v.row;
    bool can_right = x.col < v.col;
    if (can_up && can_right) {
      double up = L.at({x.col, x.row + 1});
      double right = L.at({x.col + 1, x.row});
      x = (up >= right) ? GridPoint{x.col, x.row + 1} : GridPoint{x.col + 1, x.row};
    } else if (can_up) {
      x = {x.col, x.row + 1};
    } else {
      x = {x.col + 1, x.row};
    }
    path.push_back(x);
  }
  return path;
}

}  // namespace lpplab

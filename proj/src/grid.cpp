#include "lpplab/grid.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace lpplab {

WeightGrid::WeightGrid(GridBox box, double fill) : box_(box) {
  if (!box.valid()) throw std::invalid_argument("grid box must satisfy lo <= hi");
  values_.assign(static_cast<std::size_t>(box.cells()), fill);
}

WeightGrid::WeightGrid(GridBox box, std::vector<double> row_major)
    : box_(box), values_(std::move(row_major)) {
  if (!box.valid()) throw std::invalid_argument("grid box must satisfy lo <= hi");
  if (values_.size() != static_cast<std::size_t>(box.cells()))
    throw std::invalid_argument("weight vector size does not match box");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("weights must be finite");
}

WeightGrid WeightGrid::transposed() const {
  GridBox tbox{{box_.lo.row, box_.lo.col}, {box_.hi.row, box_.hi.col}};
  WeightGrid out(tbox);
  for (int j = box_.lo.row; j <= box_.hi.row; ++j)
    for (int i = box_.lo.col; i <= box_.hi.col; ++i)
      out.at(j, i) = at(i, j);
  return out;
}

WeightGrid WeightGrid::rotated180() const {
  WeightGrid out(box_);
  for (int j = box_.lo.row; j <= box_.hi.row; ++j)
    for (int i = box_.lo.col; i <= box_.hi.col; ++i)
      out.at(box_.lo.col + box_.hi.col - i, box_.lo.row + box_.hi.row - j) = at(i, j);
  return out;
}

void WeightGrid::to_csv(std::ostream& os) const {
  os << "lo_col,lo_row,hi_col,hi_row\n";
  os << box_.lo.col << ',' << box_.lo.row << ',' << box_.hi.col << ','
     << box_.hi.row << '\n';
  char buf[40];
  for (int j = box_.lo.row; j <= box_.hi.row; ++j) {
    for (int i = box_.lo.col; i <= box_.hi.col; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", at(i, j));
      os << (i == box_.lo.col ? "" : ",") << buf;
    }
    os << '\n';
  }
}

WeightGrid WeightGrid::from_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty grid csv");
  if (!std::getline(is, line)) throw std::invalid_argument("missing box bounds");
  GridBox box;
  {
    std::istringstream ss(line);
    char comma;
    ss >> box.lo.col >> comma >> box.lo.row >> comma >> box.hi.col >> comma >>
        box.hi.row;
    if (!ss) throw std::invalid_argument("malformed box bounds");
  }
  WeightGrid out(box);
  for (int j = box.lo.row; j <= box.hi.row; ++j) {
    if (!std::getline(is, line)) throw std::invalid_argument("truncated grid csv");
    std::istringstream ss(line);
    std::string cell;
    for (int i = box.lo.col; i <= box.hi.col; ++i) {
      if (!std::getline(ss, cell, ',')) throw std::invalid_argument("short row");
      out.at(i, j) = std::stod(cell);
    }
  }
  return out;
}

}  // namespace lpplab

#pragma once

#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "livsic/base.hpp"
#include "livsic/circle_diffeo.hpp"

namespace livsic {

/// Point of the circle fiber, kept as a lift.
struct CirclePoint {
  double y = 0;
  bool operator==(const CirclePoint&) const = default;
};

/// Linear weights (cell, weight) reproducing a value at x from the values at
/// the cell representatives. On the torus: a local quadratic least-squares fit
/// over the 5 x 5 block of cells around x. On the shift: the cylinder of x.
using CellWeights = std::vector<std::pair<std::size_t, double>>;
CellWeights cell_weights(const BaseGrid& grid, const std::vector<BasePoint>& points, const BasePoint& x);

double blend(const CellWeights& w, const std::vector<double>& values);
Eigen::MatrixXd blend(const CellWeights& w, const std::vector<Eigen::MatrixXd>& values);
/// Lifts are aligned to the first cell's degree before blending.
CircleDiffeo blend(const CellWeights& w, const std::vector<CircleDiffeo>& values);
CirclePoint blend(const CellWeights& w, const std::vector<CirclePoint>& values);

/// Values on the cells of a grid, each attached to a representative point.
template <class T>
struct GridFunction {
  std::shared_ptr<const BaseGrid> grid;
  std::vector<BasePoint> points;
  std::vector<T> values;

  std::size_t size() const { return values.size(); }
  T at(const BasePoint& x) const { return blend(cell_weights(*grid, points, x), values); }
};

}  // namespace livsic

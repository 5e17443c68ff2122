#include "livsic/grid_function.hpp"

#include <cmath>

#include "livsic/error.hpp"

namespace livsic {

CellWeights cell_weights(const BaseGrid& grid, const std::vector<BasePoint>& points, const BasePoint& x) {
  const std::size_t cell = grid.cell_of(x);
  if (grid.kind() == BaseKind::sft) return {{cell, 1.0}};
  const auto& t = std::get<TorusPoint>(x);
  const auto ij = grid.torus_cell(cell);
  const int m = grid.resolution();
  constexpr int r = 2;
  Eigen::Matrix<double, 25, 6> a;
  CellWeights out;
  out.reserve(25);
  // Displacements are scaled by m so the normal equations stay well conditioned.
  for (int di = -r; di <= r; ++di)
    for (int dj = -r; dj <= r; ++dj) {
      const std::size_t c = grid.torus_index(((ij[0] + di) % m + m) % m, ((ij[1] + dj) % m + m) % m);
      const auto& p = std::get<TorusPoint>(points[c]);
      const double du = wrap_half(p.u - t.u) * m, dv = wrap_half(p.v - t.v) * m;
      a.row(static_cast<Eigen::Index>(out.size())) << 1, du, dv, du * du, du * dv, dv * dv;
      out.push_back({c, 0.0});
    }
  const Eigen::Matrix<double, 6, 6> n = a.transpose() * a;
  const Eigen::Matrix<double, 6, 1> e = Eigen::Matrix<double, 6, 1>::Unit(0);
  const Eigen::Matrix<double, 25, 1> w = a * n.ldlt().solve(e);
  for (std::size_t k = 0; k < out.size(); ++k) out[k].second = w(static_cast<Eigen::Index>(k));
  return out;
}

double blend(const CellWeights& w, const std::vector<double>& values) {
  double s = 0;
  for (const auto& [c, k] : w) s += k * values[c];
  return s;
}

Eigen::MatrixXd blend(const CellWeights& w, const std::vector<Eigen::MatrixXd>& values) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(values[w.front().first].rows(), values[w.front().first].cols());
  for (const auto& [c, k] : w) s += k * values[c];
  return s;
}

CircleDiffeo blend(const CellWeights& w, const std::vector<CircleDiffeo>& values) {
  const CircleDiffeo& ref = values[w.front().first];
  if (w.size() == 1) return ref;
  const std::size_t g = static_cast<std::size_t>(ref.grid());
  std::vector<double> lift(g, 0.0), deriv(g, 0.0);
  for (const auto& [c, k] : w) {
    const auto& v = values[c];
    if (static_cast<std::size_t>(v.grid()) != g) throw Error(ErrorKind::grid_mismatch, "fiber grids differ");
    const double shift = std::round(ref.lift_samples()[0] - v.lift_samples()[0]);
    for (std::size_t i = 0; i < g; ++i) {
      lift[i] += k * (v.lift_samples()[i] + shift);
      deriv[i] += k * v.derivative_samples()[i];
    }
  }
  for (auto& d : deriv) d = std::max(d, CircleDiffeo::min_slope);
  return CircleDiffeo::from_samples(std::move(lift), std::move(deriv));
}

CirclePoint blend(const CellWeights& w, const std::vector<CirclePoint>& values) {
  const double ref = values[w.front().first].y;
  double s = 0;
  for (const auto& [c, k] : w) s += k * (values[c].y + std::round(ref - values[c].y));
  return {s};
}

}  // namespace livsic

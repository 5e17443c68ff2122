#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "livsic/exec.hpp"
#include "livsic/hyperbolicity.hpp"
#include "livsic/rng.hpp"
#include "livsic/sft.hpp"
#include "livsic/torus.hpp"

namespace livsic {

using BasePoint = std::variant<TorusPoint, SftPoint>;

enum class BaseKind { cat_map, sft };

struct ClosingResult {
  BasePoint p;
  BasePoint y;
  long n = 0;
  double c = 0;
  double lambda = 0;
  double return_distance = 0;
  // Per iterate i: d(f^i x, f^i p), d(f^i p, f^i y), d(f^i x, f^i y).
  std::vector<std::array<double, 3>> bound_trace;
};

struct PeriodicOrbit {
  BasePoint point;
  long period = 0;  // minimal period
};

/// Partition of the base into cells: an m x m square grid on the torus, or
/// cylinders of a fixed window on the shift.
class BaseGrid {
 public:
  static BaseGrid torus(int m);
  static BaseGrid sft(const Sft& sft, int depth);

  BaseKind kind() const { return kind_; }
  std::size_t size() const { return size_; }
  /// Torus side length m, or SFT cylinder depth.
  int resolution() const { return resolution_; }
  /// Cell diameter scale: 1/m on the torus, theta^(depth/2) on the shift.
  double cell_scale() const { return scale_; }
  std::size_t cell_of(const BasePoint& x) const;

  // Torus only.
  std::array<int, 2> torus_cell(std::size_t cell) const;
  std::size_t torus_index(int i, int j) const;
  TorusPoint torus_center(std::size_t cell) const;

  // SFT only.
  long window_lo() const { return window_lo_; }
  long window_hi() const { return window_hi_; }

 private:
  BaseKind kind_ = BaseKind::cat_map;
  int resolution_ = 0;
  std::size_t size_ = 0;
  double scale_ = 0;
  int alphabet_ = 0;
  long window_lo_ = 0, window_hi_ = 0;
  std::vector<std::int64_t> cylinder_to_cell_;
};

/// Orbit segment that visits every cell of a grid. For a one-sided plan the
/// iterates are 0..N; a two-sided plan uses -N..N and cells record the visit
/// with the smallest |k| (ties to the forward iterate).
struct DenseOrbitPlan {
  BasePoint start;
  long N = 0;
  bool two_sided = false;
  std::shared_ptr<const BaseGrid> grid;
  std::vector<long> first_visit;           // per cell
  std::vector<BasePoint> representative;   // per cell: f^{first_visit}(start)
};

class HyperbolicBase {
 public:
  explicit HyperbolicBase(CatMap cat);
  explicit HyperbolicBase(Sft sft);

  BaseKind kind() const;
  std::string describe() const;
  const HyperbolicityData& hyp() const;
  const CatMap& cat() const { return std::get<CatMap>(system_); }
  const Sft& sft() const { return std::get<Sft>(system_); }

  BasePoint step(const BasePoint& x, long k) const;
  double distance(const BasePoint& x, const BasePoint& y, double alpha = 1) const;
  bool same_point(const BasePoint& x, const BasePoint& y) const;
  /// d(x, y) < r without computing the full shift agreement.
  bool closer_than(const BasePoint& x, const BasePoint& y, double r) const;
  BasePoint bracket(const BasePoint& x, const BasePoint& y) const;

  /// Points of W^s_loc(x) / W^u_loc(x) at distance about `scale` from x.
  /// On the torus the parameter is the signed length t along e_s / e_u.
  /// On the shift the point agrees with x on [-m, inf) (stable) or
  /// (-inf, m] (unstable) where theta^m ~ scale, with the rest drawn from rng.
  BasePoint stable_neighbor(const BasePoint& x, double t, RandomStream& rng) const;
  BasePoint unstable_neighbor(const BasePoint& x, double t, RandomStream& rng) const;

  std::vector<BasePoint> periodic_points(long n, std::size_t cap = 1000000) const;
  std::uint64_t periodic_count(long n) const;
  /// One representative per orbit of minimal period exactly n.
  std::vector<PeriodicOrbit> periodic_orbits(long n, std::size_t cap = 1000000) const;

  ClosingResult closing(const BasePoint& x, long n) const;

  BasePoint random_point(RandomStream& rng) const;

  BaseGrid grid(int resolution) const;
  /// Default experiment grid: 64 x 64 cells or depth-6 cylinders.
  BaseGrid default_grid() const;
  /// Grid whose cells have diameter at most `resolution`.
  BaseGrid grid_for_resolution(double resolution) const;

  DenseOrbitPlan transitive_point(const BaseGrid& grid, std::uint64_t seed, bool two_sided = false) const;
  DenseOrbitPlan transitive_point(double resolution, std::uint64_t seed = 1) const;

 private:
  std::variant<CatMap, Sft> system_;
};

}  // namespace livsic

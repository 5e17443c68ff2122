#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "livsic/base.hpp"
#include "livsic/base_function.hpp"
#include "livsic/circle_diffeo.hpp"
#include "livsic/exec.hpp"

namespace livsic {

enum class CocycleFamily { rotation, arnold_bump, coboundary_generated, grid_table, locally_constant_sft, linear_family };
enum class FiberKind { circle, linear };

const char* to_string(CocycleFamily f);
std::optional<CocycleFamily> parse_family(const std::string& s);

/// Bump-map valued function on the base: x -> BumpMap{a(x), b(x), c(x)}.
struct BumpField {
  BaseFunction a;
  BaseFunction b;
  BaseFunction c;

  /// Throws when |a(x)| >= 1, where the bump map stops being a diffeomorphism.
  BumpMap at(const BasePoint& x) const;
  bool operator==(const BumpField&) const = default;
};

class CircleCocycle {
 public:
  using Eval = std::function<FiberMap(const BasePoint&)>;

  CircleCocycle(CocycleFamily family, Eval eval, double alpha = 1);

  FiberMap operator()(const BasePoint& x) const { return eval_(x); }
  CocycleFamily family() const { return family_; }
  double alpha() const { return alpha_; }

  static CircleCocycle identity();
  static CircleCocycle rotation(BaseFunction tau, double alpha = 1);
  static CircleCocycle bump(BumpField field, double alpha = 1);
  static CircleCocycle constant_bump(double a);
  /// Bump field depending on finitely many symbols of a shift point.
  static CircleCocycle locally_constant(BumpField field);
  /// x -> v(f x) o v(x)^-1.
  static CircleCocycle coboundary(std::shared_ptr<const HyperbolicBase> base, BumpField generator, double alpha = 1);
  static CircleCocycle coboundary(std::shared_ptr<const HyperbolicBase> base,
                                  std::function<FiberMap(const BasePoint&)> generator, double alpha = 1);
  /// Piecewise constant on grid cells.
  static CircleCocycle table(std::shared_ptr<const BaseGrid> grid, std::vector<std::shared_ptr<const CircleDiffeo>> values,
                             double alpha = 1);

 private:
  CocycleFamily family_;
  Eval eval_;
  double alpha_;
};

class MatrixCocycle {
 public:
  using Eval = std::function<Eigen::MatrixXd(const BasePoint&)>;

  MatrixCocycle(CocycleFamily family, int dim, Eval eval, double alpha = 1);

  Eigen::MatrixXd operator()(const BasePoint& x) const { return eval_(x); }
  int dim() const { return dim_; }
  CocycleFamily family() const { return family_; }
  double alpha() const { return alpha_; }

  static MatrixCocycle constant(const Eigen::MatrixXd& m);
  /// x -> V(f x) V(x)^-1.
  static MatrixCocycle coboundary(std::shared_ptr<const HyperbolicBase> base,
                                  std::function<Eigen::MatrixXd(const BasePoint&)> v, double alpha = 1);

 private:
  CocycleFamily family_;
  int dim_;
  Eval eval_;
  double alpha_;
};

/// Matrix of base functions W(x) (row-major) and the one-parameter family
/// A_t = V_t(f x) V_t(x)^-1 with V_t = exp(t W).
struct LinearGenerator {
  int dim = 2;
  std::vector<BaseFunction> entries;

  Eigen::MatrixXd w(const BasePoint& x) const;
  Eigen::MatrixXd v(const BasePoint& x, double t) const;
  bool operator==(const LinearGenerator&) const = default;
};

MatrixCocycle linear_family(std::shared_ptr<const HyperbolicBase> base, const LinearGenerator& gen, double t);

/// F(x, y) = (f(x), Phi(x)(y)) on the trivial bundle M x N.
struct SkewSystem {
  std::shared_ptr<const HyperbolicBase> base;
  std::variant<CircleCocycle, MatrixCocycle> cocycle;

  FiberKind kind() const {
    return std::holds_alternative<CircleCocycle>(cocycle) ? FiberKind::circle : FiberKind::linear;
  }
  const CircleCocycle& circle() const { return std::get<CircleCocycle>(cocycle); }
  const MatrixCocycle& matrix() const { return std::get<MatrixCocycle>(cocycle); }
  double alpha() const;
  CocycleFamily family() const;
};

SkewSystem make_skew(std::shared_ptr<const HyperbolicBase> base, CircleCocycle c);
SkewSystem make_skew(std::shared_ptr<const HyperbolicBase> base, MatrixCocycle c);

using GroupElement = std::variant<FiberMap, Eigen::MatrixXd>;

FiberMap circle_product(const SkewSystem& s, const BasePoint& x, long n);
Eigen::MatrixXd matrix_product(const SkewSystem& s, const BasePoint& x, long n);
GroupElement cocycle_product(const SkewSystem& s, const BasePoint& x, long n);

struct SkewState {
  BasePoint x;
  double y = 0;  // lift coordinate on the fiber
};

struct LinearState {
  BasePoint x;
  Eigen::VectorXd v;
};

SkewState skew_step(const SkewSystem& s, SkewState state, long k);
LinearState skew_step(const SkewSystem& s, LinearState state, long k);

/// Product of fiber derivatives along n steps (n may be negative).
double fiber_derivative(const SkewSystem& s, const SkewState& state, long n);

/// Fiber distance between two total-space points: circle distance or norm.
double total_space_distance(const SkewSystem& s, const SkewState& a, const SkewState& b);

struct PooReport {
  long max_period_checked = 0;
  double worst_defect = 0;
  long worst_n = 0;
  std::optional<BasePoint> worst_point;
  std::vector<double> defect_by_period;  // index n - 1
  std::size_t points_checked = 0;
  double tolerance = 0;
  bool pass = true;
};

/// Distance of Phi^(n)(p) to the identity for every p in Fix(f^n), n <= P.
PooReport poo_check(const SkewSystem& s, long P, double tol, const Exec& exec = default_exec(),
                    int fiber_samples = CircleDiffeo::default_grid, std::size_t cap = 1000000);

/// C^1 group distance: circle maps on the fiber sample grid, matrices by the
/// max-abs entry.
double group_distance(const GroupElement& a, const GroupElement& b, int fiber_samples = 256);
double distance_to_identity(const GroupElement& a, int fiber_samples = CircleDiffeo::default_grid);

struct HolderEstimate {
  double value = 0;
  std::size_t samples = 0;
  double alpha = 1;
};

/// Empirical sup of d_G(Phi x, Phi y) / d(x, y)^alpha over sampled pairs.
/// Pairs are a fixed function of (seed, index), so the estimate is
/// nondecreasing in the sample count.
HolderEstimate holder_estimate(const SkewSystem& s, std::size_t samples, std::uint64_t seed = 1,
                               const Exec& exec = default_exec(), int fiber_samples = 256);

/// Pair number i of the Hoelder sampling scheme: a random x and a nearby y
/// at a log-uniform scale.
std::pair<BasePoint, BasePoint> holder_pair(const HyperbolicBase& base, std::uint64_t seed, std::size_t i);

}  // namespace livsic

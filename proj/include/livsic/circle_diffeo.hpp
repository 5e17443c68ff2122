#pragma once

#include <memory>
#include <vector>

namespace livsic {

/// Value of a lift together with its derivative.
struct Jet {
  double x = 0;
  double dx = 1;
};

/// Closed-form circle diffeomorphism with lift z + b + (a / 2 pi) sin(2 pi (z - c)).
/// a = 0 gives the rotation by b; |a| < 1 keeps it a diffeomorphism.
struct BumpMap {
  double a = 0;
  double b = 0;
  double c = 0;

  double lift(double z) const;
  double derivative(double z) const;
  Jet apply(Jet j) const;
  double inverse_lift(double w) const;
  Jet apply_inverse(Jet j) const;
};

/// C^1 circle diffeomorphism stored as samples of a monotone lift and of its
/// derivative on the grid i / G. The lift is interpolated linearly; the
/// derivative samples are interpolated linearly and never re-differenced.
class CircleDiffeo {
 public:
  static constexpr int default_grid = 1024;
  static constexpr double min_slope = 1e-6;

  CircleDiffeo() : CircleDiffeo(identity(default_grid)) {}

  static CircleDiffeo identity(int grid = default_grid);
  static CircleDiffeo rotation(double tau, int grid = default_grid);
  static CircleDiffeo from_bump(const BumpMap& m, int grid = default_grid);
  /// Builds from lift and derivative samples. Lift samples must increase
  /// (small violations are repaired to the minimum slope, larger ones throw)
  /// and the lift is shifted by an integer so that lift(0) lies in [-1/2, 1/2).
  static CircleDiffeo from_samples(std::vector<double> lift, std::vector<double> derivative, bool normalize = true);

  int grid() const { return static_cast<int>(lift_.size()); }
  const std::vector<double>& lift_samples() const { return lift_; }
  const std::vector<double>& derivative_samples() const { return deriv_; }

  double lift(double y) const;
  double derivative(double y) const;
  double eval(double y) const;  // reduced mod 1
  Jet apply(Jet j) const;
  double inverse_lift(double z) const;
  Jet apply_inverse(Jet j) const;

  /// this after h, resampled.
  CircleDiffeo compose(const CircleDiffeo& h) const;
  CircleDiffeo inverse() const;

  /// sup |g - h| (as circle points) + sup |g' - h'| over the sample grid.
  double distance(const CircleDiffeo& h) const;
  double c0_distance(const CircleDiffeo& h) const;

  bool operator==(const CircleDiffeo&) const = default;

 private:
  CircleDiffeo(std::vector<double> lift, std::vector<double> deriv) : lift_(std::move(lift)), deriv_(std::move(deriv)) {}
  double node_lift(long k) const;

  std::vector<double> lift_;
  std::vector<double> deriv_;
};

/// Composition chain of closed-form and sampled pieces, applied in order.
/// Evaluating a chain pointwise avoids resampling after every product.
class FiberMap {
 public:
  struct Piece {
    enum class Kind { bump, bump_inverse, sampled, sampled_inverse } kind = Kind::bump;
    BumpMap bump;
    std::shared_ptr<const CircleDiffeo> table;
  };

  FiberMap() = default;
  static FiberMap identity() { return {}; }
  static FiberMap bump(const BumpMap& m);
  static FiberMap rotation(double tau) { return bump({0, tau, 0}); }
  static FiberMap sampled(std::shared_ptr<const CircleDiffeo> g);
  static FiberMap sampled(const CircleDiffeo& g) { return sampled(std::make_shared<const CircleDiffeo>(g)); }

  const std::vector<Piece>& pieces() const { return pieces_; }
  bool is_identity() const { return pieces_.empty(); }

  Jet apply(Jet j) const;
  double lift(double y) const { return apply({y, 1}).x; }
  double derivative(double y) const { return apply({y, 1}).dx; }
  double eval(double y) const;

  /// Map applying `first`, then `then`.
  static FiberMap chain(const FiberMap& first, const FiberMap& then);
  /// this after h.
  FiberMap after(const FiberMap& h) const { return chain(h, *this); }
  FiberMap inverse() const;

  CircleDiffeo sample(int grid = CircleDiffeo::default_grid) const;

  /// sup over y in the fiber sample grid of the circle distance |g(y) - y|.
  double c0_distance_to_identity(int samples = CircleDiffeo::default_grid) const;
  double c0_distance(const FiberMap& h, int samples = CircleDiffeo::default_grid) const;
  /// C^1 group distance on the sample grid.
  double distance(const FiberMap& h, int samples = CircleDiffeo::default_grid) const;

 private:
  std::vector<Piece> pieces_;
};

/// Circle distance between two lifts.
double circle_distance(double a, double b);

}  // namespace livsic

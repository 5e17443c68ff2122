#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "livsic/hyperbolicity.hpp"

namespace livsic {

/// A point of R^2/Z^2, both coordinates in [0, 1).
struct TorusPoint {
  double u = 0;
  double v = 0;

  bool operator==(const TorusPoint&) const = default;
};

double wrap_unit(double t);   // into [0, 1)
double wrap_half(double t);   // into [-1/2, 1/2)

TorusPoint make_torus_point(double u, double v);

/// Rounds to the dyadic lattice 2^-40 Z^2. Orbits started there are computed
/// exactly in double precision for integer matrices with small entries, in
/// both time directions.
TorusPoint dyadic(TorusPoint x);

using IntMatrix2 = std::array<std::array<std::int64_t, 2>, 2>;

IntMatrix2 multiply(const IntMatrix2& a, const IntMatrix2& b);
IntMatrix2 power(const IntMatrix2& a, long n);

/// Hyperbolic toral automorphism x -> A x mod 1.
class CatMap {
 public:
  explicit CatMap(IntMatrix2 matrix);

  const IntMatrix2& matrix() const { return matrix_; }
  const IntMatrix2& inverse_matrix() const { return inverse_; }
  std::int64_t det() const { return det_; }
  std::int64_t trace() const { return matrix_[0][0] + matrix_[1][1]; }

  /// Signed eigenvalues; |mu_u| > 1 > |mu_s|.
  double mu_u() const { return mu_u_; }
  double mu_s() const { return mu_s_; }
  double lambda_u() const { return std::abs(mu_u_); }
  double lambda_s() const { return std::abs(mu_s_); }
  const std::array<double, 2>& e_u() const { return e_u_; }
  const std::array<double, 2>& e_s() const { return e_s_; }
  const HyperbolicityData& hyp() const { return hyp_; }

  /// Coefficients (a, b) with w = a e_u + b e_s.
  std::array<double, 2> eigen_coords(std::array<double, 2> w) const;

  TorusPoint step(TorusPoint x, long k) const;
  TorusPoint step_once(TorusPoint x) const;
  TorusPoint step_back(TorusPoint x) const;

  double distance(TorusPoint x, TorusPoint y) const;

  /// The unique intersection of the e_u line through x with the e_s line
  /// through y. Throws when d(x, y) > delta0.
  TorusPoint bracket(TorusPoint x, TorusPoint y) const;

  /// Point x + t e (e = e_u or e_s).
  TorusPoint along_unstable(TorusPoint x, double t) const;
  TorusPoint along_stable(TorusPoint x, double t) const;

  /// Fix(f^n) as exact rationals (numerators over a common denominator),
  /// enumerated through the Hermite form of A^n - I.
  struct RationalPoint {
    std::int64_t p = 0, q = 0, den = 1;
    TorusPoint to_point() const;
    bool operator==(const RationalPoint&) const = default;
    auto operator<=>(const RationalPoint&) const = default;
  };
  std::vector<RationalPoint> fixed_points_exact(long n, std::size_t cap) const;
  RationalPoint step_exact(const RationalPoint& x) const;

  /// |det(A^n - I)|, the number of points of period n.
  std::int64_t periodic_count(long n) const;

  /// Closing point for a near-return: the unique p in Fix(f^n) near x,
  /// obtained by inverting A^n - I on the lifted return displacement.
  TorusPoint closing_point(TorusPoint x, long n) const;

 private:
  IntMatrix2 matrix_;
  IntMatrix2 inverse_;
  std::int64_t det_ = 1;
  double mu_u_ = 0, mu_s_ = 0;
  std::array<double, 2> e_u_{}, e_s_{};
  std::array<std::array<double, 2>, 2> eigen_inverse_{};
  HyperbolicityData hyp_;
};

}  // namespace livsic

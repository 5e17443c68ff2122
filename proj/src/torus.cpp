#include "livsic/torus.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "livsic/error.hpp"

namespace livsic {

double wrap_unit(double t) {
  double r = t - std::floor(t);
  return r >= 1.0 ? 0.0 : r;
}

double wrap_half(double t) {
  double r = t - std::floor(t + 0.5);
  return r >= 0.5 ? r - 1.0 : r;
}

TorusPoint make_torus_point(double u, double v) { return {wrap_unit(u), wrap_unit(v)}; }

TorusPoint dyadic(TorusPoint x) {
  constexpr double scale = 0x1.0p40;
  return make_torus_point(std::round(x.u * scale) / scale, std::round(x.v * scale) / scale);
}

IntMatrix2 multiply(const IntMatrix2& a, const IntMatrix2& b) {
  IntMatrix2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      __int128 s = static_cast<__int128>(a[i][0]) * b[0][j] + static_cast<__int128>(a[i][1]) * b[1][j];
      if (s > INT64_MAX / 4 || s < -(INT64_MAX / 4))
        throw Error(ErrorKind::enumeration_cap, "integer matrix power overflows 64 bits");
      r[i][j] = static_cast<std::int64_t>(s);
    }
  return r;
}

IntMatrix2 power(const IntMatrix2& a, long n) {
  IntMatrix2 r{{{1, 0}, {0, 1}}};
  for (long i = 0; i < n; ++i) r = multiply(r, a);
  return r;
}

namespace {

std::array<double, 2> unit(double x, double y) {
  double n = std::hypot(x, y);
  return {x / n, y / n};
}

std::array<double, 2> eigenvector(const IntMatrix2& m, double mu) {
  // (A - mu) e = 0; pick the better conditioned row.
  double a = m[0][0], b = m[0][1], c = m[1][0], d = m[1][1];
  std::array<double, 2> e = std::abs(b) + std::abs(a - mu) >= std::abs(c) + std::abs(d - mu)
                                ? unit(b, mu - a)
                                : unit(mu - d, c);
  if (e[0] < 0 || (e[0] == 0 && e[1] < 0)) e = {-e[0], -e[1]};
  return e;
}

// Extended gcd: returns g >= 0 with g = s a + t b.
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& s, std::int64_t& t) {
  std::int64_t s0 = 1, s1 = 0, t0 = 0, t1 = 1;
  while (b != 0) {
    std::int64_t q = a / b;
    std::tie(a, b) = std::make_pair(b, a - q * b);
    std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
    std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
  }
  if (a < 0) { a = -a; s0 = -s0; t0 = -t0; }
  s = s0;
  t = t0;
  return a;
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

CatMap::CatMap(IntMatrix2 m) : matrix_(m) {
  det_ = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const std::int64_t tr = m[0][0] + m[1][1];
  if (det_ != 1 && det_ != -1) {
    std::ostringstream os;
    os << "not hyperbolic: |det| = " << std::abs(det_) << " != 1";
    throw Error(ErrorKind::not_hyperbolic, os.str());
  }
  if (std::abs(tr) <= 2) {
    std::ostringstream os;
    os << "not hyperbolic: |trace| = " << std::abs(tr) << " <= 2";
    throw Error(ErrorKind::not_hyperbolic, os.str());
  }
  inverse_ = {{{det_ * m[1][1], -det_ * m[0][1]}, {-det_ * m[1][0], det_ * m[0][0]}}};

  const double disc = std::sqrt(static_cast<double>(tr * tr - 4 * det_));
  const double r1 = (tr + disc) / 2, r2 = (tr - disc) / 2;
  mu_u_ = std::abs(r1) > std::abs(r2) ? r1 : r2;
  mu_s_ = std::abs(r1) > std::abs(r2) ? r2 : r1;
  e_u_ = eigenvector(m, mu_u_);
  e_s_ = eigenvector(m, mu_s_);
  const double det_e = e_u_[0] * e_s_[1] - e_s_[0] * e_u_[1];
  eigen_inverse_ = {{{e_s_[1] / det_e, -e_s_[0] / det_e}, {-e_u_[1] / det_e, e_u_[0] / det_e}}};

  // kappa bounds each eigencoordinate of a vector by kappa times its length.
  const double kappa = std::max(std::hypot(eigen_inverse_[0][0], eigen_inverse_[0][1]),
                                std::hypot(eigen_inverse_[1][0], eigen_inverse_[1][1]));
  hyp_.eps0 = 0.125;
  hyp_.delta0 = hyp_.eps0 / kappa;
  hyp_.K0 = 1;
  hyp_.lambda = std::log(lambda_u());
  hyp_.nu_s = lambda_s();
  hyp_.nu_u = lambda_u();
  hyp_.closing_c = 2 * kappa / (1 - 1 / lambda_u());
  hyp_.delta1 = hyp_.delta0 / (2 * hyp_.closing_c);
}

std::array<double, 2> CatMap::eigen_coords(std::array<double, 2> w) const {
  return {eigen_inverse_[0][0] * w[0] + eigen_inverse_[0][1] * w[1],
          eigen_inverse_[1][0] * w[0] + eigen_inverse_[1][1] * w[1]};
}

TorusPoint CatMap::step_once(TorusPoint x) const {
  const auto& a = matrix_;
  return {wrap_unit(a[0][0] * x.u + a[0][1] * x.v), wrap_unit(a[1][0] * x.u + a[1][1] * x.v)};
}

TorusPoint CatMap::step_back(TorusPoint x) const {
  const auto& a = inverse_;
  return {wrap_unit(a[0][0] * x.u + a[0][1] * x.v), wrap_unit(a[1][0] * x.u + a[1][1] * x.v)};
}

TorusPoint CatMap::step(TorusPoint x, long k) const {
  for (; k > 0; --k) x = step_once(x);
  for (; k < 0; ++k) x = step_back(x);
  return x;
}

double CatMap::distance(TorusPoint x, TorusPoint y) const {
  return std::hypot(wrap_half(x.u - y.u), wrap_half(x.v - y.v));
}

TorusPoint CatMap::bracket(TorusPoint x, TorusPoint y) const {
  const double d = distance(x, y);
  if (d > hyp_.delta0) {
    std::ostringstream os;
    os << "bracket needs d(x,y) <= delta0 = " << hyp_.delta0 << ", got " << d;
    throw Error(ErrorKind::precondition, os.str());
  }
  // x + s e_u = y + t e_s in the cover; s is the e_u coordinate of y - x.
  const auto ab = eigen_coords({wrap_half(y.u - x.u), wrap_half(y.v - x.v)});
  return along_unstable(x, ab[0]);
}

TorusPoint CatMap::along_unstable(TorusPoint x, double t) const {
  return make_torus_point(x.u + t * e_u_[0], x.v + t * e_u_[1]);
}

TorusPoint CatMap::along_stable(TorusPoint x, double t) const {
  return make_torus_point(x.u + t * e_s_[0], x.v + t * e_s_[1]);
}

TorusPoint CatMap::RationalPoint::to_point() const {
  return {static_cast<double>(p) / static_cast<double>(den),
          static_cast<double>(q) / static_cast<double>(den)};
}

CatMap::RationalPoint CatMap::step_exact(const RationalPoint& x) const {
  const auto& a = matrix_;
  auto img = [&](std::int64_t r0, std::int64_t r1) {
    __int128 s = static_cast<__int128>(r0) * x.p + static_cast<__int128>(r1) * x.q;
    __int128 r = s % x.den;
    if (r < 0) r += x.den;
    return static_cast<std::int64_t>(r);
  };
  return {img(a[0][0], a[0][1]), img(a[1][0], a[1][1]), x.den};
}

std::int64_t CatMap::periodic_count(long n) const {
  IntMatrix2 b = power(matrix_, n);
  b[0][0] -= 1;
  b[1][1] -= 1;
  return std::abs(b[0][0] * b[1][1] - b[0][1] * b[1][0]);
}

std::vector<CatMap::RationalPoint> CatMap::fixed_points_exact(long n, std::size_t cap) const {
  if (n < 1) throw Error(ErrorKind::precondition, "period must be >= 1");
  IntMatrix2 b = power(matrix_, n);
  b[0][0] -= 1;
  b[1][1] -= 1;
  const std::int64_t det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
  const std::int64_t count = std::abs(det);
  if (static_cast<std::size_t>(count) > cap) {
    std::ostringstream os;
    os << "|det(A^" << n << " - I)| = " << count << " exceeds enumeration cap " << cap;
    throw Error(ErrorKind::enumeration_cap, os.str());
  }
  // Column operations bring the lattice B Z^2 to basis (g, h), (0, c).
  std::int64_t s, t;
  const std::int64_t g = ext_gcd(b[0][0], b[0][1], s, t);
  const std::int64_t c = std::abs(det / g);
  // Solutions of B x = k (mod Z^2) are x = adj(B) k / det.
  const IntMatrix2 adj{{{b[1][1], -b[0][1]}, {-b[1][0], b[0][0]}}};
  const std::int64_t sign = det > 0 ? 1 : -1;
  std::vector<RationalPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < g; ++i)
    for (std::int64_t j = 0; j < c; ++j) {
      __int128 p = static_cast<__int128>(adj[0][0]) * i + static_cast<__int128>(adj[0][1]) * j;
      __int128 q = static_cast<__int128>(adj[1][0]) * i + static_cast<__int128>(adj[1][1]) * j;
      p = (p * sign) % count;
      q = (q * sign) % count;
      out.push_back({mod(static_cast<std::int64_t>(p), count), mod(static_cast<std::int64_t>(q), count), count});
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (static_cast<std::int64_t>(out.size()) != count)
    throw Error(ErrorKind::precondition, "periodic point enumeration produced duplicates");
  return out;
}

TorusPoint CatMap::closing_point(TorusPoint x, long n) const {
  const TorusPoint fx = step(x, n);
  const auto ab = eigen_coords({wrap_half(fx.u - x.u), wrap_half(fx.v - x.v)});
  // x - p = a e_u + b e_s with (A^n - I)(x - p) equal to the return displacement.
  const double a = ab[0] / (std::pow(mu_u_, n) - 1);
  const double b = ab[1] / (std::pow(mu_s_, n) - 1);
  return make_torus_point(x.u - a * e_u_[0] - b * e_s_[0], x.v - a * e_u_[1] - b * e_s_[1]);
}

}  // namespace livsic

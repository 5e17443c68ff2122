#include "livsic/circle_diffeo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "livsic/error.hpp"

namespace livsic {

namespace {
constexpr double two_pi = 2 * std::numbers::pi;
}

double circle_distance(double a, double b) {
  const double d = a - b;
  return std::abs(d - std::round(d));
}

// ------------------------------------------------------------------ BumpMap

double BumpMap::lift(double z) const { return z + b + a / two_pi * std::sin(two_pi * (z - c)); }

double BumpMap::derivative(double z) const { return 1 + a * std::cos(two_pi * (z - c)); }

Jet BumpMap::apply(Jet j) const { return {lift(j.x), derivative(j.x) * j.dx}; }

double BumpMap::inverse_lift(double w) const {
  if (a == 0) return w - b;
  const double k = a / two_pi;
  const double spread = std::abs(k);
  double lo = w - b - spread, hi = w - b + spread;
  // First-order inverse as the starting guess; Newton with a bisection guard.
  double z = w - b - k * std::sin(two_pi * (w - b - c));
  const double tol = 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(w));
  for (int it = 0; it < 100; ++it) {
    const double t = two_pi * (z - c);
    const double r = z + b + k * std::sin(t) - w;
    if (std::abs(r) <= tol) break;
    if (r > 0) hi = z; else lo = z;
    double next = z - r / (1 + a * std::cos(t));
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::abs(next - z) <= 1e-16 * std::max(1.0, std::abs(z));
    z = next;
    if (done) break;
  }
  return z;
}

Jet BumpMap::apply_inverse(Jet j) const {
  const double z = inverse_lift(j.x);
  return {z, j.dx / derivative(z)};
}

// -------------------------------------------------------------- CircleDiffeo

CircleDiffeo CircleDiffeo::identity(int grid) { return rotation(0, grid); }

CircleDiffeo CircleDiffeo::rotation(double tau, int grid) {
  if (grid < 2) throw Error(ErrorKind::precondition, "fiber grid needs at least 2 samples");
  std::vector<double> lift(static_cast<std::size_t>(grid)), deriv(static_cast<std::size_t>(grid), 1.0);
  for (int i = 0; i < grid; ++i) lift[static_cast<std::size_t>(i)] = static_cast<double>(i) / grid + tau;
  return from_samples(std::move(lift), std::move(deriv));
}

CircleDiffeo CircleDiffeo::from_bump(const BumpMap& m, int grid) {
  std::vector<double> lift(static_cast<std::size_t>(grid)), deriv(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) {
    const double y = static_cast<double>(i) / grid;
    lift[static_cast<std::size_t>(i)] = m.lift(y);
    deriv[static_cast<std::size_t>(i)] = m.derivative(y);
  }
  return from_samples(std::move(lift), std::move(deriv));
}

CircleDiffeo CircleDiffeo::from_samples(std::vector<double> lift, std::vector<double> deriv, bool normalize) {
  const std::size_t g = lift.size();
  if (g < 2 || deriv.size() != g) throw Error(ErrorKind::precondition, "lift and derivative samples must have equal size >= 2");
  const double step = min_slope / static_cast<double>(g);
  double worst = 0;
  for (std::size_t i = 1; i < g; ++i) {
    const double floor_value = lift[i - 1] + step;
    if (lift[i] < floor_value) {
      worst = std::max(worst, floor_value - lift[i]);
      lift[i] = floor_value;
    }
  }
  worst = std::max(worst, lift[g - 1] + step - (lift[0] + 1));
  if (worst > 1e-3) {
    std::ostringstream os;
    os << "lift samples are not monotone (violation " << worst << "); fiber grid too coarse";
    throw Error(ErrorKind::monotonicity, os.str());
  }
  for (double& d : deriv) {
    if (!(d > 0)) {
      if (d < -1e-3 || std::isnan(d)) throw Error(ErrorKind::monotonicity, "nonpositive derivative sample");
      d = min_slope;
    }
  }
  if (normalize) {
    const double shift = std::floor(lift[0] + 0.5);
    if (shift != 0)
      for (double& v : lift) v -= shift;
  }
  return CircleDiffeo(std::move(lift), std::move(deriv));
}

double CircleDiffeo::node_lift(long k) const {
  const long g = grid();
  const long q = k >= 0 ? k / g : -((-k + g - 1) / g);
  return lift_[static_cast<std::size_t>(k - q * g)] + static_cast<double>(q);
}

double CircleDiffeo::lift(double y) const {
  const double t = y * grid();
  const double k = std::floor(t);
  const double frac = t - k;
  const long kk = static_cast<long>(k);
  const double l0 = node_lift(kk), l1 = node_lift(kk + 1);
  return l0 + frac * (l1 - l0);
}

double CircleDiffeo::derivative(double y) const {
  const long g = grid();
  const double t = y * static_cast<double>(g);
  const double k = std::floor(t);
  const double frac = t - k;
  long i = static_cast<long>(k) % g;
  if (i < 0) i += g;
  const long j = (i + 1) % g;
  return deriv_[static_cast<std::size_t>(i)] * (1 - frac) + deriv_[static_cast<std::size_t>(j)] * frac;
}

double CircleDiffeo::eval(double y) const {
  const double v = lift(y);
  const double r = v - std::floor(v);
  return r >= 1 ? 0 : r;
}

Jet CircleDiffeo::apply(Jet j) const { return {lift(j.x), derivative(j.x) * j.dx}; }

double CircleDiffeo::inverse_lift(double z) const {
  const long g = grid();
  const double l0 = lift_[0];
  const double m = std::floor(z - l0);
  const double zz = z - m;
  // First node index whose lift exceeds zz, searched on [1, g].
  auto begin = lift_.begin() + 1;
  auto it = std::upper_bound(begin, lift_.end(), zz);
  long k = static_cast<long>(it - lift_.begin()) - 1;  // node k <= zz < node k+1
  if (k < 0) k = 0;
  const double a = node_lift(k), b = node_lift(k + 1);
  const double frac = b > a ? std::clamp((zz - a) / (b - a), 0.0, 1.0) : 0.0;
  return (static_cast<double>(k) + frac) / static_cast<double>(g) + m;
}

Jet CircleDiffeo::apply_inverse(Jet j) const {
  const double y = inverse_lift(j.x);
  return {y, j.dx / derivative(y)};
}

CircleDiffeo CircleDiffeo::compose(const CircleDiffeo& h) const {
  const int g = h.grid();
  std::vector<double> lift(static_cast<std::size_t>(g)), deriv(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) {
    const Jet j = apply(h.apply({static_cast<double>(i) / g, 1}));
    lift[static_cast<std::size_t>(i)] = j.x;
    deriv[static_cast<std::size_t>(i)] = j.dx;
  }
  return from_samples(std::move(lift), std::move(deriv));
}

CircleDiffeo CircleDiffeo::inverse() const {
  const int g = grid();
  std::vector<double> lift(static_cast<std::size_t>(g)), deriv(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) {
    const Jet j = apply_inverse({static_cast<double>(i) / g, 1});
    lift[static_cast<std::size_t>(i)] = j.x;
    deriv[static_cast<std::size_t>(i)] = j.dx;
  }
  return from_samples(std::move(lift), std::move(deriv));
}

double CircleDiffeo::c0_distance(const CircleDiffeo& h) const {
  const int g = std::max(grid(), h.grid());
  double d = 0;
  for (int i = 0; i < g; ++i) {
    const double y = static_cast<double>(i) / g;
    d = std::max(d, circle_distance(lift(y), h.lift(y)));
  }
  return d;
}

double CircleDiffeo::distance(const CircleDiffeo& h) const {
  const int g = std::max(grid(), h.grid());
  double d0 = 0, d1 = 0;
  for (int i = 0; i < g; ++i) {
    const double y = static_cast<double>(i) / g;
    d0 = std::max(d0, circle_distance(lift(y), h.lift(y)));
    d1 = std::max(d1, std::abs(derivative(y) - h.derivative(y)));
  }
  return d0 + d1;
}

// ------------------------------------------------------------------ FiberMap

FiberMap FiberMap::bump(const BumpMap& m) {
  FiberMap f;
  if (m.a == 0 && m.b == 0) return f;
  f.pieces_.push_back({Piece::Kind::bump, m, nullptr});
  return f;
}

FiberMap FiberMap::sampled(std::shared_ptr<const CircleDiffeo> g) {
  FiberMap f;
  f.pieces_.push_back({Piece::Kind::sampled, {}, std::move(g)});
  return f;
}

Jet FiberMap::apply(Jet j) const {
  for (const Piece& p : pieces_) {
    switch (p.kind) {
      case Piece::Kind::bump: j = p.bump.apply(j); break;
      case Piece::Kind::bump_inverse: j = p.bump.apply_inverse(j); break;
      case Piece::Kind::sampled: j = p.table->apply(j); break;
      case Piece::Kind::sampled_inverse: j = p.table->apply_inverse(j); break;
    }
  }
  return j;
}

double FiberMap::eval(double y) const {
  const double v = lift(y);
  const double r = v - std::floor(v);
  return r >= 1 ? 0 : r;
}

FiberMap FiberMap::chain(const FiberMap& first, const FiberMap& then) {
  FiberMap f = first;
  f.pieces_.insert(f.pieces_.end(), then.pieces_.begin(), then.pieces_.end());
  return f;
}

FiberMap FiberMap::inverse() const {
  FiberMap f;
  f.pieces_.reserve(pieces_.size());
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
    Piece p = *it;
    switch (p.kind) {
      case Piece::Kind::bump: p.kind = Piece::Kind::bump_inverse; break;
      case Piece::Kind::bump_inverse: p.kind = Piece::Kind::bump; break;
      case Piece::Kind::sampled: p.kind = Piece::Kind::sampled_inverse; break;
      case Piece::Kind::sampled_inverse: p.kind = Piece::Kind::sampled; break;
    }
    f.pieces_.push_back(p);
  }
  return f;
}

CircleDiffeo FiberMap::sample(int grid) const {
  std::vector<double> lift(static_cast<std::size_t>(grid)), deriv(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) {
    const Jet j = apply({static_cast<double>(i) / grid, 1});
    lift[static_cast<std::size_t>(i)] = j.x;
    deriv[static_cast<std::size_t>(i)] = j.dx;
  }
  return CircleDiffeo::from_samples(std::move(lift), std::move(deriv));
}

double FiberMap::c0_distance_to_identity(int samples) const {
  double d = 0;
  for (int i = 0; i < samples; ++i) {
    const double y = static_cast<double>(i) / samples;
    d = std::max(d, circle_distance(lift(y), y));
  }
  return d;
}

double FiberMap::c0_distance(const FiberMap& h, int samples) const {
  double d = 0;
  for (int i = 0; i < samples; ++i) {
    const double y = static_cast<double>(i) / samples;
    d = std::max(d, circle_distance(lift(y), h.lift(y)));
  }
  return d;
}

double FiberMap::distance(const FiberMap& h, int samples) const {
  double d0 = 0, d1 = 0;
  for (int i = 0; i < samples; ++i) {
    const double y = static_cast<double>(i) / samples;
    const Jet a = apply({y, 1}), b = h.apply({y, 1});
    d0 = std::max(d0, circle_distance(a.x, b.x));
    d1 = std::max(d1, std::abs(a.dx - b.dx));
  }
  return d0 + d1;
}

}  // namespace livsic

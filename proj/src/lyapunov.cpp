#include "livsic/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "livsic/error.hpp"

namespace livsic {

namespace {

double reduce(double y) { return y - std::floor(y); }

std::vector<long> checkpoint_list(long N, int checkpoints) {
  std::vector<long> out;
  for (int c = 1; c <= checkpoints; ++c) {
    const long k = N * c / checkpoints;
    if (k > 0 && (out.empty() || out.back() != k)) out.push_back(k);
  }
  return out;
}

LyapunovEstimate linear_lyapunov(const SkewSystem& s, const BasePoint& x0, long N, int checkpoints, bool backward) {
  const auto& a = s.matrix();
  const int d = a.dim();
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd logs = Eigen::VectorXd::Zero(d);
  BasePoint x = x0;
  LyapunovEstimate e;
  e.start_x = x0;
  e.orbit_length = N;
  const auto marks = checkpoint_list(N, checkpoints);
  std::size_t next = 0;
  for (long t = 1; t <= N; ++t) {
    Eigen::MatrixXd m;
    if (backward) {
      x = s.base->step(x, -1);
      m = a(x).inverse() * q;
    } else {
      m = a(x) * q;
      x = s.base->step(x, 1);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR();
    for (int i = 0; i < d; ++i) logs(i) += std::log(std::abs(r(i, i)));
    if (next < marks.size() && marks[next] == t) {
      e.convergence_trace.emplace_back(t, logs.maxCoeff() / static_cast<double>(t));
      ++next;
    }
  }
  e.lambda_plus = logs.maxCoeff() / static_cast<double>(N);
  e.lambda_minus = logs.minCoeff() / static_cast<double>(N);
  return e;
}

LyapunovEstimate circle_lyapunov(const SkewSystem& s, const SkewState& state, long N, int checkpoints, bool backward) {
  const auto& phi = s.circle();
  LyapunovEstimate e;
  e.start_x = state.x;
  e.start_y = state.y;
  e.orbit_length = N;
  const auto marks = checkpoint_list(N, checkpoints);
  std::size_t next = 0;
  // Sum of log |d_fib| and of log |(d_fib)^-1|^-1; equal for circle fibers
  // but kept separate to mirror the two definitions.
  double sum_plus = 0, sum_minus = 0;
  BasePoint x = state.x;
  double y = state.y;
  for (long t = 1; t <= N; ++t) {
    Jet j;
    if (backward) {
      x = s.base->step(x, -1);
      j = phi(x).inverse().apply({y, 1});
    } else {
      j = phi(x).apply({y, 1});
      x = s.base->step(x, 1);
    }
    sum_plus += std::log(std::abs(j.dx));
    sum_minus -= std::log(std::abs(1 / j.dx));
    y = reduce(j.x);
    if (next < marks.size() && marks[next] == t) {
      e.convergence_trace.emplace_back(t, sum_plus / static_cast<double>(t));
      ++next;
    }
  }
  e.lambda_plus = sum_plus / static_cast<double>(N);
  e.lambda_minus = sum_minus / static_cast<double>(N);
  return e;
}

}  // namespace

LyapunovEstimate lyapunov_forward(const SkewSystem& s, const SkewState& state, long N, int checkpoints) {
  if (N < 1) throw Error(ErrorKind::precondition, "Lyapunov estimate needs N >= 1");
  if (s.kind() == FiberKind::linear) return linear_lyapunov(s, state.x, N, checkpoints, false);
  return circle_lyapunov(s, state, N, checkpoints, false);
}

LyapunovEstimate lyapunov_backward(const SkewSystem& s, const SkewState& state, long N, int checkpoints) {
  if (N < 1) throw Error(ErrorKind::precondition, "Lyapunov estimate needs N >= 1");
  if (s.kind() == FiberKind::linear) return linear_lyapunov(s, state.x, N, checkpoints, true);
  return circle_lyapunov(s, state, N, checkpoints, true);
}

PeriodicFiberReport lyapunov_periodic(const SkewSystem& s, const BasePoint& p, long n, int max_fiber_period,
                                      int samples, double degenerate_tol) {
  if (n < 1) throw Error(ErrorKind::precondition, "period must be >= 1");
  if (s.base->distance(s.base->step(p, n), p) > 1e-9)
    throw Error(ErrorKind::precondition, "lyapunov_periodic needs p in Fix(f^n)");
  PeriodicFiberReport r;
  r.p = p;
  r.n = n;
  const FiberMap g = circle_product(s, p, n);

  std::vector<double> disp(static_cast<std::size_t>(samples) + 1);
  double worst = 0;
  r.min_derivative = std::numeric_limits<double>::infinity();
  r.max_derivative = 0;
  for (int i = 0; i < samples; ++i) {
    const double y = static_cast<double>(i) / samples;
    const Jet j = g.apply({y, 1});
    disp[static_cast<std::size_t>(i)] = j.x - y;
    worst = std::max(worst, std::abs(j.x - y - std::round(j.x - y)));
    r.min_derivative = std::min(r.min_derivative, j.dx);
    r.max_derivative = std::max(r.max_derivative, j.dx);
  }
  if (worst <= degenerate_tol) {
    r.degenerate = true;
    return r;
  }

  std::vector<double> claimed;
  auto already = [&](double y) {
    return std::any_of(claimed.begin(), claimed.end(), [&](double c) { return circle_distance(c, y) < 1e-9; });
  };
  FiberMap gq;
  for (int q = 1; q <= max_fiber_period; ++q) {
    gq = FiberMap::chain(gq, g);
    for (int i = 0; i < samples; ++i) {
      const double y = static_cast<double>(i) / samples;
      disp[static_cast<std::size_t>(i)] = gq.lift(y) - y;
    }
    disp[static_cast<std::size_t>(samples)] = disp[0];
    for (int i = 0; i < samples; ++i) {
      const double d0 = disp[static_cast<std::size_t>(i)], d1 = disp[static_cast<std::size_t>(i) + 1];
      const double lo_y = static_cast<double>(i) / samples, hi_y = static_cast<double>(i + 1) / samples;
      for (double m = std::ceil(std::min(d0, d1)); m <= std::floor(std::max(d0, d1)); m += 1) {
        // Root of gq(y) - y - m on [lo_y, hi_y] by bisection.
        double a = lo_y, b = hi_y;
        double fa = d0 - m;
        if (fa == 0) {
          b = a;
        } else if (d1 - m == 0) {
          a = b;
        }
        for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
          const double mid = 0.5 * (a + b);
          const double fm = gq.lift(mid) - mid - m;
          if ((fm > 0) == (fa > 0) && fm != 0) {
            a = mid;
            fa = fm;
          } else {
            b = mid;
          }
        }
        const double y = reduce(0.5 * (a + b));
        if (already(y)) continue;
        // Minimal fiber period must be q.
        bool minimal = true;
        FiberMap gd;
        for (int d = 1; d < q && minimal; ++d) {
          gd = FiberMap::chain(gd, g);
          if (q % d == 0 && circle_distance(gd.lift(y), y) < 1e-9) minimal = false;
        }
        if (!minimal) continue;
        FiberCycle c;
        double z = y;
        for (int k = 0; k < q; ++k) {
          c.points.push_back(z);
          claimed.push_back(z);
          z = reduce(g.lift(z));
        }
        c.multiplier = gq.derivative(y);
        r.cycles.push_back(std::move(c));
      }
    }
  }
  std::sort(r.cycles.begin(), r.cycles.end(),
            [](const FiberCycle& a, const FiberCycle& b) { return a.points.front() < b.points.front(); });
  return r;
}

std::vector<double> linear_periodic_moduli(const SkewSystem& s, const BasePoint& p, long n) {
  const Eigen::MatrixXd m = matrix_product(s, p, n);
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  std::vector<double> out;
  for (int i = 0; i < m.rows(); ++i) out.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(out.rbegin(), out.rend());
  return out;
}

SweepResult exponent_sweep(const SkewSystem& s, long P, std::size_t random_orbits, long N, std::uint64_t seed,
                           const Exec& exec) {
  std::vector<PeriodicOrbit> orbits;
  for (long n = 1; n <= P; ++n)
    for (auto& o : s.base->periodic_orbits(n)) orbits.push_back(std::move(o));

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<SweepRow>> periodic_rows(orbits.size());
  parallel_for(orbits.size(), exec, [&](std::size_t i) {
    const auto& o = orbits[i];
    const double n = static_cast<double>(o.period);
    SweepRow base_row;
    base_row.orbit_id = static_cast<long>(i);
    base_row.period = o.period;
    base_row.type = "periodic";
    base_row.length = o.period;
    auto& rows = periodic_rows[i];
    if (s.kind() == FiberKind::linear) {
      const auto mod = linear_periodic_moduli(s, o.point, o.period);
      SweepRow r = base_row;
      r.lambda_plus = std::log(mod.front()) / n;
      r.lambda_minus = std::log(mod.back()) / n;
      r.multiplier = mod.front();
      rows.push_back(r);
      return;
    }
    const auto rep = lyapunov_periodic(s, o.point, o.period);
    if (rep.degenerate) {
      SweepRow r = base_row;
      r.lambda_plus = std::log(rep.max_derivative) / n;
      r.lambda_minus = std::log(rep.min_derivative) / n;
      r.multiplier = rep.max_derivative;
      rows.push_back(r);
    } else if (rep.cycles.empty()) {
      // No fiber periodic points: average along the periodic base orbit.
      const auto e = lyapunov_forward(s, {o.point, 0.0}, o.period * 1000, 1);
      SweepRow r = base_row;
      r.lambda_plus = e.lambda_plus;
      r.lambda_minus = e.lambda_minus;
      r.length = e.orbit_length;
      r.multiplier = nan;
      rows.push_back(r);
    } else {
      for (const auto& c : rep.cycles) {
        SweepRow r = base_row;
        r.lambda_plus = r.lambda_minus = std::log(std::abs(c.multiplier)) / n;
        r.multiplier = c.multiplier;
        rows.push_back(r);
      }
    }
  });

  std::vector<SweepRow> generic(random_orbits);
  const RandomStream root(seed);
  parallel_for(random_orbits, exec, [&](std::size_t i) {
    RandomStream rng = root.child(i);
    SkewState st{s.base->random_point(rng), rng.uniform()};
    const auto e = lyapunov_forward(s, st, N, 1);
    SweepRow r;
    r.orbit_id = static_cast<long>(orbits.size() + i);
    r.period = 0;
    r.type = "generic";
    r.lambda_plus = e.lambda_plus;
    r.lambda_minus = e.lambda_minus;
    r.length = N;
    r.multiplier = nan;
    generic[i] = r;
  });

  SweepResult out;
  for (auto& rows : periodic_rows)
    for (auto& r : rows) out.rows.push_back(std::move(r));
  for (auto& r : generic) out.rows.push_back(std::move(r));
  out.envelope_min = std::numeric_limits<double>::infinity();
  out.envelope_max = -std::numeric_limits<double>::infinity();
  for (const auto& r : out.rows) {
    out.envelope_min = std::min(out.envelope_min, r.lambda_minus);
    out.envelope_max = std::max(out.envelope_max, r.lambda_plus);
  }
  if (out.rows.empty()) out.envelope_min = out.envelope_max = 0;
  return out;
}

}  // namespace livsic

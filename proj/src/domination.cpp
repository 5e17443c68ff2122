#include "livsic/domination.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

#include "livsic/error.hpp"

namespace livsic {

namespace {

struct Extremes {
  std::vector<double> max_log, min_log;
  explicit Extremes(long ell_max)
      : max_log(static_cast<std::size_t>(ell_max), -std::numeric_limits<double>::infinity()),
        min_log(static_cast<std::size_t>(ell_max), std::numeric_limits<double>::infinity()) {}
  void merge(const Extremes& o) {
    for (std::size_t l = 0; l < max_log.size(); ++l) {
      max_log[l] = std::max(max_log[l], o.max_log[l]);
      min_log[l] = std::min(min_log[l], o.min_log[l]);
    }
  }
};

// Log fiber derivatives of F^l, l = 1..ell_max, for fiber points ys over x.
Extremes circle_extremes(const SkewSystem& s, BasePoint x, std::vector<double> ys, long ell_max) {
  Extremes e(ell_max);
  std::vector<double> logs(ys.size(), 0.0);
  for (long l = 0; l < ell_max; ++l) {
    const FiberMap phi = s.circle()(x);
    for (std::size_t i = 0; i < ys.size(); ++i) {
      const Jet j = phi.apply({ys[i], 1});
      logs[i] += std::log(j.dx);
      ys[i] = j.x - std::floor(j.x);
      e.max_log[static_cast<std::size_t>(l)] = std::max(e.max_log[static_cast<std::size_t>(l)], logs[i]);
      e.min_log[static_cast<std::size_t>(l)] = std::min(e.min_log[static_cast<std::size_t>(l)], logs[i]);
    }
    x = s.base->step(x, 1);
  }
  return e;
}

Extremes linear_extremes(const SkewSystem& s, BasePoint x, long ell_max) {
  Extremes e(ell_max);
  const auto& a = s.matrix();
  Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(a.dim(), a.dim());
  for (long l = 0; l < ell_max; ++l) {
    prod = a(x) * prod;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(prod);
    const auto& sv = svd.singularValues();
    e.max_log[static_cast<std::size_t>(l)] = std::log(sv(0));
    e.min_log[static_cast<std::size_t>(l)] = std::log(sv(sv.size() - 1));
    x = s.base->step(x, 1);
  }
  return e;
}

}  // namespace

DominationReport domination_test(const SkewSystem& s, double beta, long ell_max, const DominationGrid& grid,
                                 const Exec& exec) {
  if (!(beta > 0 && beta <= 1)) throw Error(ErrorKind::precondition, "beta must lie in (0, 1]");
  if (ell_max < 1) throw Error(ErrorKind::precondition, "ell_max must be >= 1");
  const BaseGrid g = grid.base_resolution > 0 ? s.base->grid(grid.base_resolution) : s.base->default_grid();
  const DenseOrbitPlan plan = s.base->transitive_point(g, grid.seed);
  const int fs = grid.fiber_samples;
  std::vector<double> fiber(static_cast<std::size_t>(fs));
  for (int i = 0; i < fs; ++i) fiber[static_cast<std::size_t>(i)] = static_cast<double>(i) / fs;

  // Extra states: periodic fiber cycles over periodic base points.
  struct Extra {
    BasePoint x;
    double y;
  };
  std::vector<Extra> extra;
  if (s.kind() == FiberKind::circle)
    for (long n = 1; n <= grid.periodic_up_to; ++n)
      for (const auto& o : s.base->periodic_orbits(n)) {
        const auto rep = lyapunov_periodic(s, o.point, o.period);
        for (const auto& c : rep.cycles) extra.push_back({o.point, c.points.front()});
      }

  const std::size_t cells = plan.representative.size();
  std::vector<Extremes> parts(cells + extra.size(), Extremes(ell_max));
  parallel_for(parts.size(), exec, [&](std::size_t i) {
    if (i < cells) {
      parts[i] = s.kind() == FiberKind::circle ? circle_extremes(s, plan.representative[i], fiber, ell_max)
                                               : linear_extremes(s, plan.representative[i], ell_max);
    } else {
      const auto& e = extra[i - cells];
      parts[i] = circle_extremes(s, e.x, {e.y}, ell_max);
    }
  });
  Extremes all(ell_max);
  for (const auto& p : parts) all.merge(p);

  DominationReport r;
  r.beta = beta;
  r.states = s.kind() == FiberKind::circle ? cells * static_cast<std::size_t>(fs) + extra.size() : cells;
  std::ostringstream spec;
  spec << g.size() << " base cells x " << (s.kind() == FiberKind::circle ? fs : 1) << " fiber samples + "
       << extra.size() << " periodic fiber cycles";
  r.grid_spec = spec.str();
  r.max_log_derivative = all.max_log;
  r.min_log_derivative = all.min_log;

  const auto& h = s.base->hyp();
  double best = std::numeric_limits<double>::infinity();
  for (long l = 1; l <= ell_max; ++l) {
    const double L = static_cast<double>(l);
    // log of |d F^l| / ((nu_u^l)^beta / 2) and of 2 (nu_s^l)^beta / m(d F^l).
    const double log_ratio_u = all.max_log[static_cast<std::size_t>(l - 1)] - (beta * L * std::log(h.nu_u) - std::log(2.0));
    const double log_ratio_s = std::log(2.0) + beta * L * std::log(h.nu_s) - all.min_log[static_cast<std::size_t>(l - 1)];
    const bool u = log_ratio_u <= 0, sd = log_ratio_s <= 0;
    if (u && !r.ell_u) r.ell_u = l;
    if (sd && !r.ell_s) r.ell_s = l;
    const double ratio = std::exp(std::max(log_ratio_u, log_ratio_s));
    if (u && sd && !r.ell) {
      r.ell = l;
      r.margin = ratio;
    }
    best = std::min(best, ratio);
  }
  if (!r.ell) r.margin = best;
  r.side = r.ell_u && r.ell_s ? "both" : r.ell_u ? "u" : r.ell_s ? "s" : "none";
  return r;
}

namespace {

std::string point_key(const BasePoint& p, long n) {
  std::ostringstream os;
  os << n << ':';
  if (const auto* t = std::get_if<TorusPoint>(&p)) {
    os << std::llround(t->u * 1e7) % 10000000 << ',' << std::llround(t->v * 1e7) % 10000000;
  } else {
    const auto& s = std::get<SftPoint>(p);
    for (long i = 0; i < n; ++i) os << static_cast<int>(s.at(i));
  }
  return os.str();
}

}  // namespace

FinderReport find_contracting_periodic(const SkewSystem& s, const SkewState& seed, long N, const FinderOptions& options) {
  if (s.kind() != FiberKind::circle) throw Error(ErrorKind::precondition, "the finder works on circle fibers");
  const auto& base = *s.base;
  const double delta1 = base.hyp().delta1;
  FinderReport report;
  std::set<std::string> seen;
  // The most recent max_period base iterates; x_{t-n} returns near x_t.
  std::deque<BasePoint> recent;
  BasePoint x = seed.x;
  for (long t = 0; t <= N; ++t) {
    report.steps = t;
    for (long n = 1; n <= static_cast<long>(recent.size()); ++n) {
      const BasePoint& origin = recent[recent.size() - static_cast<std::size_t>(n)];
      if (!base.closer_than(origin, x, delta1)) continue;
      ++report.near_returns;
      // On a shift the closing point is the periodic word x_0..x_{n-1}, so
      // repeats are skipped before the closing computation.
      if (base.kind() == BaseKind::sft && seen.count(point_key(origin, n))) break;
      ClosingResult c;
      try {
        c = base.closing(origin, n);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::precondition) throw;
        continue;
      }
      if (!seen.insert(point_key(c.p, n)).second) break;
      ++report.closings;
      const auto rep = lyapunov_periodic(s, c.p, n, 1, options.fiber_samples);
      for (const auto& cyc : rep.cycles) {
        if (std::abs(cyc.multiplier) < 1 - options.contraction_tol) {
          report.found = ContractingPoint{c.p, n, cyc.points, cyc.multiplier};
          return report;
        }
      }
      break;  // shortest period at this time step handled
    }
    recent.push_back(x);
    if (static_cast<long>(recent.size()) > options.max_period) recent.pop_front();
    x = base.step(x, 1);
  }
  return report;
}

}  // namespace livsic

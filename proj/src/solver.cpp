#include "livsic/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "livsic/error.hpp"
#include "livsic/rng.hpp"

namespace livsic {

namespace {

struct Visit {
  long k;
  std::size_t cell;
};

std::vector<Visit> visits_in_order(const DenseOrbitPlan& plan) {
  std::vector<Visit> v;
  v.reserve(plan.first_visit.size());
  for (std::size_t c = 0; c < plan.first_visit.size(); ++c) v.push_back({plan.first_visit[c], c});
  std::sort(v.begin(), v.end(), [](const Visit& a, const Visit& b) { return a.k < b.k; });
  return v;
}

// Walks the plan's orbit 0, 1, ... and then -1, -2, ..., carrying a state
// that is advanced by one cocycle step at a time, and snapshots it at first
// visits. fwd(state, x) maps the value at x to the value at f x; bwd(state, x)
// maps the value at f x to the value at x.
template <class T, class State, class Fwd, class Bwd, class Snap>
std::vector<T> transport(const HyperbolicBase& base, const DenseOrbitPlan& plan, const State& init, Fwd fwd, Bwd bwd,
                         Snap snap, long& used) {
  const auto order = visits_in_order(plan);
  std::vector<T> values(plan.first_visit.size());
  used = 0;
  // Forward: visits with k >= 0 in increasing order.
  {
    State s = init;
    BasePoint x = plan.start;
    long k = 0;
    for (const auto& v : order) {
      if (v.k < 0) continue;
      while (k < v.k) {
        fwd(s, x, k);
        x = base.step(x, 1);
        ++k;
      }
      values[v.cell] = snap(s, k);
    }
    used = std::max(used, k);
  }
  {
    State s = init;
    BasePoint x = plan.start;
    long k = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (it->k >= 0) continue;
      while (k > it->k) {
        x = base.step(x, -1);
        --k;
        bwd(s, x, k);
      }
      values[it->cell] = snap(s, k);
    }
    used = std::max(used, -k);
  }
  return values;
}

template <class T>
GridFunction<T> grid_function(const DenseOrbitPlan& plan, std::vector<T> values) {
  return {plan.grid, plan.representative, std::move(values)};
}

// Residual d(Phi^(n)(x) u(x), u(f^n x)) for each value type; C^0 and C^1 parts.
struct RealOps {
  const HyperbolicBase& base;
  const std::function<double(const BasePoint&)>& phi;
  std::pair<double, double> operator()(const BasePoint& x, long n, const double& ux, const double& ufx) const {
    double s = 0;
    BasePoint y = x;
    for (long i = 0; i < n; ++i) {
      s += phi(y);
      y = base.step(y, 1);
    }
    return {std::abs(ufx - ux - s), 0};
  }
};

struct MatrixOps {
  const SkewSystem& s;
  std::pair<double, double> operator()(const BasePoint& x, long n, const Eigen::MatrixXd& ux,
                                       const Eigen::MatrixXd& ufx) const {
    const Eigen::MatrixXd a = matrix_product(s, x, n);
    return {(a - ufx * ux.inverse()).cwiseAbs().maxCoeff(), 0};
  }
};

struct DiffeoOps {
  const SkewSystem& s;
  std::pair<double, double> operator()(const BasePoint& x, long n, const CircleDiffeo& ux, const CircleDiffeo& ufx) const {
    const FiberMap phi = circle_product(s, x, n);
    const auto& l = ux.lift_samples();
    const auto& d = ux.derivative_samples();
    const bool same = ufx.grid() == ux.grid();
    double c0 = 0, c1 = 0;
    for (std::size_t i = 0; i < l.size(); ++i) {
      const Jet j = phi.apply({l[i], d[i]});
      const double y = static_cast<double>(i) / static_cast<double>(l.size());
      const double target = same ? ufx.lift_samples()[i] : ufx.lift(y);
      const double target_d = same ? ufx.derivative_samples()[i] : ufx.derivative(y);
      c0 = std::max(c0, circle_distance(j.x, target));
      c1 = std::max(c1, std::abs(j.dx - target_d));
    }
    return {c0, c1};
  }
};

template <class T, class Ops>
SolveReport verify(const Ops& ops, const HyperbolicBase& base, const TransferFunction<T>& u, double tolerance,
                   const Exec& exec) {
  const std::size_t cells = u.u.size();
  SolveReport r;
  r.tolerance = tolerance;
  r.orbit_length_used = u.N;
  r.cell_residual.assign(cells, 0.0);
  std::vector<double> c1(cells, 0.0);
  parallel_for(cells, exec, [&](std::size_t c) {
    const BasePoint& x = u.u.points[c];
    const auto [a, b] = ops(x, 1, u.u.values[c], u.at(base.step(x, 1)));
    r.cell_residual[c] = a;
    c1[c] = b;
  });
  for (std::size_t c = 0; c < cells; ++c) {
    if (r.cell_residual[c] > r.residual_C0) {
      r.residual_C0 = r.cell_residual[c];
      r.worst_cell = c;
    }
    r.residual_C1 = std::max(r.residual_C1, c1[c]);
  }
  // Iterated identity on a deterministic subset of cells.
  const std::size_t stride = std::max<std::size_t>(1, cells / 128);
  const std::size_t picks = (cells + stride - 1) / stride;
  std::vector<double> iter(picks, 0.0);
  parallel_for(picks, exec, [&](std::size_t i) {
    const BasePoint& x = u.u.points[i * stride];
    for (long n : {2L, 5L, 10L})
      iter[i] = std::max(iter[i], ops(x, n, u.u.values[i * stride], u.at(base.step(x, n))).first);
  });
  for (double v : iter) r.iterated_residual = std::max(r.iterated_residual, v);
  r.pass = r.residual_C0 <= tolerance;
  return r;
}

// Exactness along the orbit: consecutive first visits k, k + 1.
template <class T, class Ops>
double orbit_residual(const Ops& ops, const DenseOrbitPlan& plan, const std::vector<T>& values) {
  const auto order = visits_in_order(plan);
  double worst = 0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i)
    if (order[i + 1].k == order[i].k + 1)
      worst = std::max(worst, ops(plan.representative[order[i].cell], 1, values[order[i].cell],
                                  values[order[i + 1].cell]).first);
  return worst;
}

std::string describe_point(const BasePoint& p) {
  std::ostringstream os;
  if (const auto* t = std::get_if<TorusPoint>(&p))
    os << "(" << t->u << ", " << t->v << ")";
  else
    os << std::get<SftPoint>(p).to_string(6);
  return os.str();
}

void require_poo(const SkewSystem& s, const SolveOptions& o, const Exec& exec) {
  if (!o.check_poo) return;
  const auto rep = poo_check(s, o.poo_period, o.poo_tolerance, exec, 256);
  if (rep.pass) return;
  std::ostringstream os;
  os << "periodic orbit obstruction: defect " << rep.worst_defect << " at period " << rep.worst_n;
  if (rep.worst_point) os << ", point " << describe_point(*rep.worst_point);
  throw Error(ErrorKind::poo_failure, os.str());
}

}  // namespace

Solution<double> solve_real(const HyperbolicBase& base, const std::function<double(const BasePoint&)>& phi,
                            const DenseOrbitPlan& plan, const SolveOptions& options, const Exec& exec) {
  if (options.check_poo)
    for (long n = 1; n <= options.poo_period; ++n)
      for (const auto& o : base.periodic_orbits(n)) {
        double sum = 0;
        BasePoint y = o.point;
        for (long i = 0; i < o.period; ++i) {
          sum += phi(y);
          y = base.step(y, 1);
        }
        if (std::abs(sum) > options.poo_tolerance) {
          std::ostringstream os;
          os << "periodic orbit obstruction: Birkhoff sum " << sum << " over the orbit of period " << o.period
             << " through " << describe_point(o.point);
          throw Error(ErrorKind::poo_failure, os.str());
        }
      }
  Solution<double> sol;
  long used = 0;
  auto values = transport<double>(
      base, plan, 0.0, [&](double& s, const BasePoint& x, long) { s += phi(x); },
      [&](double& s, const BasePoint& x, long) { s -= phi(x); }, [](double s, long) { return s; }, used);
  const RealOps ops{base, phi};
  sol.u.u = grid_function(plan, std::move(values));
  sol.u.x0 = plan.start;
  sol.u.N = used;
  sol.report = verify(ops, base, sol.u, options.tolerance, exec);
  sol.report.orbit_residual = orbit_residual(ops, plan, sol.u.u.values);
  return sol;
}

Solution<Eigen::MatrixXd> solve_linear(const SkewSystem& s, const DenseOrbitPlan& plan, const Eigen::MatrixXd& anchor,
                                       const SolveOptions& options, const Exec& exec) {
  if (s.kind() != FiberKind::linear) throw Error(ErrorKind::precondition, "solve_linear needs a matrix cocycle");
  if (anchor.rows() != s.matrix().dim() || anchor.cols() != s.matrix().dim())
    throw Error(ErrorKind::precondition, "anchor dimension differs from the cocycle");
  require_poo(s, options, exec);
  const auto& a = s.matrix();
  long used = 0;
  auto values = transport<Eigen::MatrixXd>(
      *s.base, plan, anchor, [&](Eigen::MatrixXd& u, const BasePoint& x, long) { u = a(x) * u; },
      [&](Eigen::MatrixXd& u, const BasePoint& x, long) { u = a(x).partialPivLu().solve(u); },
      [&](const Eigen::MatrixXd& u, long k) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(u);
        const auto& sv = svd.singularValues();
        const double cond = sv(0) / sv(sv.size() - 1);
        if (!(cond <= options.max_condition)) {
          std::ostringstream os;
          os << "transfer matrix at orbit index " << k << " has condition number " << cond;
          throw Error(ErrorKind::ill_conditioned, os.str());
        }
        return u;
      },
      used);
  Solution<Eigen::MatrixXd> sol;
  const MatrixOps ops{s};
  sol.u.u = grid_function(plan, std::move(values));
  sol.u.normalization = anchor;
  sol.u.x0 = plan.start;
  sol.u.N = used;
  sol.u.alpha = s.alpha();
  sol.report = verify(ops, *s.base, sol.u, options.tolerance, exec);
  sol.report.orbit_residual = orbit_residual(ops, plan, sol.u.u.values);
  return sol;
}

namespace {

struct Chain {
  std::vector<double> lift;
  std::vector<double> deriv;
};

}  // namespace

Solution<CircleDiffeo> solve_diffeo(const SkewSystem& s, const DenseOrbitPlan& plan, const CircleDiffeo& anchor,
                                    const SolveOptions& options, const Exec& exec) {
  if (s.kind() != FiberKind::circle) throw Error(ErrorKind::precondition, "solve_diffeo needs a circle cocycle");
  require_poo(s, options, exec);
  const CircleDiffeo a0 =
      anchor.grid() == options.fiber_samples ? anchor : FiberMap::sampled(anchor).sample(options.fiber_samples);
  const auto& phi = s.circle();
  const long refresh = std::max(1L, options.refresh_every);
  auto advance = [&](Chain& c, const FiberMap& m, long k) {
    for (std::size_t i = 0; i < c.lift.size(); ++i) {
      const Jet j = m.apply({c.lift[i], c.deriv[i]});
      c.lift[i] = j.x;
      c.deriv[i] = j.dx;
    }
    // Remove the integer drift of the lift.
    if (k % refresh == 0) {
      const double shift = std::round(c.lift[0]);
      if (shift != 0)
        for (auto& v : c.lift) v -= shift;
    }
  };
  long used = 0;
  auto values = transport<CircleDiffeo>(
      *s.base, plan, Chain{a0.lift_samples(), a0.derivative_samples()},
      [&](Chain& c, const BasePoint& x, long k) { advance(c, phi(x), k + 1); },
      [&](Chain& c, const BasePoint& x, long k) { advance(c, phi(x).inverse(), k); },
      [&](const Chain& c, long k) {
        try {
          return CircleDiffeo::from_samples(c.lift, c.deriv);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::monotonicity) throw;
          std::ostringstream os;
          os << "composition chain lost monotonicity at orbit index " << k
             << "; the fiber grid is too coarse for this orbit length (" << e.what() << ")";
          throw Error(ErrorKind::monotonicity, os.str());
        }
      },
      used);
  Solution<CircleDiffeo> sol;
  const DiffeoOps ops{s};
  sol.u.u = grid_function(plan, std::move(values));
  sol.u.normalization = a0;
  sol.u.x0 = plan.start;
  sol.u.N = used;
  sol.u.alpha = s.alpha();
  sol.report = verify(ops, *s.base, sol.u, options.tolerance, exec);
  sol.report.orbit_residual = orbit_residual(ops, plan, sol.u.u.values);
  return sol;
}

SolveReport verify_coboundary(const HyperbolicBase& base, const std::function<double(const BasePoint&)>& phi,
                              const TransferFunction<double>& u, double tolerance, const Exec& exec) {
  return verify(RealOps{base, phi}, base, u, tolerance, exec);
}

SolveReport verify_coboundary(const SkewSystem& s, const TransferFunction<Eigen::MatrixXd>& u, double tolerance,
                              const Exec& exec) {
  return verify(MatrixOps{s}, *s.base, u, tolerance, exec);
}

SolveReport verify_coboundary(const SkewSystem& s, const TransferFunction<CircleDiffeo>& u, double tolerance,
                              const Exec& exec) {
  return verify(DiffeoOps{s}, *s.base, u, tolerance, exec);
}

double value_distance(double a, double b) { return std::abs(a - b); }

double value_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

double value_distance(const CircleDiffeo& a, const CircleDiffeo& b) { return a.c0_distance(b); }

namespace {

double holder_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return value_distance(a, b); }

// The same C^1 metric as the cocycle Hoelder estimate.
double holder_distance(const CircleDiffeo& a, const CircleDiffeo& b) {
  return group_distance(FiberMap::sampled(a), FiberMap::sampled(b), 256);
}

template <class T>
double holder_norm(const TransferFunction<T>& u, const HyperbolicBase& base, double alpha) {
  const auto& grid = *u.u.grid;
  const std::size_t cells = u.u.size();
  std::vector<double> best(cells, 0.0);
  parallel_for(cells, default_exec(), [&](std::size_t c) {
    std::vector<std::size_t> partners;
    if (grid.kind() == BaseKind::cat_map) {
      const auto ij = grid.torus_cell(c);
      const int m = grid.resolution();
      for (int di = -2; di <= 2; ++di)
        for (int dj = -2; dj <= 2; ++dj)
          if (di || dj) partners.push_back(grid.torus_index(((ij[0] + di) % m + m) % m, ((ij[1] + dj) % m + m) % m));
    }
    RandomStream rng = RandomStream(0x5eed).child(c);
    const std::size_t extra = grid.kind() == BaseKind::cat_map ? 8 : std::min<std::size_t>(cells, 32);
    for (std::size_t i = 0; i < extra; ++i) partners.push_back(static_cast<std::size_t>(rng.below(cells)));
    for (std::size_t p : partners) {
      if (p == c) continue;
      const double d = base.distance(u.u.points[c], u.u.points[p]);
      if (d <= 0) continue;
      best[c] = std::max(best[c], holder_distance(u.u.values[c], u.u.values[p]) / std::pow(d, alpha));
    }
  });
  return *std::max_element(best.begin(), best.end());
}

template <class T>
std::optional<double> holder_ratio(const TransferFunction<T>& u, const SkewSystem& s, std::size_t samples,
                                   std::uint64_t seed, const Exec& exec) {
  const double phi = holder_estimate(s, samples, seed, exec).value;
  if (phi < 1e-12) return std::nullopt;
  return holder_norm(u, *s.base, s.alpha()) / phi;
}

}  // namespace

double transfer_holder_norm(const TransferFunction<Eigen::MatrixXd>& u, const HyperbolicBase& base, double alpha) {
  return holder_norm(u, base, alpha);
}
double transfer_holder_norm(const TransferFunction<CircleDiffeo>& u, const HyperbolicBase& base, double alpha) {
  return holder_norm(u, base, alpha);
}

std::optional<double> holder_bound_check(const TransferFunction<Eigen::MatrixXd>& u, const SkewSystem& s,
                                         std::size_t samples, std::uint64_t seed, const Exec& exec) {
  return holder_ratio(u, s, samples, seed, exec);
}

std::optional<double> holder_bound_check(const TransferFunction<CircleDiffeo>& u, const SkewSystem& s,
                                         std::size_t samples, std::uint64_t seed, const Exec& exec) {
  return holder_ratio(u, s, samples, seed, exec);
}

namespace {

Eigen::MatrixXd normalized(const Eigen::MatrixXd& v, const Eigen::MatrixXd& at_z) { return v * at_z.inverse(); }
CircleDiffeo normalized(const CircleDiffeo& v, const CircleDiffeo& at_z) { return v.compose(at_z.inverse()); }

template <class T>
UniquenessReport uniqueness(const Solution<T>& a, const Solution<T>& b) {
  // Normalize both at a's start point, where a holds its anchor exactly.
  const T bz = b.u.at(a.u.x0);
  const std::size_t cells = b.u.u.size();
  std::vector<double> dev(cells, 0.0);
  parallel_for(cells, default_exec(), [&](std::size_t c) {
    const BasePoint& x = b.u.u.points[c];
    dev[c] = value_distance(normalized(a.u.at(x), a.u.normalization), normalized(b.u.u.values[c], bz));
  });
  UniquenessReport r;
  r.deviation = *std::max_element(dev.begin(), dev.end());
  r.transport_error = std::max(a.report.residual_C0, b.report.residual_C0);
  r.pass = r.deviation <= 2 * r.transport_error + 1e-9;
  return r;
}

template <class T>
ContinuityReport continuity(const std::function<SkewSystem(double)>& family, const std::vector<double>& t_grid,
                            const DenseOrbitPlan& plan, const T& anchor, const SolveOptions& options,
                            const Exec& exec) {
  ContinuityReport r;
  std::optional<TransferFunction<T>> prev;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const SkewSystem s = family(t_grid[i]);
    Solution<T> sol;
    if constexpr (std::is_same_v<T, CircleDiffeo>)
      sol = solve_diffeo(s, plan, anchor, options, exec);
    else
      sol = solve_linear(s, plan, anchor, options, exec);
    ContinuityRow row;
    row.t = t_grid[i];
    row.residual_C0 = sol.report.residual_C0;
    if (prev) {
      row.dt = t_grid[i] - t_grid[i - 1];
      for (std::size_t c = 0; c < sol.u.u.size(); ++c)
        row.variation = std::max(row.variation, value_distance(sol.u.u.values[c], prev->u.values[c]));
      if (row.dt != 0) r.max_modulus = std::max(r.max_modulus, row.variation / std::abs(row.dt));
    }
    r.rows.push_back(row);
    prev = std::move(sol.u);
  }
  return r;
}

}  // namespace

UniquenessReport uniqueness_check(const Solution<Eigen::MatrixXd>& a, const Solution<Eigen::MatrixXd>& b) {
  return uniqueness(a, b);
}
UniquenessReport uniqueness_check(const Solution<CircleDiffeo>& a, const Solution<CircleDiffeo>& b) {
  return uniqueness(a, b);
}

ContinuityReport continuity_in_parameter(const std::function<SkewSystem(double)>& family, const std::vector<double>& t_grid,
                                         const DenseOrbitPlan& plan, const Eigen::MatrixXd& anchor,
                                         const SolveOptions& options, const Exec& exec) {
  return continuity(family, t_grid, plan, anchor, options, exec);
}

ContinuityReport continuity_in_parameter(const std::function<SkewSystem(double)>& family, const std::vector<double>& t_grid,
                                         const DenseOrbitPlan& plan, const CircleDiffeo& anchor,
                                         const SolveOptions& options, const Exec& exec) {
  return continuity(family, t_grid, plan, anchor, options, exec);
}

CircleCocycle make_coboundary(std::shared_ptr<const HyperbolicBase> base, const TransferFunction<CircleDiffeo>& u) {
  auto shared = std::make_shared<const TransferFunction<CircleDiffeo>>(u);
  return CircleCocycle::coboundary(
      std::move(base), [shared](const BasePoint& x) { return FiberMap::sampled(shared->at(x)); }, u.alpha);
}

}  // namespace livsic

#include "livsic/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "livsic/error.hpp"

namespace livsic {

const char* to_string(CocycleFamily f) {
  switch (f) {
    case CocycleFamily::rotation: return "rotation";
    case CocycleFamily::arnold_bump: return "arnold_bump";
    case CocycleFamily::coboundary_generated: return "coboundary_generated";
    case CocycleFamily::grid_table: return "grid_table";
    case CocycleFamily::locally_constant_sft: return "locally_constant_sft";
    case CocycleFamily::linear_family: return "linear_family";
  }
  return "unknown";
}

std::optional<CocycleFamily> parse_family(const std::string& s) {
  for (auto f : {CocycleFamily::rotation, CocycleFamily::arnold_bump, CocycleFamily::coboundary_generated,
                 CocycleFamily::grid_table, CocycleFamily::locally_constant_sft, CocycleFamily::linear_family})
    if (s == to_string(f)) return f;
  return std::nullopt;
}

BumpMap BumpField::at(const BasePoint& x) const {
  const BumpMap m{a(x), b(x), c(x)};
  if (!(std::abs(m.a) < 1)) throw Error(ErrorKind::precondition, "bump amplitude reached 1; not a diffeomorphism");
  return m;
}

// ------------------------------------------------------------ CircleCocycle

CircleCocycle::CircleCocycle(CocycleFamily family, Eval eval, double alpha)
    : family_(family), eval_(std::move(eval)), alpha_(alpha) {
  if (!(alpha > 0 && alpha <= 1)) throw Error(ErrorKind::precondition, "Hoelder exponent must lie in (0, 1]");
}

CircleCocycle CircleCocycle::identity() {
  return CircleCocycle(CocycleFamily::rotation, [](const BasePoint&) { return FiberMap::identity(); });
}

CircleCocycle CircleCocycle::rotation(BaseFunction tau, double alpha) {
  return CircleCocycle(
      CocycleFamily::rotation, [tau = std::move(tau)](const BasePoint& x) { return FiberMap::rotation(tau(x)); },
      alpha);
}

namespace {

void check_bump_field(const BumpField& f) {
  // |a(x)| <= |a_0| + sum |amp| bounds the bump amplitude.
  double bound = std::abs(f.a.constant);
  for (const auto& t : f.a.trig) bound += std::abs(t.amp);
  if (bound >= 1 && f.a.symbols.empty()) throw Error(ErrorKind::precondition, "bump amplitude must stay below 1 to keep a diffeomorphism");
}

}  // namespace

CircleCocycle CircleCocycle::bump(BumpField field, double alpha) {
  check_bump_field(field);
  return CircleCocycle(
      CocycleFamily::arnold_bump, [field = std::move(field)](const BasePoint& x) { return FiberMap::bump(field.at(x)); },
      alpha);
}

CircleCocycle CircleCocycle::constant_bump(double a) {
  BumpField f;
  f.a.constant = a;
  return bump(f);
}

CircleCocycle CircleCocycle::locally_constant(BumpField field) {
  if (!field.a.trig.empty() || !field.b.trig.empty() || !field.c.trig.empty())
    throw Error(ErrorKind::precondition, "locally constant cocycles use symbol terms only");
  check_bump_field(field);
  return CircleCocycle(
      CocycleFamily::locally_constant_sft,
      [field = std::move(field)](const BasePoint& x) {
        if (!std::holds_alternative<SftPoint>(x))
          throw Error(ErrorKind::grid_mismatch, "locally constant cocycle evaluated on a torus point");
        return FiberMap::bump(field.at(x));
      },
      1);
}

CircleCocycle CircleCocycle::coboundary(std::shared_ptr<const HyperbolicBase> base, BumpField generator, double alpha) {
  check_bump_field(generator);
  return coboundary(
      std::move(base), [g = std::move(generator)](const BasePoint& x) { return FiberMap::bump(g.at(x)); }, alpha);
}

CircleCocycle CircleCocycle::coboundary(std::shared_ptr<const HyperbolicBase> base,
                                        std::function<FiberMap(const BasePoint&)> generator, double alpha) {
  return CircleCocycle(
      CocycleFamily::coboundary_generated,
      [base = std::move(base), v = std::move(generator)](const BasePoint& x) {
        return FiberMap::chain(v(x).inverse(), v(base->step(x, 1)));
      },
      alpha);
}

CircleCocycle CircleCocycle::table(std::shared_ptr<const BaseGrid> grid,
                                   std::vector<std::shared_ptr<const CircleDiffeo>> values, double alpha) {
  if (values.size() != grid->size()) throw Error(ErrorKind::grid_mismatch, "table size differs from grid size");
  return CircleCocycle(
      CocycleFamily::grid_table,
      [grid = std::move(grid), values = std::move(values)](const BasePoint& x) {
        return FiberMap::sampled(values[grid->cell_of(x)]);
      },
      alpha);
}

// ------------------------------------------------------------ MatrixCocycle

MatrixCocycle::MatrixCocycle(CocycleFamily family, int dim, Eval eval, double alpha)
    : family_(family), dim_(dim), eval_(std::move(eval)), alpha_(alpha) {
  if (dim < 1) throw Error(ErrorKind::precondition, "matrix dimension must be >= 1");
  if (!(alpha > 0 && alpha <= 1)) throw Error(ErrorKind::precondition, "Hoelder exponent must lie in (0, 1]");
}

MatrixCocycle MatrixCocycle::constant(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::precondition, "matrix must be square");
  if (std::abs(m.determinant()) <= 1e-12) throw Error(ErrorKind::precondition, "matrix is not invertible");
  return MatrixCocycle(CocycleFamily::linear_family, static_cast<int>(m.rows()), [m](const BasePoint&) { return m; });
}

MatrixCocycle MatrixCocycle::coboundary(std::shared_ptr<const HyperbolicBase> base,
                                        std::function<Eigen::MatrixXd(const BasePoint&)> v, double alpha) {
  const BasePoint probe = base->kind() == BaseKind::cat_map ? BasePoint(TorusPoint{}) : BasePoint(periodic_sft_point({0}));
  const int dim = static_cast<int>(v(probe).rows());
  return MatrixCocycle(
      CocycleFamily::coboundary_generated, dim,
      [base = std::move(base), v = std::move(v)](const BasePoint& x) {
        const Eigen::MatrixXd vx = v(x);
        return Eigen::MatrixXd(v(base->step(x, 1)) * vx.inverse());
      },
      alpha);
}

Eigen::MatrixXd LinearGenerator::w(const BasePoint& x) const {
  if (static_cast<int>(entries.size()) != dim * dim) throw Error(ErrorKind::precondition, "generator needs dim^2 entries");
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = entries[static_cast<std::size_t>(i * dim + j)](x);
  return m;
}

Eigen::MatrixXd LinearGenerator::v(const BasePoint& x, double t) const {
  const Eigen::MatrixXd m = t * w(x);
  return m.exp();
}

MatrixCocycle linear_family(std::shared_ptr<const HyperbolicBase> base, const LinearGenerator& gen, double t) {
  auto m = MatrixCocycle::coboundary(std::move(base), [gen, t](const BasePoint& x) { return gen.v(x, t); });
  return MatrixCocycle(CocycleFamily::linear_family, m.dim(), [m](const BasePoint& x) { return m(x); }, m.alpha());
}

// --------------------------------------------------------------- SkewSystem

double SkewSystem::alpha() const {
  return std::visit([](const auto& c) { return c.alpha(); }, cocycle);
}

CocycleFamily SkewSystem::family() const {
  return std::visit([](const auto& c) { return c.family(); }, cocycle);
}

SkewSystem make_skew(std::shared_ptr<const HyperbolicBase> base, CircleCocycle c) { return {std::move(base), std::move(c)}; }
SkewSystem make_skew(std::shared_ptr<const HyperbolicBase> base, MatrixCocycle c) { return {std::move(base), std::move(c)}; }

FiberMap circle_product(const SkewSystem& s, const BasePoint& x, long n) {
  const auto& phi = s.circle();
  if (n < 0) return circle_product(s, s.base->step(x, n), -n).inverse();
  FiberMap out;
  BasePoint p = x;
  for (long i = 0; i < n; ++i) {
    out = FiberMap::chain(out, phi(p));
    p = s.base->step(p, 1);
  }
  return out;
}

Eigen::MatrixXd matrix_product(const SkewSystem& s, const BasePoint& x, long n) {
  const auto& a = s.matrix();
  if (n < 0) return matrix_product(s, s.base->step(x, n), -n).inverse();
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(a.dim(), a.dim());
  BasePoint p = x;
  for (long i = 0; i < n; ++i) {
    out = a(p) * out;
    p = s.base->step(p, 1);
  }
  return out;
}

GroupElement cocycle_product(const SkewSystem& s, const BasePoint& x, long n) {
  if (s.kind() == FiberKind::circle) return circle_product(s, x, n);
  return matrix_product(s, x, n);
}

SkewState skew_step(const SkewSystem& s, SkewState state, long k) {
  const auto& phi = s.circle();
  for (; k > 0; --k) {
    state.y = phi(state.x).lift(state.y);
    state.x = s.base->step(state.x, 1);
  }
  for (; k < 0; ++k) {
    state.x = s.base->step(state.x, -1);
    state.y = phi(state.x).inverse().lift(state.y);
  }
  return state;
}

LinearState skew_step(const SkewSystem& s, LinearState state, long k) {
  const auto& a = s.matrix();
  for (; k > 0; --k) {
    state.v = a(state.x) * state.v;
    state.x = s.base->step(state.x, 1);
  }
  for (; k < 0; ++k) {
    state.x = s.base->step(state.x, -1);
    state.v = a(state.x).lu().solve(state.v);
  }
  return state;
}

double fiber_derivative(const SkewSystem& s, const SkewState& state, long n) {
  const auto& phi = s.circle();
  Jet j{state.y, 1};
  BasePoint x = state.x;
  for (long k = n; k > 0; --k) {
    j = phi(x).apply(j);
    x = s.base->step(x, 1);
  }
  for (long k = n; k < 0; ++k) {
    x = s.base->step(x, -1);
    j = phi(x).inverse().apply(j);
  }
  return j.dx;
}

double total_space_distance(const SkewSystem& s, const SkewState& a, const SkewState& b) {
  return s.base->distance(a.x, b.x) + circle_distance(a.y, b.y);
}

double distance_to_identity(const GroupElement& a, int fiber_samples) {
  if (const auto* f = std::get_if<FiberMap>(&a)) return f->c0_distance_to_identity(fiber_samples);
  const auto& m = std::get<Eigen::MatrixXd>(a);
  return (m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

double group_distance(const GroupElement& a, const GroupElement& b, int fiber_samples) {
  if (const auto* f = std::get_if<FiberMap>(&a)) return f->distance(std::get<FiberMap>(b), fiber_samples);
  return (std::get<Eigen::MatrixXd>(a) - std::get<Eigen::MatrixXd>(b)).cwiseAbs().maxCoeff();
}

PooReport poo_check(const SkewSystem& s, long P, double tol, const Exec& exec, int fiber_samples, std::size_t cap) {
  if (P < 1) throw Error(ErrorKind::precondition, "POO check needs P >= 1");
  struct Item {
    long n;
    BasePoint p;
  };
  std::vector<Item> items;
  for (long n = 1; n <= P; ++n)
    for (auto& p : s.base->periodic_points(n, cap)) items.push_back({n, std::move(p)});
  std::vector<double> defect(items.size());
  parallel_for(items.size(), exec, [&](std::size_t i) {
    defect[i] = distance_to_identity(cocycle_product(s, items[i].p, items[i].n), fiber_samples);
  });
  PooReport r;
  r.max_period_checked = P;
  r.tolerance = tol;
  r.points_checked = items.size();
  r.defect_by_period.assign(static_cast<std::size_t>(P), 0.0);
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto& slot = r.defect_by_period[static_cast<std::size_t>(items[i].n - 1)];
    slot = std::max(slot, defect[i]);
    if (!r.worst_point || defect[i] > r.worst_defect) {
      r.worst_defect = defect[i];
      r.worst_n = items[i].n;
      r.worst_point = items[i].p;
    }
  }
  r.pass = r.worst_defect <= tol;
  return r;
}

std::pair<BasePoint, BasePoint> holder_pair(const HyperbolicBase& base, std::uint64_t seed, std::size_t i) {
  RandomStream rng = RandomStream(seed).child(i);
  const BasePoint x = base.random_point(rng);
  // Every fourth pair is unrelated, which probes the largest distances.
  if (i % 4 == 3) return {x, base.random_point(rng)};
  const double scale = std::pow(10.0, rng.uniform(-4, -0.5));
  if (base.kind() == BaseKind::cat_map) {
    const auto& t = std::get<TorusPoint>(x);
    const double angle = rng.uniform(0, 2 * 3.141592653589793);
    return {x, make_torus_point(t.u + scale * std::cos(angle), t.v + scale * std::sin(angle))};
  }
  const auto& sft = base.sft();
  const auto& p = std::get<SftPoint>(x);
  const long m = std::max(0L, static_cast<long>(std::ceil(std::log(scale) / std::log(sft.theta()))));
  for (int attempt = 0; attempt < 64; ++attempt) {
    const SftPoint a = sft.random_point(rng, 2 * m + 8);
    const SftPoint b = sft.random_point(rng, 2 * m + 8);
    if (sft.admissible(a.at(-m - 1), p.at(-m)) && sft.admissible(p.at(m), b.at(m + 1)))
      return {x, sft.splice(sft.splice(a, p, -m), b, m + 1)};
  }
  return {x, base.random_point(rng)};
}

HolderEstimate holder_estimate(const SkewSystem& s, std::size_t samples, std::uint64_t seed, const Exec& exec,
                               int fiber_samples) {
  if (samples < 2) throw Error(ErrorKind::precondition, "Hoelder estimate needs at least 2 samples");
  const double alpha = s.alpha();
  std::vector<double> ratio(samples, 0.0);
  parallel_for(samples, exec, [&](std::size_t i) {
    const auto [x, y] = holder_pair(*s.base, seed, i);
    const double d = s.base->distance(x, y, alpha);
    if (d <= 0) return;
    ratio[i] = group_distance(cocycle_product(s, x, 1), cocycle_product(s, y, 1), fiber_samples) / d;
  });
  HolderEstimate h;
  h.samples = samples;
  h.alpha = alpha;
  for (double r : ratio) h.value = std::max(h.value, r);
  return h;
}

}  // namespace livsic

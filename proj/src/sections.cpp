#include "livsic/sections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "livsic/error.hpp"
#include "livsic/rng.hpp"

namespace livsic {

namespace {

double frac(double v) { return v - std::floor(v); }

}  // namespace

LiftResult lift(const SkewSystem& s, const SkewState& zeta, const BasePoint& z, LeafSide side,
                const LiftOptions& options) {
  if (s.kind() != FiberKind::circle) throw Error(ErrorKind::precondition, "lifts need a circle cocycle");
  const auto& base = *s.base;
  const auto& phi = s.circle();
  const double eps0 = base.hyp().eps0;
  const long dir = side == LeafSide::s ? 1 : -1;
  if (base.distance(zeta.x, z) > eps0)
    throw Error(ErrorKind::precondition, "lift target is outside the local leaf of the anchor");
  BasePoint xs = zeta.x, zs = z;
  double yx = zeta.y;
  // inv[k] undoes the k-th step over z.
  std::vector<FiberMap> inv;
  LiftResult r;
  r.value = zeta.y;
  for (long d = 1; d <= options.max_depth; ++d) {
    if (dir > 0) {
      yx = phi(xs).lift(yx);
      inv.push_back(phi(zs).inverse());
      xs = base.step(xs, 1);
      zs = base.step(zs, 1);
    } else {
      xs = base.step(xs, -1);
      zs = base.step(zs, -1);
      yx = phi(xs).inverse().lift(yx);
      inv.push_back(phi(zs));
    }
    if (base.distance(xs, zs) > eps0) {
      std::ostringstream os;
      os << "lift target left the local " << (dir > 0 ? "stable" : "unstable") << " set at iterate " << d;
      throw Error(ErrorKind::precondition, os.str());
    }
    double eta = yx;
    for (auto it = inv.rbegin(); it != inv.rend(); ++it) eta = it->lift(eta);
    r.change = std::abs(eta - r.value);
    r.value = eta;
    r.depth = d;
    if (r.change < options.tolerance) {
      r.converged = true;
      break;
    }
  }
  return r;
}

LiftedLeaf lifted_leaf(const SkewSystem& s, const SkewState& zeta, LeafSide side, int samples, double radius,
                       std::uint64_t seed, const LiftOptions& options) {
  const auto& base = *s.base;
  LiftedLeaf leaf;
  leaf.anchor = zeta;
  leaf.side = side;
  RandomStream rng(seed);
  leaf.points.push_back(zeta.x);
  for (int i = 1; i < samples; ++i) {
    double t;
    if (base.kind() == BaseKind::cat_map)
      t = radius * (2.0 * i / (samples - 1) - 1);
    else
      t = radius * std::pow(base.sft().theta(), i % 8);
    leaf.points.push_back(side == LeafSide::s ? base.stable_neighbor(zeta.x, t, rng)
                                              : base.unstable_neighbor(zeta.x, t, rng));
  }
  for (const auto& z : leaf.points) {
    const auto r = lift(s, zeta, z, side, options);
    leaf.values.push_back(r.value);
    leaf.converged = leaf.converged && r.converged;
  }
  for (std::size_t i = 0; i < leaf.points.size(); ++i)
    for (std::size_t j = i + 1; j < leaf.points.size(); ++j) {
      const double d = base.distance(leaf.points[i], leaf.points[j]);
      if (d > 0)
        leaf.lipschitz_estimate =
            std::max(leaf.lipschitz_estimate, circle_distance(leaf.values[i], leaf.values[j]) / d);
    }
  return leaf;
}

double leaf_invariance_deviation(const SkewSystem& s, const LiftedLeaf& leaf, const LiftOptions& options) {
  const auto& base = *s.base;
  const auto& phi = s.circle();
  const SkewState image{base.step(leaf.anchor.x, 1), phi(leaf.anchor.x).lift(leaf.anchor.y)};
  double worst = 0;
  for (std::size_t i = 0; i < leaf.points.size(); ++i) {
    const BasePoint fz = base.step(leaf.points[i], 1);
    try {
      const auto r = lift(s, image, fz, leaf.side, options);
      worst = std::max(worst, circle_distance(phi(leaf.points[i]).lift(leaf.values[i]), r.value));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::precondition) throw;  // f z left the leaf's local range
    }
  }
  return worst;
}

double leaf_lipschitz_bound(const SkewSystem& s, LeafSide side, const DominationReport& dom, std::size_t pairs,
                            std::uint64_t seed) {
  const auto& base = *s.base;
  const auto& phi = s.circle();
  // Base-Lipschitz constant of Phi (s side) or Phi^-1 (u side) in C^0.
  double lip = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto [a, b] = holder_pair(base, seed, i);
    const double d = base.distance(a, b);
    if (d <= 0) continue;
    const FiberMap fa = side == LeafSide::s ? phi(a) : phi(a).inverse();
    const FiberMap fb = side == LeafSide::s ? phi(b) : phi(b).inverse();
    lip = std::max(lip, fa.c0_distance(fb, 64) / d);
  }
  const auto& h = base.hyp();
  const std::size_t lmax = dom.max_log_derivative.size();
  if (lmax == 0) return std::numeric_limits<double>::infinity();
  // log sup |d (F^-k)| on the s side, log sup |d F^k| on the u side, for
  // any k, by submultiplicativity over blocks of lmax.
  auto growth = [&](long k) {
    if (k == 0) return 0.0;
    const long q = k / static_cast<long>(lmax), r = k % static_cast<long>(lmax);
    const auto& ext = side == LeafSide::s ? dom.min_log_derivative : dom.max_log_derivative;
    const double sign = side == LeafSide::s ? -1 : 1;
    double g = sign * static_cast<double>(q) * ext[lmax - 1];
    if (r) g += sign * ext[static_cast<std::size_t>(r - 1)];
    return g;
  };
  const double block = side == LeafSide::s
                           ? growth(static_cast<long>(lmax)) + static_cast<double>(lmax) * std::log(h.nu_s)
                           : growth(static_cast<long>(lmax)) - static_cast<double>(lmax) * std::log(h.nu_u);
  if (block >= 0) return std::numeric_limits<double>::infinity();
  double sum = 0;
  for (long k = 0; k < 100000; ++k) {
    const double term = side == LeafSide::s ? std::exp(growth(k + 1) + static_cast<double>(k) * std::log(h.nu_s))
                                            : std::exp(growth(k) - static_cast<double>(k + 1) * std::log(h.nu_u));
    sum += term;
    if (k > static_cast<long>(lmax) && term < 1e-12 * sum) break;
  }
  return lip * sum;
}

namespace {

struct Walk {
  std::vector<BasePoint> x;        // x_k for k = lo..hi
  std::vector<std::vector<double>> y;  // per anchor
  long lo = 0;
};

// Transports every anchor fiber value along the plan's orbit.
Walk walk_orbit(const SkewSystem& s, const DenseOrbitPlan& plan, const std::vector<double>& anchors) {
  const auto& base = *s.base;
  const auto& phi = s.circle();
  long lo = 0, hi = 0;
  for (long k : plan.first_visit) {
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  if (plan.two_sided) {
    lo = std::min(lo, -plan.N);
    hi = std::max(hi, plan.N);
  }
  Walk w;
  w.lo = lo;
  const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
  w.x.assign(len, BasePoint{});
  w.y.assign(anchors.size(), std::vector<double>(len, 0.0));
  const std::size_t zero = static_cast<std::size_t>(-lo);
  w.x[zero] = plan.start;
  for (std::size_t j = 0; j < anchors.size(); ++j) w.y[j][zero] = anchors[j];
  for (std::size_t i = zero + 1; i < len; ++i) {
    const FiberMap m = phi(w.x[i - 1]);
    w.x[i] = base.step(w.x[i - 1], 1);
    for (std::size_t j = 0; j < anchors.size(); ++j) w.y[j][i] = m.lift(w.y[j][i - 1]);
  }
  for (std::size_t i = zero; i-- > 0;) {
    w.x[i] = base.step(w.x[i + 1], -1);
    const FiberMap m = phi(w.x[i]).inverse();
    for (std::size_t j = 0; j < anchors.size(); ++j) w.y[j][i] = m.lift(w.y[j][i + 1]);
  }
  return w;
}

ReturnClaim check_return_claim(const HyperbolicBase& base, const DenseOrbitPlan& plan, const Walk& w,
                               const std::vector<double>& y, const std::vector<CirclePoint>& values,
                               const SectionOptions& options) {
  const auto& grid = *plan.grid;
  ReturnClaim c;
  c.delta = options.return_delta_cells * grid.cell_scale();
  c.epsilon = options.return_epsilon;
  const std::vector<double> bins{c.delta / 8, c.delta / 4, c.delta / 2, c.delta};
  std::vector<double> worst_in_bin(bins.size(), 0.0);
  long first = std::numeric_limits<long>::max();
  for (std::size_t i = 0; i < w.x.size(); ++i) {
    const long k = w.lo + static_cast<long>(i);
    const std::size_t cell = grid.cell_of(w.x[i]);
    if (plan.first_visit[cell] == k) continue;
    const double db = base.distance(w.x[i], plan.representative[cell]);
    if (db > c.delta) continue;
    ++c.near_returns;
    const double df = circle_distance(y[i], values[cell].y);
    for (std::size_t b = 0; b < bins.size(); ++b)
      if (db <= bins[b]) worst_in_bin[b] = std::max(worst_in_bin[b], df);
    if (df > c.worst_displacement) {
      c.worst_displacement = df;
      c.worst_base_distance = db;
    }
    if (df > c.epsilon && std::abs(k) < first) first = std::abs(k);
  }
  for (std::size_t b = 0; b < bins.size(); ++b) c.observed.push_back({bins[b], worst_in_bin[b]});
  c.violated = first != std::numeric_limits<long>::max();
  c.worst_index = c.violated ? first : 0;
  return c;
}

std::vector<OrbitClosureSection> build_sections(const SkewSystem& s, const DenseOrbitPlan& plan,
                                                const std::vector<double>& anchors, const SectionOptions& options) {
  if (s.kind() != FiberKind::circle) throw Error(ErrorKind::precondition, "sections need a circle cocycle");
  const Walk w = walk_orbit(s, plan, anchors);
  std::vector<OrbitClosureSection> out;
  for (std::size_t j = 0; j < anchors.size(); ++j) {
    OrbitClosureSection sec;
    sec.anchor = {plan.start, anchors[j]};
    sec.visit_trace = plan.first_visit;
    std::vector<CirclePoint> values(plan.first_visit.size());
    for (std::size_t c = 0; c < values.size(); ++c)
      values[c] = {w.y[j][static_cast<std::size_t>(plan.first_visit[c] - w.lo)]};
    sec.claim = check_return_claim(*s.base, plan, w, w.y[j], values, options);
    sec.values = {plan.grid, plan.representative, std::move(values)};
    if (sec.claim.violated && options.throw_on_violation) {
      std::ostringstream os;
      os << "return claim violated: fiber displacement " << sec.claim.worst_displacement
         << " at base distance " << sec.claim.worst_base_distance << " (epsilon " << sec.claim.epsilon
         << ", delta " << sec.claim.delta << "), first at orbit index " << sec.claim.worst_index;
      throw Error(ErrorKind::return_claim, os.str());
    }
    out.push_back(std::move(sec));
  }
  return out;
}

}  // namespace

OrbitClosureSection orbit_closure_section(const SkewSystem& s, const SkewState& zeta0, const DenseOrbitPlan& plan,
                                          const SectionOptions& options) {
  if (!s.base->same_point(zeta0.x, plan.start))
    throw Error(ErrorKind::precondition, "the section anchor must lie over the plan's start point");
  return std::move(build_sections(s, plan, {zeta0.y}, options).front());
}

double section_value(const SkewSystem& s, const OrbitClosureSection& section, const BasePoint& x) {
  const auto& base = *s.base;
  const std::size_t c = section.values.grid->cell_of(x);
  const BasePoint& r = section.values.points[c];
  const double v = section.values.values[c].y;
  if (base.same_point(r, x)) return v;
  try {
    const BasePoint z = base.bracket(r, x);
    const auto lu = unstable_lift(s, {r, v}, z);
    const auto ls = stable_lift(s, {z, lu.value}, x);
    if (lu.converged && ls.converged) return ls.value;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::precondition) throw;
  }
  return section.at(x);
}

double section_invariance_deviation(const SkewSystem& s, const OrbitClosureSection& section, const Exec& exec) {
  const auto& pts = section.values.points;
  std::vector<double> dev(pts.size(), 0.0);
  parallel_for(pts.size(), exec, [&](std::size_t c) {
    const double image = s.circle()(pts[c]).lift(section.values.values[c].y);
    dev[c] = circle_distance(image, section.at(s.base->step(pts[c], 1)));
  });
  return *std::max_element(dev.begin(), dev.end());
}

SaturationReport saturation_check(const OrbitClosureSection& section, const SkewSystem& s, std::size_t samples,
                                  std::uint64_t seed, const Exec& exec) {
  const auto& base = *s.base;
  const auto& grid = *section.values.grid;
  const std::size_t cells = section.values.size();
  SaturationReport r;
  r.samples = samples;
  std::vector<double> dev(samples, 0.0);
  const RandomStream root(seed);
  parallel_for(samples, exec, [&](std::size_t i) {
    RandomStream rng = root.child(i);
    const std::size_t c = static_cast<std::size_t>(rng.below(cells));
    const SkewState zeta{section.values.points[c], section.values.values[c].y};
    for (LeafSide side : {LeafSide::s, LeafSide::u}) {
      const double t = base.kind() == BaseKind::cat_map ? grid.cell_scale() * rng.uniform(-2, 2)
                                                        : grid.cell_scale() * rng.uniform(0.5, 1);
      const BasePoint z = side == LeafSide::s ? base.stable_neighbor(zeta.x, t, rng)
                                              : base.unstable_neighbor(zeta.x, t, rng);
      try {
        const auto l = lift(s, zeta, z, side);
        dev[i] = std::max(dev[i], circle_distance(l.value, section.at(z)));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::precondition) throw;
      }
    }
  });
  r.worst_deviation = *std::max_element(dev.begin(), dev.end());

  // Section Lipschitz quotient over pairs of cells.
  RandomStream rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t i = 0; i < 4 * samples; ++i) {
    const std::size_t a = static_cast<std::size_t>(rng.below(cells));
    const BasePoint& x = section.values.points[a];
    std::size_t b;
    if (grid.kind() == BaseKind::cat_map) {
      const auto ij = grid.torus_cell(a);
      const int m = grid.resolution();
      b = grid.torus_index((ij[0] + 1 + static_cast<int>(rng.below(2))) % m, (ij[1] + static_cast<int>(rng.below(3))) % m);
    } else {
      b = static_cast<std::size_t>(rng.below(cells));
    }
    const double d = base.distance(x, section.values.points[b]);
    if (d > 0)
      r.section_lipschitz = std::max(
          r.section_lipschitz, circle_distance(section.values.values[a].y, section.values.values[b].y) / d);
  }
  DominationGrid dg;
  dg.fiber_samples = 64;
  dg.seed = seed;
  const auto dom = domination_test(s, 1, 20, dg, exec);
  r.leaf_bound = std::max(leaf_lipschitz_bound(s, LeafSide::s, dom, 1000, seed),
                          leaf_lipschitz_bound(s, LeafSide::u, dom, 1000, seed));
  // Product structure constant from bracket triangles.
  for (std::size_t i = 0; i < 2000; ++i) {
    const auto [x, y] = holder_pair(base, seed + 7, i);
    const double d = base.distance(x, y);
    if (d <= 0 || d > base.hyp().delta0) continue;
    const BasePoint z = base.bracket(x, y);
    r.product_constant = std::max(r.product_constant, (base.distance(x, z) + base.distance(z, y)) / d);
  }
  r.lipschitz_consistent = r.section_lipschitz <= r.leaf_bound * r.product_constant;
  return r;
}

namespace {

constexpr double sparse_gap = 0.125;

double atlas_gap(const std::vector<OrbitClosureSection>& sections) {
  double gap = 0;
  const std::size_t cells = sections.front().values.size();
  for (std::size_t c = 0; c < cells; ++c) {
    double prev = sections.front().values.values[c].y;
    const double first = prev;
    for (std::size_t j = 1; j <= sections.size(); ++j) {
      const double v = j < sections.size() ? sections[j].values.values[c].y : first + 1;
      gap = std::max(gap, v - prev);
      prev = v;
    }
  }
  return gap;
}

}  // namespace

Atlas build_atlas(const SkewSystem& s, const DenseOrbitPlan& plan, const AtlasOptions& options) {
  Atlas atlas;
  atlas.plan = plan;
  for (int a = options.anchors;; a *= 2) {
    std::vector<double> anchors(static_cast<std::size_t>(a));
    for (int j = 0; j < a; ++j) anchors[static_cast<std::size_t>(j)] = static_cast<double>(j) / a;
    atlas.sections = build_sections(s, plan, anchors, options.section);
    atlas.max_gap = atlas_gap(atlas.sections);
    if (atlas.max_gap <= sparse_gap) break;
    if (a * 2 > options.max_anchors) {
      std::ostringstream os;
      os << "atlas too sparse: fiber gap " << atlas.max_gap << " between sections with " << a << " anchors";
      throw Error(ErrorKind::sparse_atlas, os.str());
    }
  }
  return atlas;
}

namespace {

// Lifts of all sections at x, made increasing with a trailing period.
std::vector<double> fiber_nodes(const Atlas& atlas, const BasePoint& x) {
  const auto& first = atlas.sections.front().values;
  const CellWeights w = cell_weights(*first.grid, first.points, x);
  std::vector<double> v(atlas.anchors() + 1);
  for (std::size_t j = 0; j < atlas.anchors(); ++j) {
    const double raw = blend(w, atlas.sections[j].values.values).y;
    v[j] = j == 0 ? raw : v[j - 1] + frac(raw - v[j - 1]);
  }
  v.back() = v.front() + 1;
  return v;
}

}  // namespace

Jet holonomy_apply(const Atlas& atlas, const BasePoint& x, const BasePoint& y, double eta) {
  const auto v = fiber_nodes(atlas, x);
  const auto w = fiber_nodes(atlas, y);
  const std::size_t a = atlas.anchors();
  const double e = v[0] + frac(eta - v[0]);
  std::size_t j = static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), e) - v.begin());
  j = std::clamp<std::size_t>(j, 1, a) - 1;
  const double h = v[j + 1] - v[j];
  if (h > 2 * sparse_gap) throw Error(ErrorKind::sparse_atlas, "fiber point is far from every section");
  // Node k with periodic extension: v_{k + a} = v_k + 1.
  auto node = [&](const std::vector<double>& n, long k) {
    const long q = static_cast<long>(std::floor(static_cast<double>(k) / static_cast<double>(a)));
    return n[static_cast<std::size_t>(k - q * static_cast<long>(a))] + static_cast<double>(q);
  };
  auto slope = [&](long k) { return (node(w, k + 1) - node(w, k - 1)) / (node(v, k + 1) - node(v, k - 1)); };
  const long jj = static_cast<long>(j);
  const double m0 = slope(jj), m1 = slope(jj + 1);
  const double t = h > 0 ? (e - v[j]) / h : 0;
  const double t2 = t * t, t3 = t2 * t;
  const double value = (2 * t3 - 3 * t2 + 1) * w[j] + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * w[j + 1] +
                       (t3 - t2) * h * m1;
  const double deriv = h > 0 ? ((6 * t2 - 6 * t) * w[j] + (3 * t2 - 4 * t + 1) * h * m0 + (-6 * t2 + 6 * t) * w[j + 1] +
                                (3 * t2 - 2 * t) * h * m1) / h
                             : m0;
  return {value + (eta - e), deriv};
}

HolonomyMap holonomy(const Atlas& atlas, const BasePoint& x, const BasePoint& y, int fiber_samples) {
  std::vector<double> lift(static_cast<std::size_t>(fiber_samples)), deriv(lift.size());
  HolonomyMap h{x, y, {}, 0};
  for (int i = 0; i < fiber_samples; ++i) {
    const Jet j = holonomy_apply(atlas, x, y, static_cast<double>(i) / fiber_samples);
    lift[static_cast<std::size_t>(i)] = j.x;
    deriv[static_cast<std::size_t>(i)] = std::max(j.dx, CircleDiffeo::min_slope);
    h.derivative_bound = std::max(h.derivative_bound, j.dx);
  }
  h.map = CircleDiffeo::from_samples(std::move(lift), std::move(deriv));
  return h;
}

double groupoid_deviation(const Atlas& atlas, const HyperbolicBase& base, std::size_t triples, std::uint64_t seed,
                          int fiber_samples) {
  const RandomStream root(seed);
  std::vector<double> dev(triples, 0.0);
  parallel_for(triples, default_exec(), [&](std::size_t i) {
    RandomStream rng = root.child(i);
    const BasePoint x = base.random_point(rng), y = base.random_point(rng), z = base.random_point(rng);
    for (int k = 0; k < fiber_samples; ++k) {
      const double eta = static_cast<double>(k) / fiber_samples;
      const double two = holonomy_apply(atlas, y, z, holonomy_apply(atlas, x, y, eta).x).x;
      dev[i] = std::max(dev[i], circle_distance(two, holonomy_apply(atlas, x, z, eta).x));
    }
  });
  return triples ? *std::max_element(dev.begin(), dev.end()) : 0.0;
}

Trivialization trivialize(const SkewSystem& s, const Atlas& atlas, int fiber_samples, const Exec& exec) {
  const auto& first = atlas.sections.front().values;
  const BasePoint& x0 = atlas.plan.start;
  const std::size_t cells = first.size();
  Trivialization t;
  t.h.grid = first.grid;
  t.h.points = first.points;
  t.h.values.assign(cells, CircleDiffeo::identity(fiber_samples));
  std::vector<double> res(cells, 0.0);
  parallel_for(cells, exec, [&](std::size_t c) {
    const BasePoint& x = first.points[c];
    t.h.values[c] = holonomy(atlas, x, x0, fiber_samples).map;
    const BasePoint fx = s.base->step(x, 1);
    const FiberMap phi = s.circle()(x);
    for (int k = 0; k < 64; ++k) {
      const double eta = static_cast<double>(k) / 64;
      const double lhs = holonomy_apply(atlas, fx, x0, phi.lift(eta)).x;
      const double rhs = holonomy_apply(atlas, x, x0, eta).x;
      res[c] = std::max(res[c], circle_distance(lhs, rhs));
    }
  });
  t.conjugacy_residual = *std::max_element(res.begin(), res.end());
  return t;
}

LinearAlongSection derivative_cocycle_along_section(const SkewSystem& s, const OrbitClosureSection& section,
                                                    const DenseOrbitPlan& plan, long horizon,
                                                    const SolveOptions& options, const Exec& exec) {
  const auto sec = std::make_shared<const OrbitClosureSection>(section);
  const auto phi = s.circle();
  const MatrixCocycle a(
      CocycleFamily::grid_table, 1,
      [sec, s](const BasePoint& x) {
        return Eigen::MatrixXd::Constant(1, 1, s.circle()(x).derivative(section_value(s, *sec, x)));
      },
      s.alpha());
  const SkewSystem lin = make_skew(s.base, a);
  LinearAlongSection out;
  for (std::size_t c = 0; c < section.values.size(); ++c)
    out.values.push_back(phi(section.values.points[c]).derivative(section.values.values[c].y));
  out.solution = solve_linear(lin, plan, Eigen::MatrixXd::Identity(1, 1), options, exec);
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (const auto& u : out.solution.u.u.values) {
    lo = std::min(lo, std::abs(u(0, 0)));
    hi = std::max(hi, std::abs(u(0, 0)));
  }
  out.transfer_spread = hi / lo;
  // Products of fiber derivatives along section orbits started at cells.
  const std::size_t cells = section.values.size();
  const std::size_t stride = std::max<std::size_t>(1, cells / 64);
  const std::size_t picks = (cells + stride - 1) / stride;
  std::vector<double> full(picks, 1.0), half(picks, 1.0);
  parallel_for(picks, exec, [&](std::size_t i) {
    const std::size_t c = i * stride;
    SkewState st{section.values.points[c], section.values.values[c].y};
    double logd = 0;
    for (long n = 1; n <= horizon; ++n) {
      const Jet j = phi(st.x).apply({st.y, 1});
      logd += std::log(j.dx);
      st = {s.base->step(st.x, 1), j.x};
      const double v = std::exp(std::abs(logd));
      full[i] = std::max(full[i], v);
      if (n <= horizon / 2) half[i] = std::max(half[i], v);
    }
  });
  out.observed_sup = *std::max_element(full.begin(), full.end());
  out.observed_sup_half = *std::max_element(half.begin(), half.end());
  return out;
}

std::pair<double, double> uniform_derivative_bound(const SkewSystem& s, std::size_t states, long horizon,
                                                   std::uint64_t seed, const Exec& exec) {
  const RandomStream root(seed);
  std::vector<double> full(states, 1.0), half(states, 1.0);
  parallel_for(states, exec, [&](std::size_t i) {
    RandomStream rng = root.child(i);
    SkewState st{s.base->random_point(rng), rng.uniform()};
    double logd = 0;
    for (long n = 1; n <= horizon; ++n) {
      const Jet j = s.circle()(st.x).apply({st.y, 1});
      logd += std::log(j.dx);
      st = {s.base->step(st.x, 1), j.x - std::floor(j.x)};
      const double v = std::exp(std::abs(logd));
      full[i] = std::max(full[i], v);
      if (n <= horizon / 2) half[i] = std::max(half[i], v);
    }
  });
  return {states ? *std::max_element(full.begin(), full.end()) : 1.0,
          states ? *std::max_element(half.begin(), half.end()) : 1.0};
}

SmoothnessReport holonomy_smoothness_check(const SkewSystem& s, const BasePoint& x, const BasePoint& y,
                                           const Atlas& atlas, double eta, long search) {
  SmoothnessReport r;
  const double h = 1e-4;
  r.finite_difference =
      (holonomy_apply(atlas, x, y, eta + h).x - holonomy_apply(atlas, x, y, eta - h).x) / (2 * h);
  // Same-orbit holonomies H_{x, f^n x} = Phi^(n)(x) with f^n x approaching y.
  double best = std::numeric_limits<double>::infinity();
  BasePoint xn = x;
  Jet j{eta, 1};
  for (long n = 1; n <= search; ++n) {
    j = s.circle()(xn).apply(j);
    xn = s.base->step(xn, 1);
    const double d = s.base->distance(xn, y);
    if (d < 0.7 * best) {
      best = d;
      r.approach.push_back({d, j.dx});
    }
  }
  r.orbit_limit = r.approach.empty() ? 1 : r.approach.back().second;
  r.deviation = std::abs(r.finite_difference - r.orbit_limit);
  return r;
}

}  // namespace livsic

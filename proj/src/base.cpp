#include "livsic/base.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "livsic/error.hpp"

namespace livsic {

double HyperbolicityData::nu_s_power(long n) const { return std::pow(nu_s, static_cast<double>(n)); }
double HyperbolicityData::nu_u_power(long n) const { return std::pow(nu_u, static_cast<double>(n)); }

HyperbolicityData HyperbolicityData::with_metric_exponent(double alpha) const {
  HyperbolicityData h = *this;
  h.eps0 = std::pow(eps0, alpha);
  h.delta0 = std::pow(delta0, alpha);
  h.K0 = std::pow(K0, alpha);
  h.lambda = alpha * lambda;
  h.nu_s = std::pow(nu_s, alpha);
  h.nu_u = std::pow(nu_u, alpha);
  h.closing_c = std::pow(closing_c, alpha);
  h.delta1 = std::pow(delta1, alpha);
  return h;
}

// ---------------------------------------------------------------- BaseGrid

BaseGrid BaseGrid::torus(int m) {
  if (m < 1) throw Error(ErrorKind::precondition, "torus grid needs m >= 1");
  BaseGrid g;
  g.kind_ = BaseKind::cat_map;
  g.resolution_ = m;
  g.size_ = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  g.scale_ = 1.0 / m;
  return g;
}

BaseGrid BaseGrid::sft(const Sft& sft, int depth) {
  if (depth < 1 || depth > 20) throw Error(ErrorKind::precondition, "cylinder depth must lie in [1, 20]");
  BaseGrid g;
  g.kind_ = BaseKind::sft;
  g.resolution_ = depth;
  g.alphabet_ = sft.alphabet();
  g.window_lo_ = -(depth / 2);
  g.window_hi_ = g.window_lo_ + depth - 1;
  g.scale_ = std::pow(sft.theta(), depth / 2);
  std::size_t total = 1;
  for (int i = 0; i < depth; ++i) total *= static_cast<std::size_t>(sft.alphabet());
  g.cylinder_to_cell_.assign(total, -1);
  std::int64_t next = 0;
  for (const Word& w : sft.words(depth)) {
    std::uint64_t idx = 0;
    for (Symbol s : w) idx = idx * static_cast<std::uint64_t>(sft.alphabet()) + s;
    g.cylinder_to_cell_[idx] = next++;
  }
  g.size_ = static_cast<std::size_t>(next);
  return g;
}

std::size_t BaseGrid::cell_of(const BasePoint& x) const {
  if (kind_ == BaseKind::cat_map) {
    const auto* t = std::get_if<TorusPoint>(&x);
    if (!t) throw Error(ErrorKind::grid_mismatch, "torus grid given a symbolic point");
    const int m = resolution_;
    const int i = std::min(m - 1, static_cast<int>(t->u * m));
    const int j = std::min(m - 1, static_cast<int>(t->v * m));
    return torus_index(i, j);
  }
  const auto* s = std::get_if<SftPoint>(&x);
  if (!s) throw Error(ErrorKind::grid_mismatch, "cylinder grid given a torus point");
  std::uint64_t idx = 0;
  for (long i = window_lo_; i <= window_hi_; ++i) idx = idx * static_cast<std::uint64_t>(alphabet_) + s->at(i);
  const std::int64_t cell = idx < cylinder_to_cell_.size() ? cylinder_to_cell_[idx] : -1;
  if (cell < 0) throw Error(ErrorKind::grid_mismatch, "point lies in an inadmissible cylinder");
  return static_cast<std::size_t>(cell);
}

std::array<int, 2> BaseGrid::torus_cell(std::size_t cell) const {
  return {static_cast<int>(cell / static_cast<std::size_t>(resolution_)),
          static_cast<int>(cell % static_cast<std::size_t>(resolution_))};
}

std::size_t BaseGrid::torus_index(int i, int j) const {
  const int m = resolution_;
  i = ((i % m) + m) % m;
  j = ((j % m) + m) % m;
  return static_cast<std::size_t>(i) * static_cast<std::size_t>(m) + static_cast<std::size_t>(j);
}

TorusPoint BaseGrid::torus_center(std::size_t cell) const {
  const auto ij = torus_cell(cell);
  return {(ij[0] + 0.5) / resolution_, (ij[1] + 0.5) / resolution_};
}

// ---------------------------------------------------------- HyperbolicBase

HyperbolicBase::HyperbolicBase(CatMap cat) : system_(std::move(cat)) {}
HyperbolicBase::HyperbolicBase(Sft sft) : system_(std::move(sft)) {}

BaseKind HyperbolicBase::kind() const {
  return std::holds_alternative<CatMap>(system_) ? BaseKind::cat_map : BaseKind::sft;
}

std::string HyperbolicBase::describe() const {
  std::ostringstream os;
  if (kind() == BaseKind::cat_map) {
    const auto& m = cat().matrix();
    os << "cat_map[[" << m[0][0] << "," << m[0][1] << "],[" << m[1][0] << "," << m[1][1] << "]]";
  } else {
    os << "sft(k=" << sft().alphabet() << ",theta=" << sft().theta() << ")";
  }
  return os.str();
}

const HyperbolicityData& HyperbolicBase::hyp() const {
  return std::visit([](const auto& s) -> const HyperbolicityData& { return s.hyp(); }, system_);
}

BasePoint HyperbolicBase::step(const BasePoint& x, long k) const {
  if (kind() == BaseKind::cat_map) return cat().step(std::get<TorusPoint>(x), k);
  return sft().step(std::get<SftPoint>(x), k);
}

double HyperbolicBase::distance(const BasePoint& x, const BasePoint& y, double alpha) const {
  double d = kind() == BaseKind::cat_map ? cat().distance(std::get<TorusPoint>(x), std::get<TorusPoint>(y))
                                         : sft().distance(std::get<SftPoint>(x), std::get<SftPoint>(y));
  return alpha == 1 ? d : std::pow(d, alpha);
}

bool HyperbolicBase::same_point(const BasePoint& x, const BasePoint& y) const {
  if (kind() == BaseKind::cat_map) return distance(x, y) < 1e-9;
  return sft().equal(std::get<SftPoint>(x), std::get<SftPoint>(y));
}

bool HyperbolicBase::closer_than(const BasePoint& x, const BasePoint& y, double r) const {
  if (kind() == BaseKind::cat_map) return distance(x, y) < r;
  if (r > 1) return true;
  // theta^n < r  <=>  n > log r / log theta
  const double theta = sft().theta();
  long n = static_cast<long>(std::floor(std::log(r) / std::log(theta))) + 1;
  while (n > 0 && std::pow(theta, static_cast<double>(n - 1)) < r) --n;
  while (std::pow(theta, static_cast<double>(n)) >= r) ++n;
  return sft().agree_on(std::get<SftPoint>(x), std::get<SftPoint>(y), std::max(n, 0L));
}

BasePoint HyperbolicBase::bracket(const BasePoint& x, const BasePoint& y) const {
  if (kind() == BaseKind::cat_map) return cat().bracket(std::get<TorusPoint>(x), std::get<TorusPoint>(y));
  return sft().bracket(std::get<SftPoint>(x), std::get<SftPoint>(y));
}

namespace {

long depth_for_scale(double theta, double t) {
  t = std::abs(t);
  if (t >= 1 || t <= 0) return t <= 0 ? 60 : 1;
  return std::max(1L, static_cast<long>(std::ceil(std::log(t) / std::log(theta))));
}

}  // namespace

BasePoint HyperbolicBase::stable_neighbor(const BasePoint& x, double t, RandomStream& rng) const {
  if (kind() == BaseKind::cat_map) return cat().along_stable(std::get<TorusPoint>(x), t);
  const auto& s = sft();
  const auto& p = std::get<SftPoint>(x);
  const long m = depth_for_scale(s.theta(), t);
  for (int attempt = 0; attempt < 64; ++attempt) {
    SftPoint w = s.step(s.random_point(rng, 2 * m + 8), m + 4);
    if (s.admissible(w.at(-m - 1), p.at(-m))) return s.splice(w, p, -m);
  }
  return x;
}

BasePoint HyperbolicBase::unstable_neighbor(const BasePoint& x, double t, RandomStream& rng) const {
  if (kind() == BaseKind::cat_map) return cat().along_unstable(std::get<TorusPoint>(x), t);
  const auto& s = sft();
  const auto& p = std::get<SftPoint>(x);
  const long m = depth_for_scale(s.theta(), t);
  for (int attempt = 0; attempt < 64; ++attempt) {
    SftPoint w = s.step(s.random_point(rng, 2 * m + 8), -m - 4);
    if (s.admissible(p.at(m), w.at(m + 1))) return s.splice(p, w, m + 1);
  }
  return x;
}

std::vector<BasePoint> HyperbolicBase::periodic_points(long n, std::size_t cap) const {
  std::vector<BasePoint> out;
  if (kind() == BaseKind::cat_map) {
    for (const auto& r : cat().fixed_points_exact(n, cap)) out.emplace_back(r.to_point());
  } else {
    for (const auto& w : sft().cyclic_words(n, cap)) out.emplace_back(periodic_sft_point(w));
  }
  return out;
}

std::uint64_t HyperbolicBase::periodic_count(long n) const {
  if (kind() == BaseKind::cat_map) return static_cast<std::uint64_t>(cat().periodic_count(n));
  return sft().periodic_count(n);
}

std::vector<PeriodicOrbit> HyperbolicBase::periodic_orbits(long n, std::size_t cap) const {
  std::vector<PeriodicOrbit> out;
  if (kind() == BaseKind::cat_map) {
    const auto& c = cat();
    std::set<CatMap::RationalPoint> covered;
    for (const auto& r : c.fixed_points_exact(n, cap)) {
      if (covered.count(r)) continue;
      long period = 0;
      auto q = r;
      do {
        covered.insert(q);
        q = c.step_exact(q);
        ++period;
      } while (!(q == r));
      if (period == n) out.push_back({r.to_point(), n});
    }
    return out;
  }
  for (const auto& w : sft().cyclic_words(n, cap)) {
    bool canonical = true;
    bool primitive = true;
    for (long k = 1; k < n && canonical; ++k) {
      Word rot(w.begin() + k, w.end());
      rot.insert(rot.end(), w.begin(), w.begin() + k);
      if (rot < w) canonical = false;
      if (rot == w) primitive = false;
    }
    if (canonical && primitive) out.push_back({periodic_sft_point(w), n});
  }
  return out;
}

ClosingResult HyperbolicBase::closing(const BasePoint& x, long n) const {
  if (n < 1) throw Error(ErrorKind::precondition, "closing needs n >= 1");
  const auto& h = hyp();
  ClosingResult r;
  r.n = n;
  r.c = h.closing_c;
  r.lambda = h.lambda;
  r.return_distance = distance(x, step(x, n));
  if (r.return_distance >= h.delta1) {
    std::ostringstream os;
    os << "closing needs d(x, f^n x) < delta1 = " << h.delta1 << ", got " << r.return_distance;
    throw Error(ErrorKind::precondition, os.str());
  }
  r.bound_trace.resize(static_cast<std::size_t>(n));
  if (kind() == BaseKind::cat_map) {
    const auto& c = cat();
    const auto& t = std::get<TorusPoint>(x);
    const TorusPoint fx = c.step(t, n);
    const auto ab = c.eigen_coords({wrap_half(fx.u - t.u), wrap_half(fx.v - t.v)});
    const double a = ab[0] / (std::pow(c.mu_u(), n) - 1);
    const double b = ab[1] / (std::pow(c.mu_s(), n) - 1);
    // Orbits of p and y follow from the orbit of x and the eigen-offsets,
    // which avoids amplifying rounding in p along unstable directions.
    auto shifted = [&](TorusPoint base, long i, double ca, double cb) {
      const double su = std::pow(c.mu_u(), i) * ca, ss = std::pow(c.mu_s(), i) * cb;
      return make_torus_point(base.u - su * c.e_u()[0] - ss * c.e_s()[0], base.v - su * c.e_u()[1] - ss * c.e_s()[1]);
    };
    const TorusPoint p = shifted(t, 0, a, b);
    const TorusPoint y = shifted(t, 0, a, 0);
    if (c.distance(shifted(fx, n, a, b), p) > 1e-9)
      throw Error(ErrorKind::precondition, "closing point is not periodic");
    if (c.distance(c.bracket(t, p), y) > 1e-9)
      throw Error(ErrorKind::precondition, "closing point y differs from [x, p]");
    r.p = p;
    r.y = y;
    TorusPoint xi = t;
    for (long i = 0; i < n; ++i) {
      const TorusPoint pi = shifted(xi, i, a, b), yi = shifted(xi, i, a, 0);
      r.bound_trace[static_cast<std::size_t>(i)] = {c.distance(xi, pi), c.distance(pi, yi), c.distance(xi, yi)};
      xi = c.step_once(xi);
    }
  } else {
    const auto& s = sft();
    const auto& t = std::get<SftPoint>(x);
    const SftPoint p = s.closing_point(t, n);
    const SftPoint y = s.bracket(t, p);
    r.p = p;
    r.y = y;
    for (long i = 0; i < n; ++i) {
      const auto xi = s.step(t, i), pi = s.step(p, i), yi = s.step(y, i);
      r.bound_trace[static_cast<std::size_t>(i)] = {s.distance(xi, pi), s.distance(pi, yi), s.distance(xi, yi)};
    }
  }
  const double scale = r.c * r.return_distance;
  for (long i = 0; i < n; ++i) {
    const auto& d = r.bound_trace[static_cast<std::size_t>(i)];
    const double b1 = scale * std::exp(-r.lambda * static_cast<double>(std::min(i, n - i)));
    const double b2 = scale * std::exp(-r.lambda * static_cast<double>(i));
    const double b3 = scale * std::exp(-r.lambda * static_cast<double>(n - i));
    const double slack = 1e-9;
    if (d[0] > b1 * (1 + slack) + 1e-12 || d[1] > b2 * (1 + slack) + 1e-12 || d[2] > b3 * (1 + slack) + 1e-12) {
      std::ostringstream os;
      os << "closing bounds violated at iterate " << i << " of " << n;
      throw Error(ErrorKind::precondition, os.str());
    }
  }
  return r;
}

BasePoint HyperbolicBase::random_point(RandomStream& rng) const {
  if (kind() == BaseKind::cat_map) {
    const double u = rng.uniform(), v = rng.uniform();
    return dyadic({u, v});
  }
  return sft().random_point(rng, 64);
}

BaseGrid HyperbolicBase::grid(int resolution) const {
  if (kind() == BaseKind::cat_map) return BaseGrid::torus(resolution);
  return BaseGrid::sft(sft(), resolution);
}

BaseGrid HyperbolicBase::default_grid() const { return grid(kind() == BaseKind::cat_map ? 64 : 6); }

BaseGrid HyperbolicBase::grid_for_resolution(double resolution) const {
  if (!(resolution > 0)) throw Error(ErrorKind::precondition, "resolution must be positive");
  if (kind() == BaseKind::cat_map) {
    const double m = std::ceil(1.0 / resolution - 1e-12);
    return BaseGrid::torus(static_cast<int>(std::max(1.0, m)));
  }
  // Cells agreeing on [-r, r] have diameter theta^r.
  if (resolution >= 1) return BaseGrid::sft(sft(), 1);
  const long r = depth_for_scale(sft().theta(), resolution);
  return BaseGrid::sft(sft(), static_cast<int>(2 * r + 1));
}

namespace {

// Concatenation of all admissible words of length `depth` with connectors.
Word de_bruijn_like(const Sft& s, int depth) {
  Word out;
  for (const Word& w : s.words(depth)) {
    if (!out.empty()) {
      Word link = s.connector(out.back(), w.front());
      out.insert(out.end(), link.begin(), link.end());
    }
    out.insert(out.end(), w.begin(), w.end());
  }
  return out;
}

}  // namespace

DenseOrbitPlan HyperbolicBase::transitive_point(const BaseGrid& grid, std::uint64_t seed, bool two_sided) const {
  DenseOrbitPlan plan;
  plan.two_sided = two_sided;
  plan.grid = std::make_shared<const BaseGrid>(grid);
  plan.first_visit.assign(grid.size(), 0);
  plan.representative.assign(grid.size(), BasePoint{});
  std::vector<char> seen(grid.size(), 0);
  std::size_t remaining = grid.size();
  auto visit = [&](const BasePoint& x, long k) {
    const std::size_t cell = grid.cell_of(x);
    if (seen[cell]) return;
    seen[cell] = 1;
    plan.first_visit[cell] = k;
    plan.representative[cell] = x;
    --remaining;
  };

  if (kind() == BaseKind::cat_map) {
    RandomStream rng(seed);
    const TorusPoint start = dyadic({rng.uniform(), rng.uniform()});
    plan.start = start;
    const double cells = static_cast<double>(grid.size());
    const long cap = static_cast<long>(50 * cells * (1 + std::log(cells))) + 100;
    const auto& c = cat();
    TorusPoint fwd = start, bwd = start;
    visit(start, 0);
    long k = 1;
    for (; remaining > 0 && k <= cap; ++k) {
      fwd = c.step_once(fwd);
      visit(fwd, k);
      if (two_sided) {
        bwd = c.step_back(bwd);
        visit(bwd, -k);
      }
    }
    if (remaining > 0) {
      std::ostringstream os;
      os << "orbit did not cover " << remaining << " of " << grid.size() << " cells within " << cap << " iterates";
      throw Error(ErrorKind::precondition, os.str());
    }
    plan.N = k;
    return plan;
  }

  const auto& s = sft();
  const int depth = grid.resolution();
  const Word w = de_bruijn_like(s, depth);
  Word center = w;
  long start_index = 0;
  if (two_sided) {
    Word link = s.connector(w.back(), w.front());
    center.insert(center.end(), link.begin(), link.end());
    start_index = static_cast<long>(center.size());
    center.insert(center.end(), w.begin(), w.end());
  }
  const Symbol first = center.front();
  Word left{first};
  Word loop = s.connector(first, first);
  left.insert(left.end(), loop.begin(), loop.end());
  Symbol after = 0;
  while (!s.admissible(center.back(), after)) ++after;
  Word right{after};
  loop = s.connector(after, after);
  right.insert(right.end(), loop.begin(), loop.end());
  // Coordinate 0 of f^k(start) sits over center[start_index + k - window_lo],
  // so the window of f^0 covers center[start_index .. start_index + depth).
  const long offset = start_index - grid.window_lo();
  const SftPoint start = make_sft_point(left, center, right, offset);
  plan.start = start;
  const long len = static_cast<long>(w.size()) - depth + 1;
  const long reach = two_sided ? std::max(len, start_index + 1) : len;
  long k = 0;
  for (; k < reach && remaining > 0; ++k) {
    visit(s.step(start, k), k);
    if (two_sided && k > 0) visit(s.step(start, -k), -k);
  }
  if (remaining > 0) throw Error(ErrorKind::precondition, "symbolic transitive word misses a cylinder");
  plan.N = k;
  return plan;
}

DenseOrbitPlan HyperbolicBase::transitive_point(double resolution, std::uint64_t seed) const {
  return transitive_point(grid_for_resolution(resolution), seed, false);
}

}  // namespace livsic

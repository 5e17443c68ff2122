// Acceptance suite: one pass/fail line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "livsic/scenario.hpp"
#include "livsic/sections.hpp"
#include "oracles.hpp"

using namespace livsic;

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [failed: " << what << "]";
    }
  }
};

std::shared_ptr<const HyperbolicBase> cat() {
  return std::make_shared<const HyperbolicBase>(CatMap({{{2, 1}, {1, 1}}}));
}
std::shared_ptr<const HyperbolicBase> shift2() { return std::make_shared<const HyperbolicBase>(Sft::full_shift(2)); }

std::vector<BumpField> torus_generators() {
  std::vector<BumpField> g(5);
  g[0].a = {0.2, {{0.1, 1, 0, 0.3}, {0.05, 0, 1, 1.1}}, {}};
  g[0].b = {0.1, {{0.07, 1, 1, 0.2}}, {}};
  g[0].c = {0.3, {{0.04, 0, 1, 0.0}}, {}};
  g[1].a = {0, {{0.3, 1, 0, 0}}, {}};
  g[1].b = {0, {{0.1, 0, 1, 0.5}}, {}};
  g[2].a = {0.1, {{0.15, 1, 1, 0}}, {}};
  g[2].b = {0, {{0.05, 2, 0, 0}}, {}};
  g[2].c = {0.5, {}, {}};
  g[3].b = {0, {{0.2, 1, 0, 0}, {0.1, 0, 1, 0.3}}, {}};  // rotations only
  g[4].a = {0, {{0.4, 0, 1, 0.7}}, {}};
  g[4].b = {0.1, {}, {}};
  g[4].c = {0, {{0.1, 1, 0, 0}}, {}};
  return g;
}

std::vector<BumpField> shift_generators() {
  std::vector<BumpField> g(5);
  g[0].a = {0.1, {}, {{0, 0.2}, {1, 0.1}}};
  g[0].b = {0.0, {}, {{-1, 0.15}, {2, 0.05}}};
  g[0].c = {0.2, {}, {{0, 0.3}}};
  g[1].a = {0.3, {}, {{0, -0.2}}};
  g[2].a = {0, {}, {{-1, 0.25}, {1, 0.25}}};
  g[2].b = {0.05, {}, {{0, 0.1}}};
  g[3].b = {0, {}, {{0, 0.2}, {-2, 0.05}, {2, 0.05}}};  // rotations only
  g[4].a = {0.2, {}, {{2, 0.2}, {-2, -0.1}}};
  g[4].c = {0, {}, {{1, 0.4}}};
  return g;
}

struct RoundTrip {
  std::string name;
  std::shared_ptr<const HyperbolicBase> base;
  BumpField v;
  SkewSystem s;
};

std::vector<RoundTrip> round_trips() {
  std::vector<RoundTrip> out;
  auto c = cat();
  auto t = torus_generators();
  for (std::size_t i = 0; i < t.size(); ++i)
    out.push_back({"cat/" + std::to_string(i), c, t[i], make_skew(c, CircleCocycle::coboundary(c, t[i]))});
  auto s = shift2();
  auto g = shift_generators();
  for (std::size_t i = 0; i < g.size(); ++i)
    out.push_back({"shift/" + std::to_string(i), s, g[i], make_skew(s, CircleCocycle::coboundary(s, g[i]))});
  return out;
}

double generator_gap(const Solution<CircleDiffeo>& sol, const BumpField& v) {
  const FiberMap right = FiberMap::bump(v.at(sol.u.x0)).inverse();
  double worst = 0;
  for (std::size_t c = 0; c < sol.u.u.size(); ++c) {
    const FiberMap expect = FiberMap::chain(right, FiberMap::bump(v.at(sol.u.u.points[c])));
    worst = std::max(worst, FiberMap::sampled(sol.u.u.values[c]).c0_distance(expect, 256));
  }
  return worst;
}

// ------------------------------------------------------------ criteria

void periodic_oracle(Outcome& o) {
  const auto b = cat();
  const oracle::Mat a{{{2, 1}, {1, 1}}};
  const std::uint64_t expected[] = {1, 5, 16, 45, 121, 320, 841, 2205};
  for (int n = 1; n <= 8; ++n) {
    const std::uint64_t brute = oracle::brute_force_fixed_points(a, n);
    const auto closed = static_cast<std::uint64_t>(std::llround(oracle::golden_periodic_count(n)));
    const std::uint64_t counted = b->periodic_count(n);
    const std::size_t listed = b->periodic_points(n).size();
    o.require(brute == expected[n - 1] && closed == expected[n - 1] && counted == expected[n - 1] &&
                  listed == expected[n - 1],
              "count at n = " + std::to_string(n));
  }
  o.note << " counts 1..8 match lattice scan and closed form";
}

void closing(Outcome& o) {
  for (const char* base : {R"({"kind": "cat_map"})", R"({"kind": "sft"})"}) {
    auto cfg = parse_config_text(std::string(R"({"base": )") + base +
                                 R"(, "cocycle": {"family_id": "rotation"}, "experiment": "closing_demo",
                                     "run": {"near_returns": 100}, "seed": 5})");
    const auto r = run_scenario(cfg);
    o.require(!r.error && r.pass(), std::string(base) + (r.error ? r.error->message : ""));
    o.note << " " << (cfg.base.kind == BaseKind::cat_map ? "cat" : "shift") << ": " << *r.metric("near_returns")
           << " returns, c = " << *r.metric("closing_c") << ", lambda = " << *r.metric("closing_lambda")
           << " (rate " << *r.metric("expected_rate") << ");";
  }
}

void theorem_a(Outcome& o, const std::vector<RoundTrip>& cases) {
  double worst_defect = 0, worst_residual = 0, worst_gap = 0;
  for (const auto& c : cases) {
    const auto poo = poo_check(c.s, 6, 1e-4);
    o.require(poo.pass, c.name + " POO defect " + format_number(poo.worst_defect));
    const auto t0 = Clock::now();
    const auto plan = c.base->transitive_point(c.base->default_grid(), 11);
    const auto sol = solve_diffeo(c.s, plan, CircleDiffeo::identity(1024));
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const double gap = generator_gap(sol, c.v);
    o.require(sol.report.residual_C0 < 5e-3, c.name + " residual " + format_number(sol.report.residual_C0));
    o.require(gap < 5e-3, c.name + " generator gap " + format_number(gap));
    o.require(secs < 300, c.name + " over 5 min");
    worst_defect = std::max(worst_defect, poo.worst_defect);
    worst_residual = std::max(worst_residual, sol.report.residual_C0);
    worst_gap = std::max(worst_gap, gap);
  }
  o.note << " " << cases.size() << " cocycles; max POO defect " << worst_defect << ", max residual_C0 "
         << worst_residual << ", max generator gap " << worst_gap;
}

void theorem31(Outcome& o, const std::vector<RoundTrip>& cases) {
  double env = 0, worst_conj = 0;
  long worst_ell = 0;
  for (const auto& c : cases) {
    const auto sw = exponent_sweep(c.s, 6, 20, 100000, 21);
    env = std::max({env, std::abs(sw.envelope_min), std::abs(sw.envelope_max)});
    o.require(sw.envelope_min > -1e-2 && sw.envelope_max < 1e-2, c.name + " exponent envelope");
    DominationGrid g;
    g.seed = 22;
    const auto dom = domination_test(c.s, c.s.alpha(), 20, g);
    o.require(dom.ell.has_value(), c.name + " not dominated");
    if (dom.ell) worst_ell = std::max(worst_ell, *dom.ell);
    const auto grid = c.base->kind() == BaseKind::cat_map ? c.base->grid(32) : c.base->default_grid();
    const auto plan = c.base->transitive_point(grid, 5, true);
    const auto t = trivialize(c.s, build_atlas(c.s, plan));
    o.require(t.conjugacy_residual < 1e-2, c.name + " conjugacy residual " + format_number(t.conjugacy_residual));
    worst_conj = std::max(worst_conj, t.conjugacy_residual);
  }
  o.note << " coboundaries: max |exponent| " << env << ", max ell " << worst_ell << ", max conjugacy residual "
         << worst_conj << ";";

  const auto b = cat();
  const auto bump = make_skew(b, CircleCocycle::constant_bump(0.5));
  const auto sw = exponent_sweep(bump, 6, 20, 100000, 21);
  o.require(std::abs(sw.envelope_min - std::log(0.5)) < 5e-2, "bump envelope min " + format_number(sw.envelope_min));
  o.require(std::abs(sw.envelope_max - std::log(1.5)) < 5e-2, "bump envelope max " + format_number(sw.envelope_max));
  bool raised = false;
  try {
    orbit_closure_section(bump, {b->transitive_point(b->grid(32), 5, true).start, 0.3},
                          b->transitive_point(b->grid(32), 5, true));
  } catch (const Error& e) {
    raised = e.kind() == ErrorKind::return_claim;
  }
  o.require(raised, "bump return claim not violated");
  o.note << " bump(0.5): envelope [" << sw.envelope_min << ", " << sw.envelope_max << "], return claim "
         << (raised ? "violated" : "held");
}

void finder(Outcome& o, const std::vector<RoundTrip>& cases) {
  const auto b = cat();
  const auto bump = make_skew(b, CircleCocycle::constant_bump(0.5));
  const SkewState near_fixed{dyadic({1e-3, 2e-3}), 0.3};
  const auto r = find_contracting_periodic(bump, near_fixed, 1000000);
  o.require(r.found && r.found->n == 1 && std::abs(r.found->multiplier - 0.5) < 1e-6, "bump fixed point");
  if (r.found) o.note << " bump(0.5): period " << r.found->n << ", multiplier " << r.found->multiplier << ";";
  RandomStream rng(31);
  const auto far = find_contracting_periodic(bump, {b->random_point(rng), rng.uniform()}, 1000000);
  o.require(far.found && std::abs(far.found->multiplier - std::pow(0.5, far.found->n)) < 1e-6, "bump from a random start");
  long closings = 0;
  for (const auto& c : cases) {
    const auto f = find_contracting_periodic(c.s, {c.base->random_point(rng), rng.uniform()}, 1000000);
    o.require(!f.found && f.steps == 1000000, c.name + " found a contracting point");
    closings += f.closings;
  }
  o.note << " " << cases.size() << " coboundaries: not found after 1e6 steps (" << closings << " periodic points examined)";
}

LinearGenerator linear_generator(int k) {
  switch (k) {
    case 0:
      return {2, {{0, {{0.2, 1, 0, 0}}, {}}, {0, {{0.1, 0, 1, 0.4}}, {}}, {0, {{0.15, 1, 1, 0.1}}, {}},
                  {-0.1, {{0.1, 0, 1, 0}}, {}}}};
    case 1:
      return {2, {{0.3, {{0.1, 0, 1, 0}}, {}}, {0.2, {}, {}}, {0, {{0.2, 1, 0, 0.6}}, {}}, {0, {{0.1, 1, 1, 0}}, {}}}};
    default:
      return {2, {{0, {{0.25, 1, 1, 0.2}}, {}}, {0, {{0.2, 1, 0, 0}}, {}}, {0, {{-0.2, 1, 0, 0}}, {}},
                  {0, {{0.25, 0, 1, 0.9}}, {}}}};
  }
}

void kalinin(Outcome& o) {
  const auto b = cat();
  const Eigen::MatrixXd anchor = Eigen::MatrixXd::Identity(2, 2);
  const auto plan_a = b->transitive_point(b->default_grid(), 41);
  const auto plan_b = b->transitive_point(b->default_grid(), 42);
  const auto plan_half = b->transitive_point(b->grid(32), 41);
  double worst_residual = 0, worst_unique = 0, worst_holder = 0, worst_slope = 0;
  for (int k = 0; k < 3; ++k) {
    const auto gen = linear_generator(k);
    const auto s = make_skew(b, linear_family(b, gen, 1.0));
    const auto a = solve_linear(s, plan_a, anchor);
    const auto c = solve_linear(s, plan_b, anchor);
    o.require(a.report.residual_C0 < 1e-3 && c.report.residual_C0 < 1e-3,
              "generator " + std::to_string(k) + " residual " + format_number(a.report.residual_C0));
    worst_residual = std::max({worst_residual, a.report.residual_C0, c.report.residual_C0});
    const auto u = uniqueness_check(a, c);
    o.require(u.deviation < 2 * u.transport_error, "generator " + std::to_string(k) + " anchor uniqueness");
    worst_unique = std::max(worst_unique, u.deviation / u.transport_error);

    const auto half = solve_linear(s, plan_half, anchor);
    const auto r_half = holder_bound_check(half.u, s, 4000, 43);
    const auto r_full = holder_bound_check(a.u, s, 4000, 43);
    o.require(r_half && r_full, "Hoelder ratio undefined");
    if (r_half && r_full) {
      const double change = std::abs(*r_full / *r_half - 1);
      o.require(change <= 0.2, "generator " + std::to_string(k) + " Hoelder ratio change " + format_number(change));
      worst_holder = std::max(worst_holder, change);
    }

    // Parameter family A_t: variation between neighbours against dt.
    const std::vector<double> ts = {1.0, 1.2, 1.3, 1.35, 1.375};
    const auto rep = continuity_in_parameter(
        [&](double t) { return make_skew(b, linear_family(b, gen, t)); }, ts, plan_a, anchor);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    bool decreasing = true;
    double last = INFINITY;
    for (const auto& row : rep.rows) {
      if (row.dt <= 0) continue;
      decreasing = decreasing && row.variation < last;
      last = row.variation;
      const double x = std::log(row.dt), y = std::log(row.variation);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    o.require(decreasing && std::abs(slope - 1) <= 0.2, "generator " + std::to_string(k) + " continuity slope " + format_number(slope));
    worst_slope = std::max(worst_slope, std::abs(slope - 1));
  }
  o.note << " max residual " << worst_residual << ", max deviation/transport " << worst_unique
         << ", max Hoelder ratio change " << worst_holder << ", max |slope - 1| " << worst_slope;
}

void lamination(Outcome& o) {
  for (const char* name : {"cat_coboundary_sections.json"}) {
    auto cfg = load_config(std::filesystem::path(LIVSIC_SCENARIO_DIR) / name);
    cfg.run.leaves = 100;
    cfg.run.horizon = 1000;
    const auto r = run_scenario(cfg);
    o.require(!r.error, r.error ? r.error->message : "");
    for (const char* v : {"leaf_invariance", "leaf_lipschitz", "groupoid", "derivative_cocycle", "uniform_bound"}) {
      const Verdict* p = r.verdict(v);
      o.require(p && p->pass, v);
    }
    if (r.error) return;
    o.note << " 100 leaves: invariance " << *r.metric("leaf_invariance") << ", estimate/bound "
           << *r.metric("leaf_lipschitz_fraction") << "; groupoid " << *r.metric("groupoid_deviation")
           << "; derivative cocycle residual " << *r.metric("derivative_cocycle_residual") << "; sup_{n<=1000} "
           << *r.metric("uniform_bound") << " vs " << *r.metric("uniform_bound_half") << " at n<=500";
  }
}

void determinism(Outcome& o) {
  std::size_t scalars = 0, runs = 0;
  for (const auto& entry : std::filesystem::directory_iterator(LIVSIC_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const auto cfg = load_config(entry.path());
    const auto a = run_scenario(cfg, Exec::serial());
    const auto b = run_scenario(cfg, Exec::openmp(8));
    const auto c = run_scenario(cfg, Exec::serial());
    bool same = a.metrics.size() == b.metrics.size() && a.metrics.size() == c.metrics.size() &&
                a.verdicts.size() == b.verdicts.size() && a.phase == b.phase;
    for (std::size_t i = 0; same && i < a.metrics.size(); ++i)
      same = a.metrics[i].first == b.metrics[i].first &&
             std::memcmp(&a.metrics[i].second, &b.metrics[i].second, sizeof(double)) == 0 &&
             std::memcmp(&a.metrics[i].second, &c.metrics[i].second, sizeof(double)) == 0;
    for (std::size_t i = 0; same && i < a.verdicts.size(); ++i)
      same = a.verdicts[i].pass == b.verdicts[i].pass && a.verdicts[i].detail == b.verdicts[i].detail;
    o.require(same, entry.path().filename().string());
    scalars += a.metrics.size();
    ++runs;
  }
  o.note << " " << runs << " scenarios, " << scalars << " scalars identical across jobs 1, jobs 8 and a rerun";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget;  // seconds
    std::function<void(Outcome&)> run;
  };
  const auto cases = round_trips();
  const std::vector<Criterion> criteria = {
      {1, "periodic-point oracle", 5, periodic_oracle},
      {2, "closing lemma bounds", 30, closing},
      {3, "circle-fiber round trip", 300 * 10, [&](Outcome& o) { theorem_a(o, cases); }},
      {4, "exponents / domination / trivialization", 600, [&](Outcome& o) { theorem31(o, cases); }},
      {5, "contracting periodic point finder", 120, [&](Outcome& o) { finder(o, cases); }},
      {6, "linear suite", 300, kalinin},
      {7, "lamination engine", 600, lamination},
      {8, "determinism", 45 * 60, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.note << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    o.require(secs < c.budget, "over the time budget");
    std::printf("criterion %d %s  %s (%.1f s):%s\n", c.id, o.pass ? "PASS" : "FAIL", c.title, secs, o.note.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}

#include "livsic/scenario.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "livsic/sections.hpp"

namespace livsic {

using nlohmann::json;

bool RunResult::pass() const {
  if (error) return false;
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

int RunResult::exit_code() const {
  if (error) return error->kind == to_string(ErrorKind::poo_failure) || error->kind == to_string(ErrorKind::return_claim) ? 2 : 1;
  return pass() ? 0 : 2;
}

std::optional<double> RunResult::metric(const std::string& name) const {
  for (const auto& [k, v] : metrics)
    if (k == name) return v;
  return std::nullopt;
}

const Verdict* RunResult::verdict(const std::string& name) const {
  for (const auto& v : verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

namespace {

struct Context {
  const ScenarioConfig& cfg;
  Exec exec;
  std::shared_ptr<const HyperbolicBase> base;
  SkewSystem s;
  RunResult& out;

  std::uint64_t seed(std::uint64_t task) const { return RandomStream(cfg.seed).child(task).seed(); }
  double tol(const char* name) const { return tolerance(cfg, name); }
  void metric(const std::string& name, double v) { out.metrics.emplace_back(name, v); }
  void verdict(const std::string& name, bool pass, const std::string& detail = {}) {
    out.verdicts.push_back({name, pass, detail});
  }
  bool circle() const { return s.kind() == FiberKind::circle; }

  BaseGrid grid() const { return cfg.run.grid ? base->grid(cfg.run.grid) : base->default_grid(); }
  // Sections and atlases use a coarser default torus grid.
  BaseGrid section_grid() const {
    if (cfg.run.grid) return base->grid(cfg.run.grid);
    return base->kind() == BaseKind::cat_map ? base->grid(32) : base->default_grid();
  }
  std::vector<std::string> grid_preamble(const BaseGrid& g) const {
    return {"G=" + std::to_string(cfg.run.fiber_grid), "resolution=" + std::to_string(g.resolution()),
            std::string("family_id=") + to_string(cfg.cocycle.family), "alpha=" + format_number(cfg.cocycle.alpha)};
  }
};

std::string fmt(double v) { return format_number(v); }

TableCell optional_number(double v) {
  if (std::isnan(v)) return std::string();
  return v;
}

Table diffeo_table(const Context& c, const std::string& name, const BaseGrid& g, const std::vector<CircleDiffeo>& values,
                   std::vector<std::string> extra) {
  Table t{name, c.grid_preamble(g), grid_columns, {}};
  for (auto& e : extra) t.preamble.push_back(std::move(e));
  const int stride = c.cfg.run.export_fiber_stride;
  for (std::size_t cell = 0; cell < values.size(); ++cell) {
    const auto& v = values[cell];
    for (int i = 0; i < v.grid(); i += stride)
      t.rows.push_back({static_cast<long>(cell), static_cast<long>(i), v.lift_samples()[static_cast<std::size_t>(i)],
                        v.derivative_samples()[static_cast<std::size_t>(i)]});
  }
  return t;
}

Table matrix_table(const Context& c, const std::string& name, const BaseGrid& g,
                   const std::vector<Eigen::MatrixXd>& values, std::vector<std::string> extra) {
  Table t{name, c.grid_preamble(g), {"cell", "entry", "value"}, {}};
  for (auto& e : extra) t.preamble.push_back(std::move(e));
  for (std::size_t cell = 0; cell < values.size(); ++cell) {
    const auto& m = values[cell];
    for (long i = 0; i < m.size(); ++i)
      t.rows.push_back({static_cast<long>(cell), i, m(i / m.cols(), i % m.cols())});
  }
  return t;
}

json report_json(const SolveReport& r) {
  json j = {{"residual_C0", r.residual_C0},
            {"residual_C1", r.residual_C1},
            {"orbit_residual", r.orbit_residual},
            {"iterated_residual", r.iterated_residual},
            {"worst_cell", r.worst_cell},
            {"orbit_length_used", r.orbit_length_used},
            {"tolerance", r.tolerance},
            {"pass", r.pass}};
  if (r.holder_ratio) j["holder_ratio"] = *r.holder_ratio;
  return j;
}

SolveOptions solve_options(const Context& c) {
  SolveOptions o;
  o.poo_period = c.cfg.run.period;
  o.poo_tolerance = c.tol("poo");
  o.tolerance = c.circle() ? c.tol("residual") : c.tol("linear_residual");
  o.fiber_samples = c.cfg.run.fiber_grid;
  return o;
}

// Distance from the solution to the generator v(x) v(x0)^-1 over visited cells.
double generator_gap(const Context& c, const TransferFunction<CircleDiffeo>& u) {
  const BumpField& v = c.cfg.cocycle.bump;
  const FiberMap right = FiberMap::bump(v.at(u.x0)).inverse();
  double worst = 0;
  for (std::size_t cell = 0; cell < u.u.size(); ++cell) {
    const FiberMap expect = FiberMap::chain(right, FiberMap::bump(v.at(u.u.points[cell])));
    worst = std::max(worst, FiberMap::sampled(u.u.values[cell]).c0_distance(expect, 256));
  }
  return worst;
}

double generator_gap(const Context& c, const TransferFunction<Eigen::MatrixXd>& u) {
  const auto& g = c.cfg.cocycle.generator;
  const double t = c.cfg.cocycle.t;
  const Eigen::MatrixXd v0inv = g.v(u.x0, t).inverse();
  double worst = 0;
  for (std::size_t cell = 0; cell < u.u.size(); ++cell)
    worst = std::max(worst, value_distance(u.u.values[cell], g.v(u.u.points[cell], t) * v0inv));
  return worst;
}

bool has_generator(const Context& c) {
  return c.cfg.cocycle.family == CocycleFamily::coboundary_generated ||
         (c.cfg.cocycle.family == CocycleFamily::linear_family && c.cfg.cocycle.t != 0);
}

// ------------------------------------------------------------ experiments

void run_poo(Context& c) {
  const auto r = poo_check(c.s, c.cfg.run.period, c.tol("poo"), c.exec, c.cfg.run.fiber_grid);
  Table t{"poo.csv", {}, {"n", "defect"}, {}};
  for (std::size_t i = 0; i < r.defect_by_period.size(); ++i)
    t.rows.push_back({static_cast<long>(i + 1), r.defect_by_period[i]});
  c.out.tables.push_back(std::move(t));

  Table pts{"periodic_points.csv", {}, {}, {}};
  pts.columns = c.base->kind() == BaseKind::cat_map ? std::vector<std::string>{"n", "index", "u", "v"}
                                                    : std::vector<std::string>{"n", "index", "word"};
  for (long n = 1; n <= c.cfg.run.period; ++n) {
    const auto points = c.base->periodic_points(n);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (const auto* p = std::get_if<TorusPoint>(&points[i])) {
        pts.rows.push_back({n, static_cast<long>(i), p->u, p->v});
      } else {
        const auto& q = std::get<SftPoint>(points[i]);
        std::string w;
        for (long k = 0; k < n; ++k) w += static_cast<char>('0' + q.at(k));
        pts.rows.push_back({n, static_cast<long>(i), w});
      }
    }
  }
  c.out.tables.push_back(std::move(pts));
  c.metric("worst_defect", r.worst_defect);
  c.metric("worst_period", static_cast<double>(r.worst_n));
  c.metric("points_checked", static_cast<double>(r.points_checked));
  c.verdict("poo", r.pass, "worst defect " + fmt(r.worst_defect) + " at period " + std::to_string(r.worst_n));
}

SweepResult sweep(Context& c, const char* table_prefix) {
  const auto r = exponent_sweep(c.s, c.cfg.run.period, static_cast<std::size_t>(c.cfg.run.orbits), c.cfg.run.length,
                                c.seed(1), c.exec);
  Table t{std::string(table_prefix) + "sweep.csv", {}, sweep_columns, {}};
  Table l{std::string(table_prefix) + "sweep_long.csv", {}, long_columns, {}};
  for (const auto& row : r.rows) {
    t.rows.push_back({row.orbit_id, row.period, row.type, row.lambda_plus, row.lambda_minus, row.length,
                      optional_number(row.multiplier)});
    l.rows.push_back({static_cast<double>(row.orbit_id), std::string("lambda_plus"), row.lambda_plus});
    l.rows.push_back({static_cast<double>(row.orbit_id), std::string("lambda_minus"), row.lambda_minus});
  }
  c.out.tables.push_back(std::move(t));
  c.out.tables.push_back(std::move(l));
  c.metric("envelope_min", r.envelope_min);
  c.metric("envelope_max", r.envelope_max);
  c.metric("orbits_swept", static_cast<double>(r.rows.size()));
  const double e = c.tol("exponent");
  c.verdict("exponents_zero", r.envelope_min > -e && r.envelope_max < e,
            "envelope [" + fmt(r.envelope_min) + ", " + fmt(r.envelope_max) + "]");
  return r;
}

DominationReport domination(Context& c, double beta) {
  DominationGrid g;
  g.base_resolution = c.cfg.run.grid;
  g.seed = c.seed(2);
  const auto r = domination_test(c.s, beta, c.cfg.run.ell_max, g, c.exec);
  Table t{"domination.csv", {}, domination_columns, {}};
  t.rows.push_back({r.beta, r.ell ? TableCell(*r.ell) : TableCell(std::string()), r.margin, r.side});
  c.out.tables.push_back(std::move(t));
  c.metric("beta", r.beta);
  if (r.ell) c.metric("ell", static_cast<double>(*r.ell));
  c.metric("margin", r.margin);
  c.verdict("dominated", r.ell.has_value(),
            r.ell ? "ell = " + std::to_string(*r.ell) + " at beta " + fmt(beta)
                  : "no ell <= " + std::to_string(c.cfg.run.ell_max) + " at beta " + fmt(beta));
  return r;
}

void run_solve(Context& c) {
  const auto options = solve_options(c);
  std::vector<int> resolutions = c.cfg.run.resolutions;
  const BaseGrid main_grid = c.grid();
  if (resolutions.empty()) resolutions.push_back(main_grid.resolution());
  Table curve{"residual_vs_resolution.csv", {}, long_columns, {}};
  std::vector<double> holder_ratios;

  for (std::size_t k = 0; k < resolutions.size(); ++k) {
    const BaseGrid g = c.base->grid(resolutions[k]);
    const auto plan = c.base->transitive_point(g, c.cfg.seed);
    const bool main = g.resolution() == main_grid.resolution();
    double residual;
    std::optional<double> ratio;
    if (c.circle()) {
      const auto sol = solve_diffeo(c.s, plan, CircleDiffeo::identity(c.cfg.run.fiber_grid), options, c.exec);
      residual = sol.report.residual_C0;
      ratio = holder_bound_check(sol.u, c.s, 2000, c.seed(3), c.exec);
      if (main) {
        const std::vector<std::string> extra = {"anchor=identity", "plan_seed=" + std::to_string(c.cfg.seed),
                                                "N=" + std::to_string(plan.N),
                                                "residual_C0=" + fmt(sol.report.residual_C0),
                                                "residual_C1=" + fmt(sol.report.residual_C1)};
        c.out.tables.push_back(diffeo_table(c, "transfer.csv", g, sol.u.u.values, extra));
        c.out.documents.emplace_back("solve_report.json", report_json(sol.report));
        c.metric("residual_C0", sol.report.residual_C0);
        c.metric("residual_C1", sol.report.residual_C1);
        c.metric("orbit_residual", sol.report.orbit_residual);
        c.metric("iterated_residual", sol.report.iterated_residual);
        c.metric("orbit_length", static_cast<double>(plan.N));
        c.verdict("residual", sol.report.pass, "residual_C0 " + fmt(sol.report.residual_C0));
        if (has_generator(c)) c.metric("generator_gap", generator_gap(c, sol.u));
        const auto plan2 = c.base->transitive_point(g, c.seed(4));
        const auto sol2 = solve_diffeo(c.s, plan2, CircleDiffeo::identity(c.cfg.run.fiber_grid), options, c.exec);
        const auto u = uniqueness_check(sol, sol2);
        c.metric("uniqueness_deviation", u.deviation);
        c.metric("transport_error", u.transport_error);
        c.verdict("uniqueness", u.deviation <= c.tol("uniqueness_factor") * u.transport_error + 1e-9,
                  "deviation " + fmt(u.deviation) + " vs transport " + fmt(u.transport_error));
      }
    } else {
      const Eigen::MatrixXd anchor = Eigen::MatrixXd::Identity(c.s.matrix().dim(), c.s.matrix().dim());
      const auto sol = solve_linear(c.s, plan, anchor, options, c.exec);
      residual = sol.report.residual_C0;
      ratio = holder_bound_check(sol.u, c.s, 4000, c.seed(3), c.exec);
      if (main) {
        const std::vector<std::string> extra = {"anchor=identity", "plan_seed=" + std::to_string(c.cfg.seed),
                                                "N=" + std::to_string(plan.N),
                                                "residual_C0=" + fmt(sol.report.residual_C0)};
        c.out.tables.push_back(matrix_table(c, "transfer.csv", g, sol.u.u.values, extra));
        c.out.documents.emplace_back("solve_report.json", report_json(sol.report));
        c.metric("residual_C0", sol.report.residual_C0);
        c.metric("orbit_residual", sol.report.orbit_residual);
        c.metric("iterated_residual", sol.report.iterated_residual);
        c.metric("orbit_length", static_cast<double>(plan.N));
        c.verdict("residual", sol.report.pass, "residual_C0 " + fmt(sol.report.residual_C0));
        if (has_generator(c)) c.metric("generator_gap", generator_gap(c, sol.u));
        const auto plan2 = c.base->transitive_point(g, c.seed(4));
        const auto sol2 = solve_linear(c.s, plan2, anchor, options, c.exec);
        const auto u = uniqueness_check(sol, sol2);
        c.metric("uniqueness_deviation", u.deviation);
        c.metric("transport_error", u.transport_error);
        c.verdict("uniqueness", u.deviation <= c.tol("uniqueness_factor") * u.transport_error + 1e-9,
                  "deviation " + fmt(u.deviation) + " vs transport " + fmt(u.transport_error));
      }
    }
    curve.rows.push_back({static_cast<double>(g.resolution()), std::string("residual_C0"), residual});
    if (ratio) {
      curve.rows.push_back({static_cast<double>(g.resolution()), std::string("holder_ratio"), *ratio});
      holder_ratios.push_back(*ratio);
      if (main) c.metric("holder_ratio", *ratio);
    }
  }
  c.out.tables.push_back(std::move(curve));
  if (holder_ratios.size() >= 2) {
    double worst = 0;
    for (std::size_t k = 1; k < holder_ratios.size(); ++k)
      worst = std::max(worst, std::abs(holder_ratios[k] / holder_ratios[k - 1] - 1));
    c.metric("holder_ratio_change", worst);
    c.verdict("holder_stable", worst <= c.tol("holder_stability"), "largest relative change " + fmt(worst));
  }

  if (!c.cfg.run.t_grid.empty()) {
    const ScenarioConfig& cfg = c.cfg;
    auto base = c.base;
    auto family = [&cfg, base](double t) {
      ScenarioConfig member = cfg;
      member.cocycle.t = t;
      return build_system(member, base);
    };
    const auto plan = c.base->transitive_point(main_grid, c.cfg.seed);
    ContinuityReport rep;
    if (c.circle())
      throw Error(ErrorKind::config, "parameter sweeps need a linear family");
    rep = continuity_in_parameter(family, c.cfg.run.t_grid, plan,
                                  Eigen::MatrixXd::Identity(c.s.matrix().dim(), c.s.matrix().dim()), options, c.exec);
    Table t{"continuity.csv", {}, {"t", "residual_C0", "variation", "dt"}, {}};
    Table l{"continuity_long.csv", {}, long_columns, {}};
    // Least-squares slope of log variation against log dt.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& row : rep.rows) {
      t.rows.push_back({row.t, row.residual_C0, row.variation, row.dt});
      if (row.dt > 0) {
        l.rows.push_back({row.dt, std::string("variation"), row.variation});
        if (row.variation > 0) {
          const double x = std::log(row.dt), y = std::log(row.variation);
          sx += x;
          sy += y;
          sxx += x * x;
          sxy += x * y;
          ++n;
        }
      }
    }
    c.out.tables.push_back(std::move(t));
    c.out.tables.push_back(std::move(l));
    c.metric("continuity_modulus", rep.max_modulus);
    if (n >= 2) {
      const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      c.metric("continuity_rate", slope);
      c.verdict("continuity", std::abs(slope - 1) <= 0.2, "log-log slope " + fmt(slope));
    }
  }
}

void run_closing(Context& c) {
  RandomStream rng(c.seed(5));
  const auto& h = c.base->hyp();
  const double expected = c.base->kind() == BaseKind::cat_map ? std::log(c.base->cat().lambda_u())
                                                              : std::log(1 / c.base->sft().theta());
  const long target = c.cfg.run.near_returns;
  Table t{"closing.csv", {}, {"index", "n", "return_distance", "c", "lambda", "worst_ratio"}, {}};
  long found = 0, failures = 0;
  double worst = 0, c_used = h.closing_c, lambda_used = h.lambda;
  bool single_pair = true;
  std::string failure;
  for (long tries = 0; tries < 200 * target && found < target; ++tries) {
    const BasePoint x = c.base->random_point(rng);
    for (long n = 1; n <= 12; ++n) {
      if (!c.base->closer_than(x, c.base->step(x, n), h.delta1)) continue;
      try {
        const auto r = c.base->closing(x, n);
        single_pair = single_pair && r.c == c_used && r.lambda == lambda_used;
        double ratio = 0;
        const double scale = r.c * r.return_distance;
        for (long i = 0; i < n; ++i) {
          const auto& d = r.bound_trace[static_cast<std::size_t>(i)];
          const double b[3] = {scale * std::exp(-r.lambda * static_cast<double>(std::min(i, n - i))),
                               scale * std::exp(-r.lambda * static_cast<double>(i)),
                               scale * std::exp(-r.lambda * static_cast<double>(n - i))};
          for (int k = 0; k < 3; ++k)
            if (b[k] > 0) ratio = std::max(ratio, d[static_cast<std::size_t>(k)] / b[k]);
        }
        worst = std::max(worst, ratio);
        t.rows.push_back({found, n, r.return_distance, r.c, r.lambda, ratio});
      } catch (const Error& e) {
        ++failures;
        if (failure.empty()) failure = e.what();
      }
      ++found;
      break;
    }
  }
  c.out.tables.push_back(std::move(t));
  c.metric("near_returns", static_cast<double>(found));
  c.metric("closing_c", c_used);
  c.metric("closing_lambda", lambda_used);
  c.metric("expected_rate", expected);
  c.metric("worst_bound_ratio", worst);
  c.verdict("closing_bounds", failures == 0 && found == target && single_pair,
            failures ? failure : std::to_string(found) + " near returns, worst ratio " + fmt(worst));
  c.verdict("closing_rate", lambda_used >= expected / 2 && lambda_used <= 2 * expected,
            "lambda " + fmt(lambda_used) + " vs expected " + fmt(expected));
}

void run_contracting(Context& c) {
  RandomStream rng(c.seed(6));
  const SkewState start{c.base->random_point(rng), rng.uniform()};
  FinderOptions o;
  o.contraction_tol = c.tol("contraction");
  const auto r = find_contracting_periodic(c.s, start, c.cfg.run.steps, o);
  c.metric("steps", static_cast<double>(r.steps));
  c.metric("near_returns", static_cast<double>(r.near_returns));
  c.metric("closings", static_cast<double>(r.closings));
  Table t{"contracting.csv", {}, {"found", "period", "multiplier", "fiber_point"}, {}};
  if (r.found) {
    c.metric("period", static_cast<double>(r.found->n));
    c.metric("multiplier", r.found->multiplier);
    t.rows.push_back({std::string("true"), r.found->n, r.found->multiplier, r.found->fiber_cycle.front()});
  } else {
    t.rows.push_back({std::string("false"), 0L, std::string(), std::string()});
  }
  c.out.tables.push_back(std::move(t));
  c.verdict("no_contracting_point", !r.found,
            r.found ? "contracting cycle of period " + std::to_string(r.found->n) + ", multiplier " + fmt(r.found->multiplier)
                    : "not found after " + std::to_string(r.steps) + " steps");
}

// Returns false when the return claim fails and nothing further was built.
bool section_part(Context& c, bool full) {
  const auto plan = c.base->transitive_point(c.section_grid(), c.cfg.seed, true);
  SectionOptions so;
  so.return_epsilon = c.tol("return_epsilon");
  so.throw_on_violation = false;
  const SkewState zeta0{plan.start, 0.3};
  const auto sec = orbit_closure_section(c.s, zeta0, plan, so);
  c.metric("return_worst_displacement", sec.claim.worst_displacement);
  c.metric("return_near_returns", static_cast<double>(sec.claim.near_returns));
  Table claim{"return_claim.csv", {}, long_columns, {}};
  for (const auto& [d, disp] : sec.claim.observed) claim.rows.push_back({d, std::string("displacement"), disp});
  c.out.tables.push_back(std::move(claim));
  if (sec.claim.violated) {
    c.metric("return_violation_index", static_cast<double>(sec.claim.worst_index));
    c.out.phase = "return-claim-violated";
    c.verdict("coboundary", false,
              "return-claim-violated: fiber displacement " + fmt(sec.claim.worst_displacement) + " at orbit index " +
                  std::to_string(sec.claim.worst_index));
    return false;
  }

  if (full) {
    Table values{"section.csv", c.grid_preamble(*plan.grid), {"cell", "value"}, {}};
    for (std::size_t cell = 0; cell < sec.values.size(); ++cell)
      values.rows.push_back({static_cast<long>(cell), sec.values.values[cell].y});
    c.out.tables.push_back(std::move(values));
    const double inv = section_invariance_deviation(c.s, sec, c.exec);
    const auto sat = saturation_check(sec, c.s, 64, c.seed(7), c.exec);
    c.metric("section_invariance", inv);
    c.metric("saturation_deviation", sat.worst_deviation);
    c.metric("section_lipschitz", sat.section_lipschitz);
    c.verdict("saturation", sat.lipschitz_consistent && sat.worst_deviation <= c.tol("conjugacy"),
              "worst deviation " + fmt(sat.worst_deviation));

    // Leaves: invariance at depth convergence and one Lipschitz bound per side.
    DominationGrid dg;
    dg.fiber_samples = 64;
    dg.seed = c.seed(8);
    const auto dom = domination_test(c.s, 1, 20, dg, c.exec);
    const double bound_s = leaf_lipschitz_bound(c.s, LeafSide::s, dom, 2000, c.seed(9));
    const double bound_u = leaf_lipschitz_bound(c.s, LeafSide::u, dom, 2000, c.seed(9));
    const std::size_t n = static_cast<std::size_t>(c.cfg.run.leaves);
    std::vector<double> dev(n), lip(n);
    std::vector<int> conv(n);
    parallel_for(n, c.exec, [&](std::size_t i) {
      RandomStream rng = RandomStream(c.seed(10)).child(i);
      const SkewState zeta{c.base->random_point(rng), rng.uniform()};
      const LeafSide side = i % 2 ? LeafSide::u : LeafSide::s;
      const auto leaf = lifted_leaf(c.s, zeta, side, 9, 0.1, rng.next());
      dev[i] = leaf_invariance_deviation(c.s, leaf);
      lip[i] = leaf.lipschitz_estimate;
      conv[i] = leaf.converged;
    });
    Table leaves{"leaves.csv", {}, {"leaf", "side", "invariance", "lipschitz", "bound"}, {}};
    double worst_dev = 0, worst_fraction = 0;
    bool all_converged = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double bound = i % 2 ? bound_u : bound_s;
      leaves.rows.push_back({static_cast<long>(i), std::string(i % 2 ? "u" : "s"), dev[i], lip[i], bound});
      worst_dev = std::max(worst_dev, dev[i]);
      worst_fraction = std::max(worst_fraction, lip[i] / bound);
      all_converged = all_converged && conv[i];
    }
    c.out.tables.push_back(std::move(leaves));
    c.metric("leaf_invariance", worst_dev);
    c.metric("leaf_bound_s", bound_s);
    c.metric("leaf_bound_u", bound_u);
    c.metric("leaf_lipschitz_fraction", worst_fraction);
    c.verdict("leaf_invariance", all_converged && worst_dev < c.tol("leaf_invariance"), "worst " + fmt(worst_dev));
    c.verdict("leaf_lipschitz", std::isfinite(bound_s) && std::isfinite(bound_u) && worst_fraction <= 1,
              "largest estimate / bound " + fmt(worst_fraction));
  }

  AtlasOptions ao;
  ao.anchors = c.cfg.run.anchors;
  ao.section = so;
  ao.section.throw_on_violation = true;
  const auto atlas = build_atlas(c.s, plan, ao);
  c.metric("atlas_anchors", static_cast<double>(atlas.anchors()));
  c.metric("atlas_gap", atlas.max_gap);
  const auto triv = trivialize(c.s, atlas, 256, c.exec);
  c.metric("conjugacy_residual", triv.conjugacy_residual);
  std::vector<CircleDiffeo> hv = triv.h.values;
  c.out.tables.push_back(diffeo_table(c, "trivialization.csv", *plan.grid, hv,
                                      {"conjugacy_residual=" + fmt(triv.conjugacy_residual)}));
  json doc = {{"conjugacy_residual", triv.conjugacy_residual}, {"anchors", atlas.anchors()},
              {"max_gap", atlas.max_gap}, {"tolerance", c.tol("conjugacy")}};

  if (full) {
    const double groupoid = groupoid_deviation(atlas, *c.base, 20, c.seed(11));
    c.metric("groupoid_deviation", groupoid);
    doc["groupoid_deviation"] = groupoid;
    c.verdict("groupoid", groupoid < c.tol("groupoid"), "deviation " + fmt(groupoid));

    SolveOptions lo = solve_options(c);
    lo.tolerance = c.tol("linear_residual");
    const auto lin = derivative_cocycle_along_section(c.s, sec, plan, c.cfg.run.horizon, lo, c.exec);
    c.metric("derivative_cocycle_residual", lin.solution.report.residual_C0);
    c.metric("derivative_transfer_spread", lin.transfer_spread);
    c.metric("derivative_observed_sup", lin.observed_sup);
    c.verdict("derivative_cocycle", lin.solution.report.residual_C0 < c.tol("linear_residual"),
              "residual " + fmt(lin.solution.report.residual_C0));
    const auto [full_sup, half_sup] = uniform_derivative_bound(c.s, 32, c.cfg.run.horizon, c.seed(12), c.exec);
    c.metric("uniform_bound", full_sup);
    c.metric("uniform_bound_half", half_sup);
    c.verdict("uniform_bound", std::isfinite(full_sup) && full_sup <= 1.2 * half_sup,
              "sup " + fmt(full_sup) + " over n <= " + std::to_string(c.cfg.run.horizon) + ", " + fmt(half_sup) +
                  " over half");
  }
  c.out.documents.emplace_back("conjugacy.json", doc);
  const bool ok = triv.conjugacy_residual < c.tol("conjugacy");
  c.out.phase = ok ? "coboundary-consistent" : "trivialization-residual-exceeded";
  c.verdict("coboundary", ok, "conjugacy residual " + fmt(triv.conjugacy_residual));
  return true;
}

void run_sections(Context& c) { section_part(c, true); }

void run_theorem31(Context& c) {
  sweep(c, "");
  domination(c, c.cfg.run.beta.value_or(c.s.alpha()));

  const auto poo = poo_check(c.s, c.cfg.run.period, c.tol("poo"), c.exec, c.cfg.run.fiber_grid);
  c.metric("poo_defect", poo.worst_defect);
  if (!c.circle()) {
    if (!poo.pass) {
      c.verdict("coboundary", false, "periodic orbit obstruction " + fmt(poo.worst_defect));
      return;
    }
    const auto plan = c.base->transitive_point(c.grid(), c.cfg.seed);
    const Eigen::MatrixXd anchor = Eigen::MatrixXd::Identity(c.s.matrix().dim(), c.s.matrix().dim());
    const auto sol = solve_linear(c.s, plan, anchor, solve_options(c), c.exec);
    c.metric("residual_C0", sol.report.residual_C0);
    if (has_generator(c)) c.metric("generator_gap", generator_gap(c, sol.u));
    c.verdict("coboundary", sol.report.pass, "linear residual " + fmt(sol.report.residual_C0));
    return;
  }
  if (!section_part(c, false)) return;
  if (poo.pass) {
    const auto plan = c.base->transitive_point(c.grid(), c.cfg.seed);
    const auto sol = solve_diffeo(c.s, plan, CircleDiffeo::identity(c.cfg.run.fiber_grid), solve_options(c), c.exec);
    c.metric("residual_C0", sol.report.residual_C0);
    if (has_generator(c)) c.metric("generator_gap", generator_gap(c, sol.u));
    c.verdict("solve_residual", sol.report.pass, "residual_C0 " + fmt(sol.report.residual_C0));
  }
}

void dispatch(Context& c) {
  switch (c.cfg.experiment) {
    case Experiment::poo: run_poo(c); break;
    case Experiment::lyapunov: sweep(c, ""); break;
    case Experiment::domination: domination(c, c.cfg.run.beta.value_or(c.s.alpha())); break;
    case Experiment::solve: run_solve(c); break;
    case Experiment::closing_demo: run_closing(c); break;
    case Experiment::sections: run_sections(c); break;
    case Experiment::contracting_search: run_contracting(c); break;
    case Experiment::theorem31_suite: run_theorem31(c); break;
  }
}

class DefaultExecScope {
 public:
  explicit DefaultExecScope(Exec e) : saved_(default_exec()) { set_default_exec(e); }
  ~DefaultExecScope() { set_default_exec(saved_); }

 private:
  Exec saved_;
};

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, const Exec& exec) {
  const auto t0 = std::chrono::steady_clock::now();
  DefaultExecScope scope(exec);
  RunResult out;
  out.config = cfg;
  out.scenario_hash = scenario_hash(cfg);
  out.tolerances = effective_tolerances(cfg);
  try {
    auto base = build_base(cfg.base);
    Context c{cfg, exec, base, build_system(cfg, base), out};
    dispatch(c);
  } catch (const Error& e) {
    out.error = ErrorRecord{to_string(e.kind()), std::string(to_string(cfg.experiment)) + ": " + e.what()};
    out.tables.clear();
    out.documents.clear();
  } catch (const std::exception& e) {
    out.error = ErrorRecord{"internal", std::string(to_string(cfg.experiment)) + ": " + e.what()};
    out.tables.clear();
    out.documents.clear();
  }
  out.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

json summary_json(const RunResult& r) {
  json verdicts = json::array();
  for (const auto& v : r.verdicts) verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  json metrics = json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = std::isfinite(v) ? json(v) : json(nullptr);
  json error = nullptr;
  if (r.error) error = {{"kind", r.error->kind}, {"message", r.error->message}};
  const char* status = r.error ? "error" : (r.pass() ? "pass" : "fail");
  return {{"schema", "livsic-summary-1"},
          {"status", status},
          {"exit_code", r.exit_code()},
          {"experiment", to_string(r.config.experiment)},
          {"scenario_hash", r.scenario_hash},
          {"seed", r.config.seed},
          {"config", emit_config(r.config)},
          {"tolerances", r.tolerances},
          {"verdicts", verdicts},
          {"phase", r.phase},
          {"metrics", metrics},
          {"files", r.manifest},
          {"wall_clock_seconds", r.wall_clock},
          {"error", error}};
}

std::vector<std::string> validate_summary(const json& j) {
  std::vector<std::string> problems;
  auto need = [&](const char* key, auto check, const char* what) {
    if (!j.contains(key)) problems.push_back(std::string(key) + ": missing");
    else if (!check(j.at(key))) problems.push_back(std::string(key) + ": expected " + what);
  };
  if (!j.is_object()) return {"summary is not an object"};
  need("schema", [](const json& v) { return v == "livsic-summary-1"; }, "\"livsic-summary-1\"");
  need("status", [](const json& v) { return v == "pass" || v == "fail" || v == "error"; }, "pass | fail | error");
  need("exit_code", [](const json& v) { return v.is_number_integer() && v >= 0 && v <= 2; }, "0, 1 or 2");
  need("experiment", [](const json& v) { return v.is_string() && parse_experiment(v.get<std::string>()); },
       "an experiment name");
  need("scenario_hash", [](const json& v) { return v.is_string() && v.get<std::string>().size() == 16; },
       "16 hex digits");
  need("seed", [](const json& v) { return v.is_number_unsigned(); }, "an unsigned integer");
  need("config", [](const json& v) { return v.is_object(); }, "an object");
  need("tolerances", [](const json& v) {
    if (!v.is_object()) return false;
    for (const auto& [k, t] : default_tolerances())
      if (!v.contains(k) || !v.at(k).is_number()) return false;
    return true;
  }, "every tolerance as a number");
  need("verdicts", [](const json& v) {
    if (!v.is_array()) return false;
    for (const auto& e : v)
      if (!e.is_object() || !e.contains("name") || !e.at("name").is_string() || !e.contains("pass") ||
          !e.at("pass").is_boolean() || !e.contains("detail") || !e.at("detail").is_string())
        return false;
    return true;
  }, "an array of {name, pass, detail}");
  need("phase", [](const json& v) { return v.is_string(); }, "a string");
  need("metrics", [](const json& v) {
    if (!v.is_object()) return false;
    for (const auto& e : v)
      if (!e.is_number() && !e.is_null()) return false;
    return true;
  }, "an object of numbers");
  need("files", [](const json& v) {
    if (!v.is_array()) return false;
    for (const auto& e : v)
      if (!e.is_string()) return false;
    return true;
  }, "an array of file names");
  need("wall_clock_seconds", [](const json& v) { return v.is_number() && v >= 0; }, "a non-negative number");
  need("error", [](const json& v) {
    return v.is_null() || (v.is_object() && v.contains("kind") && v.contains("message"));
  }, "null or {kind, message}");
  if (problems.empty()) {
    const bool has_error = !j.at("error").is_null();
    if (has_error != (j.at("status") == "error")) problems.push_back("status: inconsistent with error");
  }
  return problems;
}

void emit_tables(RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
  result.manifest.clear();
  if (!result.error) {
    for (const auto& t : result.tables) {
      write_csv(t, dir);
      result.manifest.push_back(t.name);
    }
    for (const auto& [name, doc] : result.documents) {
      std::ofstream out(dir / name);
      if (!out) throw Error(ErrorKind::io, "cannot write " + (dir / name).string());
      out << doc.dump(2) << '\n';
      result.manifest.push_back(name);
    }
  }
  result.manifest.push_back("summary.json");
  std::ofstream out(dir / "summary.json");
  if (!out) throw Error(ErrorKind::io, "cannot write " + (dir / "summary.json").string());
  out << summary_json(result).dump(2) << '\n';
  if (!out) throw Error(ErrorKind::io, "write failed for " + (dir / "summary.json").string());
}

}  // namespace livsic

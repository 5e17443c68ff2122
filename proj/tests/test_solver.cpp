#include <doctest.h>

#include <cmath>
#include <numbers>

#include "livsic/error.hpp"
#include "livsic/solver.hpp"

using namespace livsic;

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

std::shared_ptr<const HyperbolicBase> cat() {
  return std::make_shared<const HyperbolicBase>(CatMap({{{2, 1}, {1, 1}}}));
}
std::shared_ptr<const HyperbolicBase> shift2() { return std::make_shared<const HyperbolicBase>(Sft::full_shift(2)); }

BumpField torus_generator() {
  BumpField v;
  v.a = {0.2, {{0.1, 1, 0, 0.3}, {0.05, 0, 1, 1.1}}, {}};
  v.b = {0.1, {{0.07, 1, 1, 0.2}}, {}};
  v.c = {0.3, {{0.04, 0, 1, 0.0}}, {}};
  return v;
}

BumpField shift_generator() {
  BumpField v;
  v.a = {0.1, {}, {{0, 0.2}, {1, 0.1}}};
  v.b = {0.0, {}, {{-1, 0.15}, {2, 0.05}}};
  v.c = {0.2, {}, {{0, 0.3}}};
  return v;
}

// d(u(x), v(x) o v(x0)^-1 o anchor) over the visited cells.
double generator_gap(const Solution<CircleDiffeo>& sol, const BumpField& v, const CircleDiffeo& anchor) {
  const FiberMap right = FiberMap::chain(FiberMap::sampled(anchor), FiberMap::bump(v.at(sol.u.x0)).inverse());
  double worst = 0;
  for (std::size_t c = 0; c < sol.u.u.size(); ++c) {
    const FiberMap expect = FiberMap::chain(right, FiberMap::bump(v.at(sol.u.u.points[c])));
    worst = std::max(worst, FiberMap::sampled(sol.u.u.values[c]).c0_distance(expect, 256));
  }
  return worst;
}

}  // namespace

TEST_CASE("real solve: zero and telescoping ground truth") {
  auto b = cat();
  const auto plan = b->transitive_point(b->default_grid(), 3);
  const auto zero = solve_real(*b, [](const BasePoint&) { return 0.0; }, plan);
  for (double v : zero.u.u.values) CHECK(v == 0);
  CHECK(zero.report.residual_C0 == 0);

  auto psi = [](const BasePoint& x) { return std::cos(two_pi * std::get<TorusPoint>(x).u); };
  auto phi = [&](const BasePoint& x) { return psi(b->step(x, 1)) - psi(x); };
  const auto sol = solve_real(*b, phi, plan);
  double gap = 0;
  for (std::size_t c = 0; c < sol.u.u.size(); ++c)
    gap = std::max(gap, std::abs(sol.u.u.values[c] - (psi(sol.u.u.points[c]) - psi(plan.start))));
  CHECK(gap < 5e-3);
  CHECK(sol.report.residual_C0 < 5e-3);
  CHECK(sol.report.orbit_residual < 1e-7);
  CHECK(sol.report.iterated_residual < 5e-3);
  CHECK(sol.report.pass);

  try {
    solve_real(*b, [](const BasePoint&) { return 1.0; }, plan);
    FAIL("expected a periodic orbit obstruction");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::poo_failure);
    CHECK(std::string(e.what()).find("period 1") != std::string::npos);
  }
}

TEST_CASE("linear solve against generators and the logarithm") {
  auto b = cat();
  const auto plan = b->transitive_point(b->default_grid(), 5);
  Eigen::MatrixXd anchor(2, 2);
  anchor << 1, 0.5, 0, 2;
  const auto id = solve_linear(make_skew(b, MatrixCocycle::constant(Eigen::MatrixXd::Identity(2, 2))), plan, anchor);
  for (const auto& u : id.u.u.values) CHECK((u - anchor).cwiseAbs().maxCoeff() == 0);

  LinearGenerator gen{2, {{0.1, {{0.2, 1, 0, 0}}, {}}, {0, {{0.1, 0, 1, 0.4}}, {}},
                          {0, {{0.15, 1, 1, 0.1}}, {}}, {-0.1, {{0.1, 0, 1, 0}}, {}}}};
  const auto s = make_skew(b, linear_family(b, gen, 1.0));
  const auto sol = solve_linear(s, plan, anchor);
  const Eigen::MatrixXd v0inv = gen.v(plan.start, 1.0).inverse();
  double gap = 0;
  for (std::size_t c = 0; c < sol.u.u.size(); ++c)
    gap = std::max(gap, value_distance(sol.u.u.values[c], gen.v(sol.u.u.points[c], 1.0) * v0inv * anchor));
  CHECK(gap < 1e-3);
  CHECK(sol.report.residual_C0 < 1e-3);
  CHECK(sol.report.orbit_residual < 1e-7);

  // 1 x 1: U = exp(u) for the real solve of log A.
  auto psi = [](const BasePoint& x) { return 0.3 * std::sin(two_pi * std::get<TorusPoint>(x).v); };
  auto phi = [&](const BasePoint& x) { return psi(b->step(x, 1)) - psi(x); };
  const auto one = make_skew(b, MatrixCocycle(CocycleFamily::grid_table, 1, [&](const BasePoint& x) {
                               return Eigen::MatrixXd::Constant(1, 1, std::exp(phi(x)));
                             }));
  const auto lin = solve_linear(one, plan, Eigen::MatrixXd::Identity(1, 1));
  const auto real = solve_real(*b, phi, plan);
  double diff = 0;
  for (std::size_t c = 0; c < real.u.u.size(); ++c)
    diff = std::max(diff, std::abs(std::log(lin.u.u.values[c](0, 0)) - real.u.u.values[c]));
  CHECK(diff < 1e-10);
}

TEST_CASE("diffeo round trip on both bases") {
  struct Case {
    std::shared_ptr<const HyperbolicBase> base;
    BumpField v;
  };
  for (const auto& [base, v] : {Case{cat(), torus_generator()}, Case{shift2(), shift_generator()}}) {
    const auto s = make_skew(base, CircleCocycle::coboundary(base, v));
    const auto grid = base->kind() == BaseKind::cat_map ? base->grid(32) : base->default_grid();
    const auto plan = base->transitive_point(grid, 7);
    const CircleDiffeo anchor = CircleDiffeo::from_bump({0.3, 0.1, 0.2});
    const auto sol = solve_diffeo(s, plan, anchor);
    CHECK(sol.report.residual_C0 < 5e-3);
    CHECK(sol.report.orbit_residual < 1e-7);
    CHECK(sol.report.iterated_residual < 5e-3);
    CHECK(generator_gap(sol, v, anchor) < 5e-3);
    // The anchor cell holds the normalization.
    CHECK(value_distance(sol.u.u.values[grid.cell_of(plan.start)], sol.u.normalization) < 1e-12);

    // Anchor equivariance: right-composing by the anchor inverse gives the identity-anchor solve.
    const auto plain = solve_diffeo(s, plan, CircleDiffeo::identity());
    double eq = 0;
    for (std::size_t c = 0; c < plain.u.u.size(); ++c)
      eq = std::max(eq, value_distance(sol.u.u.values[c].compose(anchor.inverse()), plain.u.u.values[c]));
    CHECK(eq < 1e-5);

    // A second plan agrees after normalization.
    const auto other = solve_diffeo(s, base->transitive_point(grid, 19), anchor);
    const auto uq = uniqueness_check(sol, other);
    CHECK(uq.pass);
  }
}

TEST_CASE("diffeo solve of identity and rotation cocycles") {
  auto b = cat();
  const auto plan = b->transitive_point(b->grid(32), 2);
  const auto id = solve_diffeo(make_skew(b, CircleCocycle::identity()), plan, CircleDiffeo::identity());
  CHECK(id.report.residual_C0 < 1e-12);
  for (const auto& u : id.u.u.values) CHECK(u == CircleDiffeo::identity());

  // tau = s o f - s gives u = rotation(s - s(x0)).
  const BaseFunction sfun{0, {{0.2, 1, 0, 0.5}, {0.1, 1, 1, 0}}, {}};
  const auto rot = CircleCocycle(CocycleFamily::rotation,
                                 [&](const BasePoint& x) { return FiberMap::rotation(sfun(b->step(x, 1)) - sfun(x)); });
  const auto sol = solve_diffeo(make_skew(b, rot), plan, CircleDiffeo::identity());
  double gap = 0;
  for (std::size_t c = 0; c < sol.u.u.size(); ++c)
    gap = std::max(gap, value_distance(sol.u.u.values[c],
                                       CircleDiffeo::rotation(sfun(sol.u.u.points[c]) - sfun(plan.start))));
  CHECK(gap < 5e-3);
  CHECK(!holder_bound_check(id.u, make_skew(b, CircleCocycle::identity())));
}

TEST_CASE("verification localizes a perturbed cell") {
  auto b = shift2();
  const auto s = make_skew(b, CircleCocycle::coboundary(b, shift_generator()));
  const auto plan = b->transitive_point(b->default_grid(), 4);
  auto sol = solve_diffeo(s, plan, CircleDiffeo::identity());
  const std::size_t bad = 11;
  sol.u.u.values[bad] = CircleDiffeo::rotation(0.1).compose(sol.u.u.values[bad]);
  const auto r = verify_coboundary(s, sol.u);
  CHECK(r.residual_C0 >= 0.09);
  for (std::size_t c = 0; c < r.cell_residual.size(); ++c) {
    const bool involved = c == bad || b->default_grid().cell_of(b->step(sol.u.u.points[c], 1)) == bad;
    if (involved)
      CHECK(r.cell_residual[c] >= 0.09);
    else
      CHECK(r.cell_residual[c] < 1e-9);
  }
}

TEST_CASE("continuity in the parameter") {
  auto b = cat();
  const auto plan = b->transitive_point(b->grid(32), 6);
  const BaseFunction sfun{0, {{0.2, 1, 0, 0.5}}, {}};
  auto family = [&](double t) {
    return make_skew(b, CircleCocycle(CocycleFamily::rotation, [&, t](const BasePoint& x) {
                       return FiberMap::rotation(t * (sfun(b->step(x, 1)) - sfun(x)));
                     }));
  };
  const auto r = continuity_in_parameter(family, {0.0, 0.1, 0.2, 0.4}, plan, CircleDiffeo::identity());
  REQUIRE(r.rows.size() == 4);
  // Variation is linear in dt with slope sup |s - s(x0)| <= 0.4.
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    CHECK(r.rows[i].variation <= 0.4 * r.rows[i].dt + 1e-6);
    CHECK(r.rows[i].variation >= 0.2 * r.rows[i].dt);
  }

  const auto flat = continuity_in_parameter([&](double) { return make_skew(b, CircleCocycle::identity()); },
                                            {0.0, 0.5, 1.0}, plan, CircleDiffeo::identity());
  for (const auto& row : flat.rows) CHECK(row.variation == 0);
}

TEST_CASE("solves are identical across backends") {
  auto b = cat();
  const auto s = make_skew(b, CircleCocycle::coboundary(b, torus_generator()));
  const auto plan = b->transitive_point(b->grid(32), 8);
  const auto a = solve_diffeo(s, plan, CircleDiffeo::identity(), {}, Exec{Backend::serial, 1});
  const auto c = solve_diffeo(s, plan, CircleDiffeo::identity(), {}, Exec{Backend::openmp, 4});
  CHECK(a.report.residual_C0 == c.report.residual_C0);
  CHECK(a.report.cell_residual == c.report.cell_residual);
  CHECK(a.u.u.values == c.u.u.values);
}

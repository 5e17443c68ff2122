#include <doctest.h>

#include <cmath>
#include <numbers>

#include "livsic/cocycle.hpp"
#include "livsic/error.hpp"

using namespace livsic;

namespace {

std::shared_ptr<const HyperbolicBase> cat() {
  return std::make_shared<const HyperbolicBase>(CatMap({{{2, 1}, {1, 1}}}));
}
std::shared_ptr<const HyperbolicBase> shift2() { return std::make_shared<const HyperbolicBase>(Sft::full_shift(2)); }

BumpField smooth_generator() {
  BumpField v;
  v.a = {0.2, {{0.1, 1, 0, 0.3}, {0.05, 0, 1, 1.1}}, {}};
  v.b = {0.1, {{0.07, 1, 1, 0.2}}, {}};
  v.c = {0.3, {{0.04, 0, 1, 0.0}}, {}};
  return v;
}

}  // namespace

TEST_CASE("circle diffeo evaluation") {
  const auto id = CircleDiffeo::identity();
  CHECK(id.eval(0.3) == doctest::Approx(0.3));
  CHECK(CircleDiffeo::rotation(0.25).eval(0.9) == doctest::Approx(0.15));
  const BumpMap arnold{0.5, 0, 0};
  CHECK(arnold.lift(0.25) == doctest::Approx(0.25 + 0.5 / (2 * std::numbers::pi)));
  const auto g = CircleDiffeo::from_bump(arnold);
  CHECK(g.eval(0.25) == doctest::Approx(0.3296).epsilon(1e-4));
  // Equivariance of the lift.
  for (double y : {-1.7, -0.2, 0.4, 2.9}) CHECK(g.lift(y + 1) == doctest::Approx(g.lift(y) + 1));
}

TEST_CASE("circle diffeo group operations") {
  const BumpMap arnold{0.5, 0, 0};
  const auto g = CircleDiffeo::from_bump(arnold);
  const auto gg = g.compose(g);
  CHECK(gg.lift(0) == doctest::Approx(0).epsilon(1e-12));
  CHECK(gg.derivative(0) == doctest::Approx(2.25));
  CHECK(g.inverse().derivative(0) == doctest::Approx(1 / 1.5));
  CHECK(g.compose(g.inverse()).c0_distance(CircleDiffeo::identity()) < 1e-6);
  CHECK(CircleDiffeo::rotation(0.2).compose(CircleDiffeo::rotation(0.3)).c0_distance(CircleDiffeo::rotation(0.5)) < 1e-12);
  CHECK(CircleDiffeo::rotation(0.3).inverse().c0_distance(CircleDiffeo::rotation(0.7)) < 1e-12);
  CHECK(CircleDiffeo::identity().inverse() == CircleDiffeo::identity());

  RandomStream rng(1);
  for (int i = 0; i < 100; ++i) {
    const BumpMap m{rng.uniform(-0.8, 0.8), rng.uniform(), rng.uniform()};
    const auto h = CircleDiffeo::from_bump(m);
    CHECK(h.compose(h.inverse()).c0_distance(CircleDiffeo::identity()) < 1e-6);
    const auto k = CircleDiffeo::from_bump({rng.uniform(-0.8, 0.8), rng.uniform(), rng.uniform()});
    const auto l = CircleDiffeo::from_bump({rng.uniform(-0.8, 0.8), rng.uniform(), rng.uniform()});
    CHECK(h.compose(k).compose(l).c0_distance(h.compose(k.compose(l))) < 1e-5);
    // Closed-form inverse.
    for (double y : {0.0, 0.3, 0.77}) CHECK(m.inverse_lift(m.lift(y)) == doctest::Approx(y).epsilon(1e-14));
  }
  // A lift that decreases is rejected.
  std::vector<double> lift(8), der(8, 1.0);
  for (int i = 0; i < 8; ++i) lift[static_cast<std::size_t>(i)] = i / 8.0;
  lift[3] = 0.1;
  CHECK_THROWS_AS(CircleDiffeo::from_samples(lift, der), Error);
}

TEST_CASE("fiber map chains") {
  const FiberMap g = FiberMap::bump({0.5, 0, 0});
  CHECK(g.after(g).derivative(0) == doctest::Approx(2.25));
  CHECK(g.after(g.inverse()).c0_distance_to_identity() < 1e-14);
  CHECK(FiberMap::rotation(0.2).after(FiberMap::rotation(0.3)).c0_distance(FiberMap::rotation(0.5)) < 1e-14);
  CHECK(g.c0_distance_to_identity() == doctest::Approx(0.5 / (2 * std::numbers::pi)).epsilon(1e-6));
  const auto sampled = g.sample();
  CHECK(FiberMap::sampled(sampled).c0_distance(g) < 1e-6);
}

TEST_CASE("cocycle products") {
  auto base = cat();
  BaseFunction tau{0.1, {{0.05, 1, 0, 0.0}}, {}};
  auto s = make_skew(base, CircleCocycle::rotation(tau));
  RandomStream rng(2);
  for (int t = 0; t < 10; ++t) {
    BasePoint x = base->random_point(rng);
    CHECK(circle_product(s, x, 0).is_identity());
    const double total = tau(x) + tau(base->step(x, 1)) + tau(base->step(x, 2));
    CHECK(circle_product(s, x, 3).c0_distance(FiberMap::rotation(total)) < 1e-12);
  }
  auto c = make_skew(base, CircleCocycle::coboundary(base, smooth_generator()));
  for (int t = 0; t < 10; ++t) {
    BasePoint x = base->random_point(rng);
    for (auto [m, n] : {std::pair{3L, 4L}, std::pair{10L, 7L}, std::pair{1L, 10L}}) {
      auto lhs = circle_product(c, x, m + n);
      auto rhs = circle_product(c, base->step(x, m), n).after(circle_product(c, x, m));
      CHECK(lhs.c0_distance(rhs) < 1e-5);
    }
    auto back = circle_product(c, x, -4);
    CHECK(back.after(circle_product(c, base->step(x, -4), 4)).c0_distance_to_identity() < 1e-10);
  }
}

TEST_CASE("skew steps and fiber derivatives") {
  auto base = cat();
  auto id = make_skew(base, CircleCocycle::identity());
  SkewState z{TorusPoint{0.25, 0.5}, 0.3};
  auto w = skew_step(id, z, 5);
  CHECK(std::get<TorusPoint>(w.x) == std::get<TorusPoint>(base->step(z.x, 5)));
  CHECK(w.y == 0.3);
  CHECK(fiber_derivative(id, z, 7) == 1);

  auto bump = make_skew(base, CircleCocycle::constant_bump(0.5));
  auto fixed = skew_step(bump, {TorusPoint{0, 0}, 0.5}, 1);
  CHECK(fixed.y == doctest::Approx(0.5));
  CHECK(fiber_derivative(bump, {TorusPoint{0, 0}, 0.5}, 4) == doctest::Approx(std::pow(0.5, 4)));

  auto c = make_skew(base, CircleCocycle::coboundary(base, smooth_generator()));
  RandomStream rng(3);
  for (int t = 0; t < 20; ++t) {
    SkewState s{base->random_point(rng), rng.uniform()};
    auto there = skew_step(c, s, 4);
    auto back = skew_step(c, there, -4);
    CHECK(std::get<TorusPoint>(back.x) == std::get<TorusPoint>(s.x));
    CHECK(std::abs(back.y - s.y) < 1e-8);
    const double whole = fiber_derivative(c, s, 9);
    const double split = fiber_derivative(c, skew_step(c, s, 4), 5) * fiber_derivative(c, s, 4);
    CHECK(whole == doctest::Approx(split).epsilon(1e-6));
    CHECK(fiber_derivative(c, there, -4) * fiber_derivative(c, s, 4) == doctest::Approx(1).epsilon(1e-9));
  }
}

TEST_CASE("POO check") {
  auto base = cat();
  auto id = poo_check(make_skew(base, CircleCocycle::identity()), 4, 1e-4);
  CHECK(id.worst_defect == 0);
  CHECK(id.pass);
  auto bump = poo_check(make_skew(base, CircleCocycle::constant_bump(0.5)), 1, 1e-4);
  CHECK(bump.worst_defect == doctest::Approx(0.5 / (2 * std::numbers::pi)).epsilon(1e-6));
  CHECK_FALSE(bump.pass);
  auto cob = poo_check(make_skew(base, CircleCocycle::coboundary(base, smooth_generator())), 6, 1e-4);
  CHECK(cob.worst_defect < 1e-10);
  CHECK(cob.pass);
  CHECK(cob.points_checked == 1 + 5 + 16 + 45 + 121 + 320);
  // Serial and parallel kernels agree bit for bit.
  auto s = make_skew(base, CircleCocycle::bump({{0.3, {{0.2, 1, 1, 0}}, {}}, {}, {}}));
  auto serial = poo_check(s, 5, 1e-4, Exec::serial());
  auto par = poo_check(s, 5, 1e-4, Exec::openmp(4));
  CHECK(serial.defect_by_period == par.defect_by_period);

  auto sh = shift2();
  BumpField lc;
  lc.a.symbols = {{0, 0.3}};
  lc.b.symbols = {{0, 0.1}, {1, -0.1}};
  auto loc = poo_check(make_skew(sh, CircleCocycle::locally_constant(lc)), 4, 1e-4);
  CHECK_FALSE(loc.pass);
  BumpField gen;
  gen.a.symbols = {{0, 0.3}, {-1, 0.1}};
  gen.b.symbols = {{1, 0.2}};
  auto cs = poo_check(make_skew(sh, CircleCocycle::coboundary(sh, gen)), 6, 1e-4);
  CHECK(cs.worst_defect < 1e-10);
}

TEST_CASE("matrix cocycles") {
  auto base = cat();
  LinearGenerator gen{2, {{0.1, {{0.3, 1, 0, 0}}, {}}, {0, {{0.2, 0, 1, 0.5}}, {}},
                          {0, {{0.25, 1, 1, 0.1}}, {}}, {-0.1, {{0.1, 2, 1, 0}}, {}}}};
  auto s = make_skew(base, linear_family(base, gen, 0.5));
  auto r = poo_check(s, 5, 1e-4);
  CHECK(r.worst_defect < 1e-9);
  auto bad = poo_check(make_skew(base, MatrixCocycle::constant((Eigen::MatrixXd(2, 2) << 2, 0, 0, 0.5).finished())), 1, 1e-4);
  CHECK(bad.worst_defect == doctest::Approx(1.0));
  RandomStream rng(4);
  BasePoint x = base->random_point(rng);
  Eigen::MatrixXd whole = matrix_product(s, x, 7);
  Eigen::MatrixXd split = matrix_product(s, base->step(x, 3), 4) * matrix_product(s, x, 3);
  CHECK((whole - split).cwiseAbs().maxCoeff() < 1e-10);
  LinearState v{x, Eigen::Vector2d(1, 2)};
  auto back = skew_step(s, skew_step(s, v, 5), -5);
  CHECK((back.v - v.v).norm() < 1e-10);
}

TEST_CASE("Hoelder estimates") {
  auto base = cat();
  CHECK(holder_estimate(make_skew(base, CircleCocycle::constant_bump(0.3)), 50).value == 0);
  const double eps = 0.05;
  auto rot = make_skew(base, CircleCocycle::rotation({0, {{eps, 1, 0, 0}}, {}}));
  const double est = holder_estimate(rot, 500).value;
  CHECK(est <= 2 * std::numbers::pi * eps + 1e-9);
  CHECK(est > 0.5 * 2 * std::numbers::pi * eps);
  // Nondecreasing in the sample count.
  double prev = 0;
  for (std::size_t n : {10, 50, 200, 400}) {
    const double h = holder_estimate(rot, n).value;
    CHECK(h >= prev);
    prev = h;
  }
  // Locally constant on x_0: points at distance 1 differ by the full jump.
  auto sh = shift2();
  BumpField lc;
  lc.b.symbols = {{0, 0.2}};
  auto loc = make_skew(sh, CircleCocycle::locally_constant(lc));
  const double h = holder_estimate(loc, 400).value;
  CHECK(h == doctest::Approx(0.2));
}

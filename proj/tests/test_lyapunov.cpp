#include <doctest.h>

#include <cmath>

#include "livsic/domination.hpp"
#include "livsic/error.hpp"

using namespace livsic;

namespace {

std::shared_ptr<const HyperbolicBase> cat() {
  return std::make_shared<const HyperbolicBase>(CatMap({{{2, 1}, {1, 1}}}));
}
std::shared_ptr<const HyperbolicBase> shift2() { return std::make_shared<const HyperbolicBase>(Sft::full_shift(2)); }

SkewState start(const HyperbolicBase& b, std::uint64_t seed, double y = 0.3) {
  RandomStream rng(seed);
  return {b.random_point(rng), y};
}

}  // namespace

TEST_CASE("rotation cocycle has zero exponent") {
  auto b = cat();
  const auto s = make_skew(b, CircleCocycle::rotation(BaseFunction{0.3, {{0.1, 1, 0, 0}}, {}}));
  const auto e = lyapunov_forward(s, start(*b, 3), 20000);
  CHECK(std::abs(e.lambda_plus) < 1e-12);
  CHECK(e.orbit_length == 20000);
  CHECK(!e.convergence_trace.empty());
}

TEST_CASE("constant bump: fixed points and exponents") {
  auto b = cat();
  const auto s = make_skew(b, CircleCocycle::constant_bump(0.5));
  // The fiber map y + 0.5 sin(2 pi y) / 2 pi fixes 0 and 1/2.
  const auto rep = lyapunov_periodic(s, TorusPoint{0, 0}, 1);
  REQUIRE(rep.cycles.size() == 2);
  std::vector<double> mult;
  for (const auto& c : rep.cycles) {
    const double y = c.points.front();
    CHECK(std::min(std::abs(y), std::abs(y - 0.5)) < 1e-9);
    mult.push_back(c.multiplier);
  }
  std::sort(mult.begin(), mult.end());
  CHECK(mult[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(mult[1] == doctest::Approx(1.5).epsilon(1e-9));
  // Generic fiber points are attracted to 1/2.
  const auto e = lyapunov_forward(s, start(*b, 5, 0.1), 5000);
  CHECK(e.lambda_plus == doctest::Approx(std::log(0.5)).epsilon(1e-3));
  // Time reversal: F^-1 is attracted to 0 with exponent -log 1.5.
  const auto r = lyapunov_backward(s, start(*b, 5, 0.1), 5000);
  CHECK(r.lambda_plus == doctest::Approx(-std::log(1.5)).epsilon(1e-3));
}

TEST_CASE("periodic multipliers are exact over longer orbits") {
  auto b = shift2();
  const auto s = make_skew(b, CircleCocycle::constant_bump(0.5));
  for (long n = 1; n <= 4; ++n)
    for (const auto& o : b->periodic_orbits(n)) {
      const auto rep = lyapunov_periodic(s, o.point, o.period);
      REQUIRE(rep.cycles.size() == 2);
      for (const auto& c : rep.cycles) {
        const double expect = std::abs(c.points.front()) < 1e-6 ? std::pow(1.5, o.period) : std::pow(0.5, o.period);
        CHECK(c.multiplier == doctest::Approx(expect).epsilon(1e-8));
      }
    }
}

TEST_CASE("exponent sweep envelopes") {
  auto b = cat();
  const auto s = make_skew(b, CircleCocycle::constant_bump(0.5));
  const auto sw = exponent_sweep(s, 3, 4, 3000, 11);
  CHECK(sw.envelope_min <= std::log(0.5) + 1e-6);
  CHECK(sw.envelope_max >= std::log(1.5) - 1e-6);
  CHECK(sw.envelope_max <= std::log(1.5) + 1e-6);
  const auto serial = exponent_sweep(s, 3, 4, 3000, 11, Exec{Backend::serial, 1});
  REQUIRE(serial.rows.size() == sw.rows.size());
  for (std::size_t i = 0; i < sw.rows.size(); ++i) CHECK(serial.rows[i].lambda_plus == sw.rows[i].lambda_plus);

  const auto id = make_skew(b, CircleCocycle::identity());
  const auto z = exponent_sweep(id, 2, 2, 500, 1);
  CHECK(std::abs(z.envelope_min) < 1e-12);
  CHECK(std::abs(z.envelope_max) < 1e-12);
}

TEST_CASE("linear exponents") {
  auto b = cat();
  Eigen::MatrixXd m(2, 2);
  m << 2, 0, 0, 0.25;
  const auto s = make_skew(b, MatrixCocycle::constant(m));
  const auto e = lyapunov_forward(s, start(*b, 2), 200);
  CHECK(e.lambda_plus == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(e.lambda_minus == doctest::Approx(std::log(0.25)).epsilon(1e-9));
  const auto mod = linear_periodic_moduli(s, TorusPoint{0, 0}, 3);
  CHECK(mod[0] == doctest::Approx(8));
  CHECK(mod[1] == doctest::Approx(1.0 / 64));
}

TEST_CASE("domination index") {
  auto b = cat();
  const Exec ex = default_exec();
  DominationGrid g;
  g.base_resolution = 0;
  g.fiber_samples = 64;
  const auto id = domination_test(make_skew(b, CircleCocycle::identity()), 1, 8, g, ex);
  REQUIRE(id.ell);
  CHECK(*id.ell == 1);
  CHECK(id.side == "both");

  const auto bump = make_skew(b, CircleCocycle::constant_bump(0.5));
  const auto r = domination_test(bump, 1, 8, g, ex);
  REQUIRE(r.ell);
  CHECK(*r.ell_u == 2);
  CHECK(*r.ell_s == 3);
  CHECK(*r.ell == 3);
  CHECK(r.margin <= 1);

  // Weaker Holder exponent: the contraction 1/2 per step beats nu_s^(l beta).
  const auto weak = domination_test(bump, 0.5, 12, g, ex);
  CHECK(!weak.ell);
  CHECK(weak.margin > 1);

  Eigen::MatrixXd m(2, 2);
  m << 4, 0, 0, 0.25;
  const auto lin = domination_test(make_skew(b, MatrixCocycle::constant(m)), 1, 8, g, ex);
  CHECK(!lin.ell);
  CHECK(lin.margin > 1);

  const auto serial = domination_test(bump, 1, 8, g, Exec{Backend::serial, 1});
  CHECK(serial.max_log_derivative == r.max_log_derivative);
  CHECK_THROWS_AS(domination_test(bump, 0, 4, g, ex), Error);
}

TEST_CASE("contracting periodic point finder") {
  for (auto b : {cat(), shift2()}) {
    const auto s = make_skew(b, CircleCocycle::constant_bump(0.5));
    const auto rep = find_contracting_periodic(s, start(*b, 9), 100000);
    REQUIRE(rep.found);
    const double expect = std::pow(0.5, rep.found->n);
    CHECK(std::abs(rep.found->multiplier - expect) < 1e-6);
    CHECK(rep.closings >= 1);

    const auto none = find_contracting_periodic(make_skew(b, CircleCocycle::identity()), start(*b, 9), 20000);
    CHECK(!none.found);
  }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "livsic/base.hpp"
#include "livsic/error.hpp"
#include "oracles.hpp"

using namespace livsic;

namespace {

HyperbolicBase golden() { return HyperbolicBase(CatMap({{{2, 1}, {1, 1}}})); }
HyperbolicBase two_shift() { return HyperbolicBase(Sft::full_shift(2)); }

SftPoint word_point(const std::string& s) {
  Word w;
  for (char c : s) w.push_back(static_cast<Symbol>(c - '0'));
  return periodic_sft_point(w);
}

}  // namespace

TEST_CASE("cat map steps") {
  auto b = golden();
  auto x = std::get<TorusPoint>(b.step(TorusPoint{0.25, 0.25}, 1));
  CHECK(x.u == 0.75);
  CHECK(x.v == 0.5);
  CHECK(std::get<TorusPoint>(b.step(TorusPoint{0, 0}, 5)) == TorusPoint{0, 0});

  RandomStream rng(7);
  for (int t = 0; t < 50; ++t) {
    BasePoint p = b.random_point(rng);
    auto a = b.step(b.step(p, 13), -6);
    CHECK(std::get<TorusPoint>(a) == std::get<TorusPoint>(b.step(p, 7)));
    CHECK(std::get<TorusPoint>(b.step(b.step(p, 40), -40)) == std::get<TorusPoint>(p));
  }
}

TEST_CASE("cat map constants") {
  const CatMap c({{{2, 1}, {1, 1}}});
  CHECK(c.lambda_u() * c.lambda_s() == doctest::Approx(1.0));
  CHECK(c.lambda_u() == doctest::Approx((3 + std::sqrt(5.0)) / 2));
  CHECK(c.hyp().lambda == doctest::Approx(std::log(c.lambda_u())));
  // e_u and e_s are eigenvectors.
  for (const auto& [e, mu] : {std::pair{c.e_u(), c.mu_u()}, std::pair{c.e_s(), c.mu_s()}}) {
    CHECK(2 * e[0] + e[1] == doctest::Approx(mu * e[0]));
    CHECK(e[0] + e[1] == doctest::Approx(mu * e[1]));
  }
  CHECK_THROWS_AS(CatMap({{{1, 1}, {0, 1}}}), Error);
  CHECK_THROWS_AS(CatMap({{{2, 1}, {2, 1}}}), Error);
}

TEST_CASE("cat map periodic counts agree with two oracles") {
  const oracle::Mat a{{{2, 1}, {1, 1}}};
  const std::size_t expected[] = {1, 5, 16, 45, 121, 320, 841, 2205};
  auto b = golden();
  for (int n = 1; n <= 8; ++n) {
    const auto pts = b.periodic_points(n);
    CHECK(pts.size() == expected[n - 1]);
    CHECK(pts.size() == oracle::brute_force_fixed_points(a, n));
    CHECK(static_cast<double>(pts.size()) == doctest::Approx(oracle::golden_periodic_count(n)));
    for (const auto& p : pts) CHECK(b.distance(b.step(p, n), p) < 1e-9);
  }
  CHECK(b.periodic_points(1).size() == 1);
  CHECK(std::get<TorusPoint>(b.periodic_points(1)[0]) == TorusPoint{0, 0});

  const oracle::Mat other{{{3, 2}, {1, 1}}};
  HyperbolicBase c(CatMap({{{3, 2}, {1, 1}}}));
  for (int n = 1; n <= 5; ++n) CHECK(c.periodic_points(n).size() == oracle::brute_force_fixed_points(other, n));
  CHECK_THROWS_AS(b.periodic_points(12, 1000), Error);
}

TEST_CASE("periodic points of n lie among those of kn") {
  auto b = golden();
  for (int n = 1; n <= 3; ++n) {
    const auto small = b.periodic_points(n);
    const auto big = b.periodic_points(2 * n);
    for (const auto& p : small)
      CHECK(std::any_of(big.begin(), big.end(), [&](const BasePoint& q) { return b.same_point(p, q); }));
  }
  auto s = two_shift();
  for (int n = 1; n <= 3; ++n) {
    const auto small = s.periodic_points(n);
    const auto big = s.periodic_points(3 * n);
    for (const auto& p : small)
      CHECK(std::any_of(big.begin(), big.end(), [&](const BasePoint& q) { return s.same_point(p, q); }));
  }
}

TEST_CASE("periodic orbit representatives") {
  auto b = golden();
  // Orbits of minimal period n, counted by Moebius inversion of the counts.
  CHECK(b.periodic_orbits(1).size() == 1);
  CHECK(b.periodic_orbits(2).size() == 2);   // (5 - 1) / 2
  CHECK(b.periodic_orbits(3).size() == 5);   // (16 - 1) / 3
  CHECK(b.periodic_orbits(4).size() == 10);  // (45 - 5) / 4
  auto s = two_shift();
  CHECK(s.periodic_orbits(1).size() == 2);
  CHECK(s.periodic_orbits(4).size() == 3);  // (16 - 4) / 4
  CHECK(s.periodic_orbits(6).size() == 9);  // (64 - 8 - 4 + 2) / 6
}

TEST_CASE("shift basics") {
  auto s = two_shift();
  BasePoint p = word_point("01");
  CHECK(s.same_point(s.step(p, 2), p));
  CHECK_FALSE(s.same_point(s.step(p, 1), p));
  CHECK(s.periodic_points(3).size() == 8);
  CHECK(s.periodic_count(5) == 32);

  // Agreement on [-3, 3], disagreement at +-4.
  const Sft& f = s.sft();
  SftPoint x = make_sft_point({0}, {1, 0, 1, 1, 0, 0, 1, 0, 1}, {0}, 4);
  SftPoint y = make_sft_point({1}, {0, 0, 1, 1, 0, 0, 1, 0, 0}, {1}, 4);
  CHECK(x.at(-4) != y.at(-4));
  CHECK(x.at(4) != y.at(4));
  for (int i = -3; i <= 3; ++i) CHECK(x.at(i) == y.at(i));
  CHECK(f.distance(x, y) == 0.125);
  CHECK(f.distance(x, x) == 0);
  CHECK(f.distance(x, y) == f.distance(y, x));

  // Non-primitive transition matrices are rejected.
  CHECK_THROWS_AS(Sft(2, {{0, 1}, {1, 0}}), Error);
  CHECK_THROWS_AS(Sft(3, {{1, 1, 0}, {1, 1, 0}, {0, 0, 1}}), Error);
  Sft golden_shift(2, {{1, 1}, {1, 0}});
  CHECK(golden_shift.periodic_count(5) == 11);  // Lucas number L_5
  CHECK(golden_shift.cyclic_words(5, 100).size() == 11);
}

TEST_CASE("distance with exponent and metric change") {
  auto b = golden();
  BasePoint x = TorusPoint{0.1, 0.2}, y = TorusPoint{0.1, 0.24};
  CHECK(b.distance(x, y) == doctest::Approx(0.04));
  CHECK(b.distance(x, y, 0.5) == doctest::Approx(0.2));
  RandomStream rng(3);
  for (int i = 0; i < 20; ++i) {
    auto p = b.random_point(rng), q = b.random_point(rng);
    CHECK(b.distance(p, q, 0.7) == std::pow(b.distance(p, q), 0.7));
    CHECK(b.distance(p, q) <= std::sqrt(0.5) + 1e-15);
  }
  const auto h = b.hyp().with_metric_exponent(0.5);
  CHECK(h.nu_u == doctest::Approx(std::sqrt(b.hyp().nu_u)));
  CHECK(h.nu_s == doctest::Approx(std::sqrt(b.hyp().nu_s)));
  CHECK(h.lambda == doctest::Approx(0.5 * b.hyp().lambda));
}

TEST_CASE("bracket axioms") {
  for (auto base : {golden(), two_shift()}) {
    const auto& h = base.hyp();
    RandomStream rng(11);
    int checked = 0;
    for (int t = 0; t < 400 && checked < 40; ++t) {
      BasePoint x = base.random_point(rng);
      CHECK(base.same_point(base.bracket(x, x), x));
      BasePoint y = base.kind() == BaseKind::cat_map
                        ? BasePoint(make_torus_point(std::get<TorusPoint>(x).u + rng.uniform(-0.05, 0.05),
                                                     std::get<TorusPoint>(x).v + rng.uniform(-0.05, 0.05)))
                        : base.random_point(rng);
      if (base.distance(x, y) > h.delta0) {
        CHECK_THROWS_AS(base.bracket(x, y), Error);
        continue;
      }
      ++checked;
      BasePoint z = base.bracket(x, y);
      for (int n = 0; n <= 20; ++n) {
        CHECK(base.distance(base.step(z, n), base.step(y, n)) <= h.eps0 + 1e-12);
        CHECK(base.distance(base.step(z, -n), base.step(x, -n)) <= h.eps0 + 1e-12);
      }
    }
    CHECK(checked > 10);
  }
  auto s = two_shift();
  CHECK_THROWS_AS(s.bracket(word_point("0"), word_point("1")), Error);
  auto c = golden();
  BasePoint z = c.bracket(TorusPoint{0, 0}, TorusPoint{0.01, 0.01});
  // On the e_u line through 0 and the e_s line through (0.01, 0.01).
  const auto& cat = c.cat();
  const auto zz = std::get<TorusPoint>(z);
  const auto from_x = cat.eigen_coords({wrap_half(zz.u), wrap_half(zz.v)});
  const auto from_y = cat.eigen_coords({wrap_half(zz.u - 0.01), wrap_half(zz.v - 0.01)});
  CHECK(std::abs(from_x[1]) < 1e-14);
  CHECK(std::abs(from_y[0]) < 1e-14);
}

TEST_CASE("closing on a periodic point is trivial") {
  auto b = golden();
  for (const auto& p : b.periodic_points(3)) {
    auto r = b.closing(p, 3);
    CHECK(b.same_point(r.p, p));
    CHECK(b.same_point(r.y, p));
    for (const auto& d : r.bound_trace) CHECK(d[0] < 1e-9);
  }
  auto s = two_shift();
  SftPoint x = make_sft_point({0, 1}, {1, 1, 0, 1, 1, 0, 1, 1, 0, 1, 1, 0}, {1}, 6);
  auto r = s.closing(x, 3);
  CHECK(s.same_point(r.p, word_point("110")));
  CHECK_THROWS_AS(s.closing(x, 2), Error);
}

TEST_CASE("closing bounds on harvested near-returns") {
  for (auto base : {golden(), two_shift()}) {
    RandomStream rng(5);
    int found = 0;
    for (int t = 0; t < 200000 && found < 100; ++t) {
      BasePoint x = base.random_point(rng);
      for (long n = 1; n <= 12 && found < 100; ++n) {
        if (base.distance(x, base.step(x, n)) >= base.hyp().delta1) continue;
        auto r = base.closing(x, n);  // throws if a bound fails
        CHECK(base.distance(base.step(r.p, n), r.p) < 1e-9);
        CHECK(base.same_point(base.bracket(x, r.p), r.y));
        ++found;
        break;
      }
    }
    CHECK(found == 100);
  }
}

TEST_CASE("transitive points cover their grids") {
  auto s = two_shift();
  auto plan = s.transitive_point(s.grid(4), 1);
  CHECK(plan.grid->size() == 16);
  const auto& start = std::get<SftPoint>(plan.start);
  // Every word of length 4 occurs in the center.
  for (const Word& w : s.sft().words(4)) {
    bool occurs = false;
    for (std::size_t i = 0; i + 4 <= start.center->size() && !occurs; ++i)
      occurs = std::equal(w.begin(), w.end(), start.center->begin() + static_cast<long>(i));
    CHECK(occurs);
  }
  auto c = golden();
  auto cp = c.transitive_point(1.0 / 64, 1);
  CHECK(cp.grid->size() == 64 * 64);
  for (std::size_t cell = 0; cell < cp.grid->size(); ++cell) {
    CHECK(cp.grid->cell_of(cp.representative[cell]) == cell);
    CHECK(std::get<TorusPoint>(c.step(cp.start, cp.first_visit[cell])) ==
          std::get<TorusPoint>(cp.representative[cell]));
  }
  CHECK(c.transitive_point(2.0, 1).N == 1);
  auto two = c.transitive_point(c.grid(16), 3, true);
  CHECK(std::any_of(two.first_visit.begin(), two.first_visit.end(), [](long k) { return k < 0; }));
  auto stwo = s.transitive_point(s.grid(5), 3, true);
  for (std::size_t cell = 0; cell < stwo.grid->size(); ++cell)
    CHECK(stwo.grid->cell_of(s.step(stwo.start, stwo.first_visit[cell])) == cell);
}

TEST_CASE("shift agreement matches a direct scan on far-shifted points") {
  const Sft s = Sft::full_shift(2);
  RandomStream rng(21);
  auto direct = [](const SftPoint& x, const SftPoint& y) {
    if (x.at(0) != y.at(0)) return -1L;
    for (long n = 1; n <= 20000; ++n)
      if (x.at(n) != y.at(n) || x.at(-n) != y.at(-n)) return n - 1;
    return LONG_MAX;
  };
  for (int i = 0; i < 300; ++i) {
    const SftPoint x = s.random_point(rng, 1 + static_cast<long>(rng.below(12)));
    const long k = static_cast<long>(rng.below(4000)) - 2000;
    const SftPoint a = s.step(x, k);
    const SftPoint b = s.step(x, k + static_cast<long>(rng.below(13)));
    const SftPoint c = s.step(s.random_point(rng, 3), k);
    CHECK(s.agreement(a, b) == direct(a, b));
    CHECK(s.agreement(a, c) == direct(a, c));
    CHECK(s.agreement(a, s.normalize(a)) == LONG_MAX);
  }
}

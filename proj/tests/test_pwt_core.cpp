#include <doctest.h>

#include "pwtlab/pwt_map.hpp"
#include "pwtlab/rng.hpp"

using pwt::Itinerary;
using pwt::Map1D;
using pwt::Map2D;
using pwt::Rational;
using pwt::Vec2d;
using pwt::Vec2q;

namespace {

// The running example: P0 = [0, 0.6), P1 = [0.6, 1], v = (0.3, -0.6).
Map1D<Rational> example_map_q() {
  return {{Rational(0), Rational(3, 5), Rational(1)}, {Rational(3, 10), Rational(-3, 5)}};
}

Map1D<double> example_map_d() { return {{0.0, 0.6, 1.0}, {0.3, -0.6}}; }

// Rotation by angle a on [0,1) as a two-branch exchange.
Map1D<double> rotation_map(double a) { return {{0.0, 1.0 - a, 1.0}, {a, a - 1.0}}; }

Map2D<double> voronoi_map(const std::vector<Vec2d>& sites, const Vec2d& gamma, double radius) {
  Map2D<double> m;
  m.domain = pwt::DiskRegion{gamma, radius};
  auto shared = std::make_shared<const std::vector<Vec2d>>(sites);
  for (int i = 0; i < static_cast<int>(sites.size()); ++i) {
    m.pieces.push_back(pwt::VoronoiPiece<double>{shared, i});
    m.vectors.push_back(gamma - sites[static_cast<std::size_t>(i)]);
  }
  return m;
}

}  // namespace

TEST_CASE("classify: half-open convention and domain errors") {
  const auto m = example_map_q();
  CHECK(pwt::classify(m, Rational(3, 5)) == 1);
  CHECK(pwt::classify(m, Rational(1, 4)) == 0);
  CHECK(pwt::classify(m, Rational(1)) == 1);  // right endpoint joins the last piece
  CHECK_THROWS_AS(pwt::classify(m, Rational(3, 2)), pwt::Error);
}

TEST_CASE("step") {
  const auto m = example_map_q();
  CHECK(pwt::step(m, Rational(0)) == Rational(3, 10));
  CHECK(pwt::step(m, Rational(3, 5)) == Rational(0));
  // step - classify consistency: the displacement is exactly the vector
  const Rational x(17, 40);
  CHECK(pwt::step(m, x) - x == m.vectors[static_cast<std::size_t>(pwt::classify(m, x))]);
}

TEST_CASE("orbit: hand-iterated example 0 -> 0.3 -> 0.6 -> 0 ...") {
  const auto m = example_map_q();
  const auto [itin, stats] = pwt::orbit(m, Rational(0), 6);
  CHECK(itin == Itinerary{0, 0, 1, 0, 0, 1});
  CHECK(stats.visit_counts == std::vector<std::int64_t>{4, 2});
  CHECK(stats.final_x == Rational(0));
  CHECK(stats.recon_residual == 0.0);
  // reconstruction: x + 4*0.3 + 2*(-0.6) = 0
  CHECK(Rational(0) + Rational(4) * m.vectors[0] + Rational(2) * m.vectors[1] == Rational(0));
}

TEST_CASE("orbit: k = 0") {
  const auto m = example_map_q();
  const auto [itin, stats] = pwt::orbit(m, Rational(1, 4), 0);
  CHECK(itin.empty());
  CHECK(stats.visit_counts == std::vector<std::int64_t>{0, 0});
  CHECK(stats.final_x == Rational(1, 4));
}

TEST_CASE("orbit reconstruction property, float 1D") {
  pwt::Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const double c = rng.uniform(0.3, 0.7);
    const double v0 = rng.uniform(0.05, 1.0 - c);
    const double v1 = -rng.uniform(0.05, c);
    const Map1D<double> m{{0.0, c, 1.0}, {v0, v1}};
    const auto [itin, stats] = pwt::orbit(m, rng.uniform(0.0, 1.0), 5000);
    CHECK(stats.recon_residual <= 10.0 * 5000 * 2.3e-16 * 1.0 + 1e-12);
  }
}

TEST_CASE("torus 2D map example: mod-1 wrap") {
  pwt::Map2D<double> m;
  m.domain = pwt::TorusSquare{};
  m.torus = true;
  m.pieces.push_back(pwt::RectPiece<double>{{0.0, 0.0}, {0.5, 0.5}, true, true});  // complement
  m.pieces.push_back(pwt::RectPiece<double>{{0.0, 0.0}, {0.5, 0.5}, true, false});
  m.vectors.push_back({0.7, 0.2});
  m.vectors.push_back({0.1, 0.1});
  const Vec2d y = pwt::step(m, Vec2d{0.5, 0.9});  // outside R -> gamma1
  CHECK(y.x == doctest::Approx(0.2));
  CHECK(y.y == doctest::Approx(0.1));
}

TEST_CASE("alpha coefficients 1D") {
  const auto a = pwt::alpha_coefficients_1d(Rational(3, 10), Rational(-3, 5));
  CHECK(a[0] == Rational(2, 3));
  CHECK(a[1] == Rational(1, 3));
  const auto ad = pwt::alpha_coefficients_1d(0.3, -0.6);
  CHECK(ad[0] == doctest::Approx(2.0 / 3));
  CHECK_THROWS_AS(pwt::alpha_coefficients_1d(0.3, 0.6), pwt::Error);  // same sign
  CHECK_THROWS_AS(pwt::alpha_coefficients_1d(0.3, 0.3), pwt::Error);  // rank deficient
}

TEST_CASE("alpha coefficients 2D") {
  const auto a = pwt::alpha_coefficients_2d(Vec2d{1, 0}, Vec2d{0, 1}, Vec2d{-1, -1});
  CHECK(a[0] == doctest::Approx(1.0 / 3));
  CHECK(a[1] == doctest::Approx(1.0 / 3));
  CHECK(a[2] == doctest::Approx(1.0 / 3));
  // ((1,0),(2,0),(0,1)) forces a non-positive entry: no bounded dynamics
  CHECK_THROWS_AS(pwt::alpha_coefficients_2d(Vec2d{1, 0}, Vec2d{2, 0}, Vec2d{0, 1}), pwt::Error);
  // exact rational flavor
  const auto aq = pwt::alpha_coefficients_2d(Vec2q{Rational(1), Rational(0)},
                                             Vec2q{Rational(0), Rational(1)},
                                             Vec2q{Rational(-1), Rational(-1)});
  CHECK(aq[0] == Rational(1, 3));
}

TEST_CASE("alpha solves the defining system") {
  pwt::Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const double c = rng.uniform(0.2, 0.8);
    const double v0 = rng.uniform(0.05, 1.0 - c);
    const double v1 = -rng.uniform(0.05, c);
    const auto a = pwt::alpha_coefficients_1d(v0, v1);
    CHECK(a[0] > 0);
    CHECK(a[1] > 0);
    CHECK(a[0] + a[1] == doctest::Approx(1.0));
    CHECK(std::abs(a[0] * v0 + a[1] * v1) <= 1e-12 * std::max(std::abs(v0), std::abs(v1)));
  }
}

TEST_CASE("rational independence, 1D") {
  // 2*0.3 + 1*(-0.6) = 0
  const auto d = pwt::rational_independence_1d(0.3, -0.6, 2);
  CHECK_FALSE(d.independent);
  CHECK(d.witness == std::vector<std::int64_t>{2, 1});

  const auto irr = pwt::rational_independence_1d(1.0, -1.41421356237, 10);
  CHECK(irr.independent);
  CHECK(irr.bound == 10);

  const auto half = pwt::rational_independence_1d(0.5, -0.5, 1);
  CHECK_FALSE(half.independent);
  CHECK(half.witness == std::vector<std::int64_t>{1, 1});

  // exact flavor
  const auto dq = pwt::rational_independence_1d(Rational(3, 10), Rational(-3, 5), 2);
  CHECK_FALSE(dq.independent);
  CHECK(dq.witness == std::vector<std::int64_t>{2, 1});
  const auto big = pwt::rational_independence_1d(Rational(1000003, 2000000), Rational(-1), 1000);
  CHECK(big.independent);
}

TEST_CASE("rational independence, 2D") {
  // v0 + v1 + v2 = 0 for the symmetric triple
  const auto d = pwt::rational_independence_2d(Vec2d{1, 0}, Vec2d{0, 1}, Vec2d{-1, -1}, 3);
  CHECK_FALSE(d.independent);
  CHECK(d.witness[0] == d.witness[1]);
  CHECK(d.witness[1] == d.witness[2]);

  const auto irr = pwt::rational_independence_2d(Vec2d{1, 0.5773502691896258},
                                                 Vec2d{-0.31830988618379, 1},
                                                 Vec2d{0.7071067811865476, -0.4342944819032518}, 50);
  CHECK(irr.independent);
}

TEST_CASE("semiconjugacy residual: exact zero in rational mode") {
  const auto m = example_map_q();
  const auto r = pwt::semiconjugacy_residual(m, Rational(0), 100);
  CHECK(r.exact_zero);
  CHECK(r.max_residual == 0.0);
  const auto r0 = pwt::semiconjugacy_residual(m, Rational(1, 7), 0);
  CHECK(r0.exact_zero);  // empty maximum
}

TEST_CASE("semiconjugacy residual: float stays tiny over 1e4 steps") {
  const auto m = example_map_d();
  const auto r = pwt::semiconjugacy_residual(m, 0.12345, 10000);
  CHECK(r.max_residual <= 1e-9);

  const auto v = voronoi_map({{-0.3, -0.2}, {0.35, -0.15}, {0.0, 0.4}}, {0.02, 0.01}, 1.0);
  const auto r2 = pwt::semiconjugacy_residual(v, Vec2d{0.1, -0.2}, 10000);
  CHECK(r2.max_residual <= 1e-9);
}

TEST_CASE("semiconjugacy residual: exact zero for rational 2D maps") {
  pwt::Map2D<Rational> m;
  m.domain = pwt::DiskRegion{{0.0, 0.0}, 4.0};
  auto sites = std::make_shared<const std::vector<Vec2q>>(
      std::vector<Vec2q>{{Rational(-1, 4), Rational(-1, 4)},
                         {Rational(1, 2), Rational(-1, 8)},
                         {Rational(0), Rational(3, 8)}});
  for (int i = 0; i < 3; ++i) {
    m.pieces.push_back(pwt::VoronoiPiece<Rational>{sites, i});
    m.vectors.push_back(Vec2q{Rational(0) - (*sites)[static_cast<std::size_t>(i)].x,
                              Rational(0) - (*sites)[static_cast<std::size_t>(i)].y});
  }
  const auto r = pwt::semiconjugacy_residual(m, Vec2q{Rational(1, 3), Rational(1, 5)}, 500);
  CHECK(r.exact_zero);
}

TEST_CASE("periodic fate detection") {
  // (0,0,1) x 10 with v = (0.3, -0.6): period 3, witness (2, 1)
  Itinerary itin;
  for (int i = 0; i < 10; ++i) {
    itin.push_back(0);
    itin.push_back(0);
    itin.push_back(1);
  }
  const std::vector<Rational> v = {Rational(3, 10), Rational(-3, 5)};
  const auto f = pwt::detect_periodic_fate(itin, std::span<const Rational>(v));
  CHECK(f.periodic);
  CHECK(f.period == 3);
  CHECK(f.witness == std::vector<std::int64_t>{2, 1});
  CHECK(f.relation_ok);

  Itinerary constant(30, 0);
  const auto c = pwt::detect_periodic_fate(constant);
  CHECK(c.periodic);
  CHECK(c.period == 1);

  Itinerary tiny = {0, 1, 0};
  CHECK_THROWS_AS(pwt::detect_periodic_fate(tiny), pwt::Error);
}

TEST_CASE("golden rotation coding is aperiodic at k = 1000") {
  const double golden = 0.6180339887498949;
  const auto m = rotation_map(golden);
  const auto [itin, stats] = pwt::orbit(m, 0.0, 1000);
  const auto f = pwt::detect_periodic_fate(itin);
  CHECK_FALSE(f.periodic);
}

TEST_CASE("rational maps always reach a periodic fate within the orbit bound") {
  pwt::Rng rng(77);
  int tested = 0;
  for (int trial = 0; trial < 80 && tested < 30; ++trial) {
    const std::int64_t qc = rng.uniform_int(2, 16);
    const std::int64_t qv = rng.uniform_int(2, 16);
    const Rational c(rng.uniform_int(1, qc - 1), qc);
    Rational v0(rng.uniform_int(1, qv), qv);
    if (Rational(1) - c < v0) v0 = Rational(1) - c;
    Rational v1 = Rational(0) - (c < v0 ? c : v0);
    if (!(Rational(0) < v0) || !(v1 < Rational(0))) continue;
    Map1D<Rational> m{{Rational(0), c, Rational(1)}, {v0, v1}};
    if (!m.maps_into_domain()) continue;
    ++tested;

    const std::int64_t den = std::max({c.den(), v0.den(), v1.den()});
    const std::int64_t k = 10 * den * den;
    // a periodic tail exists; start deep inside the orbit to skip the preperiod
    auto [itin0, stats0] = pwt::orbit(m, Rational(1, 3), k);
    auto [itin, stats] = pwt::orbit(m, stats0.final_x, k);
    const std::vector<Rational>& vecs = m.vectors;
    const auto f = pwt::detect_periodic_fate(itin, std::span<const Rational>(vecs));
    CHECK(f.periodic);
    CHECK(f.relation_ok);
  }
  CHECK(tested >= 20);
}

TEST_CASE("sampled 2D validation accepts a valid Voronoi map") {
  const auto m = voronoi_map({{-0.3, -0.2}, {0.35, -0.15}, {0.0, 0.4}}, {0.02, 0.01}, 1.2);
  const auto rep = pwt::validate_map(m, 20000, 17);
  CHECK(rep.covered_fraction == 1.0);
  CHECK(rep.overlap_fraction <= 1e-3);
  CHECK(rep.maps_outside_fraction == 0.0);
  CHECK(rep.ok());
}

#include <doctest.h>

#include "oracle_1d.hpp"
#include "pwtlab/attractor.hpp"
#include "pwtlab/rng.hpp"

using pwt::Map1D;
using pwt::Map2D;
using pwt::RatArcUnion;
using pwt::Rational;
using pwt::Vec2d;

namespace {

Map1D<Rational> example_map_q() {
  return {{Rational(0), Rational(3, 5), Rational(1)}, {Rational(3, 10), Rational(-3, 5)}};
}

RatArcUnion seg(const Rational& a, const Rational& b) { return RatArcUnion::segment(a, b); }

// One exact image step, re-derived here for soundness checks.
RatArcUnion image_once(const Map1D<Rational>& m, const RatArcUnion& omega) {
  RatArcUnion out;
  for (std::size_t i = 0; i < m.vectors.size(); ++i)
    out = unite(out, intersect(omega, seg(m.cuts[i], m.cuts[i + 1])).translated(m.vectors[i]));
  return out;
}

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

TEST_CASE("exact 1D forward images: hand-derived example") {
  // Omega_1 = [0,0.4] u [0.3,0.9] = [0,0.9], Omega_2 = [0,0.9]: stabilized at 1.
  const auto res = pwt::forward_images_exact(example_map_q(), 100);
  REQUIRE(res.trace.status == pwt::StabStatus::Stabilized);
  CHECK(*res.trace.stabilized_at == 1);
  CHECK(res.attractor == seg(Rational(0), Rational(9, 10)));
  // soundness: one more exact image leaves the attractor unchanged
  CHECK(image_once(example_map_q(), res.attractor) == res.attractor);
  CHECK(res.trace.rows.back().changed == 0);
}

TEST_CASE("identity dynamics stabilizes at 1 with A = Omega") {
  const Map1D<Rational> ident{{Rational(0), Rational(1, 2), Rational(1)}, {Rational(0), Rational(0)}};
  const auto res = pwt::forward_images_exact(ident, 10);
  REQUIRE(res.trace.status == pwt::StabStatus::Stabilized);
  CHECK(*res.trace.stabilized_at == 1);
  CHECK(res.attractor == seg(Rational(0), Rational(1)));
}

TEST_CASE("exact trace is nested and measure-monotone") {
  pwt::Rng rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const auto m = oracle::random_two_branch(rng, 32);
    const auto res = pwt::forward_images_exact(m, 100000);
    REQUIRE(res.trace.status == pwt::StabStatus::Stabilized);
    double prev = 1.0;
    for (const auto& row : res.trace.rows) {
      CHECK(row.measure <= prev + 1e-15);
      prev = row.measure;
    }
  }
}

TEST_CASE("exact engine agrees with the lattice oracle") {
  pwt::Rng rng(1234);
  for (int trial = 0; trial < 25; ++trial) {
    const auto m = oracle::random_two_branch(rng, 64);
    const auto engine = pwt::forward_images_exact(m, 1 << 22);
    const auto ref = oracle::lattice_oracle(m);
    REQUIRE(engine.trace.status == pwt::StabStatus::Stabilized);
    CHECK(engine.attractor == ref.attractor);  // exact interval-union equality
    CHECK(*engine.trace.stabilized_at == ref.iterations);
  }
}

TEST_CASE("attractor pieces: exact 1D decomposition matches alpha") {
  const auto m = example_map_q();
  const auto res = pwt::forward_images_exact(m, 100);
  const auto dec = pwt::attractor_pieces(m, res);
  REQUIRE(dec.pieces.size() == 2);
  CHECK(dec.exact_pieces[0] == seg(Rational(0), Rational(3, 5)));
  CHECK(dec.exact_pieces[1] == seg(Rational(3, 5), Rational(9, 10)));
  CHECK(dec.pieces[0].normalized == doctest::Approx(2.0 / 3));
  CHECK(dec.pieces[1].normalized == doctest::Approx(1.0 / 3));

  // single piece covering the whole attractor has normalized measure 1
  const Map1D<Rational> one{{Rational(0), Rational(1)}, {Rational(0)}};
  const auto r1 = pwt::forward_images_exact(one, 10);
  const auto d1 = pwt::attractor_pieces(one, r1);
  CHECK(d1.pieces[0].normalized == doctest::Approx(1.0));
}

TEST_CASE("attractor pieces require stabilization") {
  // An irrational-flavored map truncated after one iterate: NotStabilized.
  const auto m = example_map_q();
  auto res = pwt::forward_images_exact(m, 100);
  res.trace.status = pwt::StabStatus::MaxIterReached;
  CHECK_THROWS_AS(pwt::attractor_pieces(m, res), pwt::Error);
}

TEST_CASE("covering number, exact 1D") {
  const pwt::Lattice1q L{Rational(9, 10)};
  const auto A = seg(Rational(0), Rational(9, 10));
  const auto rep = pwt::covering_number(A, L, 400, 7);
  CHECK(rep.mode_xi == 1);
  CHECK(rep.mode_fraction == 1.0);
  CHECK(rep.volume_ratio == doctest::Approx(1.0));
  REQUIRE(rep.ell.has_value());
  CHECK(*rep.ell == 1);

  // doubled attractor: two adjacent fundamental copies
  const auto A2 = seg(Rational(0), Rational(9, 5));
  const auto rep2 = pwt::covering_number(A2, L, 400, 7);
  CHECK(rep2.mode_xi == 2);
  CHECK(rep2.mode_fraction == 1.0);
  REQUIRE(rep2.ell.has_value());
  CHECK(*rep2.ell == 2);
}

TEST_CASE("tiling, exact 1D") {
  const pwt::Lattice1q L{Rational(9, 10)};
  const auto good = pwt::tiling_check(seg(Rational(0), Rational(9, 10)), L);
  CHECK(good.coverage_fraction == doctest::Approx(1.0));
  CHECK(good.overlap_fraction == doctest::Approx(0.0));

  // a hole leaves coverage short without creating overlap
  const auto holed = pwt::tiling_check(
      unite(seg(Rational(0), Rational(2, 5)), seg(Rational(1, 2), Rational(9, 10))), L);
  CHECK(holed.coverage_fraction == doctest::Approx(1.0 - (0.1 / 0.9)));
  CHECK(holed.overlap_fraction == doctest::Approx(0.0));

  // an overshoot overlaps without losing coverage
  const auto over = pwt::tiling_check(seg(Rational(0), Rational(1)), L);
  CHECK(over.coverage_fraction == doctest::Approx(1.0));
  CHECK(over.overlap_fraction == doctest::Approx(0.1 / 0.9).epsilon(1e-6));
}

TEST_CASE("diagram, exact 1D") {
  const pwt::Lattice1q L{Rational(9, 10)};
  const auto A = seg(Rational(0), Rational(9, 10));
  const auto d = pwt::diagram(Rational(9, 20), A, L, 5);
  REQUIRE(d.size() == 1);
  CHECK(d[0] == Rational(0));

  const auto A2 = seg(Rational(0), Rational(9, 5));
  const auto d2 = pwt::diagram(Rational(9, 20), A2, L, 5);
  REQUIRE(d2.size() == 2);
  CHECK(d2[0] == Rational(0));
  CHECK(d2[1] == Rational(9, 10));
}

TEST_CASE("visit frequencies against alpha") {
  const auto m = example_map_q();
  const auto rep = pwt::visit_frequency_report(m, Rational(0), 6);
  CHECK(rep.frequencies[0] == doctest::Approx(2.0 / 3));
  CHECK(rep.frequencies[1] == doctest::Approx(1.0 / 3));
  CHECK(rep.max_deviation == doctest::Approx(0.0));

  const auto one = pwt::visit_frequency_report(m, Rational(0), 1);
  CHECK(one.frequencies[0] == 1.0);
  CHECK(one.frequencies[1] == 0.0);
}

TEST_CASE("raster 1D run approximates the exact attractor") {
  const Map1D<double> m{{0.0, 0.6, 1.0}, {0.3, -0.6}};
  const auto res = pwt::forward_images_raster(m, 1.0 / 1024.0, 1000);
  REQUIRE(res.trace.status == pwt::StabStatus::Stabilized);
  CHECK(res.trace.rows.back().measure == doctest::Approx(0.9).epsilon(0.01));
  const auto dec = pwt::attractor_pieces(m, res);
  CHECK(dec.pieces[0].normalized == doctest::Approx(2.0 / 3).epsilon(0.01));
  CHECK(dec.pieces[1].normalized == doctest::Approx(1.0 / 3).epsilon(0.01));
}

TEST_CASE("raster 2D run: symmetric three-piece disk map") {
  // Equilateral sites, gamma at the centroid: alpha = (1/3, 1/3, 1/3).
  const double r3 = std::sqrt(3.0);
  const std::vector<Vec2d> sites = {{0.0, 0.4}, {-0.2 * r3, -0.2}, {0.2 * r3, -0.2}};
  const auto map = voronoi_map(sites, {0.0, 0.0}, 0.9);
  // iterate images are nested cell-wise thanks to the clamped raster step
  pwt::OccupancyGrid prev_grid;
  bool have_prev = false;
  bool nested = true;
  const auto res = pwt::forward_images_raster(map, 1.0 / 512.0, 300,
                                              [&](std::int64_t, const pwt::OccupancyGrid& g) {
                                                if (have_prev &&
                                                    !pwt::OccupancyGrid::subset_of(g, prev_grid))
                                                  nested = false;
                                                prev_grid = g;
                                                have_prev = true;
                                              });
  REQUIRE(res.trace.status == pwt::StabStatus::Stabilized);
  CHECK(res.trace.rows.back().changed == 0);
  CHECK(nested);

  // measures nonincreasing
  double prev = 1e300;
  for (const auto& row : res.trace.rows) {
    CHECK(row.measure <= prev);
    prev = row.measure;
  }

  const auto dec = pwt::attractor_pieces(map, res);
  for (const auto& p : dec.pieces) CHECK(p.normalized == doctest::Approx(1.0 / 3).epsilon(0.02));

  const auto L = pwt::lattice_from_vectors_2d<double>(map.vectors);
  CHECK(dec.total == doctest::Approx(L.det_abs()).epsilon(0.03));

  const auto cov = pwt::covering_number(res.attractor, L, 400, 11);
  CHECK(cov.mode_xi == 1);
  CHECK(cov.mode_fraction >= 0.99);
  REQUIRE(cov.ell.has_value());
  CHECK(*cov.ell == 1);

  const auto til = pwt::tiling_check(res.attractor, L);
  CHECK(til.coverage_fraction >= 0.99);
  CHECK(til.overlap_fraction <= 0.01);

  // diagram of an interior attractor cell center contains exactly lambda = 0
  bool found = false;
  res.attractor.for_each_set([&](std::int64_t ix, std::int64_t iy) {
    if (found) return;
    const Vec2d c = res.attractor.cell_center(ix, iy);
    if (!res.attractor.boundary_band(2).get_at_point(c)) {
      const auto d = pwt::diagram(c, res.attractor, L, 4);
      if (d.size() == 1) found = true;
    }
  });
  CHECK(found);
}

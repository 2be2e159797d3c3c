#include <doctest.h>

#include "pwtlab/arc_union.hpp"
#include "pwtlab/rng.hpp"

using pwt::ArcUnion;
using pwt::RatArcUnion;
using pwt::Rational;

namespace {

RatArcUnion seg(std::int64_t an, std::int64_t ad, std::int64_t bn, std::int64_t bd) {
  return RatArcUnion::segment(Rational(an, ad), Rational(bn, bd));
}

// Random circle set with endpoints on a small rational grid.
RatArcUnion random_set(pwt::Rng& rng, std::int64_t den) {
  std::vector<std::pair<Rational, Rational>> arcs;
  const int n = static_cast<int>(rng.uniform_int(0, 4));
  for (int i = 0; i < n; ++i) {
    const std::int64_t a = rng.uniform_int(0, den - 1);
    const std::int64_t b = rng.uniform_int(a + 1, den);
    arcs.push_back({Rational(a, den), Rational(b, den)});
  }
  return RatArcUnion::from_arcs(std::move(arcs));
}

}  // namespace

TEST_CASE("normalization sorts, merges and drops empties") {
  auto u = RatArcUnion::from_arcs({{Rational(1, 2), Rational(3, 4)},
                                   {Rational(0), Rational(3, 10)},
                                   {Rational(3, 10), Rational(1, 2)},
                                   {Rational(1, 5), Rational(1, 5)}});
  CHECK(u.size() == 1);
  CHECK(u.measure() == Rational(3, 4));
  CHECK(u == seg(0, 1, 3, 4));
}

TEST_CASE("union merges adjacency") {
  // [0,0.3) u [0.3,0.5) = [0,0.5)
  CHECK(unite(seg(0, 1, 3, 10), seg(3, 10, 1, 2)) == seg(0, 1, 1, 2));
}

TEST_CASE("intersection") {
  // [0,0.4) n [0.3,0.9) = [0.3,0.4), measure 0.1
  const auto i = intersect(seg(0, 1, 2, 5), seg(3, 10, 9, 10));
  CHECK(i == seg(3, 10, 2, 5));
  CHECK(i.measure() == Rational(1, 10));
}

TEST_CASE("translate mod 1 wraps and preserves measure") {
  // [0,0.5) + 0.7 = [0.7,1) u [0,0.2)
  const auto t = seg(0, 1, 1, 2).translated_mod1(Rational(7, 10));
  CHECK(t.size() == 2);
  CHECK(t.arcs()[0] == std::pair<Rational, Rational>{Rational(0), Rational(1, 5)});
  CHECK(t.arcs()[1] == std::pair<Rational, Rational>{Rational(7, 10), Rational(1)});
  CHECK(t.measure() == Rational(1, 2));
}

TEST_CASE("subtract and complement") {
  const auto c = seg(1, 4, 3, 4).complement_on_circle();
  CHECK(c == unite(seg(0, 1, 1, 4), seg(3, 4, 1, 1)));
  const auto d = subtract(seg(0, 1, 1, 1), seg(1, 4, 3, 4));
  CHECK(d == c);
  CHECK(subtract(seg(0, 1, 1, 2), seg(0, 1, 1, 1)).empty());
}

TEST_CASE("contains") {
  const auto big = unite(seg(0, 1, 1, 4), seg(1, 2, 9, 10));
  CHECK(big.contains(seg(1, 2, 3, 4)));
  CHECK(big.contains(big));
  CHECK_FALSE(big.contains(seg(1, 4, 1, 2)));
  CHECK(big.contains_point(Rational(1, 8)));
  CHECK_FALSE(big.contains_point(Rational(1, 4)));  // half-open right end
  CHECK(big.contains_point(Rational(1, 2)));
}

TEST_CASE("smallest covering arc handles wrap") {
  // Set [0.8,1) u [0,0.1): cover starts at 0.8, length 0.3.
  const auto wrapped = unite(seg(4, 5, 1, 1), seg(0, 1, 1, 10));
  const auto [start, len] = smallest_covering_arc(wrapped);
  CHECK(start == Rational(4, 5));
  CHECK(len == Rational(3, 10));
  const auto mid = seg(1, 4, 1, 2);
  const auto [s2, l2] = smallest_covering_arc(mid);
  CHECK(s2 == Rational(1, 4));
  CHECK(l2 == Rational(1, 4));
}

TEST_CASE("random properties: measure exactness and monotonicity") {
  pwt::Rng rng(42);
  for (int it = 0; it < 500; ++it) {
    const auto A = random_set(rng, 24);
    const auto B = random_set(rng, 24);
    const Rational t(rng.uniform_int(0, 23), 24);

    // translate_mod1 preserves measure exactly
    CHECK(A.translated_mod1(t).measure() == A.measure());
    // commutativity
    CHECK(unite(A, B) == unite(B, A));
    CHECK(intersect(A, B) == intersect(B, A));
    // measure monotonicity
    const Rational mi = intersect(A, B).measure();
    const Rational mu = unite(A, B).measure();
    CHECK(mi <= A.measure());
    CHECK(mi <= B.measure());
    CHECK(A.measure() <= mu);
    // inclusion-exclusion
    CHECK(mu + mi == A.measure() + B.measure());
    // containment consistency
    CHECK(unite(A, B).contains(A));
    CHECK(A.contains(intersect(A, B)));
    // subtraction partitions
    CHECK(subtract(A, B).measure() + mi == A.measure());
  }
}

TEST_CASE("double instantiation behaves") {
  using DArc = ArcUnion<double>;
  const auto u = unite(DArc::segment(0.0, 0.3), DArc::segment(0.3, 0.5));
  CHECK(u.size() == 1);
  CHECK(u.measure() == doctest::Approx(0.5));
  const auto t = DArc::segment(0.0, 0.5).translated_mod1(0.7);
  CHECK(t.size() == 2);
  CHECK(t.measure() == doctest::Approx(0.5));
}

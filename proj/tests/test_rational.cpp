#include <doctest.h>

#include "pwtlab/rational.hpp"
#include "pwtlab/rng.hpp"

using pwt::Rational;

TEST_CASE("construction normalizes") {
  CHECK(Rational(6, 4) == Rational(3, 2));
  CHECK(Rational(-6, 4) == Rational(-3, 2));
  CHECK(Rational(6, -4) == Rational(-3, 2));
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(3, 2).num() == 3);
  CHECK(Rational(3, 2).den() == 2);
  CHECK_THROWS_AS(Rational(1, 0), pwt::Error);
}

TEST_CASE("field operations") {
  const Rational a(3, 10), b(-3, 5);
  CHECK(a + b == Rational(-3, 10));
  CHECK(a - b == Rational(9, 10));
  CHECK(a * b == Rational(-9, 50));
  CHECK(a / b == Rational(-1, 2));
  CHECK(-a == Rational(-3, 10));
  CHECK(a < Rational(1, 3));
  CHECK(b < a);
  CHECK(Rational(1, 3) <= Rational(2, 6));
}

TEST_CASE("floor and frac") {
  CHECK(Rational(7, 2).floor() == 3);
  CHECK(Rational(-7, 2).floor() == -4);
  CHECK(Rational(4).floor() == 4);
  CHECK(Rational(-1, 3).frac() == Rational(2, 3));
  CHECK(pwt::frac_mod1(Rational(13, 10)) == Rational(3, 10));
  CHECK(pwt::frac_mod1(Rational(-1, 10)) == Rational(9, 10));
  CHECK(pwt::frac_mod1(Rational(2)) == Rational(0));
}

TEST_CASE("parsing") {
  CHECK(pwt::parse_rational("3/10") == Rational(3, 10));
  CHECK(pwt::parse_rational("-3/10") == Rational(-3, 10));
  CHECK(pwt::parse_rational("0.325") == Rational(13, 40));
  CHECK(pwt::parse_rational("-0.5") == Rational(-1, 2));
  CHECK(pwt::parse_rational("7") == Rational(7));
  CHECK_THROWS_AS(pwt::parse_rational("1/0"), pwt::Error);
  CHECK_THROWS_AS(pwt::parse_rational("abc"), pwt::Error);
}

TEST_CASE("string form is p/q") {
  CHECK(Rational(3, 10).str() == "3/10");
  CHECK(Rational(-1, 2).str() == "-1/2");
  CHECK(Rational(4).str() == "4/1");
}

TEST_CASE("from_double recovers small fractions") {
  CHECK(Rational::from_double(0.5) == Rational(1, 2));
  CHECK(Rational::from_double(0.3) == Rational(3, 10));
  CHECK(Rational::from_double(-0.6) == Rational(-3, 5));
  const Rational phi = Rational::from_double(0.6180339887498949, 1000);
  CHECK(phi.den() <= 1000);
  CHECK(std::abs(phi.to_double() - 0.6180339887498949) < 1e-5);
}

TEST_CASE("random field identities") {
  pwt::Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const Rational a(rng.uniform_int(-50, 50), rng.uniform_int(1, 40));
    const Rational b(rng.uniform_int(-50, 50), rng.uniform_int(1, 40));
    const Rational c(rng.uniform_int(-50, 50), rng.uniform_int(1, 40));
    CHECK(a + b == b + a);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * (b + c) == a * b + a * c);
    if (!b.is_zero()) CHECK((a / b) * b == a);
    CHECK((a - b) + b == a);
  }
}

TEST_CASE("overflow throws instead of wrapping") {
  const Rational big(INT64_MAX / 2, 1);
  CHECK_THROWS_AS(big * big, pwt::Error);
}

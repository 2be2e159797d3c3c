#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>

#include "pwtlab/error.hpp"

namespace pwt {

// Exact rational arithmetic on int64 numerator/denominator. Invariants:
// den > 0 and gcd(|num|, den) == 1. Intermediate products are computed in
// 128-bit; a result that does not fit int64 after reduction throws
// Err::Overflow. All circle/interval work in exact mode runs on rationals
// whose denominators divide a fixed common denominator, so in practice
// values stay far from the limit.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit integer promotion

  Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error(Err::InvalidArgument, "rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    num_ = num / (g == 0 ? 1 : g);
    den_ = den / (g == 0 ? 1 : g);
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ == 0 ? 0 : (num_ < 0 ? -1 : 1); }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

  friend Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_, Raw{}); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    // boost::rational's overflow-sparing sum: work with gcd-reduced cross terms.
    const std::int64_t g = std::gcd(a.den_, b.den_);
    const i128 db = b.den_ / g;
    const i128 num = i128(a.num_) * db + i128(b.num_) * (a.den_ / g);
    const i128 den = i128(a.den_) * db;
    return make_reduced(num, den);
  }

  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

  friend Rational operator*(const Rational& a, const Rational& b) {
    const std::int64_t g1 = std::gcd(a.num_ < 0 ? -a.num_ : a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_ < 0 ? -b.num_ : b.num_, a.den_);
    const i128 num = i128(a.num_ / g1) * (b.num_ / g2);
    const i128 den = i128(a.den_ / g2) * (b.den_ / g1);
    return make_reduced(num, den);
  }

  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw Error(Err::InvalidArgument, "rational division by zero");
    return a * Rational(b.den_, b.num_);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  // Largest integer <= value.
  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  // Fractional part in [0, 1).
  Rational frac() const { return *this - Rational(floor()); }

  // Best rational approximation with denominator <= max_den (continued fractions).
  static Rational from_double(double x, std::int64_t max_den = 1000000) {
    if (max_den < 1) throw Error(Err::InvalidArgument, "from_double: max_den < 1");
    const bool neg = x < 0;
    if (neg) x = -x;
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
      const double fl = std::floor(r);
      if (fl > 9.0e18) break;
      const auto a = static_cast<std::int64_t>(fl);
      const i128 p2 = i128(a) * p1 + p0;
      const i128 q2 = i128(a) * q1 + q0;
      if (q2 > max_den) {
        // Semiconvergent with the largest admissible coefficient.
        const std::int64_t t = (q1 == 0) ? 0 : (max_den - q0) / q1;
        const i128 ps = i128(t) * p1 + p0;
        const i128 qs = i128(t) * q1 + q0;
        if (qs >= 1 && q1 >= 1) {
          const double e_conv = std::abs(x - double(p1) / double(q1));
          const double e_semi = std::abs(x - double(i64_of(ps)) / double(i64_of(qs)));
          if (e_semi < e_conv) return signed_result(neg, i64_of(ps), i64_of(qs));
        }
        break;
      }
      p0 = p1;
      q0 = q1;
      p1 = i64_of(p2);
      q1 = i64_of(q2);
      const double rem = r - fl;
      if (rem < 1e-18) break;
      r = 1.0 / rem;
    }
    if (q1 == 0) return Rational(0);
    return signed_result(neg, p1, q1);
  }

 private:
  using i128 = __int128;
  struct Raw {};
  constexpr Rational(std::int64_t n, std::int64_t d, Raw) : num_(n), den_(d) {}

  static std::int64_t i64_of(i128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw Error(Err::Overflow, "rational out of int64 range");
    return static_cast<std::int64_t>(v);
  }

  static Rational make_reduced(i128 num, i128 den) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const i128 a = num < 0 ? -num : num;
    i128 g = gcd128(a, den);
    if (g == 0) g = 1;
    return Rational(i64_of(num / g), i64_of(den / g), Raw{});
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) {
      const i128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational signed_result(bool neg, std::int64_t p, std::int64_t q) {
    return Rational(neg ? -p : p, q);
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Reduce into [0, 1) on the circle R/Z.
inline Rational frac_mod1(const Rational& x) { return x.frac(); }
inline double frac_mod1(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;  // guards the x = -eps rounding case
  return f;
}

// Parses "p/q", "-3/10", integer strings, and plain decimals like "0.325"
// (decimals become exact: 325/1000 reduced).
Rational parse_rational(const std::string& text);

}  // namespace pwt

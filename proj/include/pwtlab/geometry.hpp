#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <type_traits>
#include <variant>
#include <vector>

#include "pwtlab/error.hpp"
#include "pwtlab/rational.hpp"

namespace pwt {

template <class S>
struct Vec2 {
  S x{};
  S y{};

  friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(const S& c, const Vec2& v) { return {c * v.x, c * v.y}; }
  friend bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }

  S dot(const Vec2& o) const { return x * o.x + y * o.y; }
  S cross(const Vec2& o) const { return x * o.y - y * o.x; }
  S norm2() const { return x * x + y * y; }
};

using Vec2d = Vec2<double>;
using Vec2q = Vec2<Rational>;

inline double norm(const Vec2d& v) { return std::sqrt(v.norm2()); }

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.to_double(); }
inline Vec2d to_double(const Vec2q& v) { return {v.x.to_double(), v.y.to_double()}; }

namespace detail {
inline bool det_is_rank_deficient(double det, double scale) { return std::abs(det) <= 1e-12 * scale; }
inline bool det_is_rank_deficient(const Rational& det, const Rational&) { return det.is_zero(); }
}  // namespace detail

// Rank-1 lattice c*Z on the line; the torus factor in d = 1.
template <class S>
struct Lattice1;

template <>
struct Lattice1<double> {
  double basis = 0;
  double det_abs() const { return std::abs(basis); }

  double reduce(double x) const {
    const double d = det_abs();
    double u = x / d;
    u -= std::floor(u);
    if (u >= 1.0) u = 0.0;
    return u * d;
  }

  // Distance on the circle R/(|basis| Z).
  double torus_dist(double a, double b) const {
    const double d = det_abs();
    double r = reduce(a - b);
    return std::min(r, d - r);
  }
};

template <>
struct Lattice1<Rational> {
  Rational basis;
  Rational det_abs() const { return basis.sign() < 0 ? -basis : basis; }

  Rational reduce(const Rational& x) const {
    const Rational d = det_abs();
    return (x / d).frac() * d;
  }

  Rational torus_dist(const Rational& a, const Rational& b) const {
    const Rational d = det_abs();
    const Rational r = reduce(a - b);
    const Rational other = d - r;
    return r < other ? r : other;
  }
};

// Rank-2 lattice spanned by b1, b2; reduction solves lattice coordinates by
// Cramer's rule, which is exact in rational mode.
template <class S>
struct Lattice2 {
  Vec2<S> b1;
  Vec2<S> b2;

  S det() const { return b1.cross(b2); }
  S det_abs() const {
    const S d = det();
    return d < S(0) ? S(0) - d : d;
  }

  Vec2<S> coords(const Vec2<S>& x) const {
    const S d = det();
    return {x.cross(b2) / d, b1.cross(x) / d};
  }

  Vec2<S> from_coords(const Vec2<S>& u) const { return u.x * b1 + u.y * b2; }

  Vec2<S> reduce(const Vec2<S>& x) const {
    Vec2<S> u = coords(x);
    u.x = frac_coord(u.x);
    u.y = frac_coord(u.y);
    return from_coords(u);
  }

  // Distance between torus classes of a and b: min over the 3x3 neighbor
  // shifts of the reduced difference (enough because the reduced point lies
  // in the fundamental parallelogram).
  double torus_dist(const Vec2<S>& a, const Vec2<S>& b) const {
    const Vec2<S> r = reduce(a - b);
    double best = -1.0;
    for (int i = -1; i <= 1; ++i) {
      for (int j = -1; j <= 1; ++j) {
        const Vec2<S> shifted = {r.x - (S(i) * b1.x + S(j) * b2.x), r.y - (S(i) * b1.y + S(j) * b2.y)};
        const double n = std::sqrt(to_double(shifted.norm2()));
        if (best < 0 || n < best) best = n;
      }
    }
    return best;
  }

  bool is_zero_class(const Vec2<S>& v) const {
    const Vec2<S> u = coords(v);
    return frac_coord(u.x) == S(0) && frac_coord(u.y) == S(0);
  }

 private:
  static S frac_coord(const S& v) { return frac_mod1(v); }
};

using Lattice1d = Lattice1<double>;
using Lattice2d = Lattice2<double>;
using Lattice1q = Lattice1<Rational>;
using Lattice2q = Lattice2<Rational>;

// Lattice generated by (v[1]-v[0]), d = 1 flavor. Errors: RankDeficient when
// the generator is (numerically) zero.
template <class S>
Lattice1<S> lattice_from_vectors_1d(std::span<const S> v) {
  if (v.size() != 2) throw Error(Err::InvalidArgument, "d=1 lattice needs exactly 2 vectors");
  const S g = v[1] - v[0];
  Lattice1<S> L{g};
  S scale = v[0] < S(0) ? S(0) - v[0] : v[0];
  const S a1 = v[1] < S(0) ? S(0) - v[1] : v[1];
  if (scale < a1) scale = a1;
  if (scale < S(1)) scale = S(1);
  if (detail::det_is_rank_deficient(g, scale))
    throw Error(Err::RankDeficient, "difference vector is zero; no torus factor");
  return L;
}

// Scale-aware rank test: |det| <= 1e-12 * ||b1|| * ||b2|| means deficient
// (exact zero test in rational mode).
template <class S>
Lattice2<S> lattice_from_vectors_2d(std::span<const Vec2<S>> v) {
  if (v.size() != 3) throw Error(Err::InvalidArgument, "d=2 lattice needs exactly 3 vectors");
  Lattice2<S> L{v[1] - v[0], v[2] - v[0]};
  const double scale = std::sqrt(to_double(L.b1.norm2())) * std::sqrt(to_double(L.b2.norm2()));
  bool deficient;
  if constexpr (std::is_same_v<S, Rational>) {
    deficient = L.det().is_zero();
  } else {
    deficient = detail::det_is_rank_deficient(L.det(), scale);
  }
  if (deficient) throw Error(Err::RankDeficient, "difference vectors are collinear; no torus factor");
  return L;
}

// --- Region descriptors -----------------------------------------------------

struct DiskRegion {
  Vec2d center;
  double radius;
};

struct RectRegion {
  Vec2d lo;
  Vec2d size;
};

struct TorusSquare {};  // [0,1)^2 with wrap

struct SegmentRegion {
  double lo;
  double hi;
};

using RegionSpec = std::variant<DiskRegion, RectRegion, TorusSquare, SegmentRegion>;

void validate_region(const RegionSpec& r);
bool region_contains(const RegionSpec& r, const Vec2d& p);
// Axis-aligned bounding box as (lo, size).
std::pair<Vec2d, Vec2d> region_bbox(const RegionSpec& r);
double region_diameter(const RegionSpec& r);
bool region_is_torus(const RegionSpec& r);

inline Vec2d wrap_torus(const Vec2d& p) {
  return {frac_mod1(p.x), frac_mod1(p.y)};
}
inline Vec2q wrap_torus(const Vec2q& p) {
  return {frac_mod1(p.x), frac_mod1(p.y)};
}

}  // namespace pwt

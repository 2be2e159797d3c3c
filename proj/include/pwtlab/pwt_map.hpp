#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "pwtlab/geometry.hpp"
#include "pwtlab/rng.hpp"

namespace pwt {

using Itinerary = std::vector<std::int32_t>;

template <class S>
struct OrbitStats {
  std::int64_t k = 0;
  std::vector<std::int64_t> visit_counts;
  S final_x{};
  Vec2<S> final_xy{};
  double recon_residual = 0;  // |F^k(x) - (x + sum b_i v_i)|, exactly 0 in rational mode
};

// ---------------------------------------------------------------------------
// 1D interval translation maps. Pieces are the half-open cells of the cut
// sequence c0 < c1 < ... < cm with the domain right endpoint folded into the
// last piece; boundary ties go to the lower index by the half-open storage.
// ---------------------------------------------------------------------------

template <class S>
struct Map1D {
  std::vector<S> cuts;     // m+1 ascending cut points; domain [cuts.front(), cuts.back()]
  std::vector<S> vectors;  // m translations

  int branches() const { return static_cast<int>(vectors.size()); }

  void check_well_formed() const {
    if (cuts.size() != vectors.size() + 1 || vectors.empty())
      throw Error(Err::InvalidArgument, "1D map needs m vectors and m+1 cuts");
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (!(cuts[i] < cuts[i + 1])) throw Error(Err::InvalidArgument, "cuts must be strictly increasing");
  }

  // Exact well-definedness: every translated piece stays inside the domain.
  bool maps_into_domain() const {
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (cuts[i] + vectors[i] < cuts.front()) return false;
      if (cuts.back() < cuts[i + 1] + vectors[i]) return false;
    }
    return true;
  }
};

using Map1Dq = Map1D<Rational>;
using Map1Dd = Map1D<double>;

template <class S>
int classify(const Map1D<S>& map, const S& x) {
  if (x < map.cuts.front() || map.cuts.back() < x)
    throw Error(Err::OutsideDomain, "1D point outside the map domain");
  const int m = map.branches();
  for (int i = 0; i < m; ++i)
    if (x < map.cuts[i + 1]) return i;
  return m - 1;  // x == right endpoint
}

template <class S>
S step(const Map1D<S>& map, const S& x) {
  const S y = x + map.vectors[classify(map, x)];
  if (y < map.cuts.front() || map.cuts.back() < y)
    throw Error(Err::MapsOutside, "1D image left the domain; map is not well defined");
  return y;
}

// ---------------------------------------------------------------------------
// 2D piecewise translation maps. Pieces are predicates built from primitives;
// classify returns the smallest piece index containing the point.
// ---------------------------------------------------------------------------

template <class S>
struct VoronoiPiece {
  std::shared_ptr<const std::vector<Vec2<S>>> sites;
  int index = 0;

  bool contains(const Vec2<S>& p) const {
    const S mine = (p - (*sites)[static_cast<std::size_t>(index)]).norm2();
    for (const auto& s : *sites)
      if ((p - s).norm2() < mine) return false;
    return true;
  }
};

// Axis rectangle [lo, lo+size), optionally wrapped on the unit torus and
// optionally complemented (the "everything except R" branch).
template <class S>
struct RectPiece {
  Vec2<S> lo;
  Vec2<S> size;
  bool wrap = false;
  bool complement = false;

  bool contains(const Vec2<S>& p) const {
    bool in;
    if (wrap) {
      in = frac_mod1(p.x - lo.x) < size.x && frac_mod1(p.y - lo.y) < size.y;
    } else {
      in = !(p.x < lo.x) && p.x < lo.x + size.x && !(p.y < lo.y) && p.y < lo.y + size.y;
    }
    return complement ? !in : in;
  }
};

// Intersection of half planes n.p <= c.
template <class S>
struct HalfPlanePiece {
  struct Constraint {
    Vec2<S> normal;
    S offset;
  };
  std::vector<Constraint> constraints;

  bool contains(const Vec2<S>& p) const {
    for (const auto& c : constraints)
      if (c.offset < c.normal.dot(p)) return false;
    return true;
  }
};

template <class S>
struct DiskPiece {
  Vec2<S> center;
  S radius2;

  bool contains(const Vec2<S>& p) const { return !(radius2 < (p - center).norm2()); }
};

template <class S>
using Piece2D = std::variant<VoronoiPiece<S>, RectPiece<S>, HalfPlanePiece<S>, DiskPiece<S>>;

template <class S>
struct Map2D {
  RegionSpec domain = TorusSquare{};
  std::vector<Piece2D<S>> pieces;
  std::vector<Vec2<S>> vectors;
  bool torus = false;

  int branches() const { return static_cast<int>(vectors.size()); }

  void check_well_formed() const {
    if (pieces.size() != vectors.size() || vectors.empty())
      throw Error(Err::InvalidArgument, "2D map needs one vector per piece");
    validate_region(domain);
  }
};

using Map2Dq = Map2D<Rational>;
using Map2Dd = Map2D<double>;

template <class S>
int classify(const Map2D<S>& map, const Vec2<S>& p) {
  const int m = map.branches();
  for (int i = 0; i < m; ++i) {
    const bool in = std::visit([&](const auto& piece) { return piece.contains(p); },
                               map.pieces[static_cast<std::size_t>(i)]);
    if (in) return i;
  }
  throw Error(Err::OutsideDomain, "no piece contains the point");
}

template <class S>
Vec2<S> step(const Map2D<S>& map, const Vec2<S>& p) {
  Vec2<S> q = p + map.vectors[static_cast<std::size_t>(classify(map, p))];
  if (map.torus) return wrap_torus(q);
  // Domain membership is checked in double with a small slack; exact
  // containment of valid maps never comes near it.
  const Vec2d qd = {to_double(q.x), to_double(q.y)};
  if (!region_contains(map.domain, qd)) {
    const double slack = 1e-9 * (1.0 + region_diameter(map.domain));
    const auto [lo, size] = region_bbox(map.domain);
    if (qd.x < lo.x - slack || qd.x > lo.x + size.x + slack || qd.y < lo.y - slack ||
        qd.y > lo.y + size.y + slack)
      throw Error(Err::MapsOutside, "2D image left the domain; map is not well defined");
  }
  return q;
}

// ---------------------------------------------------------------------------
// Orbits and fates
// ---------------------------------------------------------------------------

std::pair<Itinerary, OrbitStats<Rational>> orbit(const Map1D<Rational>& map, const Rational& x,
                                                 std::int64_t k);
std::pair<Itinerary, OrbitStats<double>> orbit(const Map1D<double>& map, double x, std::int64_t k);
std::pair<Itinerary, OrbitStats<Rational>> orbit(const Map2D<Rational>& map, const Vec2q& x,
                                                 std::int64_t k);
std::pair<Itinerary, OrbitStats<double>> orbit(const Map2D<double>& map, const Vec2d& x,
                                               std::int64_t k);

// ---------------------------------------------------------------------------
// Alpha coefficients: the unique solution of sum(a_i v_i) = 0, sum(a_i) = 1.
// Throws NoBoundedDynamics when the solution has a non-positive entry (no
// bounded piecewise translation exists with those vectors).
// ---------------------------------------------------------------------------

template <class S>
std::vector<S> alpha_coefficients_1d(const S& v0, const S& v1) {
  const S den = v1 - v0;
  S scale = v0 < S(0) ? S(0) - v0 : v0;
  const S a1abs = v1 < S(0) ? S(0) - v1 : v1;
  if (scale < a1abs) scale = a1abs;
  if (scale < S(1)) scale = S(1);
  if (detail::det_is_rank_deficient(den, scale)) throw Error(Err::RankDeficient, "v1 - v0 is zero");
  const S a0 = v1 / den;
  const S a1 = S(1) - a0;
  if (!(S(0) < a0) || !(S(0) < a1))
    throw Error(Err::NoBoundedDynamics, "alpha has a non-positive entry; vectors admit no bounded map");
  return {a0, a1};
}

template <class S>
std::vector<S> alpha_coefficients_2d(const Vec2<S>& v0, const Vec2<S>& v1, const Vec2<S>& v2) {
  // Barycentric identity: cross(v1,v2) v0 + cross(v2,v0) v1 + cross(v0,v1) v2 = 0.
  const S a0 = v1.cross(v2);
  const S a1 = v2.cross(v0);
  const S a2 = v0.cross(v1);
  const S sum = a0 + a1 + a2;  // equals cross(v1-v0, v2-v0)
  const double scale = std::sqrt(to_double((v1 - v0).norm2())) * std::sqrt(to_double((v2 - v0).norm2()));
  bool deficient;
  if constexpr (std::is_same_v<S, Rational>) {
    deficient = sum.is_zero();
  } else {
    deficient = detail::det_is_rank_deficient(sum, scale);
  }
  if (deficient) throw Error(Err::RankDeficient, "difference vectors are collinear");
  std::vector<S> alpha = {a0 / sum, a1 / sum, a2 / sum};
  for (const S& a : alpha)
    if (!(S(0) < a))
      throw Error(Err::NoBoundedDynamics, "alpha has a non-positive entry; vectors admit no bounded map");
  return alpha;
}

// ---------------------------------------------------------------------------
// Rational independence up to a coefficient bound
// ---------------------------------------------------------------------------

struct IndependenceVerdict {
  bool independent = true;
  std::int64_t bound = 0;
  std::vector<std::int64_t> witness;  // filled when dependent
  double residual = 0;
};

IndependenceVerdict rational_independence_1d(double v0, double v1, std::int64_t bound);
IndependenceVerdict rational_independence_1d(const Rational& v0, const Rational& v1, std::int64_t bound);
IndependenceVerdict rational_independence_2d(const Vec2d& v0, const Vec2d& v1, const Vec2d& v2,
                                             std::int64_t bound);
IndependenceVerdict rational_independence_2d(const Vec2q& v0, const Vec2q& v1, const Vec2q& v2,
                                             std::int64_t bound);

// ---------------------------------------------------------------------------
// Semiconjugacy onto the torus rotation: max residual of
// dist_T(pi(F^{n+1} x), pi(F^n x) + v0) over the first k steps.
// ---------------------------------------------------------------------------

struct SemiconjugacyResult {
  double max_residual = 0;
  bool exact_zero = true;  // meaningful in rational mode, where it is decided exactly
};

SemiconjugacyResult semiconjugacy_residual(const Map1D<double>& map, double x, std::int64_t k);
SemiconjugacyResult semiconjugacy_residual(const Map1D<Rational>& map, const Rational& x, std::int64_t k);
SemiconjugacyResult semiconjugacy_residual(const Map2D<double>& map, const Vec2d& x, std::int64_t k);
SemiconjugacyResult semiconjugacy_residual(const Map2D<Rational>& map, const Vec2q& x, std::int64_t k);

// ---------------------------------------------------------------------------
// Periodic-fate detection. Reports the smallest period p with at least three
// full periods observed and the whole prefix p-periodic; the per-period
// symbol counts form the rational-dependence witness.
// ---------------------------------------------------------------------------

struct FateVerdict {
  bool periodic = false;
  std::int64_t period = 0;
  std::vector<std::int64_t> witness;  // per-period visit counts m_i
  bool relation_ok = false;           // sum(m_i v_i) == 0 within tolerance (exact for rationals)
  double relation_residual = 0;
};

FateVerdict detect_periodic_fate(const Itinerary& itinerary);
FateVerdict detect_periodic_fate(const Itinerary& itinerary, std::span<const Rational> vectors);
FateVerdict detect_periodic_fate(const Itinerary& itinerary, std::span<const double> vectors);
FateVerdict detect_periodic_fate(const Itinerary& itinerary, std::span<const Vec2q> vectors);
FateVerdict detect_periodic_fate(const Itinerary& itinerary, std::span<const Vec2d> vectors);

// ---------------------------------------------------------------------------
// Sampled map validation: covering, pairwise overlap, and F(domain) within
// domain, certified to sample resolution only.
// ---------------------------------------------------------------------------

struct MapValidation {
  double covered_fraction = 0;
  double overlap_fraction = 0;
  double maps_outside_fraction = 0;
  std::int64_t samples = 0;

  bool ok(double tol = 1e-4) const {
    return covered_fraction >= 1.0 - tol && overlap_fraction <= tol && maps_outside_fraction <= tol;
  }
};

MapValidation validate_map(const Map2D<double>& map, std::int64_t n_samples, std::uint64_t seed);
MapValidation validate_map(const Map1D<double>& map);
MapValidation validate_map(const Map1D<Rational>& map);

}  // namespace pwt

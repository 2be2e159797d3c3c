#include "pwtlab/pwt_map.hpp"

#include <algorithm>
#include <cmath>

namespace pwt {

namespace {

constexpr double kEps = 2.220446049250313e-16;

// Shared orbit loop; Stepper advances the point and reports the symbol.
template <class Point, class StepFn, class ResidFn>
std::pair<Itinerary, std::vector<std::int64_t>> run_orbit(Point& x, std::int64_t k, int m, StepFn&& fn,
                                                          ResidFn&& resid, Point& start, double scale,
                                                          double* out_residual) {
  Itinerary itin;
  itin.reserve(static_cast<std::size_t>(k));
  std::vector<std::int64_t> counts(static_cast<std::size_t>(m), 0);
  for (std::int64_t n = 0; n < k; ++n) {
    const int sym = fn(x);
    itin.push_back(sym);
    ++counts[static_cast<std::size_t>(sym)];
  }
  const double r = resid(start, x, counts);
  *out_residual = r;
  const double tol = 10.0 * static_cast<double>(std::max<std::int64_t>(k, 1)) * kEps * scale;
  if (r > std::max(tol, 1e-12))
    throw Error(Err::InvalidArgument, "orbit reconstruction residual exceeds tolerance");
  return {std::move(itin), std::move(counts)};
}

}  // namespace

std::pair<Itinerary, OrbitStats<Rational>> orbit(const Map1D<Rational>& map, const Rational& x,
                                                 std::int64_t k) {
  if (k < 0) throw Error(Err::InvalidArgument, "orbit length must be >= 0");
  Rational cur = x;
  Rational start = x;
  double residual = 0;
  auto [itin, counts] = run_orbit(
      cur, k, map.branches(),
      [&](Rational& p) {
        const int sym = classify(map, p);
        p = step(map, p);
        return sym;
      },
      [&](const Rational& s, const Rational& fin, const std::vector<std::int64_t>& c) {
        Rational recon = s;
        for (std::size_t i = 0; i < c.size(); ++i) recon += Rational(c[i]) * map.vectors[i];
        return recon == fin ? 0.0 : std::abs((recon - fin).to_double());
      },
      start, 1.0, &residual);
  OrbitStats<Rational> stats;
  stats.k = k;
  stats.visit_counts = std::move(counts);
  stats.final_x = cur;
  stats.recon_residual = residual;
  return {std::move(itin), std::move(stats)};
}

std::pair<Itinerary, OrbitStats<double>> orbit(const Map1D<double>& map, double x, std::int64_t k) {
  if (k < 0) throw Error(Err::InvalidArgument, "orbit length must be >= 0");
  double cur = x;
  double start = x;
  double residual = 0;
  const double scale = std::max(1.0, std::abs(map.cuts.back() - map.cuts.front()));
  auto [itin, counts] = run_orbit(
      cur, k, map.branches(),
      [&](double& p) {
        const int sym = classify(map, p);
        p = step(map, p);
        return sym;
      },
      [&](double s, double fin, const std::vector<std::int64_t>& c) {
        double recon = s;
        for (std::size_t i = 0; i < c.size(); ++i) recon += static_cast<double>(c[i]) * map.vectors[i];
        return std::abs(recon - fin);
      },
      start, scale, &residual);
  OrbitStats<double> stats;
  stats.k = k;
  stats.visit_counts = std::move(counts);
  stats.final_x = cur;
  stats.recon_residual = residual;
  return {std::move(itin), std::move(stats)};
}

namespace {

// Torus orbits accumulate the unwrapped sum separately so the reconstruction
// identity F^k(x) = x + sum b_i v_i can be checked without mod-1 noise.
template <class S>
std::pair<Itinerary, OrbitStats<S>> orbit_2d_impl(const Map2D<S>& map, const Vec2<S>& x, std::int64_t k) {
  if (k < 0) throw Error(Err::InvalidArgument, "orbit length must be >= 0");
  Itinerary itin;
  itin.reserve(static_cast<std::size_t>(k));
  std::vector<std::int64_t> counts(static_cast<std::size_t>(map.branches()), 0);
  Vec2<S> cur = x;
  Vec2<S> wraps{};  // integer lattice shifts absorbed by torus wrapping
  for (std::int64_t n = 0; n < k; ++n) {
    const int sym = classify(map, cur);
    itin.push_back(sym);
    ++counts[static_cast<std::size_t>(sym)];
    Vec2<S> next = cur + map.vectors[static_cast<std::size_t>(sym)];
    if (map.torus) {
      const Vec2<S> wrapped = wrap_torus(next);
      wraps = wraps + (next - wrapped);
      next = wrapped;
    } else {
      next = step(map, cur);
    }
    cur = next;
  }
  Vec2<S> recon = x;
  for (std::size_t i = 0; i < counts.size(); ++i) recon = recon + S(counts[i]) * map.vectors[i];
  const Vec2<S> diff = recon - (cur + wraps);
  const double residual = std::sqrt(to_double(diff.norm2()));
  const double scale = std::max(1.0, region_diameter(map.domain));
  const double tol = std::max(10.0 * static_cast<double>(std::max<std::int64_t>(k, 1)) * kEps * scale, 1e-12);
  if (residual > tol) throw Error(Err::InvalidArgument, "orbit reconstruction residual exceeds tolerance");

  OrbitStats<S> stats;
  stats.k = k;
  stats.visit_counts = std::move(counts);
  stats.final_xy = cur;
  stats.recon_residual = residual;
  return {std::move(itin), std::move(stats)};
}

}  // namespace

std::pair<Itinerary, OrbitStats<Rational>> orbit(const Map2D<Rational>& map, const Vec2q& x,
                                                 std::int64_t k) {
  return orbit_2d_impl(map, x, k);
}
std::pair<Itinerary, OrbitStats<double>> orbit(const Map2D<double>& map, const Vec2d& x, std::int64_t k) {
  return orbit_2d_impl(map, x, k);
}

// --- rational independence --------------------------------------------------

namespace {

IndependenceVerdict dependent(std::vector<std::int64_t> witness, double residual) {
  IndependenceVerdict v;
  v.independent = false;
  v.witness = std::move(witness);
  v.residual = residual;
  return v;
}

}  // namespace

IndependenceVerdict rational_independence_1d(double v0, double v1, std::int64_t bound) {
  if (bound < 1) throw Error(Err::InvalidArgument, "coefficient bound must be >= 1");
  IndependenceVerdict verdict;
  verdict.bound = bound;
  const double scale = std::max({std::abs(v0), std::abs(v1), 1e-300});
  const double tol = 1e-9 * scale;
  if (std::abs(v1) <= tol) return dependent({0, 1}, std::abs(v1));
  if (std::abs(v0) <= tol) return dependent({1, 0}, std::abs(v0));

  // Relation n0 v0 + n1 v1 = 0 means n0/n1 = -v1/v0: scan continued-fraction
  // convergents of |v1/v0| with denominators up to the bound.
  const double t = -v1 / v0;
  const double at = std::abs(t);
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = at;
  for (int it = 0; it < 64; ++it) {
    const double fl = std::floor(r);
    if (fl > 9.0e18) break;
    const auto a = static_cast<std::int64_t>(fl);
    const __int128 p2 = static_cast<__int128>(a) * p1 + p0;
    const __int128 q2 = static_cast<__int128>(a) * q1 + q0;
    if (p2 > bound || q2 > bound) break;
    p0 = p1;
    q0 = q1;
    p1 = static_cast<std::int64_t>(p2);
    q1 = static_cast<std::int64_t>(q2);
    if (q1 >= 1) {
      const std::int64_t n0 = t < 0 ? -p1 : p1;
      const std::int64_t n1 = q1;
      const double res = std::abs(static_cast<double>(n0) * v0 + static_cast<double>(n1) * v1);
      if (res <= tol * static_cast<double>(std::abs(n0) + n1) && (n0 != 0 || n1 != 0))
        return dependent({n0, n1}, res);
    }
    const double rem = r - fl;
    if (rem < 1e-15) break;
    r = 1.0 / rem;
  }
  return verdict;
}

IndependenceVerdict rational_independence_1d(const Rational& v0, const Rational& v1, std::int64_t bound) {
  if (bound < 1) throw Error(Err::InvalidArgument, "coefficient bound must be >= 1");
  IndependenceVerdict verdict;
  verdict.bound = bound;
  if (v1.is_zero()) return dependent({0, 1}, 0);
  if (v0.is_zero()) return dependent({1, 0}, 0);
  const Rational t = (Rational(0) - v1) / v0;  // n0/n1 in lowest terms
  const std::int64_t p = t.num() < 0 ? -t.num() : t.num();
  const std::int64_t q = t.den();
  if (p <= bound && q <= bound) return dependent({t.num(), q}, 0);
  return verdict;
}

namespace {

template <class S>
IndependenceVerdict independence_2d_impl(const Vec2<S>& v0, const Vec2<S>& v1, const Vec2<S>& v2,
                                         std::int64_t bound) {
  if (bound < 1) throw Error(Err::InvalidArgument, "coefficient bound must be >= 1");
  IndependenceVerdict verdict;
  verdict.bound = bound;

  const Vec2d w0 = {to_double(v0.x), to_double(v0.y)};
  const Vec2d w1 = {to_double(v1.x), to_double(v1.y)};
  const Vec2d w2 = {to_double(v2.x), to_double(v2.y)};
  const double scale = std::max({norm(w0), norm(w1), norm(w2), 1e-300});
  const double n22 = w2.norm2();
  if (n22 <= 1e-24 * scale * scale) return dependent({0, 0, 1}, norm(w2));

  for (std::int64_t n0 = -bound; n0 <= bound; ++n0) {
    for (std::int64_t n1 = -bound; n1 <= bound; ++n1) {
      const Vec2d w = {static_cast<double>(n0) * w0.x + static_cast<double>(n1) * w1.x,
                       static_cast<double>(n0) * w0.y + static_cast<double>(n1) * w1.y};
      const double n2d = -(w.dot(w2)) / n22;
      const auto n2 = static_cast<std::int64_t>(std::llround(n2d));
      if (std::abs(n2) > bound) continue;
      if (n0 == 0 && n1 == 0 && n2 == 0) continue;
      const double rx = w.x + static_cast<double>(n2) * w2.x;
      const double ry = w.y + static_cast<double>(n2) * w2.y;
      const double res = std::sqrt(rx * rx + ry * ry);
      const double tol =
          1e-9 * scale * static_cast<double>(std::abs(n0) + std::abs(n1) + std::abs(n2) + 1);
      if (res <= tol) {
        if constexpr (std::is_same_v<S, Rational>) {
          // Confirm exactly before reporting a witness.
          const Vec2q exact = {S(n0) * v0.x + S(n1) * v1.x + S(n2) * v2.x,
                               S(n0) * v0.y + S(n1) * v1.y + S(n2) * v2.y};
          if (!exact.x.is_zero() || !exact.y.is_zero()) continue;
          return dependent({n0, n1, n2}, 0);
        } else {
          return dependent({n0, n1, n2}, res);
        }
      }
    }
  }
  return verdict;
}

}  // namespace

IndependenceVerdict rational_independence_2d(const Vec2d& v0, const Vec2d& v1, const Vec2d& v2,
                                             std::int64_t bound) {
  return independence_2d_impl(v0, v1, v2, bound);
}
IndependenceVerdict rational_independence_2d(const Vec2q& v0, const Vec2q& v1, const Vec2q& v2,
                                             std::int64_t bound) {
  return independence_2d_impl(v0, v1, v2, bound);
}

// --- semiconjugacy -----------------------------------------------------------

SemiconjugacyResult semiconjugacy_residual(const Map1D<double>& map, double x, std::int64_t k) {
  if (map.branches() != 2) throw Error(Err::InvalidArgument, "d=1 torus factor needs m = 2 branches");
  const Lattice1d L = lattice_from_vectors_1d<double>(map.vectors);
  SemiconjugacyResult out;
  double cur = x;
  for (std::int64_t n = 0; n < k; ++n) {
    const double next = step(map, cur);
    const double r = L.torus_dist(next, cur + map.vectors[0]);
    out.max_residual = std::max(out.max_residual, r);
    cur = next;
  }
  out.exact_zero = out.max_residual == 0;
  return out;
}

SemiconjugacyResult semiconjugacy_residual(const Map1D<Rational>& map, const Rational& x,
                                           std::int64_t k) {
  if (map.branches() != 2) throw Error(Err::InvalidArgument, "d=1 torus factor needs m = 2 branches");
  const Lattice1q L = lattice_from_vectors_1d<Rational>(map.vectors);
  SemiconjugacyResult out;
  Rational cur = x;
  for (std::int64_t n = 0; n < k; ++n) {
    const Rational next = step(map, cur);
    const Rational r = L.reduce(next - (cur + map.vectors[0]));
    if (!r.is_zero()) {
      out.exact_zero = false;
      const Rational other = L.det_abs() - r;
      out.max_residual = std::max(out.max_residual, std::min(r.to_double(), other.to_double()));
    }
    cur = next;
  }
  return out;
}

namespace {

template <class S>
SemiconjugacyResult semiconjugacy_2d_impl(const Map2D<S>& map, const Vec2<S>& x, std::int64_t k) {
  if (map.branches() != 3) throw Error(Err::InvalidArgument, "d=2 torus factor needs m = 3 branches");
  const Lattice2<S> L = lattice_from_vectors_2d<S>(map.vectors);
  SemiconjugacyResult out;
  Vec2<S> cur = x;
  for (std::int64_t n = 0; n < k; ++n) {
    const Vec2<S> next = step(map, cur);
    const Vec2<S> delta = next - (cur + map.vectors[0]);
    if constexpr (std::is_same_v<S, Rational>) {
      if (!L.is_zero_class(delta)) {
        out.exact_zero = false;
        out.max_residual = std::max(out.max_residual, L.torus_dist(next, cur + map.vectors[0]));
      }
    } else {
      const double r = L.torus_dist(next, cur + map.vectors[0]);
      out.max_residual = std::max(out.max_residual, r);
    }
    cur = next;
  }
  if constexpr (!std::is_same_v<S, Rational>) out.exact_zero = out.max_residual == 0;
  return out;
}

}  // namespace

SemiconjugacyResult semiconjugacy_residual(const Map2D<double>& map, const Vec2d& x, std::int64_t k) {
  return semiconjugacy_2d_impl(map, x, k);
}
SemiconjugacyResult semiconjugacy_residual(const Map2D<Rational>& map, const Vec2q& x, std::int64_t k) {
  return semiconjugacy_2d_impl(map, x, k);
}

// --- periodic fates ----------------------------------------------------------

FateVerdict detect_periodic_fate(const Itinerary& itinerary) {
  const auto k = static_cast<std::int64_t>(itinerary.size());
  if (k < 6) throw Error(Err::TooShort, "periodicity detection needs at least 6 symbols");
  FateVerdict v;
  for (std::int64_t p = 1; 3 * p <= k; ++p) {
    bool ok = true;
    for (std::int64_t i = 0; i + p < k; ++i) {
      if (itinerary[static_cast<std::size_t>(i)] != itinerary[static_cast<std::size_t>(i + p)]) {
        ok = false;
        break;
      }
    }
    if (ok) {
      v.periodic = true;
      v.period = p;
      return v;
    }
  }
  return v;
}

namespace {

std::vector<std::int64_t> period_counts(const Itinerary& itin, std::int64_t period, std::size_t m) {
  std::vector<std::int64_t> counts(m, 0);
  for (std::int64_t i = 0; i < period; ++i) ++counts[static_cast<std::size_t>(itin[static_cast<std::size_t>(i)])];
  return counts;
}

std::size_t symbol_span(const Itinerary& itin) {
  std::int32_t top = -1;
  for (std::int32_t s : itin) top = std::max(top, s);
  return static_cast<std::size_t>(top + 1);
}

}  // namespace

FateVerdict detect_periodic_fate(const Itinerary& itinerary, std::span<const Rational> vectors) {
  FateVerdict v = detect_periodic_fate(itinerary);
  if (!v.periodic) return v;
  v.witness = period_counts(itinerary, v.period, std::max(vectors.size(), symbol_span(itinerary)));
  Rational sum(0);
  for (std::size_t i = 0; i < vectors.size() && i < v.witness.size(); ++i)
    sum += Rational(v.witness[i]) * vectors[i];
  v.relation_ok = sum.is_zero();
  v.relation_residual = std::abs(sum.to_double());
  return v;
}

FateVerdict detect_periodic_fate(const Itinerary& itinerary, std::span<const double> vectors) {
  FateVerdict v = detect_periodic_fate(itinerary);
  if (!v.periodic) return v;
  v.witness = period_counts(itinerary, v.period, std::max(vectors.size(), symbol_span(itinerary)));
  double sum = 0, scale = 1;
  for (std::size_t i = 0; i < vectors.size() && i < v.witness.size(); ++i) {
    sum += static_cast<double>(v.witness[i]) * vectors[i];
    scale = std::max(scale, std::abs(vectors[i]));
  }
  v.relation_residual = std::abs(sum);
  v.relation_ok = v.relation_residual <= 1e-9 * scale * static_cast<double>(v.period);
  return v;
}

FateVerdict detect_periodic_fate(const Itinerary& itinerary, std::span<const Vec2q> vectors) {
  FateVerdict v = detect_periodic_fate(itinerary);
  if (!v.periodic) return v;
  v.witness = period_counts(itinerary, v.period, std::max(vectors.size(), symbol_span(itinerary)));
  Vec2q sum{};
  for (std::size_t i = 0; i < vectors.size() && i < v.witness.size(); ++i)
    sum = sum + Rational(v.witness[i]) * vectors[i];
  v.relation_ok = sum.x.is_zero() && sum.y.is_zero();
  v.relation_residual = std::sqrt(to_double(sum.norm2()));
  return v;
}

FateVerdict detect_periodic_fate(const Itinerary& itinerary, std::span<const Vec2d> vectors) {
  FateVerdict v = detect_periodic_fate(itinerary);
  if (!v.periodic) return v;
  v.witness = period_counts(itinerary, v.period, std::max(vectors.size(), symbol_span(itinerary)));
  Vec2d sum{};
  double scale = 1;
  for (std::size_t i = 0; i < vectors.size() && i < v.witness.size(); ++i) {
    sum = sum + static_cast<double>(v.witness[i]) * vectors[i];
    scale = std::max(scale, norm(vectors[i]));
  }
  v.relation_residual = norm(sum);
  v.relation_ok = v.relation_residual <= 1e-9 * scale * static_cast<double>(v.period);
  return v;
}

// --- validation ---------------------------------------------------------------

MapValidation validate_map(const Map2D<double>& map, std::int64_t n_samples, std::uint64_t seed) {
  map.check_well_formed();
  const auto [lo, size] = region_bbox(map.domain);
  Rng rng(seed);
  MapValidation report;
  std::int64_t covered = 0, overlapped = 0, outside = 0, drawn = 0;
  while (drawn < n_samples) {
    const Vec2d p = {rng.uniform(lo.x, lo.x + size.x), rng.uniform(lo.y, lo.y + size.y)};
    if (!region_contains(map.domain, p)) continue;
    ++drawn;
    int hits = 0;
    int first = -1;
    for (int i = 0; i < map.branches(); ++i) {
      const bool in = std::visit([&](const auto& piece) { return piece.contains(p); },
                                 map.pieces[static_cast<std::size_t>(i)]);
      if (in) {
        ++hits;
        if (first < 0) first = i;
      }
    }
    if (hits >= 1) ++covered;
    if (hits >= 2) ++overlapped;
    if (first >= 0) {
      Vec2d q = p + map.vectors[static_cast<std::size_t>(first)];
      if (map.torus) q = wrap_torus(q);
      if (!region_contains(map.domain, q)) ++outside;
    }
  }
  report.samples = drawn;
  report.covered_fraction = static_cast<double>(covered) / static_cast<double>(drawn);
  report.overlap_fraction = static_cast<double>(overlapped) / static_cast<double>(drawn);
  report.maps_outside_fraction = static_cast<double>(outside) / static_cast<double>(drawn);
  return report;
}

namespace {

template <class S>
MapValidation validate_1d_impl(const Map1D<S>& map) {
  map.check_well_formed();
  MapValidation report;
  report.samples = map.branches();
  report.covered_fraction = 1.0;   // cut cells partition the domain by construction
  report.overlap_fraction = 0.0;
  report.maps_outside_fraction = map.maps_into_domain() ? 0.0 : 1.0;
  return report;
}

}  // namespace

MapValidation validate_map(const Map1D<double>& map) { return validate_1d_impl(map); }
MapValidation validate_map(const Map1D<Rational>& map) { return validate_1d_impl(map); }

}  // namespace pwt

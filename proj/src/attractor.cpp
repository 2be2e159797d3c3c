#include "pwtlab/attractor.hpp"

#include <algorithm>
#include <cmath>

#include "pwtlab/rng.hpp"

namespace pwt {

namespace {

RatArcUnion domain_union(const Map1D<Rational>& map) {
  return RatArcUnion::segment(map.cuts.front(), map.cuts.back());
}

RatArcUnion image_exact(const Map1D<Rational>& map, const RatArcUnion& omega) {
  RatArcUnion out;
  for (std::size_t i = 0; i < map.vectors.size(); ++i) {
    const RatArcUnion piece = RatArcUnion::segment(map.cuts[i], map.cuts[i + 1]);
    out = unite(out, intersect(omega, piece).translated(map.vectors[i]));
  }
  return out;
}

}  // namespace

Exact1DResult forward_images_exact(const Map1D<Rational>& map, std::int64_t n_max) {
  map.check_well_formed();
  if (n_max < 1) throw Error(Err::InvalidArgument, "n_max must be >= 1");
  if (!map.maps_into_domain()) throw Error(Err::MapsOutside, "1D map does not send its domain into itself");

  Exact1DResult result;
  result.trace.h = 0;
  RatArcUnion omega = domain_union(map);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    RatArcUnion next = image_exact(map, omega);
    if (!omega.contains(next))
      throw Error(Err::InvalidArgument, "nestedness violated; inconsistent 1D map");
    const RatArcUnion diff = subtract(omega, next);
    result.trace.rows.push_back({n, next.measure().to_double(),
                                 static_cast<std::int64_t>(next.size()),
                                 static_cast<std::int64_t>(diff.size())});
    const bool same = n >= 2 && next == omega;
    omega = std::move(next);
    if (same) {
      result.trace.stabilized_at = n - 1;
      result.trace.status = StabStatus::Stabilized;
      break;
    }
  }
  result.attractor = omega;
  return result;
}

// --- raster iteration ----------------------------------------------------------

namespace {

Vec2d clamp_to_region(const RegionSpec& r, const Vec2d& p) {
  if (const auto* d = std::get_if<DiskRegion>(&r)) {
    const Vec2d delta = p - d->center;
    const double n2 = delta.norm2();
    if (n2 <= d->radius * d->radius) return p;
    const double scale = d->radius / std::sqrt(n2);
    return d->center + Vec2d{scale * delta.x, scale * delta.y};
  }
  if (const auto* b = std::get_if<RectRegion>(&r)) {
    return {std::clamp(p.x, b->lo.x, std::nextafter(b->lo.x + b->size.x, b->lo.x)),
            std::clamp(p.y, b->lo.y, std::nextafter(b->lo.y + b->size.y, b->lo.y))};
  }
  if (std::holds_alternative<TorusSquare>(r)) return wrap_torus(p);
  const auto& s = std::get<SegmentRegion>(r);
  return {std::clamp(p.x, s.lo, s.hi), p.y};
}

// Closed cell square vs region intersection test (conservative for disks via
// the clamped-center distance, exact for rectangles/segments).
bool cell_intersects_region(const RegionSpec& r, double cx, double cy, double h) {
  const double half = h / 2;
  if (const auto* d = std::get_if<DiskRegion>(&r)) {
    const double qx = std::clamp(d->center.x, cx - half, cx + half);
    const double qy = std::clamp(d->center.y, cy - half, cy + half);
    const Vec2d q{qx, qy};
    return (q - d->center).norm2() <= d->radius * d->radius;
  }
  if (const auto* b = std::get_if<RectRegion>(&r)) {
    return cx + half >= b->lo.x && cx - half <= b->lo.x + b->size.x && cy + half >= b->lo.y &&
           cy - half <= b->lo.y + b->size.y;
  }
  if (std::holds_alternative<TorusSquare>(r)) return true;
  const auto& s = std::get<SegmentRegion>(r);
  return cx + half >= s.lo && cx - half <= s.hi;
}

}  // namespace

RasterResult forward_images_raster(const Map2D<double>& map, double h, std::int64_t n_max,
                                   const SnapshotFn& snapshot) {
  map.check_well_formed();
  if (!(h > 0)) throw Error(Err::InvalidArgument, "grid cell size must be positive");
  if (n_max < 1) throw Error(Err::InvalidArgument, "n_max must be >= 1");

  const auto [lo, size] = region_bbox(map.domain);
  const bool torus = map.torus || region_is_torus(map.domain);
  const auto nx = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(size.x / h - 1e-9)));
  const auto ny = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(size.y / h - 1e-9)));
  OccupancyGrid init(lo.x, lo.y, h, nx, ny);
  for (std::int64_t iy = 0; iy < ny; ++iy) {
    for (std::int64_t ix = 0; ix < nx; ++ix) {
      const Vec2d c = init.cell_center(ix, iy);
      if (cell_intersects_region(map.domain, c.x, c.y, h)) init.set(ix, iy);
    }
  }

  const double x0 = init.x0(), y0 = init.y0();
  auto stepper = [&map, torus, x0, y0, h](std::int64_t ix, std::int64_t iy, std::int64_t& jx,
                                          std::int64_t& jy) {
    Vec2d p{x0 + (static_cast<double>(ix) + 0.5) * h, y0 + (static_cast<double>(iy) + 0.5) * h};
    p = clamp_to_region(map.domain, p);
    const int sym = classify(map, p);
    Vec2d q = p + map.vectors[static_cast<std::size_t>(sym)];
    if (torus) q = wrap_torus(q);
    jx = static_cast<std::int64_t>(std::floor((q.x - x0) / h));
    jy = static_cast<std::int64_t>(std::floor((q.y - y0) / h));
    return true;
  };
  return raster_iterate_cells(std::move(init), n_max, h * h, snapshot, stepper);
}

RasterResult forward_images_raster(const Map1D<double>& map, double h, std::int64_t n_max) {
  map.check_well_formed();
  if (!(h > 0)) throw Error(Err::InvalidArgument, "grid cell size must be positive");
  if (n_max < 1) throw Error(Err::InvalidArgument, "n_max must be >= 1");
  const double lo = map.cuts.front();
  const double len = map.cuts.back() - lo;
  const auto nx = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(len / h - 1e-9)));
  OccupancyGrid init(lo, 0.0, h, nx, 1);
  for (std::int64_t ix = 0; ix < nx; ++ix) {
    const double cx = init.cell_center(ix, 0).x;
    if (cx + h / 2 >= map.cuts.front() && cx - h / 2 <= map.cuts.back()) init.set(ix, 0);
  }
  const double x0 = init.x0();
  auto stepper = [&map, x0, h](std::int64_t ix, std::int64_t, std::int64_t& jx, std::int64_t& jy) {
    double x = x0 + (static_cast<double>(ix) + 0.5) * h;
    x = std::clamp(x, map.cuts.front(), map.cuts.back());
    const double y = x + map.vectors[static_cast<std::size_t>(classify(map, x))];
    jx = static_cast<std::int64_t>(std::floor((y - x0) / h));
    jy = 0;
    return true;
  };
  return raster_iterate_cells(std::move(init), n_max, h, nullptr, stepper);
}

// --- attractor pieces ------------------------------------------------------------

PieceDecomposition attractor_pieces(const Map1D<Rational>& map, const Exact1DResult& run) {
  if (run.trace.status != StabStatus::Stabilized)
    throw Error(Err::NotStabilized, "attractor pieces need a stabilized run");
  PieceDecomposition out;
  const Rational total = run.attractor.measure();
  out.total = total.to_double();
  for (int i = 0; i < map.branches(); ++i) {
    const RatArcUnion cell = RatArcUnion::segment(map.cuts[static_cast<std::size_t>(i)],
                                                  map.cuts[static_cast<std::size_t>(i) + 1]);
    RatArcUnion piece = intersect(run.attractor, cell);
    const double m = piece.measure().to_double();
    out.pieces.push_back({i, m, total.is_zero() ? 0.0 : (piece.measure() / total).to_double()});
    out.exact_pieces.push_back(std::move(piece));
  }
  return out;
}

namespace {

template <class MapT, class CenterFn>
PieceDecomposition raster_pieces(const MapT& map, const RasterResult& run, double cell_measure,
                                 CenterFn&& classify_cell) {
  if (run.trace.status != StabStatus::Stabilized)
    throw Error(Err::NotStabilized, "attractor pieces need a stabilized run");
  PieceDecomposition out;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(map.branches()), 0);
  std::int64_t total = 0;
  run.attractor.for_each_set([&](std::int64_t ix, std::int64_t iy) {
    const int sym = classify_cell(ix, iy);
    if (sym >= 0) {
      ++counts[static_cast<std::size_t>(sym)];
      ++total;
    }
  });
  out.total = static_cast<double>(total) * cell_measure;
  for (int i = 0; i < map.branches(); ++i) {
    const auto c = counts[static_cast<std::size_t>(i)];
    out.pieces.push_back({i, static_cast<double>(c) * cell_measure,
                          total > 0 ? static_cast<double>(c) / static_cast<double>(total) : 0.0});
  }
  return out;
}

}  // namespace

PieceDecomposition attractor_pieces(const Map2D<double>& map, const RasterResult& run) {
  const OccupancyGrid& A = run.attractor;
  const double h = A.h();
  return raster_pieces(map, run, h * h, [&](std::int64_t ix, std::int64_t iy) {
    Vec2d p = A.cell_center(ix, iy);
    p = clamp_to_region(map.domain, p);
    return classify(map, p);
  });
}

PieceDecomposition attractor_pieces(const Map1D<double>& map, const RasterResult& run) {
  const OccupancyGrid& A = run.attractor;
  return raster_pieces(map, run, A.h(), [&](std::int64_t ix, std::int64_t iy) {
    const double x = std::clamp(A.cell_center(ix, iy).x, map.cuts.front(), map.cuts.back());
    return classify(map, x);
  });
}

// --- covering number ----------------------------------------------------------

namespace {

void finish_covering(CoveringReport& rep, std::vector<std::pair<std::int64_t, std::int64_t>> hist,
                     double measure_a, double torus_vol) {
  std::sort(hist.begin(), hist.end());
  rep.xi_histogram = std::move(hist);
  std::int64_t best_count = -1;
  for (const auto& [xi, cnt] : rep.xi_histogram) {
    if (cnt > best_count) {
      best_count = cnt;
      rep.mode_xi = xi;
    }
  }
  rep.mode_fraction = rep.probes_included > 0
                          ? static_cast<double>(best_count) / static_cast<double>(rep.probes_included)
                          : 0.0;
  rep.volume_ratio = torus_vol > 0 ? measure_a / torus_vol : 0.0;
  const double r = std::round(rep.volume_ratio);
  if (std::abs(rep.volume_ratio - r) < 0.05 && r >= 1) rep.ell = static_cast<std::int64_t>(r);
}

}  // namespace

CoveringReport covering_number(const OccupancyGrid& A, const Lattice2d& L, std::int64_t n_probes,
                               std::uint64_t seed) {
  if (n_probes < 1) throw Error(Err::InvalidArgument, "need at least one probe");
  CoveringReport rep;
  const OccupancyGrid band = A.boundary_band(2);
  Rng rng(seed);

  const Vec2d blo{A.x0(), A.y0()};
  const Vec2d bhi{A.x0() + static_cast<double>(A.nx()) * A.h(),
                  A.y0() + static_cast<double>(A.ny()) * A.h()};
  std::vector<std::pair<std::int64_t, std::int64_t>> hist;
  auto bump = [&hist](std::int64_t xi) {
    for (auto& e : hist) {
      if (e.first == xi) {
        ++e.second;
        return;
      }
    }
    hist.push_back({xi, 1});
  };

  for (std::int64_t p = 0; p < n_probes; ++p) {
    const Vec2d phi = L.from_coords({rng.uniform(), rng.uniform()});
    // Integer ranges of lattice shifts that can land inside the grid bbox.
    double umin = 1e300, umax = -1e300, vmin = 1e300, vmax = -1e300;
    for (const double cx : {blo.x, bhi.x}) {
      for (const double cy : {blo.y, bhi.y}) {
        const Vec2d u = L.coords(Vec2d{cx, cy} - phi);
        umin = std::min(umin, u.x);
        umax = std::max(umax, u.x);
        vmin = std::min(vmin, u.y);
        vmax = std::max(vmax, u.y);
      }
    }
    std::int64_t xi = 0;
    bool excluded = false;
    for (std::int64_t i = static_cast<std::int64_t>(std::floor(umin)) - 1;
         i <= static_cast<std::int64_t>(std::ceil(umax)) + 1 && !excluded; ++i) {
      for (std::int64_t j = static_cast<std::int64_t>(std::floor(vmin)) - 1;
           j <= static_cast<std::int64_t>(std::ceil(vmax)) + 1; ++j) {
        const Vec2d cand = phi + L.from_coords({static_cast<double>(i), static_cast<double>(j)});
        if (cand.x < blo.x || cand.x >= bhi.x || cand.y < blo.y || cand.y >= bhi.y) continue;
        if (band.get_at_point(cand)) {
          excluded = true;
          break;
        }
        if (A.get_at_point(cand)) ++xi;
      }
    }
    if (excluded) {
      ++rep.probes_excluded;
    } else {
      ++rep.probes_included;
      bump(xi);
    }
  }
  const double measure_a = static_cast<double>(A.popcount()) * A.h() * A.h();
  finish_covering(rep, std::move(hist), measure_a, L.det_abs());
  return rep;
}

CoveringReport covering_number(const RatArcUnion& A, const Lattice1q& L, std::int64_t n_probes,
                               std::uint64_t seed) {
  if (n_probes < 1) throw Error(Err::InvalidArgument, "need at least one probe");
  if (A.empty()) throw Error(Err::InvalidArgument, "empty attractor");
  CoveringReport rep;
  Rng rng(seed);
  const Rational det = L.det_abs();
  const Rational lo = A.arcs().front().first;
  const Rational hi = A.arcs().back().second;
  std::vector<std::pair<std::int64_t, std::int64_t>> hist;
  auto bump = [&hist](std::int64_t xi) {
    for (auto& e : hist) {
      if (e.first == xi) {
        ++e.second;
        return;
      }
    }
    hist.push_back({xi, 1});
  };

  constexpr std::int64_t kProbeDen = 1000003;  // prime keeps probes off the endpoint grid
  for (std::int64_t p = 0; p < n_probes; ++p) {
    const Rational u(rng.uniform_int(0, kProbeDen - 1), kProbeDen);
    const Rational phi = u * det;
    std::int64_t xi = 0;
    bool excluded = false;
    const std::int64_t kmin = ((lo - phi) / det).floor() - 1;
    const std::int64_t kmax = ((hi - phi) / det).floor() + 1;
    for (std::int64_t k = kmin; k <= kmax; ++k) {
      const Rational cand = phi + Rational(k) * det;
      if (cand < lo || hi < cand) continue;
      // Exact endpoint hits are the measure-zero boundary exception.
      for (const auto& arc : A.arcs()) {
        if (cand == arc.first || cand == arc.second) {
          excluded = true;
          break;
        }
      }
      if (excluded) break;
      if (A.contains_point(cand)) ++xi;
    }
    if (excluded) {
      ++rep.probes_excluded;
    } else {
      ++rep.probes_included;
      bump(xi);
    }
  }
  finish_covering(rep, std::move(hist), A.measure().to_double(), det.to_double());
  return rep;
}

// --- tiling ---------------------------------------------------------------------

TilingReport tiling_check(const OccupancyGrid& A, const Lattice2d& L, int samples_per_domain) {
  TilingReport rep;
  if (samples_per_domain <= 0) {
    samples_per_domain =
        std::max(32, static_cast<int>(std::round(std::sqrt(L.det_abs()) / A.h())));
    samples_per_domain = std::min(samples_per_domain, 512);
  }
  // Window center: lattice coordinates of the attractor bbox center.
  const Vec2d center{A.x0() + static_cast<double>(A.nx()) * A.h() / 2,
                     A.y0() + static_cast<double>(A.ny()) * A.h() / 2};
  const Vec2d uc = L.coords(center);
  const double u0 = uc.x - 1.5, v0 = uc.y - 1.5;
  const Vec2d blo{A.x0(), A.y0()};
  const Vec2d bhi{A.x0() + static_cast<double>(A.nx()) * A.h(),
                  A.y0() + static_cast<double>(A.ny()) * A.h()};

  const int n = 3 * samples_per_domain;
  std::int64_t covered = 0, multi = 0, total = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Vec2d u{u0 + (a + 0.5) * 3.0 / n, v0 + (b + 0.5) * 3.0 / n};
      const Vec2d x = L.from_coords(u);
      // Shift x by lattice vectors into the bbox and count hits.
      std::int64_t hits = 0;
      const Vec2d clo = L.coords(blo - x);
      const Vec2d chi = L.coords(bhi - x);
      const auto imin = static_cast<std::int64_t>(std::floor(std::min(clo.x, chi.x))) - 1;
      const auto imax = static_cast<std::int64_t>(std::ceil(std::max(clo.x, chi.x))) + 1;
      const auto jmin = static_cast<std::int64_t>(std::floor(std::min(clo.y, chi.y))) - 1;
      const auto jmax = static_cast<std::int64_t>(std::ceil(std::max(clo.y, chi.y))) + 1;
      for (std::int64_t i = imin; i <= imax; ++i) {
        for (std::int64_t j = jmin; j <= jmax; ++j) {
          const Vec2d cand = x + L.from_coords({static_cast<double>(i), static_cast<double>(j)});
          if (cand.x < blo.x || cand.x >= bhi.x || cand.y < blo.y || cand.y >= bhi.y) continue;
          if (A.get_at_point(cand)) ++hits;
        }
      }
      ++total;
      if (hits >= 1) ++covered;
      if (hits >= 2) ++multi;
    }
  }
  rep.coverage_fraction = static_cast<double>(covered) / static_cast<double>(total);
  rep.overlap_fraction = static_cast<double>(multi) / static_cast<double>(total);
  return rep;
}

TilingReport tiling_check(const RatArcUnion& A, const Lattice1q& L) {
  TilingReport rep;
  if (A.empty()) return rep;
  const Rational det = L.det_abs();
  const Rational w0 = A.arcs().front().first - det;
  const Rational w1 = w0 + Rational(3) * det;
  // Sweep counting of coverage multiplicity by the translated copies.
  std::vector<std::pair<Rational, int>> events;
  const Rational lo = A.arcs().front().first;
  const Rational hi = A.arcs().back().second;
  const std::int64_t kmin = ((w0 - hi) / det).floor() - 1;
  const std::int64_t kmax = ((w1 - lo) / det).floor() + 1;
  for (std::int64_t k = kmin; k <= kmax; ++k) {
    const Rational shift = Rational(k) * det;
    for (const auto& arc : A.arcs()) {
      Rational a = arc.first + shift;
      Rational b = arc.second + shift;
      if (b < w0 || w1 < a) continue;
      a = std::max(a, w0);
      b = std::min(b, w1);
      if (a < b) {
        events.push_back({a, +1});
        events.push_back({b, -1});
      }
    }
  }
  std::sort(events.begin(), events.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    return x.second > y.second;
  });
  Rational covered(0), multi(0);
  int depth = 0;
  Rational prev = w0;
  for (const auto& [pos, delta] : events) {
    if (depth >= 1) covered += pos - prev;
    if (depth >= 2) multi += pos - prev;
    depth += delta;
    prev = pos;
  }
  const Rational window = w1 - w0;
  rep.coverage_fraction = (covered / window).to_double();
  rep.overlap_fraction = (multi / window).to_double();
  return rep;
}

// --- diagrams --------------------------------------------------------------------

std::vector<Vec2d> diagram(const Vec2d& x, const OccupancyGrid& A, const Lattice2d& L,
                           std::int64_t radius) {
  std::vector<Vec2d> out;
  for (std::int64_t i = -radius; i <= radius; ++i) {
    for (std::int64_t j = -radius; j <= radius; ++j) {
      const Vec2d lambda = L.from_coords({static_cast<double>(i), static_cast<double>(j)});
      if (A.get_at_point(x + lambda)) out.push_back(lambda);
    }
  }
  return out;
}

std::vector<Rational> diagram(const Rational& x, const RatArcUnion& A, const Lattice1q& L,
                              std::int64_t radius) {
  std::vector<Rational> out;
  for (std::int64_t k = -radius; k <= radius; ++k) {
    const Rational lambda = Rational(k) * L.basis;
    if (A.contains_point(x + lambda)) out.push_back(lambda);
  }
  return out;
}

// --- visit frequencies -------------------------------------------------------------

namespace {

template <class Alpha>
FrequencyReport frequency_from(const std::vector<std::int64_t>& counts, std::int64_t k,
                               const Alpha& alpha) {
  FrequencyReport rep;
  rep.frequencies.reserve(counts.size());
  for (std::int64_t c : counts)
    rep.frequencies.push_back(static_cast<double>(c) / static_cast<double>(k));
  for (const auto& a : alpha) rep.alpha.push_back(to_double(a));
  for (std::size_t i = 0; i < rep.frequencies.size(); ++i)
    rep.max_deviation = std::max(rep.max_deviation, std::abs(rep.frequencies[i] - rep.alpha[i]));
  return rep;
}

}  // namespace

FrequencyReport visit_frequency_report(const Map1D<double>& map, double x, std::int64_t k) {
  if (k < 1) throw Error(Err::InvalidArgument, "k must be >= 1");
  if (map.branches() != 2) throw Error(Err::InvalidArgument, "frequency report needs m = d+1");
  const auto [itin, stats] = orbit(map, x, k);
  return frequency_from(stats.visit_counts, k, alpha_coefficients_1d(map.vectors[0], map.vectors[1]));
}

FrequencyReport visit_frequency_report(const Map1D<Rational>& map, const Rational& x, std::int64_t k) {
  if (k < 1) throw Error(Err::InvalidArgument, "k must be >= 1");
  if (map.branches() != 2) throw Error(Err::InvalidArgument, "frequency report needs m = d+1");
  const auto [itin, stats] = orbit(map, x, k);
  return frequency_from(stats.visit_counts, k, alpha_coefficients_1d(map.vectors[0], map.vectors[1]));
}

FrequencyReport visit_frequency_report(const Map2D<double>& map, const Vec2d& x, std::int64_t k) {
  if (k < 1) throw Error(Err::InvalidArgument, "k must be >= 1");
  if (map.branches() != 3) throw Error(Err::InvalidArgument, "frequency report needs m = d+1");
  const auto [itin, stats] = orbit(map, x, k);
  return frequency_from(stats.visit_counts, k,
                        alpha_coefficients_2d(map.vectors[0], map.vectors[1], map.vectors[2]));
}

}  // namespace pwt

#include "pwtlab/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "pwtlab/grid.hpp"
#include "pwtlab/rng.hpp"
#include "pwtlab/set_approx.hpp"

namespace pwt {

void validate_region(const RegionSpec& r) {
  if (const auto* d = std::get_if<DiskRegion>(&r)) {
    if (!(d->radius > 0)) throw Error(Err::BadRegionSpec, "disk radius must be positive");
    if (!std::isfinite(d->radius) || !std::isfinite(d->center.x) || !std::isfinite(d->center.y))
      throw Error(Err::BadRegionSpec, "disk parameters must be finite");
  } else if (const auto* b = std::get_if<RectRegion>(&r)) {
    if (!(b->size.x > 0) || !(b->size.y > 0))
      throw Error(Err::BadRegionSpec, "rectangle sizes must be positive");
  } else if (const auto* s = std::get_if<SegmentRegion>(&r)) {
    if (!(s->lo < s->hi)) throw Error(Err::BadRegionSpec, "segment needs lo < hi");
  }
}

bool region_contains(const RegionSpec& r, const Vec2d& p) {
  if (const auto* d = std::get_if<DiskRegion>(&r)) {
    return (p - d->center).norm2() <= d->radius * d->radius;
  }
  if (const auto* b = std::get_if<RectRegion>(&r)) {
    return p.x >= b->lo.x && p.x < b->lo.x + b->size.x && p.y >= b->lo.y && p.y < b->lo.y + b->size.y;
  }
  if (std::holds_alternative<TorusSquare>(r)) {
    return p.x >= 0 && p.x < 1 && p.y >= 0 && p.y < 1;
  }
  const auto& s = std::get<SegmentRegion>(r);
  return p.x >= s.lo && p.x <= s.hi;
}

std::pair<Vec2d, Vec2d> region_bbox(const RegionSpec& r) {
  if (const auto* d = std::get_if<DiskRegion>(&r)) {
    return {{d->center.x - d->radius, d->center.y - d->radius}, {2 * d->radius, 2 * d->radius}};
  }
  if (const auto* b = std::get_if<RectRegion>(&r)) {
    return {b->lo, b->size};
  }
  if (std::holds_alternative<TorusSquare>(r)) {
    return {{0, 0}, {1, 1}};
  }
  const auto& s = std::get<SegmentRegion>(r);
  return {{s.lo, 0}, {s.hi - s.lo, 1}};
}

double region_diameter(const RegionSpec& r) {
  const auto [lo, size] = region_bbox(r);
  (void)lo;
  return std::max(size.x, size.y);
}

bool region_is_torus(const RegionSpec& r) { return std::holds_alternative<TorusSquare>(r); }

OccupancyGrid OccupancyGrid::boundary_band(int radius) const {
  OccupancyGrid edge(x0_, y0_, h_, nx_, ny_);
  for_each_set([&](std::int64_t ix, std::int64_t iy) {
    bool boundary = ix == 0 || iy == 0 || ix == nx_ - 1 || iy == ny_ - 1;
    if (!boundary) {
      boundary = !get(ix - 1, iy) || !get(ix + 1, iy) || !get(ix, iy - 1) || !get(ix, iy + 1);
    }
    if (boundary) edge.set(ix, iy);
  });
  if (radius <= 0) return edge;
  OccupancyGrid out(x0_, y0_, h_, nx_, ny_);
  edge.for_each_set([&](std::int64_t ix, std::int64_t iy) {
    for (std::int64_t dy = -radius; dy <= radius; ++dy) {
      for (std::int64_t dx = -radius; dx <= radius; ++dx) {
        const std::int64_t jx = ix + dx, jy = iy + dy;
        if (out.in_range(jx, jy)) out.set(jx, jy);
      }
    }
  });
  return out;
}

SetApprox set_approx_from_region(const RegionSpec& region, std::int64_t n_points, double h,
                                 std::uint64_t seed) {
  validate_region(region);
  if (n_points < 1) throw Error(Err::BadRegionSpec, "n_points must be >= 1");
  if (!(h > 0)) throw Error(Err::BadRegionSpec, "grid cell size must be positive");

  const auto [lo, size] = region_bbox(region);
  const bool one_dim = std::holds_alternative<SegmentRegion>(region);

  SetApprox out;
  out.torus = region_is_torus(region);
  const auto nx = static_cast<std::int64_t>(std::ceil(size.x / h));
  const auto ny = one_dim ? 1 : static_cast<std::int64_t>(std::ceil(size.y / h));
  out.grid = OccupancyGrid(lo.x, lo.y, h, std::max<std::int64_t>(nx, 1), std::max<std::int64_t>(ny, 1));

  Rng rng(seed);
  out.points.reserve(static_cast<std::size_t>(n_points));

  if (one_dim) {
    const auto& seg = std::get<SegmentRegion>(region);
    const double stride = (seg.hi - seg.lo) / static_cast<double>(n_points);
    for (std::int64_t i = 0; i < n_points; ++i) {
      const double x = seg.lo + (static_cast<double>(i) + rng.uniform()) * stride;
      out.points.push_back({std::min(x, std::nextafter(seg.hi, seg.lo)), 0.0});
    }
  } else {
    const auto strata = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n_points))));
    const double sx = size.x / static_cast<double>(strata);
    const double sy = size.y / static_cast<double>(strata);
    std::int64_t placed = 0;
    for (std::int64_t j = 0; j < strata && placed < n_points; ++j) {
      for (std::int64_t i = 0; i < strata && placed < n_points; ++i) {
        // A handful of rejection tries per stratum; strata outside the region
        // stay empty, which keeps the fill quasi-uniform.
        for (int attempt = 0; attempt < 8; ++attempt) {
          const Vec2d p = {lo.x + (static_cast<double>(i) + rng.uniform()) * sx,
                           lo.y + (static_cast<double>(j) + rng.uniform()) * sy};
          if (region_contains(region, p)) {
            out.points.push_back(p);
            ++placed;
            break;
          }
        }
      }
    }
  }
  out.rebuild_grid();
  return out;
}

}  // namespace pwt

#pragma once

#include <cstdint>
#include <vector>

#include "pwtlab/geometry.hpp"
#include "pwtlab/grid.hpp"

namespace pwt {

inline constexpr int kDefaultGridDivisor = 512;       // h = diameter / 512 by default
inline constexpr std::int64_t kDefaultCloudPoints = 1000000;

// Point cloud plus its occupancy rasterization. Points carry exact translated
// coordinates; the grid is a reporting layer rebuilt from the points, so the
// "occupied iff a point falls in the cell" invariant holds by construction.
struct SetApprox {
  std::vector<Vec2d> points;
  OccupancyGrid grid;
  bool torus = false;

  void rebuild_grid() {
    grid.clear();
    for (const Vec2d& p : points) {
      const Vec2d q = torus ? wrap_torus(p) : p;
      const std::int64_t ix = grid.cell_x(q.x), iy = grid.cell_y(q.y);
      if (grid.in_range(ix, iy)) grid.set(ix, iy);
    }
  }

  bool grid_consistent_with_points() const {
    OccupancyGrid check(grid.x0(), grid.y0(), grid.h(), grid.nx(), grid.ny());
    for (const Vec2d& p : points) {
      const Vec2d q = torus ? wrap_torus(p) : p;
      const std::int64_t ix = check.cell_x(q.x), iy = check.cell_y(q.y);
      if (check.in_range(ix, iy)) check.set(ix, iy);
    }
    return check == grid;
  }
};

// Quasi-uniform stratified fill of the region: one jittered point per stratum
// of a ceil(sqrt(n)) x ceil(sqrt(n)) subdivision of the bounding box
// (rejection against the region), deterministic per seed.
SetApprox set_approx_from_region(const RegionSpec& region, std::int64_t n_points, double h,
                                 std::uint64_t seed);

}  // namespace pwt

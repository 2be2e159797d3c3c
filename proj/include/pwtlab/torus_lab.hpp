#pragma once

#include <cstdint>

#include "pwtlab/attractor.hpp"
#include "pwtlab/circle_lab.hpp"

namespace pwt {

// Skew product over the circle rotation by base_angle: the base partition is
// delta_x1 = [0, 1 - base_angle), delta_x2 = [1 - base_angle, 1) (so
// |delta_x2| = base_angle), rigid fibers over delta_x1 and double-rotation
// fibers T_{alpha, beta, delta} over delta_x2.
struct SkewProductMap {
  double base_angle = 0;
  double fiber_alpha = 0;
  double fiber_beta = 0;
  double fiber_delta = 0;

  void check() const {
    if (!(base_angle > 0) || !(base_angle < 1))
      throw Error(Err::InvalidArgument, "base angle must be in (0,1)");
    if (fiber_alpha < 0 || fiber_alpha >= 1 || fiber_beta < 0 || fiber_delta < 0 || fiber_delta > 1)
      throw Error(Err::InvalidArgument, "fiber parameters out of range");
  }
};

inline Vec2d skew_step(const SkewProductMap& m, const Vec2d& p) {
  const double x = frac_mod1(p.x + m.base_angle);
  double y;
  if (p.x < 1.0 - m.base_angle) {
    y = frac_mod1(p.y + m.fiber_alpha);
  } else {
    y = p.y <= m.fiber_delta ? frac_mod1(p.y + m.fiber_alpha + m.fiber_beta)
                             : frac_mod1(p.y + m.fiber_alpha);
  }
  return {x, y};
}

// Double rotation of the torus: x + gamma1 off the rectangle, x + gamma2 on it.
struct TorusDoubleRotation {
  Vec2d rect_lo{};
  Vec2d rect_size{};
  Vec2d gamma1{};
  Vec2d gamma2{};

  void check() const {
    if (!(rect_size.x > 0) || rect_size.x >= 1 || !(rect_size.y > 0) || rect_size.y >= 1)
      throw Error(Err::InvalidArgument, "rectangle sizes must lie in (0,1)");
  }

  bool in_rect(const Vec2d& p) const {
    return frac_mod1(p.x - rect_lo.x) < rect_size.x && frac_mod1(p.y - rect_lo.y) < rect_size.y;
  }
};

inline Vec2d torus_dr_step(const TorusDoubleRotation& m, const Vec2d& p) {
  return wrap_torus(p + (m.in_rect(p) ? m.gamma2 : m.gamma1));
}

// Raster iteration over the full torus at resolution h = 1/N (h must divide 1
// evenly). Per-axis translation tables make the cell step pure index
// arithmetic, so runs are deterministic and fast.
RasterResult torus_forward_images(const TorusDoubleRotation& map, double h, std::int64_t n_max,
                                  const SnapshotFn& snapshot = nullptr);
RasterResult torus_forward_images(const SkewProductMap& map, double h, std::int64_t n_max,
                                  const SnapshotFn& snapshot = nullptr);

// Snaps every parameter to the nearest multiple of 1/N; on the commensurate
// grid the raster dynamics is exact and every run stabilizes.
TorusDoubleRotation snap_commensurate(const TorusDoubleRotation& map, std::int64_t N);

// Conjecture probe: fraction of finite-type verdicts over a seeded sample of
// random skew products. Reported as data, never asserted.
struct SkewProbeReport {
  std::int64_t runs = 0;
  std::int64_t stabilized = 0;
  double fraction = 0;
  std::vector<std::int64_t> stabilized_at;  // -1 for MaxIterReached
};

SkewProbeReport skew_conjecture_probe(std::int64_t runs, double h, std::int64_t n_max,
                                      std::uint64_t seed);

// Equivalent 4-branch PwtMap view of a torus double rotation (complement
// piece first, rectangle piece second), used where generic map plumbing is
// wanted.
Map2D<double> torus_dr_as_map(const TorusDoubleRotation& m);

}  // namespace pwt

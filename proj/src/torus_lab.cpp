#include "pwtlab/torus_lab.hpp"

#include <cmath>

#include "pwtlab/rng.hpp"

namespace pwt {

namespace {

std::int64_t grid_side(double h) {
  if (!(h > 0) || h > 1) throw Error(Err::InvalidArgument, "torus grid needs 0 < h <= 1");
  const double n = 1.0 / h;
  const auto N = static_cast<std::int64_t>(std::llround(n));
  if (N < 1 || std::abs(n - static_cast<double>(N)) > 1e-9)
    throw Error(Err::InvalidArgument, "h must divide 1 evenly");
  return N;
}

OccupancyGrid full_torus_grid(std::int64_t N) {
  OccupancyGrid g(0.0, 0.0, 1.0 / static_cast<double>(N), N, N);
  for (std::int64_t iy = 0; iy < N; ++iy)
    for (std::int64_t ix = 0; ix < N; ++ix) g.set(ix, iy);
  return g;
}

// Target cell of center (i+1/2)/N translated by t, wrapped.
std::vector<std::int32_t> axis_table(std::int64_t N, double t) {
  std::vector<std::int32_t> tab(static_cast<std::size_t>(N));
  for (std::int64_t i = 0; i < N; ++i) {
    const double c = (static_cast<double>(i) + 0.5) / static_cast<double>(N);
    const double moved = frac_mod1(c + t);
    auto j = static_cast<std::int64_t>(moved * static_cast<double>(N));
    if (j >= N) j = N - 1;
    tab[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(j);
  }
  return tab;
}

// Wrap-aware per-axis rectangle membership of cell centers.
std::vector<std::uint8_t> axis_in_interval(std::int64_t N, double lo, double size) {
  std::vector<std::uint8_t> in(static_cast<std::size_t>(N));
  for (std::int64_t i = 0; i < N; ++i) {
    const double c = (static_cast<double>(i) + 0.5) / static_cast<double>(N);
    in[static_cast<std::size_t>(i)] = frac_mod1(c - lo) < size ? 1 : 0;
  }
  return in;
}

}  // namespace

RasterResult torus_forward_images(const TorusDoubleRotation& map, double h, std::int64_t n_max,
                                  const SnapshotFn& snapshot) {
  map.check();
  if (n_max < 1) throw Error(Err::InvalidArgument, "n_max must be >= 1");
  const std::int64_t N = grid_side(h);

  const auto g1x = axis_table(N, map.gamma1.x);
  const auto g1y = axis_table(N, map.gamma1.y);
  const auto g2x = axis_table(N, map.gamma2.x);
  const auto g2y = axis_table(N, map.gamma2.y);
  const auto in_x = axis_in_interval(N, map.rect_lo.x, map.rect_size.x);
  const auto in_y = axis_in_interval(N, map.rect_lo.y, map.rect_size.y);

  auto stepper = [&](std::int64_t ix, std::int64_t iy, std::int64_t& jx, std::int64_t& jy) {
    const bool inside = in_x[static_cast<std::size_t>(ix)] && in_y[static_cast<std::size_t>(iy)];
    if (inside) {
      jx = g2x[static_cast<std::size_t>(ix)];
      jy = g2y[static_cast<std::size_t>(iy)];
    } else {
      jx = g1x[static_cast<std::size_t>(ix)];
      jy = g1y[static_cast<std::size_t>(iy)];
    }
    return true;
  };
  const double cell = 1.0 / static_cast<double>(N);
  return raster_iterate_cells(full_torus_grid(N), n_max, cell * cell, snapshot, stepper);
}

RasterResult torus_forward_images(const SkewProductMap& map, double h, std::int64_t n_max,
                                  const SnapshotFn& snapshot) {
  map.check();
  if (n_max < 1) throw Error(Err::InvalidArgument, "n_max must be >= 1");
  const std::int64_t N = grid_side(h);

  const auto base_tab = axis_table(N, map.base_angle);
  const auto rigid_tab = axis_table(N, map.fiber_alpha);
  const auto jump_tab = axis_table(N, map.fiber_alpha + map.fiber_beta);
  // Base branch: x in [1 - base_angle, 1) drives the double-rotation fiber.
  std::vector<std::uint8_t> dr_fiber(static_cast<std::size_t>(N));
  std::vector<std::uint8_t> low_y(static_cast<std::size_t>(N));
  for (std::int64_t i = 0; i < N; ++i) {
    const double c = (static_cast<double>(i) + 0.5) / static_cast<double>(N);
    dr_fiber[static_cast<std::size_t>(i)] = c >= 1.0 - map.base_angle ? 1 : 0;
    low_y[static_cast<std::size_t>(i)] = c <= map.fiber_delta ? 1 : 0;
  }

  auto stepper = [&](std::int64_t ix, std::int64_t iy, std::int64_t& jx, std::int64_t& jy) {
    jx = base_tab[static_cast<std::size_t>(ix)];
    const bool jump = dr_fiber[static_cast<std::size_t>(ix)] && low_y[static_cast<std::size_t>(iy)];
    jy = jump ? jump_tab[static_cast<std::size_t>(iy)] : rigid_tab[static_cast<std::size_t>(iy)];
    return true;
  };
  const double cell = 1.0 / static_cast<double>(N);
  return raster_iterate_cells(full_torus_grid(N), n_max, cell * cell, snapshot, stepper);
}

TorusDoubleRotation snap_commensurate(const TorusDoubleRotation& map, std::int64_t N) {
  if (N < 2) throw Error(Err::InvalidArgument, "need N >= 2");
  auto snap = [N](double v) {
    return frac_mod1(std::round(frac_mod1(v) * static_cast<double>(N)) / static_cast<double>(N));
  };
  TorusDoubleRotation out = map;
  out.rect_lo = {snap(map.rect_lo.x), snap(map.rect_lo.y)};
  out.rect_size = {std::max(1.0 / static_cast<double>(N), snap(map.rect_size.x)),
                   std::max(1.0 / static_cast<double>(N), snap(map.rect_size.y))};
  out.gamma1 = {snap(map.gamma1.x), snap(map.gamma1.y)};
  out.gamma2 = {snap(map.gamma2.x), snap(map.gamma2.y)};
  return out;
}

SkewProbeReport skew_conjecture_probe(std::int64_t runs, double h, std::int64_t n_max,
                                      std::uint64_t seed) {
  if (runs < 1) throw Error(Err::InvalidArgument, "need at least one run");
  SkewProbeReport rep;
  rep.runs = runs;
  Rng rng(seed);
  for (std::int64_t r = 0; r < runs; ++r) {
    SkewProductMap m;
    m.base_angle = rng.uniform(0.05, 0.95);
    m.fiber_alpha = rng.uniform(0.05, 0.95);
    m.fiber_beta = rng.uniform(0.01, 0.2);
    m.fiber_delta = rng.uniform(0.2, 0.8);
    const RasterResult run = torus_forward_images(m, h, n_max);
    if (run.trace.status == StabStatus::Stabilized) {
      ++rep.stabilized;
      rep.stabilized_at.push_back(*run.trace.stabilized_at);
    } else {
      rep.stabilized_at.push_back(-1);
    }
  }
  rep.fraction = static_cast<double>(rep.stabilized) / static_cast<double>(rep.runs);
  return rep;
}

Map2D<double> torus_dr_as_map(const TorusDoubleRotation& m) {
  m.check();
  Map2D<double> map;
  map.domain = TorusSquare{};
  map.torus = true;
  RectPiece<double> inside{m.rect_lo, m.rect_size, true, false};
  RectPiece<double> outside{m.rect_lo, m.rect_size, true, true};
  map.pieces.push_back(outside);  // piece 0: complement, translated by gamma1
  map.pieces.push_back(inside);
  map.vectors.push_back(m.gamma1);
  map.vectors.push_back(m.gamma2);
  return map;
}

}  // namespace pwt

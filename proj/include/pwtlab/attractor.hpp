#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pwtlab/arc_union.hpp"
#include "pwtlab/grid.hpp"
#include "pwtlab/pwt_map.hpp"

namespace pwt {

enum class StabStatus { Stabilized, MaxIterReached };

struct TraceRow {
  std::int64_t n = 0;
  double measure = 0;
  std::int64_t occupied = 0;  // cell count (raster) / arc count (exact mode)
  std::int64_t changed = 0;   // symmetric-difference cells (raster) / arcs (exact mode)
};

struct IterationTrace {
  std::vector<TraceRow> rows;
  std::optional<std::int64_t> stabilized_at;  // smallest n >= 1 with Omega_n == Omega_{n+1}
  StabStatus status = StabStatus::MaxIterReached;
  double h = 0;  // raster resolution; 0 for exact interval mode
};

// --- forward images ----------------------------------------------------------

struct Exact1DResult {
  IterationTrace trace;
  RatArcUnion attractor;  // final Omega_n as a half-open interval union
};

// Exact interval-union iteration: Omega_{n+1} = union_i (Omega_n ∩ P_i) + v_i,
// stabilization by exact set equality. Nestedness Omega_{n+1} ⊆ Omega_n holds
// exactly for valid maps and is asserted.
Exact1DResult forward_images_exact(const Map1D<Rational>& map, std::int64_t n_max);

using SnapshotFn = std::function<void(std::int64_t n, const OccupancyGrid&)>;

struct RasterResult {
  IterationTrace trace;
  OccupancyGrid attractor;
  std::int64_t dropped = 0;  // stepped centers that left the grid (0 for valid maps)
};

// Deterministic raster dynamics at resolution h: occupied cell centers are
// clamped into the domain, stepped exactly, and re-snapped to their target
// cell. The cell map makes iterate images monotone (Omega_{n+1} ⊆ Omega_n),
// so cell counts are nonincreasing and the fixed point is the attractor at
// resolution h.
RasterResult forward_images_raster(const Map2D<double>& map, double h, std::int64_t n_max,
                                   const SnapshotFn& snapshot = nullptr);
RasterResult forward_images_raster(const Map1D<double>& map, double h, std::int64_t n_max);

// Shared raster loop: stepper(ix, iy, jx, jy) maps an occupied cell to its
// target cell (returning false drops the cell). Stabilization is declared at
// the smallest n >= 1 with Omega_n == Omega_{n+1}.
template <class StepFn>
RasterResult raster_iterate_cells(OccupancyGrid init, std::int64_t n_max, double cell_measure,
                                  const SnapshotFn& snapshot, StepFn&& stepper) {
  RasterResult result;
  result.trace.h = init.h();
  OccupancyGrid cur = std::move(init);
  if (snapshot) snapshot(0, cur);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    OccupancyGrid next(cur.x0(), cur.y0(), cur.h(), cur.nx(), cur.ny());
    cur.for_each_set([&](std::int64_t ix, std::int64_t iy) {
      std::int64_t jx = 0, jy = 0;
      if (stepper(ix, iy, jx, jy) && next.in_range(jx, jy))
        next.set(jx, jy);
      else
        ++result.dropped;
    });
    const std::int64_t changed = OccupancyGrid::xor_count(cur, next);
    const std::int64_t occupied = next.popcount();
    result.trace.rows.push_back({n, static_cast<double>(occupied) * cell_measure, occupied, changed});
    if (snapshot) snapshot(n, next);
    if (n >= 2 && changed == 0) {
      result.trace.stabilized_at = n - 1;
      result.trace.status = StabStatus::Stabilized;
      result.attractor = std::move(next);
      return result;
    }
    cur = std::move(next);
  }
  result.attractor = std::move(cur);
  return result;
}

// --- attractor structure -----------------------------------------------------

struct PieceMeasure {
  int piece = 0;
  double measure = 0;
  double normalized = 0;
};

struct PieceDecomposition {
  std::vector<PieceMeasure> pieces;
  double total = 0;
  std::vector<RatArcUnion> exact_pieces;  // filled in exact 1D mode
};

PieceDecomposition attractor_pieces(const Map1D<Rational>& map, const Exact1DResult& run);
PieceDecomposition attractor_pieces(const Map2D<double>& map, const RasterResult& run);
PieceDecomposition attractor_pieces(const Map1D<double>& map, const RasterResult& run);

// --- covering number and tiling ----------------------------------------------

struct CoveringReport {
  std::vector<std::pair<std::int64_t, std::int64_t>> xi_histogram;  // (fiber size, probes)
  std::int64_t probes_included = 0;
  std::int64_t probes_excluded = 0;  // boundary band hits
  std::int64_t mode_xi = 0;
  double mode_fraction = 0;
  double volume_ratio = 0;             // Leb A / Leb T
  std::optional<std::int64_t> ell;     // round(ratio) if within 0.05, else unresolved
};

CoveringReport covering_number(const OccupancyGrid& A, const Lattice2d& L, std::int64_t n_probes,
                               std::uint64_t seed);
CoveringReport covering_number(const RatArcUnion& A, const Lattice1q& L, std::int64_t n_probes,
                               std::uint64_t seed);

struct TilingReport {
  double coverage_fraction = 0;
  double overlap_fraction = 0;
};

// Tiles a 3x3-fundamental-domain window with A + lambda and counts covered /
// multiply covered mass. samples_per_domain = 0 picks the window resolution
// matching the grid cell size.
TilingReport tiling_check(const OccupancyGrid& A, const Lattice2d& L, int samples_per_domain = 0);
TilingReport tiling_check(const RatArcUnion& A, const Lattice1q& L);

// Diagram D(x): lattice vectors lambda with x + lambda in A, search limited to
// |lattice coordinates| <= radius.
std::vector<Vec2d> diagram(const Vec2d& x, const OccupancyGrid& A, const Lattice2d& L,
                           std::int64_t radius);
std::vector<Rational> diagram(const Rational& x, const RatArcUnion& A, const Lattice1q& L,
                              std::int64_t radius);

// --- visit frequencies ---------------------------------------------------------

struct FrequencyReport {
  std::vector<double> frequencies;
  std::vector<double> alpha;
  double max_deviation = 0;
};

FrequencyReport visit_frequency_report(const Map1D<double>& map, double x, std::int64_t k);
FrequencyReport visit_frequency_report(const Map1D<Rational>& map, const Rational& x, std::int64_t k);
FrequencyReport visit_frequency_report(const Map2D<double>& map, const Vec2d& x, std::int64_t k);

}  // namespace pwt

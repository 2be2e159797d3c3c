#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "pwtlab/error.hpp"
#include "pwtlab/geometry.hpp"

namespace pwt {

// Dense occupancy bitmap over an axis-aligned cell grid. Cells are half-open
// squares [x0 + i*h, x0 + (i+1)*h) x [y0 + j*h, ...); a 1-row grid doubles as
// the 1D cell row. Equality, xor-counts and popcounts run wordwise.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;

  OccupancyGrid(double x0, double y0, double h, std::int64_t nx, std::int64_t ny)
      : x0_(x0), y0_(y0), h_(h), nx_(nx), ny_(ny), bits_((static_cast<std::size_t>(nx * ny) + 63) / 64, 0) {
    if (h <= 0 || nx < 1 || ny < 1) throw Error(Err::InvalidArgument, "bad grid shape");
  }

  double x0() const { return x0_; }
  double y0() const { return y0_; }
  double h() const { return h_; }
  std::int64_t nx() const { return nx_; }
  std::int64_t ny() const { return ny_; }
  std::int64_t cell_count() const { return nx_ * ny_; }

  bool in_range(std::int64_t ix, std::int64_t iy) const {
    return ix >= 0 && ix < nx_ && iy >= 0 && iy < ny_;
  }

  std::int64_t cell_x(double x) const { return static_cast<std::int64_t>(std::floor((x - x0_) / h_)); }
  std::int64_t cell_y(double y) const { return static_cast<std::int64_t>(std::floor((y - y0_) / h_)); }

  Vec2d cell_center(std::int64_t ix, std::int64_t iy) const {
    return {x0_ + (static_cast<double>(ix) + 0.5) * h_, y0_ + (static_cast<double>(iy) + 0.5) * h_};
  }

  void set(std::int64_t ix, std::int64_t iy) {
    const auto k = static_cast<std::size_t>(iy * nx_ + ix);
    bits_[k >> 6] |= (1ULL << (k & 63));
  }

  bool get(std::int64_t ix, std::int64_t iy) const {
    const auto k = static_cast<std::size_t>(iy * nx_ + ix);
    return (bits_[k >> 6] >> (k & 63)) & 1ULL;
  }

  bool get_at_point(const Vec2d& p) const {
    const std::int64_t ix = cell_x(p.x), iy = cell_y(p.y);
    return in_range(ix, iy) && get(ix, iy);
  }

  void clear() { std::fill(bits_.begin(), bits_.end(), 0); }

  std::int64_t popcount() const {
    std::int64_t n = 0;
    for (std::uint64_t w : bits_) n += std::popcount(w);
    return n;
  }

  friend bool operator==(const OccupancyGrid& a, const OccupancyGrid& b) {
    return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.bits_ == b.bits_;
  }

  static std::int64_t xor_count(const OccupancyGrid& a, const OccupancyGrid& b) {
    std::int64_t n = 0;
    for (std::size_t i = 0; i < a.bits_.size(); ++i) n += std::popcount(a.bits_[i] ^ b.bits_[i]);
    return n;
  }

  // True iff every set cell of a is set in b.
  static bool subset_of(const OccupancyGrid& a, const OccupancyGrid& b) {
    for (std::size_t i = 0; i < a.bits_.size(); ++i)
      if (a.bits_[i] & ~b.bits_[i]) return false;
    return true;
  }

  template <class F>
  void for_each_set(F&& f) const {
    const auto total = static_cast<std::size_t>(nx_ * ny_);
    for (std::size_t wi = 0; wi < bits_.size(); ++wi) {
      std::uint64_t w = bits_[wi];
      while (w) {
        const int bit = std::countr_zero(w);
        w &= w - 1;
        const std::size_t k = (wi << 6) + static_cast<std::size_t>(bit);
        if (k >= total) break;
        f(static_cast<std::int64_t>(k % static_cast<std::size_t>(nx_)),
          static_cast<std::int64_t>(k / static_cast<std::size_t>(nx_)));
      }
    }
  }

  // Cells set in *this with a missing 4-neighbor (or on the grid edge),
  // dilated by `radius` in Chebyshev distance. Used as the boundary band
  // mask when probing fibers.
  OccupancyGrid boundary_band(int radius) const;

  const std::vector<std::uint64_t>& words() const { return bits_; }

 private:
  double x0_ = 0, y0_ = 0, h_ = 1;
  std::int64_t nx_ = 0, ny_ = 0;
  std::vector<std::uint64_t> bits_;
};

}  // namespace pwt

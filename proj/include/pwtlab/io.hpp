#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pwtlab/grid.hpp"
#include "pwtlab/rational.hpp"

namespace pwt {

// Binary PGM (P5): "P5\n<w> <h>\n255\n" then row-major bytes, occupied = 0
// (black), empty = 255. Row iy = 0 is written first. Bit-exact for a given
// occupancy.
std::vector<std::uint8_t> pgm_bytes(const OccupancyGrid& grid);
void write_pgm(const OccupancyGrid& grid, const std::string& path);

// Bar-style rendering of a histogram: one column per bin, bars grow from the
// bottom row, height proportional to mass / max mass.
OccupancyGrid histogram_to_grid(const std::vector<double>& masses, int height);

// Plain-text grid container for the render mode:
//   PWTGRID <nx> <ny> <x0> <y0> <h>
// followed by ny lines of nx '0'/'1' characters (row iy = 0 first).
void write_grid_file(const OccupancyGrid& grid, const std::string& path);
OccupancyGrid read_grid_file(const std::string& path);

// Deterministic number formatting: doubles with 17 significant digits,
// rationals as "p/q".
std::string fmt_double(double v);
inline std::string fmt_rational(const Rational& r) { return r.str(); }

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<std::string>& cells);
  void close();

 private:
  struct Impl;
  Impl* impl_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace pwt

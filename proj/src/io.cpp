#include "pwtlab/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pwt {

std::vector<std::uint8_t> pgm_bytes(const OccupancyGrid& grid) {
  char header[64];
  const int hlen = std::snprintf(header, sizeof(header), "P5\n%" PRId64 " %" PRId64 "\n255\n",
                                 grid.nx(), grid.ny());
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(hlen) + static_cast<std::size_t>(grid.cell_count()));
  out.insert(out.end(), header, header + hlen);
  for (std::int64_t iy = 0; iy < grid.ny(); ++iy)
    for (std::int64_t ix = 0; ix < grid.nx(); ++ix)
      out.push_back(grid.get(ix, iy) ? 0x00 : 0xFF);
  return out;
}

void write_pgm(const OccupancyGrid& grid, const std::string& path) {
  const auto bytes = pgm_bytes(grid);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Err::IoError, "cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(Err::IoError, "short write: " + path);
}

OccupancyGrid histogram_to_grid(const std::vector<double>& masses, int height) {
  if (masses.empty() || height < 1) throw Error(Err::InvalidArgument, "empty histogram render");
  double top = 0;
  for (double m : masses) top = std::max(top, m);
  OccupancyGrid g(0, 0, 1.0, static_cast<std::int64_t>(masses.size()), height);
  for (std::size_t b = 0; b < masses.size(); ++b) {
    const double frac = top > 0 ? masses[b] / top : 0.0;
    const auto bar = static_cast<std::int64_t>(std::llround(frac * height));
    for (std::int64_t y = 0; y < bar; ++y) g.set(static_cast<std::int64_t>(b), y);
  }
  return g;
}

void write_grid_file(const OccupancyGrid& grid, const std::string& path) {
  std::ostringstream out;
  out << "PWTGRID " << grid.nx() << " " << grid.ny() << " " << fmt_double(grid.x0()) << " "
      << fmt_double(grid.y0()) << " " << fmt_double(grid.h()) << "\n";
  for (std::int64_t iy = 0; iy < grid.ny(); ++iy) {
    std::string line(static_cast<std::size_t>(grid.nx()), '0');
    for (std::int64_t ix = 0; ix < grid.nx(); ++ix)
      if (grid.get(ix, iy)) line[static_cast<std::size_t>(ix)] = '1';
    out << line << "\n";
  }
  write_text_file(path, out.str());
}

OccupancyGrid read_grid_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Err::IoError, "cannot open: " + path);
  std::string magic;
  std::int64_t nx = 0, ny = 0;
  double x0 = 0, y0 = 0, h = 0;
  f >> magic >> nx >> ny >> x0 >> y0 >> h;
  if (magic != "PWTGRID" || nx < 1 || ny < 1 || !(h > 0))
    throw Error(Err::IoError, "not a PWTGRID file: " + path);
  OccupancyGrid g(x0, y0, h, nx, ny);
  std::string line;
  std::getline(f, line);  // rest of header line
  for (std::int64_t iy = 0; iy < ny; ++iy) {
    if (!std::getline(f, line) || static_cast<std::int64_t>(line.size()) < nx)
      throw Error(Err::IoError, "truncated PWTGRID row in " + path);
    for (std::int64_t ix = 0; ix < nx; ++ix)
      if (line[static_cast<std::size_t>(ix)] == '1') g.set(ix, iy);
  }
  return g;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvWriter::Impl {
  std::ofstream file;
  bool open = false;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : impl_(new Impl) {
  impl_->file.open(path, std::ios::trunc);
  if (!impl_->file) {
    delete impl_;
    throw Error(Err::IoError, "cannot open for writing: " + path);
  }
  impl_->open = true;
  row(header);
}

CsvWriter::~CsvWriter() {
  close();
  delete impl_;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  impl_->file << line;
  if (!impl_->file) throw Error(Err::IoError, "csv write failed");
}

void CsvWriter::close() {
  if (impl_->open) {
    impl_->file.close();
    impl_->open = false;
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Err::IoError, "cannot open for writing: " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw Error(Err::IoError, "short write: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Err::IoError, "cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace pwt

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pwtlab/circle_lab.hpp"
#include "pwtlab/pwt_map.hpp"
#include "pwtlab/torus_lab.hpp"

namespace pwt {

enum class Mode { Validate, Iterate, Attractor, Alpha, RandomDr, ArcItinerary, Sweep, Render };

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

// 1D interval translation map, exact (rational) or float arithmetic.
struct Map1DSpec {
  std::vector<Rational> cuts;
  std::vector<Rational> vectors;
  bool exact = true;

  Map1D<Rational> exact_map() const;
  Map1D<double> float_map() const;
};

// Disk domain with the Voronoi partition of three sites and vectors
// gamma - site_i; radius 0 picks the smallest disk the step provably
// re-enters.
struct DiskVoronoiSpec {
  std::vector<Vec2d> sites;
  Vec2d gamma{};
  double radius = 0;

  Map2D<double> map() const;
  double resolved_radius() const;
};

struct TorusDrSpec {
  TorusDoubleRotation map;
  std::int64_t commensurate = 0;  // snap parameters to k/N before running

  TorusDoubleRotation resolved() const {
    return commensurate > 0 ? snap_commensurate(map, commensurate) : map;
  }
};

struct SkewSpec {
  SkewProductMap map;
};

using MapSpec = std::variant<Map1DSpec, DiskVoronoiSpec, TorusDrSpec, SkewSpec>;

struct RandomDrSpec {
  Rational alpha;
  Rational beta;
  Rational delta;
  double p = 0.5;
  std::int64_t n = 2000;
  std::vector<Rational> eps;
  int bins = 256;
  bool keep_tail = true;
};

struct ItinerarySpec {
  Rational alpha;
  Rational beta;
  Rational delta;
  Rational target_start;
  Rational target_len;
  std::int64_t rotation_budget = 100000;
  std::int64_t cut_budget = 100000;
};

struct SweepSpec {
  std::string param;  // "gamma1.x", "gamma1.y", "gamma2.x", "gamma2.y", "v0", "v1"
  double from = 0;
  double to = 1;
  std::int64_t steps = 8;
  std::string param2;  // empty for 1-parameter sweeps
  double from2 = 0;
  double to2 = 1;
  std::int64_t steps2 = 1;
};

struct RenderSpec {
  std::string input;   // .grid file
  std::string output;  // .pgm name inside out dir
};

struct ExperimentConfig {
  Mode mode = Mode::Validate;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = PWT_LAB_THREADS env or 1
  std::int64_t n_max = 5000;
  double h = 0;  // 0 = auto (diameter/512 flat, 1/1024 torus)
  std::int64_t orbit_k = 1000000;
  std::int64_t n_points = 100000;
  std::int64_t probes = 512;
  std::vector<std::int64_t> snapshots;
  std::string out = "out";

  std::optional<MapSpec> map;
  std::optional<RandomDrSpec> random_dr;
  std::optional<ItinerarySpec> itinerary;
  std::optional<SweepSpec> sweep;
  std::optional<RenderSpec> render;

  double resolved_h() const;
};

// Strict parsing: unknown keys anywhere reject the config with ConfigError.
ExperimentConfig parse_config_text(const std::string& json_text);
std::string config_to_text(const ExperimentConfig& cfg);

// Shipped parameter presets reproducing the qualitative figure regimes.
ExperimentConfig make_preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace pwt

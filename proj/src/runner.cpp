#include "pwtlab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include <json.hpp>

#include "pwtlab/attractor.hpp"
#include "pwtlab/io.hpp"
#include "pwtlab/rng.hpp"

namespace pwt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

json trace_to_json(const IterationTrace& trace) {
  json j;
  j["status"] = trace.status == StabStatus::Stabilized ? "Stabilized" : "MaxIterReached";
  if (trace.stabilized_at) j["stabilized_at"] = *trace.stabilized_at;
  j["iterates"] = trace.rows.size();
  j["h"] = trace.h;
  if (!trace.rows.empty()) j["final_measure"] = trace.rows.back().measure;
  return j;
}

void write_trace_csv(const IterationTrace& trace, const std::string& path) {
  CsvWriter csv(path, {"n", "measure", "occupied", "changed"});
  for (const TraceRow& r : trace.rows)
    csv.row({std::to_string(r.n), fmt_double(r.measure), std::to_string(r.occupied),
             std::to_string(r.changed)});
}

json pieces_to_json(const PieceDecomposition& dec) {
  json arr = json::array();
  for (const PieceMeasure& p : dec.pieces) {
    json e;
    e["piece"] = p.piece;
    e["measure"] = p.measure;
    e["normalized"] = p.normalized;
    arr.push_back(e);
  }
  json j;
  j["pieces"] = arr;
  j["total_measure"] = dec.total;
  return j;
}

json covering_to_json(const CoveringReport& rep) {
  json j;
  json hist = json::array();
  for (const auto& [xi, count] : rep.xi_histogram) hist.push_back({xi, count});
  j["xi_histogram"] = hist;
  j["probes_included"] = rep.probes_included;
  j["probes_excluded"] = rep.probes_excluded;
  j["mode_xi"] = rep.mode_xi;
  j["mode_fraction"] = rep.mode_fraction;
  j["volume_ratio"] = rep.volume_ratio;
  if (rep.ell)
    j["ell"] = *rep.ell;
  else
    j["ell"] = "unresolved";
  return j;
}

struct MapRun {
  IterationTrace trace;
  OccupancyGrid raster;          // 2D / raster runs
  RatArcUnion exact_attractor;   // 1D exact runs
  bool exact = false;
  bool has_raster = false;
};

SnapshotFn snapshot_writer(const ExperimentConfig& cfg) {
  if (cfg.snapshots.empty()) return nullptr;
  auto wanted = cfg.snapshots;
  std::sort(wanted.begin(), wanted.end());
  const std::string dir = cfg.out;
  return [wanted, dir](std::int64_t n, const OccupancyGrid& grid) {
    if (std::binary_search(wanted.begin(), wanted.end(), n)) {
      char name[64];
      std::snprintf(name, sizeof(name), "snap_%06lld.pgm", static_cast<long long>(n));
      write_pgm(grid, join_path(dir, name));
    }
  };
}

MapRun run_forward(const ExperimentConfig& cfg) {
  MapRun out;
  const MapSpec& spec = *cfg.map;
  const SnapshotFn snap = snapshot_writer(cfg);
  if (const auto* m1 = std::get_if<Map1DSpec>(&spec)) {
    if (m1->exact) {
      auto res = forward_images_exact(m1->exact_map(), cfg.n_max);
      out.trace = std::move(res.trace);
      out.exact_attractor = std::move(res.attractor);
      out.exact = true;
    } else {
      auto res = forward_images_raster(m1->float_map(), cfg.resolved_h(), cfg.n_max);
      out.trace = std::move(res.trace);
      out.raster = std::move(res.attractor);
      out.has_raster = true;
    }
  } else if (const auto* dv = std::get_if<DiskVoronoiSpec>(&spec)) {
    auto res = forward_images_raster(dv->map(), cfg.resolved_h(), cfg.n_max, snap);
    out.trace = std::move(res.trace);
    out.raster = std::move(res.attractor);
    out.has_raster = true;
  } else if (const auto* td = std::get_if<TorusDrSpec>(&spec)) {
    auto res = torus_forward_images(td->resolved(), cfg.resolved_h(), cfg.n_max, snap);
    out.trace = std::move(res.trace);
    out.raster = std::move(res.attractor);
    out.has_raster = true;
  } else {
    const auto& sk = std::get<SkewSpec>(spec);
    auto res = torus_forward_images(sk.map, cfg.resolved_h(), cfg.n_max, snap);
    out.trace = std::move(res.trace);
    out.raster = std::move(res.attractor);
    out.has_raster = true;
  }
  return out;
}

json arcs_to_json(const RatArcUnion& u) {
  json arr = json::array();
  for (const auto& [a, b] : u.arcs()) arr.push_back({a.str(), b.str()});
  return arr;
}

void base_report(json& rep, const ExperimentConfig& cfg) {
  rep["mode"] = mode_name(cfg.mode);
  rep["seed"] = cfg.seed;
  rep["rng"] = Rng::kAlgorithm;
  rep["config"] = json::parse(config_to_text(cfg));
}

void write_report(const json& rep, const ExperimentConfig& cfg) {
  write_text_file(join_path(cfg.out, "report.json"), rep.dump(2) + "\n");
}

int run_validate(const ExperimentConfig& cfg) {
  json rep;
  base_report(rep, cfg);
  MapValidation v;
  if (const auto* m1 = std::get_if<Map1DSpec>(&*cfg.map)) {
    v = m1->exact ? validate_map(m1->exact_map()) : validate_map(m1->float_map());
  } else if (const auto* dv = std::get_if<DiskVoronoiSpec>(&*cfg.map)) {
    v = validate_map(dv->map(), cfg.n_points, cfg.seed);
  } else if (const auto* td = std::get_if<TorusDrSpec>(&*cfg.map)) {
    v = validate_map(torus_dr_as_map(td->resolved()), cfg.n_points, cfg.seed);
  } else {
    // Skew products are total on the torus by construction; the interesting
    // validation is the bounded irrationality of the base angle.
    const auto& sk = std::get<SkewSpec>(*cfg.map);
    v.covered_fraction = 1;
    v.samples = cfg.n_points;
    const auto verdict = rational_independence_1d(sk.map.base_angle, 1.0, 1000);
    rep["base_angle_independent_up_to_1000"] = verdict.independent;
  }
  rep["validation"] = {{"covered_fraction", v.covered_fraction},
                       {"overlap_fraction", v.overlap_fraction},
                       {"maps_outside_fraction", v.maps_outside_fraction},
                       {"samples", v.samples},
                       {"ok", v.ok()}};
  write_report(rep, cfg);
  return v.ok() ? 0 : 4;
}

int run_iterate(const ExperimentConfig& cfg, bool full_attractor) {
  json rep;
  base_report(rep, cfg);
  MapRun run = run_forward(cfg);
  rep["trace"] = trace_to_json(run.trace);
  write_trace_csv(run.trace, join_path(cfg.out, "trace.csv"));

  if (run.exact) {
    rep["attractor_arcs"] = arcs_to_json(run.exact_attractor);
    rep["attractor_measure"] = run.exact_attractor.measure().to_double();
    std::string arcs_text;
    for (const auto& [a, b] : run.exact_attractor.arcs())
      arcs_text += a.str() + " " + b.str() + "\n";
    write_text_file(join_path(cfg.out, "attractor_arcs.txt"), arcs_text);
  }
  if (run.has_raster) {
    write_pgm(run.raster, join_path(cfg.out, "attractor.pgm"));
    write_grid_file(run.raster, join_path(cfg.out, "attractor.grid"));
  }

  if (full_attractor && run.trace.status == StabStatus::Stabilized) {
    const MapSpec& spec = *cfg.map;
    if (const auto* m1 = std::get_if<Map1DSpec>(&spec); m1 && m1->exact) {
      const auto map = m1->exact_map();
      Exact1DResult res;
      res.trace = run.trace;
      res.attractor = run.exact_attractor;
      rep["decomposition"] = pieces_to_json(attractor_pieces(map, res));
      if (map.branches() == 2) {
        const auto L = lattice_from_vectors_1d<Rational>(map.vectors);
        rep["covering"] = covering_to_json(covering_number(res.attractor, L, cfg.probes, cfg.seed));
        const auto tiling = tiling_check(res.attractor, L);
        rep["tiling"] = {{"coverage_fraction", tiling.coverage_fraction},
                         {"overlap_fraction", tiling.overlap_fraction}};
        rep["torus_volume"] = L.det_abs().to_double();
      }
    } else if (const auto* m1f = std::get_if<Map1DSpec>(&spec)) {
      RasterResult res;
      res.trace = run.trace;
      res.attractor = run.raster;
      rep["decomposition"] = pieces_to_json(attractor_pieces(m1f->float_map(), res));
    } else if (const auto* td = std::get_if<TorusDrSpec>(&spec)) {
      RasterResult res;
      res.trace = run.trace;
      res.attractor = run.raster;
      rep["decomposition"] = pieces_to_json(attractor_pieces(torus_dr_as_map(td->resolved()), res));
    } else if (const auto* dv = std::get_if<DiskVoronoiSpec>(&spec)) {
      const auto map = dv->map();
      RasterResult res;
      res.trace = run.trace;
      res.attractor = run.raster;
      rep["decomposition"] = pieces_to_json(attractor_pieces(map, res));
      const auto L = lattice_from_vectors_2d<double>(map.vectors);
      rep["covering"] = covering_to_json(covering_number(res.attractor, L, cfg.probes, cfg.seed));
      const auto tiling = tiling_check(res.attractor, L);
      rep["tiling"] = {{"coverage_fraction", tiling.coverage_fraction},
                       {"overlap_fraction", tiling.overlap_fraction}};
      rep["torus_volume"] = L.det_abs();
    }
  }
  write_report(rep, cfg);
  return 0;
}

int run_alpha(const ExperimentConfig& cfg) {
  json rep;
  base_report(rep, cfg);
  const MapSpec& spec = *cfg.map;
  json alphas = json::array();
  IndependenceVerdict verdict;
  if (const auto* m1 = std::get_if<Map1DSpec>(&spec)) {
    if (m1->vectors.size() != 2)
      throw Error(Err::InvalidArgument, "alpha mode needs m = d+1 vectors");
    if (m1->exact) {
      const auto a = alpha_coefficients_1d(m1->vectors[0], m1->vectors[1]);
      for (const auto& v : a) alphas.push_back(v.str());
      verdict = rational_independence_1d(m1->vectors[0], m1->vectors[1], 1000000);
    } else {
      const auto a = alpha_coefficients_1d(m1->vectors[0].to_double(), m1->vectors[1].to_double());
      for (const auto& v : a) alphas.push_back(v);
      verdict = rational_independence_1d(m1->vectors[0].to_double(), m1->vectors[1].to_double(),
                                         1000000);
    }
  } else if (const auto* dv = std::get_if<DiskVoronoiSpec>(&spec)) {
    const auto map = dv->map();
    const auto a = alpha_coefficients_2d(map.vectors[0], map.vectors[1], map.vectors[2]);
    for (const auto& v : a) alphas.push_back(v);
    verdict = rational_independence_2d(map.vectors[0], map.vectors[1], map.vectors[2], 1000);
  } else {
    throw Error(Err::InvalidArgument, "alpha mode supports map1d and disk_voronoi maps");
  }
  rep["alpha"] = alphas;
  json iv;
  iv["independent"] = verdict.independent;
  iv["bound"] = verdict.bound;
  if (!verdict.independent) iv["witness"] = verdict.witness;
  rep["independence"] = iv;
  write_report(rep, cfg);
  return 0;
}

int run_random_dr(const ExperimentConfig& cfg) {
  json rep;
  base_report(rep, cfg);
  const RandomDrSpec& s = *cfg.random_dr;
  DoubleRotationQ T2{s.alpha, s.beta, s.delta};
  const RandomRun run = random_compose(s.alpha, T2, s.p, cfg.seed, s.n, s.eps, s.keep_tail);

  {
    CsvWriter csv(join_path(cfg.out, "run.csv"), {"n", "measure", "symbol"});
    csv.row({"0", fmt_rational(run.measure_trace[0]), "0"});
    for (std::int64_t i = 1; i <= run.n; ++i)
      csv.row({std::to_string(i), fmt_rational(run.measure_trace[static_cast<std::size_t>(i)]),
               std::to_string(run.symbols[static_cast<std::size_t>(i - 1)])});
  }
  json fb = json::array();
  for (const auto& [eps, first] : run.first_below) fb.push_back({eps.str(), first});
  rep["first_below"] = fb;
  rep["final_measure"] = run.measure_trace.back().to_double();
  rep["rng"] = run.rng_algorithm;

  if (s.keep_tail) {
    const Histogram hist = attractor_histogram(run, s.bins);
    CsvWriter csv(join_path(cfg.out, "histogram.csv"), {"bin", "lo", "hi", "mass"});
    for (int b = 0; b < s.bins; ++b)
      csv.row({std::to_string(b), fmt_rational(Rational(b, s.bins)),
               fmt_rational(Rational(b + 1, s.bins)), fmt_double(hist.masses[static_cast<std::size_t>(b)])});
    rep["mean_tail_measure"] = hist.mean_tail_measure;
    write_pgm(histogram_to_grid(hist.masses, 200), join_path(cfg.out, "histogram.pgm"));
  }
  write_report(rep, cfg);
  return 0;
}

int run_arc_itinerary(const ExperimentConfig& cfg) {
  json rep;
  base_report(rep, cfg);
  const ItinerarySpec& s = *cfg.itinerary;
  DoubleRotationQ T2{s.alpha, s.beta, s.delta};
  const ArcItineraryResult res = arc_itinerary(s.alpha, T2, s.target_start, s.target_len,
                                               s.rotation_budget, s.cut_budget);
  rep["verified"] = res.verified;
  rep["symbol_count"] = res.total_symbols;
  rep["stage1_blocks"] = res.stage1_gap_trace.size();
  rep["bridge_blocks"] = res.bridge_blocks;
  rep["stage2_rounds"] = res.stage2_rounds;
  rep["stage2_cuts"] = res.stage2_cuts;
  rep["final_arcs"] = arcs_to_json(res.final_image);

  // Certificate: symbols in application order, run-length encoded as
  // "<symbol>x<repeat>", plus the exact final arcs.
  std::string cert = "target " + s.target_start.str() + " + " + s.target_len.str() + "\n";
  cert += "verified " + std::string(res.verified ? "true" : "false") + "\n";
  cert += "final_image";
  for (const auto& [a, b] : res.final_image.arcs()) cert += " [" + a.str() + ", " + b.str() + ")";
  cert += "\nsymbols (application order, run-length encoded)\n";
  std::size_t on_line = 0;
  for (const auto& [sym, count] : res.blocks) {
    cert += std::to_string(sym);
    if (count > 1) cert += "x" + std::to_string(count);
    cert += ++on_line % 16 == 0 ? '\n' : ' ';
  }
  cert += "\n";
  write_text_file(join_path(cfg.out, "certificate.txt"), cert);
  write_report(rep, cfg);
  return 0;
}

// Applies a sweep parameter to a copy of the map spec.
MapSpec apply_param(const MapSpec& spec, const std::string& param, double value) {
  MapSpec out = spec;
  if (auto* td = std::get_if<TorusDrSpec>(&out)) {
    if (param == "gamma1.x") td->map.gamma1.x = value;
    else if (param == "gamma1.y") td->map.gamma1.y = value;
    else if (param == "gamma2.x") td->map.gamma2.x = value;
    else if (param == "gamma2.y") td->map.gamma2.y = value;
    else throw Error(Err::ConfigError, "unknown sweep param '" + param + "' for torus maps");
    return out;
  }
  if (auto* m1 = std::get_if<Map1DSpec>(&out)) {
    const Rational rv = Rational::from_double(value, 1000000);
    if (param == "v0") m1->vectors[0] = rv;
    else if (param == "v1") m1->vectors[1] = rv;
    else throw Error(Err::ConfigError, "unknown sweep param '" + param + "' for 1D maps");
    return out;
  }
  throw Error(Err::ConfigError, "sweep supports map1d and torus_double_rotation maps");
}

struct SweepNode {
  std::int64_t i = 0, j = 0;
  double p1 = 0, p2 = 0;
  std::string status;
  std::int64_t stabilized_at = -1;
  double final_measure = 0;
  std::string ell = "";
};

int run_sweep(const ExperimentConfig& cfg) {
  json rep;
  base_report(rep, cfg);
  const SweepSpec& s = *cfg.sweep;
  const bool two_dim = !s.param2.empty();
  const std::int64_t total = s.steps * (two_dim ? s.steps2 : 1);

  auto value_at = [](double from, double to, std::int64_t steps, std::int64_t i) {
    return steps <= 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
  };

  std::vector<SweepNode> nodes(static_cast<std::size_t>(total));
  auto run_node = [&](std::int64_t idx) {
    SweepNode& node = nodes[static_cast<std::size_t>(idx)];
    node.i = idx % s.steps;
    node.j = idx / s.steps;
    node.p1 = value_at(s.from, s.to, s.steps, node.i);
    node.p2 = two_dim ? value_at(s.from2, s.to2, s.steps2, node.j) : 0.0;
    try {
      MapSpec spec = apply_param(*cfg.map, s.param, node.p1);
      if (two_dim) spec = apply_param(spec, s.param2, node.p2);
      ExperimentConfig sub = cfg;
      sub.map = spec;
      sub.snapshots.clear();
      MapRun run = run_forward(sub);
      node.status = run.trace.status == StabStatus::Stabilized ? "Stabilized" : "MaxIterReached";
      if (run.trace.stabilized_at) node.stabilized_at = *run.trace.stabilized_at;
      if (!run.trace.rows.empty()) node.final_measure = run.trace.rows.back().measure;
      // Torus-factor multiple, available for stabilized m = d+1 maps.
      if (run.trace.status == StabStatus::Stabilized) {
        if (const auto* m1 = std::get_if<Map1DSpec>(&spec); m1 && m1->vectors.size() == 2) {
          const double det = std::abs((m1->vectors[1] - m1->vectors[0]).to_double());
          if (det > 0) {
            const double ratio = node.final_measure / det;
            if (std::abs(ratio - std::round(ratio)) < 0.05 && std::round(ratio) >= 1)
              node.ell = std::to_string(static_cast<std::int64_t>(std::round(ratio)));
          }
        }
      }
    } catch (const Error& e) {
      node.status = std::string("error:") + err_code_name(e.code());
    }
  };

  const int threads = resolve_threads(cfg.threads);
  if (threads <= 1 || total == 1) {
    for (std::int64_t idx = 0; idx < total; ++idx) run_node(idx);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::int64_t idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) run_node(idx);
      });
    }
    for (auto& th : pool) th.join();
  }

  CsvWriter csv(join_path(cfg.out, "sweep.csv"),
                {"i", "j", s.param, two_dim ? s.param2 : "param2", "status", "stabilized_at",
                 "final_measure", "ell"});
  std::int64_t stabilized_count = 0;
  for (const SweepNode& n : nodes) {
    if (n.status == "Stabilized") ++stabilized_count;
    csv.row({std::to_string(n.i), std::to_string(n.j), fmt_double(n.p1), fmt_double(n.p2), n.status,
             std::to_string(n.stabilized_at), fmt_double(n.final_measure), n.ell});
  }
  rep["nodes"] = total;
  rep["stabilized"] = stabilized_count;
  write_report(rep, cfg);
  return 0;
}

int run_render(const ExperimentConfig& cfg) {
  json rep;
  base_report(rep, cfg);
  const OccupancyGrid grid = read_grid_file(cfg.render->input);
  write_pgm(grid, join_path(cfg.out, cfg.render->output));
  rep["rendered"] = cfg.render->output;
  rep["cells"] = grid.popcount();
  write_report(rep, cfg);
  return 0;
}

}  // namespace

int resolve_threads(int configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("PWT_LAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

int exit_code_for(Err code) {
  switch (code) {
    case Err::ConfigError: return 2;
    case Err::IoError: return 3;
    default: return 4;
  }
}

int run_experiment(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out);
  write_text_file(join_path(cfg.out, "config.json"), config_to_text(cfg));
  switch (cfg.mode) {
    case Mode::Validate: return run_validate(cfg);
    case Mode::Iterate: return run_iterate(cfg, false);
    case Mode::Attractor: return run_iterate(cfg, true);
    case Mode::Alpha: return run_alpha(cfg);
    case Mode::RandomDr: return run_random_dr(cfg);
    case Mode::ArcItinerary: return run_arc_itinerary(cfg);
    case Mode::Sweep: return run_sweep(cfg);
    case Mode::Render: return run_render(cfg);
  }
  throw Error(Err::ConfigError, "unhandled mode");
}

}  // namespace pwt

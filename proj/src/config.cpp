#include "pwtlab/config.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "pwtlab/set_approx.hpp"

namespace pwt {

using nlohmann::json;

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Validate: return "validate";
    case Mode::Iterate: return "iterate";
    case Mode::Attractor: return "attractor";
    case Mode::Alpha: return "alpha";
    case Mode::RandomDr: return "random-dr";
    case Mode::ArcItinerary: return "arc-itinerary";
    case Mode::Sweep: return "sweep";
    case Mode::Render: return "render";
  }
  return "?";
}

Mode mode_from_name(const std::string& name) {
  for (Mode m : {Mode::Validate, Mode::Iterate, Mode::Attractor, Mode::Alpha, Mode::RandomDr,
                 Mode::ArcItinerary, Mode::Sweep, Mode::Render})
    if (name == mode_name(m)) return m;
  throw Error(Err::ConfigError, "unknown mode '" + name + "'");
}

namespace {

[[noreturn]] void bad(const std::string& why) { throw Error(Err::ConfigError, why); }

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(std::string(where) + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) bad(std::string("unknown key '") + it.key() + "' in " + where);
  }
}

Rational get_rational(const json& j, const std::string& ctx) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  bad("rational value for " + ctx + " must be an integer or a string like \"3/10\" or \"0.3\"");
}

double get_double(const json& j, const std::string& ctx) {
  if (!j.is_number()) bad(ctx + " must be a number");
  return j.get<double>();
}

Vec2d get_vec2(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 2) bad(ctx + " must be a 2-element array");
  return {get_double(j[0], ctx + "[0]"), get_double(j[1], ctx + "[1]")};
}

std::vector<Rational> get_rational_list(const json& j, const std::string& ctx) {
  if (!j.is_array()) bad(ctx + " must be an array");
  std::vector<Rational> out;
  for (const auto& e : j) out.push_back(get_rational(e, ctx));
  return out;
}

MapSpec parse_map(const json& j) {
  if (!j.is_object() || !j.contains("type")) bad("map needs a 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "map1d") {
    check_keys(j, "map", {"type", "cuts", "vectors", "arithmetic"});
    Map1DSpec s;
    s.cuts = get_rational_list(j.at("cuts"), "map.cuts");
    s.vectors = get_rational_list(j.at("vectors"), "map.vectors");
    if (j.contains("arithmetic")) {
      const std::string a = j.at("arithmetic").get<std::string>();
      if (a != "exact" && a != "float") bad("map.arithmetic must be 'exact' or 'float'");
      s.exact = a == "exact";
    }
    s.exact_map().check_well_formed();
    return s;
  }
  if (type == "disk_voronoi") {
    check_keys(j, "map", {"type", "sites", "gamma", "radius"});
    DiskVoronoiSpec s;
    if (!j.contains("sites") || !j.at("sites").is_array() || j.at("sites").size() != 3)
      bad("disk_voronoi needs exactly 3 sites");
    for (const auto& e : j.at("sites")) s.sites.push_back(get_vec2(e, "map.sites[]"));
    s.gamma = get_vec2(j.at("gamma"), "map.gamma");
    if (j.contains("radius")) s.radius = get_double(j.at("radius"), "map.radius");
    s.map().check_well_formed();
    return s;
  }
  if (type == "torus_double_rotation") {
    check_keys(j, "map", {"type", "rect_lo", "rect_size", "gamma1", "gamma2", "commensurate"});
    TorusDrSpec s;
    s.map.rect_lo = get_vec2(j.at("rect_lo"), "map.rect_lo");
    s.map.rect_size = get_vec2(j.at("rect_size"), "map.rect_size");
    s.map.gamma1 = get_vec2(j.at("gamma1"), "map.gamma1");
    s.map.gamma2 = get_vec2(j.at("gamma2"), "map.gamma2");
    if (j.contains("commensurate")) s.commensurate = j.at("commensurate").get<std::int64_t>();
    s.map.check();
    return s;
  }
  if (type == "skew_product") {
    check_keys(j, "map", {"type", "base_angle", "alpha", "beta", "delta"});
    SkewSpec s;
    s.map.base_angle = get_double(j.at("base_angle"), "map.base_angle");
    s.map.fiber_alpha = get_double(j.at("alpha"), "map.alpha");
    s.map.fiber_beta = get_double(j.at("beta"), "map.beta");
    s.map.fiber_delta = get_double(j.at("delta"), "map.delta");
    s.map.check();
    return s;
  }
  bad("unknown map type '" + type + "'");
}

json map_to_json(const MapSpec& spec) {
  json j;
  if (const auto* m1 = std::get_if<Map1DSpec>(&spec)) {
    j["type"] = "map1d";
    json cuts = json::array(), vecs = json::array();
    for (const auto& c : m1->cuts) cuts.push_back(c.str());
    for (const auto& v : m1->vectors) vecs.push_back(v.str());
    j["cuts"] = cuts;
    j["vectors"] = vecs;
    j["arithmetic"] = m1->exact ? "exact" : "float";
  } else if (const auto* dv = std::get_if<DiskVoronoiSpec>(&spec)) {
    j["type"] = "disk_voronoi";
    json sites = json::array();
    for (const auto& s : dv->sites) sites.push_back({s.x, s.y});
    j["sites"] = sites;
    j["gamma"] = {dv->gamma.x, dv->gamma.y};
    j["radius"] = dv->radius;
  } else if (const auto* td = std::get_if<TorusDrSpec>(&spec)) {
    j["type"] = "torus_double_rotation";
    j["rect_lo"] = {td->map.rect_lo.x, td->map.rect_lo.y};
    j["rect_size"] = {td->map.rect_size.x, td->map.rect_size.y};
    j["gamma1"] = {td->map.gamma1.x, td->map.gamma1.y};
    j["gamma2"] = {td->map.gamma2.x, td->map.gamma2.y};
    j["commensurate"] = td->commensurate;
  } else {
    const auto& sk = std::get<SkewSpec>(spec);
    j["type"] = "skew_product";
    j["base_angle"] = sk.map.base_angle;
    j["alpha"] = sk.map.fiber_alpha;
    j["beta"] = sk.map.fiber_beta;
    j["delta"] = sk.map.fiber_delta;
  }
  return j;
}

}  // namespace

Map1D<Rational> Map1DSpec::exact_map() const {
  Map1D<Rational> m{cuts, vectors};
  m.check_well_formed();
  return m;
}

Map1D<double> Map1DSpec::float_map() const {
  Map1D<double> m;
  for (const auto& c : cuts) m.cuts.push_back(c.to_double());
  for (const auto& v : vectors) m.vectors.push_back(v.to_double());
  m.check_well_formed();
  return m;
}

double DiskVoronoiSpec::resolved_radius() const {
  if (radius > 0) return radius;
  // Smallest radius with a provable return bound: for |x - gamma| = R the
  // step shortens the distance once R >= max(d_max, d_max^2 / (2 r_in)),
  // where r_in is the distance from gamma to the triangle sides.
  double d_max = 0;
  for (const auto& s : sites) d_max = std::max(d_max, norm(gamma - s));
  double r_in = 1e300;
  for (int i = 0; i < 3; ++i) {
    const Vec2d a = sites[static_cast<std::size_t>(i)];
    const Vec2d b = sites[static_cast<std::size_t>((i + 1) % 3)];
    const Vec2d ab = b - a;
    const double t = std::clamp((gamma - a).dot(ab) / ab.norm2(), 0.0, 1.0);
    const Vec2d foot = a + t * ab;
    r_in = std::min(r_in, norm(gamma - foot));
  }
  if (!(r_in > 0)) throw Error(Err::ConfigError, "gamma must lie strictly inside the site triangle");
  return std::max(d_max, d_max * d_max / (2 * r_in)) + 0.05;
}

Map2D<double> DiskVoronoiSpec::map() const {
  if (sites.size() != 3) throw Error(Err::ConfigError, "disk_voronoi needs exactly 3 sites");
  Map2D<double> m;
  const double R = resolved_radius();
  m.domain = DiskRegion{gamma, R};
  auto shared = std::make_shared<const std::vector<Vec2d>>(sites);
  for (int i = 0; i < 3; ++i) {
    m.pieces.push_back(VoronoiPiece<double>{shared, i});
    m.vectors.push_back(gamma - sites[static_cast<std::size_t>(i)]);
  }
  return m;
}

double ExperimentConfig::resolved_h() const {
  if (h > 0) return h;
  if (map) {
    if (std::holds_alternative<TorusDrSpec>(*map) || std::holds_alternative<SkewSpec>(*map))
      return 1.0 / 1024.0;
    if (const auto* dv = std::get_if<DiskVoronoiSpec>(&*map))
      return 2.0 * dv->resolved_radius() / kDefaultGridDivisor;
    if (const auto* m1 = std::get_if<Map1DSpec>(&*map)) {
      const double len = (m1->cuts.back() - m1->cuts.front()).to_double();
      return len / kDefaultGridDivisor;
    }
  }
  return 1.0 / 1024.0;
}

ExperimentConfig parse_config_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"mode", "seed", "threads", "n_max", "h", "orbit_k", "n_points", "probes", "snapshots",
              "out", "map", "random", "itinerary", "sweep", "render"});
  ExperimentConfig cfg;
  if (!j.contains("mode")) bad("config needs a 'mode'");
  cfg.mode = mode_from_name(j.at("mode").get<std::string>());
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
  if (j.contains("n_max")) cfg.n_max = j.at("n_max").get<std::int64_t>();
  if (j.contains("h")) cfg.h = get_double(j.at("h"), "h");
  if (j.contains("orbit_k")) cfg.orbit_k = j.at("orbit_k").get<std::int64_t>();
  if (j.contains("n_points")) cfg.n_points = j.at("n_points").get<std::int64_t>();
  if (j.contains("probes")) cfg.probes = j.at("probes").get<std::int64_t>();
  if (j.contains("snapshots"))
    for (const auto& e : j.at("snapshots")) cfg.snapshots.push_back(e.get<std::int64_t>());
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();

  if (cfg.n_max < 1) bad("n_max must be >= 1");
  if (cfg.h < 0) bad("h must be positive (or omitted for the default)");
  if (j.contains("h") && !(j.at("h").get<double>() > 0)) bad("h must be positive");
  if (cfg.orbit_k < 1) bad("orbit_k must be >= 1");
  if (cfg.n_points < 1) bad("n_points must be >= 1");
  if (cfg.probes < 1) bad("probes must be >= 1");
  if (cfg.threads < 0) bad("threads must be >= 0");

  if (j.contains("map")) cfg.map = parse_map(j.at("map"));

  if (j.contains("random")) {
    const json& r = j.at("random");
    check_keys(r, "random", {"alpha", "beta", "delta", "p", "n", "eps", "bins", "keep_tail"});
    RandomDrSpec s;
    s.alpha = get_rational(r.at("alpha"), "random.alpha");
    s.beta = get_rational(r.at("beta"), "random.beta");
    s.delta = get_rational(r.at("delta"), "random.delta");
    if (r.contains("p")) s.p = get_double(r.at("p"), "random.p");
    if (r.contains("n")) s.n = r.at("n").get<std::int64_t>();
    if (r.contains("eps")) s.eps = get_rational_list(r.at("eps"), "random.eps");
    if (r.contains("bins")) s.bins = r.at("bins").get<int>();
    if (r.contains("keep_tail")) s.keep_tail = r.at("keep_tail").get<bool>();
    if (s.p < 0 || s.p > 1) bad("random.p must be in [0,1]");
    if (s.n < 1) bad("random.n must be >= 1");
    if (s.bins < 1) bad("random.bins must be >= 1");
    cfg.random_dr = std::move(s);
  }

  if (j.contains("itinerary")) {
    const json& r = j.at("itinerary");
    check_keys(r, "itinerary",
               {"alpha", "beta", "delta", "target_start", "target_len", "rotation_budget", "cut_budget"});
    ItinerarySpec s;
    s.alpha = get_rational(r.at("alpha"), "itinerary.alpha");
    s.beta = get_rational(r.at("beta"), "itinerary.beta");
    s.delta = get_rational(r.at("delta"), "itinerary.delta");
    s.target_start = get_rational(r.at("target_start"), "itinerary.target_start");
    s.target_len = get_rational(r.at("target_len"), "itinerary.target_len");
    if (r.contains("rotation_budget")) s.rotation_budget = r.at("rotation_budget").get<std::int64_t>();
    if (r.contains("cut_budget")) s.cut_budget = r.at("cut_budget").get<std::int64_t>();
    cfg.itinerary = std::move(s);
  }

  if (j.contains("sweep")) {
    const json& r = j.at("sweep");
    check_keys(r, "sweep", {"param", "from", "to", "steps", "param2", "from2", "to2", "steps2"});
    SweepSpec s;
    s.param = r.at("param").get<std::string>();
    s.from = get_double(r.at("from"), "sweep.from");
    s.to = get_double(r.at("to"), "sweep.to");
    s.steps = r.at("steps").get<std::int64_t>();
    if (r.contains("param2")) {
      s.param2 = r.at("param2").get<std::string>();
      s.from2 = get_double(r.at("from2"), "sweep.from2");
      s.to2 = get_double(r.at("to2"), "sweep.to2");
      s.steps2 = r.at("steps2").get<std::int64_t>();
    }
    if (s.steps < 1 || s.steps2 < 1) bad("sweep steps must be >= 1");
    cfg.sweep = std::move(s);
  }

  if (j.contains("render")) {
    const json& r = j.at("render");
    check_keys(r, "render", {"input", "output"});
    RenderSpec s;
    s.input = r.at("input").get<std::string>();
    s.output = r.at("output").get<std::string>();
    cfg.render = std::move(s);
  }

  // Mode-specific requirements.
  switch (cfg.mode) {
    case Mode::Validate:
    case Mode::Iterate:
    case Mode::Attractor:
    case Mode::Alpha:
      if (!cfg.map) bad(std::string(mode_name(cfg.mode)) + " mode needs a 'map'");
      break;
    case Mode::RandomDr:
      if (!cfg.random_dr) bad("random-dr mode needs a 'random' section");
      break;
    case Mode::ArcItinerary:
      if (!cfg.itinerary) bad("arc-itinerary mode needs an 'itinerary' section");
      break;
    case Mode::Sweep:
      if (!cfg.map || !cfg.sweep) bad("sweep mode needs 'map' and 'sweep' sections");
      break;
    case Mode::Render:
      if (!cfg.render) bad("render mode needs a 'render' section");
      break;
  }
  return cfg;
}

std::string config_to_text(const ExperimentConfig& cfg) {
  json j;
  j["mode"] = mode_name(cfg.mode);
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["n_max"] = cfg.n_max;
  if (cfg.h > 0) j["h"] = cfg.h;
  j["orbit_k"] = cfg.orbit_k;
  j["n_points"] = cfg.n_points;
  j["probes"] = cfg.probes;
  if (!cfg.snapshots.empty()) j["snapshots"] = cfg.snapshots;
  j["out"] = cfg.out;
  if (cfg.map) j["map"] = map_to_json(*cfg.map);
  if (cfg.random_dr) {
    json r;
    r["alpha"] = cfg.random_dr->alpha.str();
    r["beta"] = cfg.random_dr->beta.str();
    r["delta"] = cfg.random_dr->delta.str();
    r["p"] = cfg.random_dr->p;
    r["n"] = cfg.random_dr->n;
    json eps = json::array();
    for (const auto& e : cfg.random_dr->eps) eps.push_back(e.str());
    r["eps"] = eps;
    r["bins"] = cfg.random_dr->bins;
    r["keep_tail"] = cfg.random_dr->keep_tail;
    j["random"] = r;
  }
  if (cfg.itinerary) {
    json r;
    r["alpha"] = cfg.itinerary->alpha.str();
    r["beta"] = cfg.itinerary->beta.str();
    r["delta"] = cfg.itinerary->delta.str();
    r["target_start"] = cfg.itinerary->target_start.str();
    r["target_len"] = cfg.itinerary->target_len.str();
    r["rotation_budget"] = cfg.itinerary->rotation_budget;
    r["cut_budget"] = cfg.itinerary->cut_budget;
    j["itinerary"] = r;
  }
  if (cfg.sweep) {
    json r;
    r["param"] = cfg.sweep->param;
    r["from"] = cfg.sweep->from;
    r["to"] = cfg.sweep->to;
    r["steps"] = cfg.sweep->steps;
    if (!cfg.sweep->param2.empty()) {
      r["param2"] = cfg.sweep->param2;
      r["from2"] = cfg.sweep->from2;
      r["to2"] = cfg.sweep->to2;
      r["steps2"] = cfg.sweep->steps2;
    }
    j["sweep"] = r;
  }
  if (cfg.render) {
    json r;
    r["input"] = cfg.render->input;
    r["output"] = cfg.render->output;
    j["render"] = r;
  }
  return j.dump(2) + "\n";
}

// --- presets -------------------------------------------------------------------
// Calibrated parameter sets reproducing the qualitative regimes: fast finite
// type (m=3 disk), slow finite type and seemingly infinite type (m=4 torus
// double rotations), and a random double rotation.

ExperimentConfig make_preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.out = "preset-" + name;
  if (name == "disk3-fast") {
    cfg.mode = Mode::Attractor;
    DiskVoronoiSpec s;
    s.sites = {{-0.42, -0.31}, {0.48, -0.22}, {0.05, 0.47}};
    s.gamma = {0.03, -0.04};
    cfg.map = s;
    cfg.n_max = 200;
    cfg.h = 1.0 / 1024.0;
    cfg.snapshots = {1, 2, 4, 5};
    return cfg;
  }
  if (name == "torus4-slow") {
    cfg.mode = Mode::Iterate;
    TorusDrSpec s;
    s.map.rect_lo = {0.13, 0.22};
    s.map.rect_size = {0.47, 0.41};
    s.map.gamma1 = {0.2137288135593221, 0.7313559322033899};
    s.map.gamma2 = {0.6189830508474576, 0.1293220338983051};
    cfg.map = s;
    cfg.n_max = 5000;
    cfg.h = 1.0 / 1024.0;
    cfg.snapshots = {1, 5, 100};
    return cfg;
  }
  if (name == "torus4-infinite") {
    cfg.mode = Mode::Iterate;
    TorusDrSpec s;
    s.map.rect_lo = {0.0, 0.0};
    s.map.rect_size = {0.5, 0.5};
    s.map.gamma1 = {0.6180339887498949, 0.4142135623730951};
    s.map.gamma2 = {0.2301414213562373, 0.1788855421011233};
    cfg.map = s;
    cfg.n_max = 5000;
    cfg.h = 1.0 / 1024.0;
    cfg.snapshots = {1, 5, 100, 5000};
    return cfg;
  }
  if (name == "random-dr") {
    cfg.mode = Mode::RandomDr;
    RandomDrSpec s;
    s.alpha = Rational(414213562, 1000000000);
    s.beta = Rational(1, 10);
    s.delta = Rational(1, 2);
    s.p = 0.5;
    s.n = 2000;
    s.eps = {Rational(1, 100), Rational(1, 1000)};
    s.bins = 256;
    s.keep_tail = true;
    cfg.random_dr = s;
    return cfg;
  }
  throw Error(Err::ConfigError, "unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"disk3-fast", "torus4-slow", "torus4-infinite", "random-dr"};
}

}  // namespace pwt

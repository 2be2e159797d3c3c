#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <unistd.h>

#include "pwtlab/config.hpp"
#include "pwtlab/io.hpp"
#include "pwtlab/runner.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("pwtlab_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& name = "") const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("pgm bytes match the pinned encoding") {
  pwt::OccupancyGrid g(0, 0, 1, 2, 2);
  g.set(0, 0);
  g.set(1, 1);
  const auto bytes = pwt::pgm_bytes(g);
  const std::string header(bytes.begin(), bytes.begin() + 11);
  CHECK(header == "P5\n2 2\n255\n");
  REQUIRE(bytes.size() == 15);
  CHECK(bytes[11] == 0x00);
  CHECK(bytes[12] == 0xFF);
  CHECK(bytes[13] == 0xFF);
  CHECK(bytes[14] == 0x00);

  pwt::OccupancyGrid empty(0, 0, 1, 2, 2);
  const auto eb = pwt::pgm_bytes(empty);
  for (std::size_t i = 11; i < eb.size(); ++i) CHECK(eb[i] == 0xFF);

  CHECK(pwt::pgm_bytes(g) == pwt::pgm_bytes(g));  // byte-identical
}

TEST_CASE("grid file round trip") {
  TempDir tmp("grid");
  pwt::OccupancyGrid g(0.5, -1.0, 0.25, 5, 3);
  g.set(0, 0);
  g.set(4, 2);
  g.set(2, 1);
  pwt::write_grid_file(g, tmp.str("a.grid"));
  const auto back = pwt::read_grid_file(tmp.str("a.grid"));
  CHECK(back == g);
  CHECK(back.h() == g.h());
  CHECK(back.x0() == g.x0());
}

TEST_CASE("config: strict unknown-key rejection") {
  const std::string good = R"({"mode":"alpha","map":{"type":"map1d","cuts":["0","3/5","1"],"vectors":["3/10","-3/5"]}})";
  CHECK_NOTHROW(pwt::parse_config_text(good));
  const std::string bad1 = R"({"mode":"alpha","typo":1,"map":{"type":"map1d","cuts":["0","3/5","1"],"vectors":["3/10","-3/5"]}})";
  CHECK_THROWS_AS(pwt::parse_config_text(bad1), pwt::Error);
  const std::string bad2 = R"({"mode":"alpha","map":{"type":"map1d","cuts":["0","3/5","1"],"vectors":["3/10","-3/5"],"x":0}})";
  CHECK_THROWS_AS(pwt::parse_config_text(bad2), pwt::Error);
}

TEST_CASE("config: range validation") {
  const std::string negative_h =
      R"({"mode":"iterate","h":-0.001,"map":{"type":"map1d","cuts":["0","3/5","1"],"vectors":["3/10","-3/5"]}})";
  CHECK_THROWS_AS(pwt::parse_config_text(negative_h), pwt::Error);
  const std::string no_map = R"({"mode":"iterate"})";
  CHECK_THROWS_AS(pwt::parse_config_text(no_map), pwt::Error);
  const std::string bad_mode = R"({"mode":"fly"})";
  CHECK_THROWS_AS(pwt::parse_config_text(bad_mode), pwt::Error);
}

TEST_CASE("config round trip is stable") {
  const std::string text =
      R"({"mode":"random-dr","seed":7,"random":{"alpha":"414213562/1000000000","beta":"1/20","delta":"1/2","p":0.3,"n":500,"eps":["1/100"],"bins":64,"keep_tail":true}})";
  const auto cfg = pwt::parse_config_text(text);
  const std::string serialized = pwt::config_to_text(cfg);
  const auto cfg2 = pwt::parse_config_text(serialized);
  CHECK(pwt::config_to_text(cfg2) == serialized);
  CHECK(cfg2.seed == 7);
  CHECK(cfg2.random_dr->beta == pwt::Rational(1, 20));
}

TEST_CASE("alpha mode writes the expected report") {
  TempDir tmp("alpha");
  auto cfg = pwt::parse_config_text(
      R"({"mode":"alpha","map":{"type":"map1d","cuts":["0","3/5","1"],"vectors":["3/10","-3/5"]}})");
  cfg.out = tmp.str("run");
  CHECK(pwt::run_experiment(cfg) == 0);
  const std::string rep = pwt::read_text_file(tmp.str("run/report.json"));
  CHECK(rep.find("\"2/3\"") != std::string::npos);
  CHECK(rep.find("\"1/3\"") != std::string::npos);
}

TEST_CASE("iterate mode on the 1D example reports endpoints 0 and 0.9") {
  TempDir tmp("iterate");
  auto cfg = pwt::parse_config_text(
      R"({"mode":"iterate","map":{"type":"map1d","cuts":["0","3/5","1"],"vectors":["3/10","-3/5"]}})");
  cfg.out = tmp.str("run");
  CHECK(pwt::run_experiment(cfg) == 0);
  const std::string rep = pwt::read_text_file(tmp.str("run/report.json"));
  CHECK(rep.find("\"stabilized_at\": 1") != std::string::npos);
  const std::string arcs = pwt::read_text_file(tmp.str("run/attractor_arcs.txt"));
  CHECK(arcs == "0/1 9/10\n");
  const std::string trace = pwt::read_text_file(tmp.str("run/trace.csv"));
  CHECK(trace.rfind("n,measure,occupied,changed\n", 0) == 0);
}

TEST_CASE("attractor mode emits decomposition, covering and tiling") {
  TempDir tmp("attr");
  auto cfg = pwt::parse_config_text(
      R"({"mode":"attractor","probes":200,"map":{"type":"map1d","cuts":["0","3/5","1"],"vectors":["3/10","-3/5"]}})");
  cfg.out = tmp.str("run");
  CHECK(pwt::run_experiment(cfg) == 0);
  const std::string rep = pwt::read_text_file(tmp.str("run/report.json"));
  CHECK(rep.find("decomposition") != std::string::npos);
  CHECK(rep.find("covering") != std::string::npos);
  CHECK(rep.find("tiling") != std::string::npos);
  CHECK(rep.find("\"mode_xi\": 1") != std::string::npos);
}

TEST_CASE("random-dr artifacts are deterministic byte for byte") {
  TempDir tmp("rdr");
  const std::string text =
      R"({"mode":"random-dr","seed":11,"random":{"alpha":"414213562/1000000000","beta":"1/20","delta":"1/2","p":0.5,"n":300,"eps":["1/100"],"bins":32,"keep_tail":true}})";
  auto cfg = pwt::parse_config_text(text);
  cfg.out = tmp.str("a");
  CHECK(pwt::run_experiment(cfg) == 0);
  cfg.out = tmp.str("b");
  CHECK(pwt::run_experiment(cfg) == 0);
  CHECK(pwt::read_text_file(tmp.str("a/run.csv")) == pwt::read_text_file(tmp.str("b/run.csv")));
  CHECK(pwt::read_text_file(tmp.str("a/histogram.csv")) == pwt::read_text_file(tmp.str("b/histogram.csv")));
  CHECK(pwt::read_text_file(tmp.str("a/histogram.pgm")) == pwt::read_text_file(tmp.str("b/histogram.pgm")));
  // run.csv column layout
  const std::string run = pwt::read_text_file(tmp.str("a/run.csv"));
  CHECK(run.rfind("n,measure,symbol\n0,1/1,0\n", 0) == 0);
}

TEST_CASE("sweep: 1x1 grid equals a standalone run, csv row count matches") {
  TempDir tmp("sweep");
  const std::string text = R"({
    "mode":"sweep","n_max":200,"h":0.015625,
    "map":{"type":"torus_double_rotation","rect_lo":[0.25,0.25],"rect_size":[0.5,0.5],
            "gamma1":[0.33,0.71],"gamma2":[0.61,0.12]},
    "sweep":{"param":"gamma2.x","from":0.61,"to":0.61,"steps":1}})";
  auto cfg = pwt::parse_config_text(text);
  cfg.out = tmp.str("run");
  CHECK(pwt::run_experiment(cfg) == 0);
  const std::string csv = pwt::read_text_file(tmp.str("run/sweep.csv"));
  // header + exactly one node
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

  auto single = pwt::parse_config_text(text);
  single.mode = pwt::Mode::Iterate;
  single.sweep.reset();
  single.out = tmp.str("single");
  CHECK(pwt::run_experiment(single) == 0);
  const std::string rep = pwt::read_text_file(tmp.str("single/report.json"));
  // the sweep row carries the same verdict as the standalone run
  const bool sweep_stab = csv.find("Stabilized") != std::string::npos;
  const bool single_stab = rep.find("\"status\": \"Stabilized\"") != std::string::npos;
  CHECK(sweep_stab == single_stab);
}

TEST_CASE("sweep nodes and threads yield identical artifacts") {
  TempDir tmp("sweepthr");
  const std::string text = R"({
    "mode":"sweep","n_max":60,"h":0.03125,
    "map":{"type":"torus_double_rotation","rect_lo":[0.1,0.2],"rect_size":[0.4,0.3],
            "gamma1":[0.33,0.71],"gamma2":[0.61,0.12]},
    "sweep":{"param":"gamma2.x","from":0.0,"to":0.9,"steps":6,
             "param2":"gamma2.y","from2":0.1,"to2":0.8,"steps2":3}})";
  auto cfg = pwt::parse_config_text(text);
  cfg.out = tmp.str("t1");
  cfg.threads = 1;
  CHECK(pwt::run_experiment(cfg) == 0);
  cfg.out = tmp.str("t2");
  cfg.threads = 2;
  CHECK(pwt::run_experiment(cfg) == 0);
  const std::string a = pwt::read_text_file(tmp.str("t1/sweep.csv"));
  CHECK(a == pwt::read_text_file(tmp.str("t2/sweep.csv")));
  CHECK(std::count(a.begin(), a.end(), '\n') == 1 + 6 * 3);
}

TEST_CASE("attractor mode decomposes torus maps too") {
  TempDir tmp("tattr");
  auto cfg = pwt::parse_config_text(R"({
    "mode":"attractor","n_max":500,"h":0.0078125,
    "map":{"type":"torus_double_rotation","rect_lo":[0.25,0.25],"rect_size":[0.5,0.5],
            "gamma1":[0.375,0.6875],"gamma2":[0.625,0.125],"commensurate":128}})");
  cfg.out = tmp.str("run");
  CHECK(pwt::run_experiment(cfg) == 0);
  const std::string rep = pwt::read_text_file(tmp.str("run/report.json"));
  CHECK(rep.find("decomposition") != std::string::npos);
  CHECK(rep.find("\"status\": \"Stabilized\"") != std::string::npos);
}

TEST_CASE("render mode reproduces the attractor pgm") {
  TempDir tmp("render");
  auto cfg = pwt::parse_config_text(R"({
    "mode":"iterate","n_max":200,"h":0.015625,
    "map":{"type":"torus_double_rotation","rect_lo":[0.25,0.25],"rect_size":[0.5,0.5],
            "gamma1":[0.375,0.6875],"gamma2":[0.625,0.125],"commensurate":64}})");
  cfg.out = tmp.str("run");
  CHECK(pwt::run_experiment(cfg) == 0);

  auto render = pwt::parse_config_text(std::string(R"({"mode":"render","render":{"input":")") +
                                       tmp.str("run/attractor.grid") + R"(","output":"again.pgm"}})");
  render.out = tmp.str("render_out");
  CHECK(pwt::run_experiment(render) == 0);
  CHECK(pwt::read_text_file(tmp.str("run/attractor.pgm")) ==
        pwt::read_text_file(tmp.str("render_out/again.pgm")));
}

TEST_CASE("validate mode flags an invalid map") {
  TempDir tmp("validate");
  // v1 too negative: the map leaves the domain
  auto cfg = pwt::parse_config_text(
      R"({"mode":"validate","map":{"type":"map1d","cuts":["0","3/5","1"],"vectors":["3/10","-7/10"]}})");
  cfg.out = tmp.str("bad");
  CHECK(pwt::run_experiment(cfg) == 4);

  auto ok = pwt::parse_config_text(
      R"({"mode":"validate","map":{"type":"map1d","cuts":["0","3/5","1"],"vectors":["3/10","-3/5"]}})");
  ok.out = tmp.str("good");
  CHECK(pwt::run_experiment(ok) == 0);
}

TEST_CASE("thread resolution: explicit value, env fallback, default") {
  CHECK(pwt::resolve_threads(3) == 3);
  ::setenv("PWT_LAB_THREADS", "5", 1);
  CHECK(pwt::resolve_threads(0) == 5);
  ::unsetenv("PWT_LAB_THREADS");
  CHECK(pwt::resolve_threads(0) == 1);
}

TEST_CASE("presets parse and land on known modes") {
  for (const auto& name : pwt::preset_names()) {
    const auto cfg = pwt::make_preset(name);
    // round-trip through the strict parser
    CHECK_NOTHROW(pwt::parse_config_text(pwt::config_to_text(cfg)));
  }
}

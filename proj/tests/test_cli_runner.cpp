#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "pnls/catalog.hpp"
#include "pnls/config.hpp"
#include "pnls/errors.hpp"
#include "pnls/runner.hpp"
#include "test_support.hpp"

using namespace pnls;
using namespace pnls::testing;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pnls_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* minimal = R"({"initial_datum": {"type": "hermite_gaussian"}})";

ScenarioConfig smoke(const fs::path& out) {
  ScenarioConfig c = parse_config(R"({
    "name": "smoke",
    "grid": {"d": 2, "n": 1, "hermite_order": 16, "box_half_length": 24.0, "free_points": 96},
    "params": {"lambda": 0.0, "dt": 0.05, "t1": 2.0, "sample_stride": 4},
    "initial_datum": {"type": "hermite_gaussian", "width": [1.0, 1.5], "momentum": [0.0, 0.4]},
    "probes": ["conserved", "sigma", "L4", "Linf"],
    "snapshot_every": 5
  })");
  c.output_dir = out.string();
  return c;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("minimal config takes the defaults") {
  const ScenarioConfig c = parse_config(minimal);
  CHECK(c.grid == GridSpec{});
  CHECK(c.params == SimParams{});
  CHECK(c.scattering.mode == ScatteringMode::none);
  CHECK(std::holds_alternative<HermiteGaussian>(*c.initial_datum));
}

TEST_CASE("unknown keys are rejected by name") {
  try {
    parse_config(R"({"initial_datum": {"type": "hermite_gaussian"}, "params": {"sgima": 3}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field == "params.sgima");
    CHECK(std::string(e.what()).find("sgima") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(R"({"initial_datum": {"type": "hermite_gaussian", "colour": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"initial_datum": {"type": "hermite_gaussian"}, "extra": 1})"), ConfigError);
}

TEST_CASE("syntax errors report line and column") {
  try {
    parse_config("{\n  \"grid\": {\"d\": 2,,}\n}");
    FAIL("expected ConfigSyntaxError");
  } catch (const ConfigSyntaxError& e) {
    CHECK(e.line == 2);
    CHECK(e.column == 19);
    CHECK(std::string(e.what()).find("line 2, column 19") != std::string::npos);
  }
}

TEST_CASE("semantic errors name the field") {
  auto field_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.field;
    }
    return std::string("<none>");
  };
  CHECK(field_of(R"({"initial_datum": {"type": "hermite_gaussian"}, "grid": {"d": 5}})") == "grid");
  CHECK(field_of(R"({"initial_datum": {"type": "hermite_gaussian"}, "params": {"dt": -1}})") == "params");
  CHECK(field_of(R"({"initial_datum": {"type": "hermite_gaussian"}, "params": {"dt": "x"}})") == "params.dt");
  CHECK(field_of(R"({"initial_datum": {"type": "hermite_gaussian"}, "probes": ["mass"]})") == "probes");
  CHECK(field_of(R"({"initial_datum": {"type": "hermite_gaussian", "width": [1, 2, 3]}})") == "initial_datum.width");
  CHECK(field_of(R"({"initial_datum": {"type": "gauss"}})") == "initial_datum.type");
  CHECK(field_of(R"({"probes": []})") == "initial_datum");
  CHECK(field_of(R"({"initial_datum": {"type": "hermite_gaussian"}, "scattering": {"mode": "monitor", "times": [0.5, 1]}})") ==
        "scattering.times");
  CHECK(field_of(R"({"initial_datum": {"type": "hermite_gaussian"}, "scattering": {"mode": "sideways"}})") ==
        "scattering.mode");
  CHECK(field_of(R"({"scattering": {"mode": "wave_operator", "u_minus": {"type": "hermite_gaussian"}, "T": 40, "window": 20}})") ==
        "params.t0");
  CHECK(field_of(R"({"initial_datum": {"type": "hermite_gaussian"}, "scattering": {"mode": "long_range"}})") ==
        "snapshot_times");
}

TEST_CASE("parse -> serialize -> parse is the identity on generated configs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_int_distribution<int> pick(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    ScenarioConfig c;
    c.name = "cfg" + std::to_string(trial);
    c.grid = GridSpec{3, 1 + trial % 2, 8 + 2 * (trial % 5), 10.0 + std::abs(u(rng)), 16 * (1 + trial % 3)};
    c.params.lambda = u(rng);
    c.params.sigma = 0.5 + std::abs(u(rng));
    c.params.dt = 0.1 / 3.0;
    c.params.t1 = 1.0;
    c.params.boundary_mass_tol = 0.01 + 0.001 * std::abs(u(rng));
    c.params.sample_stride = 1 + trial % 4;
    HermiteGaussian h;
    h.order = {pick(rng), pick(rng), pick(rng)};
    h.center = {u(rng), u(rng), u(rng)};
    h.width = {1.0 + std::abs(u(rng)), 0.7 + std::abs(u(rng)), 1.0 / 3.0};
    h.momentum = {u(rng), u(rng) * 1e-7, u(rng) * 1e300};
    h.amplitude = std::abs(u(rng)) + 1e-310;
    c.initial_datum = h;
    c.probes = {"conserved", "L" + std::to_string(2 + trial % 3), "Linf"};
    c.snapshot_times = {u(rng) * 0.1 + 0.5};
    c.seed = rng();
    switch (trial % 3) {
      case 0: break;
      case 1:
        c.scattering.mode = ScatteringMode::monitor;
        c.scattering.times = {0.25, 0.5, 1.0};
        c.scattering.thresholds.converging_ratio = 0.1 * std::abs(u(rng)) + 0.01;
        c.scattering.thresholds.diverging_ratio = 1.0 + std::abs(u(rng));
        break;
      case 2:
        c.scattering.mode = ScatteringMode::long_range;
        c.scattering.reference = FileDatum{"ref/profile.bin"};
        c.scattering.t_min = std::abs(u(rng));
        c.snapshot_every = 2;
        break;
    }
    const std::string text = serialize_config(c);
    const ScenarioConfig back = parse_config(text);
    CHECK(back == c);
    CHECK(serialize_config(back) == text);
  }
}

TEST_CASE("wave-operator configs round trip") {
  const auto scenarios = catalog_scenarios();
  for (const auto& [name, cfg] : scenarios) {
    CAPTURE(name);
    CHECK(parse_config(serialize_config(cfg)) == cfg);
  }
}

TEST_CASE("bundled scenario files parse; catalog ones match the catalog") {
  const fs::path dir = fs::path(PNLS_SOURCE_DIR) / "scenarios";
  REQUIRE(fs::exists(dir));
  std::map<std::string, ScenarioConfig> known;
  for (const auto& [name, cfg] : catalog_scenarios()) known.emplace(name, cfg);
  int matched = 0;
  for (const auto& p : expand_glob((dir / "*.json").string())) {
    CAPTURE(p.string());
    const ScenarioConfig c = load_config(p);
    if (auto it = known.find(p.stem().string()); it != known.end()) {
      CHECK(c == it->second);
      ++matched;
    }
  }
  CHECK(matched == static_cast<int>(known.size()));
}

TEST_CASE("linear smoke scenario writes every artifact") {
  const fs::path dir = scratch_dir("smoke");
  const RunResult r = run_scenario(smoke(dir));
  REQUIRE(r.exit_code == 0);
  CHECK_FALSE(fs::exists(dir / "error.json"));

  const auto rows = read_csv(dir / "diagnostics.csv");
  REQUIRE(rows.size() == 1 + 11);
  std::vector<std::string> header(diagnostics_columns());
  header.push_back("L4");
  header.push_back("Linf");
  CHECK(rows[0] == header);
  const double m0 = std::stod(rows[1][1]);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].size() == header.size());
    CHECK(std::abs(std::stod(rows[i][1]) - m0) <= 1e-13);
    CHECK(rows[i][6] == "nan");  // vector fields not requested
  }

  const Json meta = Json::parse(read_file(dir / "run_meta.json"));
  CHECK(meta["status"] == "ok");
  CHECK(meta["config"]["name"] == "smoke");
  CHECK(meta["versions"].contains("fftw"));
  CHECK(meta["wall_seconds"].get<double>() >= 0.0);

  const Json scat = Json::parse(read_file(dir / "scattering.json"));
  CHECK(scat["mode"] == "none");
  CHECK(scat["verdict"].is_null());

  // Samples every 0.2, snapshots every 5 samples: t = 0, 1, 2.
  CHECK(meta["snapshots"].size() == 3);
  const Json side = Json::parse(read_file(dir / "snapshots" / "snap_0001.json"));
  CHECK(side["dtype"] == "complex64");
  CHECK(side["shape"] == Json::array({16, 96}));
  CHECK(side["t"].get<double>() == doctest::Approx(1.0));
  CHECK(fs::file_size(dir / "snapshots" / "snap_0001.bin") == 16u * 96u * 8u);
}

TEST_CASE("snapshots round trip at single precision and check the grid") {
  const fs::path dir = scratch_dir("snap");
  const auto grid = Grid::make(GridSpec{2, 1, 16, 20.0, 64});
  std::mt19937_64 rng(3);
  const Field f = random_localized_field(grid, rng);
  write_snapshot(dir / "f.bin", f, 1.5, "test");
  const Field g = read_snapshot(dir / "f.bin", grid);
  CHECK(max_abs_diff(f.values, g.values) <= 1e-6 * max_abs(f.values));
  // Little-endian float32 pairs.
  const std::string raw = read_file(dir / "f.bin");
  float re = 0.0f;
  std::memcpy(&re, raw.data(), 4);
  if constexpr (std::endian::native == std::endian::little) CHECK(re == static_cast<float>(f.values[0].real()));
  CHECK_THROWS_AS(read_snapshot(dir / "f.bin", Grid::make(GridSpec{2, 1, 16, 20.0, 32})), ShapeMismatch);
  CHECK_THROWS_AS(read_snapshot(dir / "missing.bin", grid), IoError);
}

TEST_CASE("a snapshot serves as a file datum") {
  const fs::path dir = scratch_dir("file_datum");
  ScenarioConfig first = smoke(dir / "first");
  REQUIRE(run_scenario(first).exit_code == 0);
  ScenarioConfig second = smoke(dir / "second");
  second.initial_datum = FileDatum{"first/snapshots/snap_0001.bin"};
  second.base_dir = dir;
  const RunResult r = run_scenario(second);
  CHECK(r.exit_code == 0);
  const auto rows = read_csv(dir / "second" / "diagnostics.csv");
  CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("runs are deterministic") {
  const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
  ScenarioConfig c = smoke(a);
  c.params.lambda = 1.0;
  c.params.sigma = 2.0;
  c.probes = {"all", "L4"};
  REQUIRE(run_scenario(c).exit_code == 0);
  c.output_dir = b.string();
  REQUIRE(run_scenario(c).exit_code == 0);
  CHECK(read_file(a / "diagnostics.csv") == read_file(b / "diagnostics.csv"));
}

TEST_CASE("scattering scenario emits a verdict") {
  const fs::path dir = scratch_dir("monitor");
  ScenarioConfig c = smoke(dir);
  c.params.lambda = 1.0;
  c.params.sigma = 3.0;
  c.params.t1 = 8.0;
  c.scattering.mode = ScatteringMode::monitor;
  c.scattering.times = {1.0, 2.0, 4.0, 8.0};
  REQUIRE(run_scenario(c).exit_code == 0);
  const Json scat = Json::parse(read_file(dir / "scattering.json"));
  CHECK(scat["mode"] == "monitor");
  CHECK(scat["verdict"].is_string());
  CHECK(scat["diff_sigma"].size() == 3);
  CHECK(scat["ratios"].size() == 2);
  CHECK(fs::exists(dir / "snapshots" / "u_plus.bin"));
}

TEST_CASE("failures exit nonzero with error JSON") {
  const fs::path dir = scratch_dir("errors");
  {
    std::ofstream(dir / "corrupt.json") << "{\"grid\": {\"d\": 2,";
    RunOptions o;
    o.output_dir = dir / "corrupt_out";
    const RunResult r = run_config_file(dir / "corrupt.json", o);
    CHECK(r.exit_code == 2);
    CHECK(r.error_code == "ConfigSyntaxError");
    const Json err = Json::parse(read_file(dir / "corrupt_out" / "error.json"));
    CHECK(err["status"] == "error");
    CHECK(err["code"] == "ConfigSyntaxError");
    CHECK(err.contains("line"));
  }
  {
    ScenarioConfig c = smoke(dir / "boundary");
    c.grid.box_half_length = 6.0;
    c.grid.free_points = 32;
    c.params.t1 = 10.0;
    c.params.boundary_mass_tol = 1e-4;
    const RunResult r = run_scenario(c);
    CHECK(r.exit_code == 1);
    const Json err = Json::parse(read_file(dir / "boundary" / "error.json"));
    CHECK(err["code"] == "BoundaryMassExceeded");
    CHECK(err["time"].get<double>() < 10.0);
  }
}

TEST_CASE("sweep runs each config into its own directory") {
  const fs::path dir = scratch_dir("sweep");
  for (const char* name : {"a", "b", "c"}) {
    ScenarioConfig c = smoke(dir / "unused");
    c.name = name;
    c.params.lambda = name[0] == 'b' ? 0.5 : 0.0;
    std::ofstream(dir / (std::string(name) + ".json")) << serialize_config(c);
  }
  std::ofstream(dir / "bad.json") << "{";
  const auto configs = expand_glob((dir / "*.json").string());
  REQUIRE(configs.size() == 4);
  RunOptions o;
  o.output_dir = dir / "out";
  const auto results = run_sweep(configs, 2, o);
  REQUIRE(results.size() == 4);
  CHECK(results[0].exit_code == 0);
  CHECK(results[1].exit_code == 0);
  CHECK(results[2].exit_code == 2);  // bad.json sorts third
  CHECK(results[3].exit_code == 0);
  CHECK(fs::exists(dir / "out" / "a" / "diagnostics.csv"));
  CHECK(fs::exists(dir / "out" / "bad" / "error.json"));
  CHECK(expand_glob((dir / "*.none").string()).empty());
}

TEST_CASE("catalog lookup") {
  CHECK(catalog().size() == 13);
  CHECK(catalog_entry("4").name == "mass_conservation");
  CHECK(catalog_entry("cell_3d").id == 13);
  CHECK_THROWS_AS(catalog_entry("nope"), InvalidArgument);
  const CriterionResult r = run_criterion(catalog_entry("eigenstructure"));
  CHECK(r.pass());
  CHECK(r.line().rfind("PASS criterion 1 [eigenstructure]", 0) == 0);
  CHECK(within("x", 1.0, 0.0, 2.0).margin() == doctest::Approx(1.0));
  CHECK(at_most("x", 1.0, 4.0).margin() == doctest::Approx(4.0));
  CHECK_FALSE(below("x", 1.0, 1.0).pass);
}

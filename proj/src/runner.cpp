#include "pnls/runner.hpp"

#include <fftw3.h>
#include <glob.h>
#include <omp.h>

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pnls/datum.hpp"
#include "pnls/errors.hpp"
#include "pnls/solver.hpp"

namespace pnls {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string lr_column(double r) {
  if (std::isinf(r)) return "Linf";
  std::ostringstream ss;
  ss << "L" << r;
  return ss.str();
}

// NaN is not representable in JSON; unevaluated values become null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

Json grid_json(const GridSpec& g) {
  return {{"d", g.d}, {"n", g.n}, {"hermite_order", g.hermite_order}, {"box_half_length", g.box_half_length},
          {"free_points", g.free_points}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void put_le32(std::string& buf, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  for (int b = 0; b < 4; ++b) buf.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

float get_le32(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(p[b]) << (8 * b);
  return std::bit_cast<float>(bits);
}

Field make_datum(const DatumSpec& spec, const GridPtr& grid, const fs::path& base_dir) {
  if (const auto* h = std::get_if<HermiteGaussian>(&spec)) return sample(grid, *h);
  fs::path p = std::get<FileDatum>(spec).path;
  if (p.is_relative()) p = base_dir / p;
  return read_snapshot(p, grid);
}

// The library reports failures through typed exceptions; configuration
// problems get their own exit status.
int exit_status(const Error& e) {
  const std::string& c = e.code();
  return (c == "ConfigError" || c == "ConfigSyntaxError") ? 2 : 1;
}

Json error_json(const Error& e) {
  Json j{{"status", "error"}, {"code", e.code()}, {"message", e.what()}};
  if (const auto* b = dynamic_cast<const BoundaryMassExceeded*>(&e)) {
    j["time"] = b->time;
    j["boundary_fraction"] = b->boundary_fraction;
  } else if (const auto* n = dynamic_cast<const NonFinite*>(&e)) {
    j["time"] = n->time;
  } else if (const auto* s = dynamic_cast<const ConfigSyntaxError*>(&e)) {
    j["line"] = s->line;
    j["column"] = s->column;
  } else if (const auto* c = dynamic_cast<const ConfigError*>(&e)) {
    j["field"] = c->field;
  }
  return j;
}

void write_error(const fs::path& dir, const Json& err) {
  try {
    fs::create_directories(dir);
    write_text(dir / "error.json", err.dump(2) + "\n");
  } catch (const std::exception&) {
    // The caller still gets the error through RunResult.
  }
}

}  // namespace

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> cols{
      "t",          "mass",         "energy",          "sigma_x",          "sigma_y",
      "sigma_grad", "vf_1",         "vf_2",            "vf_3",             "vf_4",
      "grad_x",     "grad_y",       "virial_I",        "action_M",         "morawetz_defect",
      "morawetz_integrand",         "cumulative_morawetz", "boundary_mass_fraction"};
  return cols;
}

std::string diagnostics_header(const std::vector<double>& lr_exponents) {
  std::string h;
  for (const auto& c : diagnostics_columns()) h += (h.empty() ? "" : ",") + c;
  for (double r : lr_exponents) h += "," + lr_column(r);
  return h + "\n";
}

std::string diagnostics_row(const DiagnosticsRecord& rec, const std::vector<double>& lr_exponents) {
  const double fixed[] = {rec.t,
                          rec.mass,
                          rec.energy,
                          rec.sigma_norm_parts[0],
                          rec.sigma_norm_parts[1],
                          rec.sigma_norm_parts[2],
                          rec.vf_norms[0],
                          rec.vf_norms[1],
                          rec.vf_norms[2],
                          rec.vf_norms[3],
                          rec.grad_x_norm,
                          rec.grad_y_norm,
                          rec.virial_I,
                          rec.action_M,
                          rec.morawetz_defect,
                          rec.morawetz_integrand,
                          rec.cumulative_morawetz,
                          rec.boundary_mass_fraction};
  std::string row;
  for (double v : fixed) row += (row.empty() ? "" : ",") + format_double(v);
  for (double r : lr_exponents) row += "," + format_double(rec.lr(r));
  return row + "\n";
}

fs::path write_snapshot(const fs::path& bin_path, const Field& f, double t, const std::string& role) {
  const Grid& g = *f.grid;
  std::string buf;
  buf.reserve(f.values.size() * 8);
  for (const cplx& z : f.values) {
    put_le32(buf, static_cast<float>(z.real()));
    put_le32(buf, static_cast<float>(z.imag()));
  }
  write_text(bin_path, buf);

  Json shape = Json::array();
  for (int a = 0; a < g.d(); ++a) shape.push_back(a < g.n() ? g.hermite_order() : g.free_points());
  Json side{{"file", bin_path.filename().string()},
            {"dtype", "complex64"},
            {"byte_order", "little"},
            {"layout", "row-major; confined axes (Gauss-Hermite nodes) first, free axes (uniform) last"},
            {"shape", shape},
            {"role", role},
            {"t", t},
            {"grid", grid_json(g.spec())},
            {"x_nodes", g.nodes()},
            {"y_coords", g.free_coords()}};
  fs::path side_path = bin_path;
  side_path.replace_extension(".json");
  write_text(side_path, side.dump(2) + "\n");
  return bin_path;
}

Field read_snapshot(const fs::path& bin_path, const GridPtr& grid) {
  fs::path side_path = bin_path;
  side_path.replace_extension(".json");
  std::ifstream side_in(side_path);
  if (!side_in) throw IoError("missing snapshot sidecar " + side_path.string());
  Json side;
  try {
    side = Json::parse(side_in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("unreadable snapshot sidecar " + side_path.string() + ": " + e.what());
  }
  const GridSpec& g = grid->spec();
  if (side.value("dtype", "") != "complex64" || side.value("byte_order", "") != "little") {
    throw IoError(side_path.string() + ": expected little-endian complex64 data");
  }
  if (!side.contains("grid") || side["grid"] != grid_json(g)) {
    throw ShapeMismatch("snapshot " + bin_path.string() + " was written on a different grid");
  }
  std::ifstream in(bin_path, std::ios::binary);
  if (!in) throw IoError("cannot read snapshot " + bin_path.string());
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (raw.size() != grid->size() * 8) {
    throw ShapeMismatch("snapshot " + bin_path.string() + " has " + std::to_string(raw.size()) + " bytes, expected " +
                        std::to_string(grid->size() * 8));
  }
  std::vector<cplx> values(grid->size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = cplx(get_le32(&raw[8 * i]), get_le32(&raw[8 * i + 4]));
  }
  return Field(grid, std::move(values));
}

std::string scattering_json(const ScatteringReport& rep, ScatteringMode mode) {
  Json j;
  j["mode"] = to_string(mode);
  if (mode == ScatteringMode::none) {
    j["verdict"] = nullptr;
    return j.dump(2) + "\n";
  }
  j["verdict"] = to_string(rep.verdict);
  j["times"] = numbers(rep.times);
  j["diff_l2"] = numbers(rep.diff_l2);
  j["diff_sigma"] = numbers(rep.diff_sigma);
  j["diff_vector_fields"] = numbers(rep.diff_vf);
  j["ratios"] = numbers(rep.ratios);
  j["u_plus_error"] = number(rep.u_plus_error);
  if (mode == ScatteringMode::wave_operator) {
    j["iterations"] = rep.iterations;
    j["picard_increments"] = numbers(rep.picard_increments);
    j["contraction_factors"] = numbers(rep.contraction_factors);
    j["duhamel_residual"] = number(rep.duhamel_residual);
    j["round_trip_mismatch"] = number(rep.round_trip_mismatch);
    j["solver_mismatch"] = number(rep.solver_mismatch);
  }
  if (mode == ScatteringMode::long_range) {
    j["phase_times"] = numbers(rep.phase_times);
    j["phase"] = numbers(rep.phase);
    j["log_coefficient"] = number(rep.log_coefficient);
    j["log_intercept"] = number(rep.log_intercept);
    j["log_residual"] = number(rep.log_residual);
  }
  return j.dump(2) + "\n";
}

ScenarioOutcome execute_scenario(const ScenarioConfig& cfg) {
  const GridPtr grid = Grid::make(cfg.grid);
  const ScatteringConfig& sc = cfg.scattering;
  ScenarioOutcome out;
  out.probes = effective_probes(cfg);

  Field u0(grid);
  if (sc.mode == ScatteringMode::wave_operator) {
    out.scattering = wave_operator_picard(make_datum(*sc.u_minus, grid, cfg.base_dir), cfg.params, sc.wave);
    u0 = out.scattering.wave_state;
  } else {
    u0 = make_datum(*cfg.initial_datum, grid, cfg.base_dir);
  }
  out.trajectory = run_simulation(u0, cfg.params, out.probes);

  switch (sc.mode) {
    case ScatteringMode::none:
    case ScatteringMode::wave_operator: break;
    case ScatteringMode::monitor: out.scattering = scattering_monitor(out.trajectory, sc.times, sc.thresholds); break;
    case ScatteringMode::long_range: {
      const Field ref = sc.reference ? make_datum(*sc.reference, grid, cfg.base_dir) : u0;
      out.scattering = long_range_probe(out.trajectory, ref, sc.t_min);
      break;
    }
  }
  return out;
}

void write_artifacts(const fs::path& dir, const ScenarioConfig& cfg, const ScenarioOutcome& out, double wall_seconds) {
  fs::create_directories(dir / "snapshots");
  const Trajectory& traj = out.trajectory;
  const ScatteringReport& rep = out.scattering;
  const ScatteringMode mode = cfg.scattering.mode;
  const auto& lr = out.probes.lr_exponents;

  std::string csv = diagnostics_header(lr);
  for (const auto& rec : traj.records) csv += diagnostics_row(rec, lr);
  write_text(dir / "diagnostics.csv", csv);

  Json snaps = Json::array();
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%04zu.bin", i);
    write_snapshot(dir / "snapshots" / name, traj.snapshots[i], traj.snapshot_times[i], "trajectory");
    snaps.push_back({{"file", std::string("snapshots/") + name}, {"role", "trajectory"}, {"t", traj.snapshot_times[i]}});
  }
  if (mode == ScatteringMode::monitor || mode == ScatteringMode::long_range) {
    write_snapshot(dir / "snapshots" / "u_plus.bin", rep.u_plus, rep.times.back(), "u_plus");
    snaps.push_back({{"file", "snapshots/u_plus.bin"}, {"role", "u_plus"}, {"t", rep.times.back()}});
  }
  if (mode == ScatteringMode::wave_operator) {
    write_snapshot(dir / "snapshots" / "wave_state.bin", rep.wave_state, cfg.params.t0, "wave_state");
    snaps.push_back({{"file", "snapshots/wave_state.bin"}, {"role", "wave_state"}, {"t", cfg.params.t0}});
  }
  write_text(dir / "scattering.json", scattering_json(rep, mode));

  std::string header = diagnostics_header(lr);
  header.pop_back();
  Json meta;
  meta["status"] = "ok";
  meta["config"] = Json::parse(serialize_config(cfg));
  meta["versions"] = {{"pnls", version}, {"fftw", std::string(fftw_version)}, {"compiler", __VERSION__}};
  meta["threads"] = omp_get_max_threads();
  meta["wall_seconds"] = wall_seconds;
  meta["samples"] = traj.records.size();
  meta["warnings"] = parameter_warnings(cfg.params, cfg.grid.d, cfg.params.t1 - cfg.params.t0 > 50.0);
  meta["columns"] = header;
  meta["snapshots"] = snaps;
  write_text(dir / "run_meta.json", meta.dump(2) + "\n");
}

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
  RunResult res;
  res.output_dir = opts.output_dir ? *opts.output_dir : fs::path(cfg.output_dir);
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  try {
    fs::create_directories(res.output_dir);
    fs::remove(res.output_dir / "error.json");
    const ScenarioOutcome out = execute_scenario(cfg);
    res.wall_seconds = elapsed();
    write_artifacts(res.output_dir, cfg, out, res.wall_seconds);
  } catch (const Error& e) {
    res.exit_code = exit_status(e);
    res.error_code = e.code();
    res.message = e.what();
    res.wall_seconds = elapsed();
    write_error(res.output_dir, error_json(e));
  } catch (const std::exception& e) {
    res.exit_code = 1;
    res.error_code = "InternalError";
    res.message = e.what();
    res.wall_seconds = elapsed();
    write_error(res.output_dir, Json{{"status", "error"}, {"code", res.error_code}, {"message", res.message}});
  }
  return res;
}

RunResult run_config_file(const fs::path& path, const RunOptions& opts) {
  ScenarioConfig cfg;
  try {
    cfg = load_config(path);
  } catch (const Error& e) {
    RunResult res;
    res.exit_code = exit_status(e);
    res.error_code = e.code();
    res.message = e.what();
    if (opts.output_dir) {
      res.output_dir = *opts.output_dir;
      write_error(res.output_dir, error_json(e));
    }
    return res;
  }
  return run_scenario(cfg, opts);
}

std::vector<RunResult> run_sweep(const std::vector<fs::path>& configs, int workers, const RunOptions& opts) {
  std::vector<RunResult> results(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    omp_set_num_threads(1);
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      RunOptions o;
      if (opts.output_dir) o.output_dir = *opts.output_dir / configs[i].stem();
      results[i] = run_config_file(configs[i], o);
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(configs.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < n; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<fs::path> out;
#ifdef GLOB_BRACE
  const int flags = GLOB_BRACE;
#else
  const int flags = 0;
#endif
  if (::glob(pattern.c_str(), flags, nullptr, &g) == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace pnls

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pnls/config.hpp"
#include "pnls/scattering.hpp"
#include "pnls/trajectory.hpp"

namespace pnls {

inline constexpr const char* version = "0.1.0";

/// Fixed diagnostics.csv columns; L^r columns ("L4", "Linf", ...) follow in
/// the order the probes list them.
const std::vector<std::string>& diagnostics_columns();
std::string diagnostics_header(const std::vector<double>& lr_exponents);
std::string diagnostics_row(const DiagnosticsRecord& rec, const std::vector<double>& lr_exponents);

/// Raw little-endian complex64 values plus a JSON sidecar (same stem, .json)
/// with dtype, shape, layout, time and grid. Returns the .bin path.
std::filesystem::path write_snapshot(const std::filesystem::path& bin_path, const Field& f, double t,
                                     const std::string& role);
/// Reads a snapshot; its sidecar grid must equal `grid`'s spec.
Field read_snapshot(const std::filesystem::path& bin_path, const GridPtr& grid);

/// Everything except u_plus / wave_state fields, which go to snapshots/.
std::string scattering_json(const ScatteringReport& rep, ScatteringMode mode);

/// In-memory result of a scenario.
struct ScenarioOutcome {
  Probes probes;
  Trajectory trajectory;
  ScatteringReport scattering;
};

/// Builds the datum (or the wave state), integrates, and evaluates the
/// scattering mode. Throws the library's typed errors.
ScenarioOutcome execute_scenario(const ScenarioConfig& cfg);

/// Writes diagnostics.csv, scattering.json, snapshots/ and run_meta.json.
void write_artifacts(const std::filesystem::path& dir, const ScenarioConfig& cfg, const ScenarioOutcome& out,
                     double wall_seconds);

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;  // overrides the config's output_dir
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 1 runtime failure, 2 invalid configuration
  std::filesystem::path output_dir;
  std::string error_code;
  std::string message;
  double wall_seconds = 0.0;
};

/// Runs one scenario and writes diagnostics.csv, scattering.json,
/// snapshots/*.bin (+ .json) and run_meta.json; on failure writes
/// error.json instead of the missing artifacts. Never throws for
/// scenario errors.
RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {});

/// Loads and runs a config file; configuration errors also end up in
/// error.json when an output directory can be determined.
RunResult run_config_file(const std::filesystem::path& path, const RunOptions& opts = {});

/// Runs configs concurrently on `workers` threads (one scenario per
/// worker, single-threaded inside). With an output override each config
/// writes to <override>/<config stem>. Results follow the input order.
std::vector<RunResult> run_sweep(const std::vector<std::filesystem::path>& configs, int workers,
                                 const RunOptions& opts = {});

/// POSIX glob expansion (with {a,b} braces where supported), sorted; no
/// matches gives an empty list.
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

}  // namespace pnls

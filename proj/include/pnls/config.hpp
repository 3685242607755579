#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pnls/datum.hpp"
#include "pnls/grid.hpp"
#include "pnls/scattering.hpp"
#include "pnls/solver.hpp"

namespace pnls {

/// Initial datum read from a snapshot written by the runner (.bin plus its
/// .json sidecar). Relative paths resolve against the config file.
struct FileDatum {
  std::string path;
  bool operator==(const FileDatum&) const = default;
};

using DatumSpec = std::variant<HermiteGaussian, FileDatum>;

enum class ScatteringMode { none, monitor, wave_operator, long_range };
std::string to_string(ScatteringMode m);

struct ScatteringConfig {
  ScatteringMode mode = ScatteringMode::none;
  // monitor
  std::vector<double> times;
  VerdictThresholds thresholds;
  // wave_operator
  std::optional<DatumSpec> u_minus;
  WaveOperatorOptions wave;
  // long_range: reference profile (defaults to the initial datum)
  std::optional<DatumSpec> reference;
  double t_min = 1.0;

  bool operator==(const ScatteringConfig&) const;
};

struct ScenarioConfig {
  std::string name = "scenario";
  GridSpec grid;
  SimParams params;
  /// Absent only in wave_operator mode, where the run starts from the
  /// constructed state at t0 = -T + window.
  std::optional<DatumSpec> initial_datum;
  std::vector<std::string> probes{"conserved", "sigma"};
  int snapshot_every = 0;
  std::vector<double> snapshot_times;
  ScatteringConfig scattering;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  /// Directory of the config file, for resolving relative datum paths. Not serialized.
  std::filesystem::path base_dir;

  bool operator==(const ScenarioConfig& o) const;
};

/// Strict JSON parsing: unknown keys are rejected by their dotted path,
/// syntax errors report line and column (ConfigSyntaxError), semantic
/// errors name the offending field (ConfigError). Missing keys take the
/// defaults above.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Pretty JSON text; parse_config(serialize_config(c)) == c bit for bit.
std::string serialize_config(const ScenarioConfig& cfg);

/// Probe set including the snapshots the scattering mode needs.
Probes effective_probes(const ScenarioConfig& cfg);

}  // namespace pnls

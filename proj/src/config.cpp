#include "pnls/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pnls/errors.hpp"

namespace pnls {

using Json = nlohmann::ordered_json;

std::string to_string(ScatteringMode m) {
  switch (m) {
    case ScatteringMode::none: return "none";
    case ScatteringMode::monitor: return "monitor";
    case ScatteringMode::wave_operator: return "wave_operator";
    default: return "long_range";
  }
}

bool ScatteringConfig::operator==(const ScatteringConfig& o) const {
  const auto wave_eq = [](const WaveOperatorOptions& a, const WaveOperatorOptions& b) {
    return a.T == b.T && a.window == b.window && a.ds == b.ds && a.max_iterations == b.max_iterations &&
           a.tolerance == b.tolerance && a.round_trip_dt == b.round_trip_dt;
  };
  return mode == o.mode && times == o.times && thresholds.converging_ratio == o.thresholds.converging_ratio &&
         thresholds.diverging_ratio == o.thresholds.diverging_ratio && u_minus == o.u_minus && wave_eq(wave, o.wave) &&
         reference == o.reference && t_min == o.t_min;
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return name == o.name && grid == o.grid && params == o.params && initial_datum == o.initial_datum &&
         probes == o.probes && snapshot_every == o.snapshot_every && snapshot_times == o.snapshot_times &&
         scattering == o.scattering && output_dir == o.output_dir && seed == o.seed;
}

namespace {

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(label(), "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void read(const std::string& key, double& out) {
    if (const Json* v = get(key)) out = as_double(*v, field(key));
  }
  void read(const std::string& key, int& out) {
    if (const Json* v = get(key)) out = as_int(*v, field(key));
  }
  void read(const std::string& key, std::uint64_t& out) {
    if (const Json* v = get(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(field(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void read(const std::string& key, std::string& out) {
    if (const Json* v = get(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  void read(const std::string& key, std::vector<double>& out) {
    if (const Json* v = get(key)) {
      if (!v->is_array()) throw ConfigError(field(key), "expected an array of numbers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) out.push_back(as_double((*v)[i], field(key) + "[" + std::to_string(i) + "]"));
    }
  }
  void read(const std::string& key, std::vector<int>& out) {
    if (const Json* v = get(key)) {
      if (!v->is_array()) throw ConfigError(field(key), "expected an array of integers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) out.push_back(as_int((*v)[i], field(key) + "[" + std::to_string(i) + "]"));
    }
  }
  void read(const std::string& key, std::vector<std::string>& out) {
    if (const Json* v = get(key)) {
      if (!v->is_array()) throw ConfigError(field(key), "expected an array of strings");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_string()) throw ConfigError(field(key), "expected an array of strings");
        out.push_back(e.get<std::string>());
      }
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key \"" + it.key() + "\"");
    }
  }

 private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }

  static double as_double(const Json& v, const std::string& f) {
    if (!v.is_number()) throw ConfigError(f, "expected a number");
    return v.get<double>();
  }
  static int as_int(const Json& v, const std::string& f) {
    if (!v.is_number_integer()) throw ConfigError(f, "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      throw ConfigError(f, "integer out of range");
    }
    return static_cast<int>(x);
  }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

DatumSpec parse_datum(const Json& j, const std::string& path, int d) {
  ObjectReader r(j, path);
  std::string type;
  r.read("type", type);
  if (type == "hermite_gaussian") {
    HermiteGaussian h;
    r.read("order", h.order);
    r.read("center", h.center);
    r.read("width", h.width);
    r.read("momentum", h.momentum);
    r.read("amplitude", h.amplitude);
    r.finish();
    const auto check_len = [&](std::size_t n, const char* key) {
      if (n != 0 && n != static_cast<std::size_t>(d)) {
        throw ConfigError(r.field(key), "needs 0 or d = " + std::to_string(d) + " entries");
      }
    };
    check_len(h.order.size(), "order");
    check_len(h.center.size(), "center");
    check_len(h.width.size(), "width");
    check_len(h.momentum.size(), "momentum");
    for (int k : h.order) {
      if (k < 0) throw ConfigError(r.field("order"), "Hermite orders must be >= 0");
    }
    for (double w : h.width) {
      if (!(w > 0.0)) throw ConfigError(r.field("width"), "widths must be positive");
    }
    return h;
  }
  if (type == "file") {
    FileDatum f;
    r.read("path", f.path);
    r.finish();
    if (f.path.empty()) throw ConfigError(r.field("path"), "missing datum file path");
    return f;
  }
  if (type.empty()) throw ConfigError(r.field("type"), "missing datum type (hermite_gaussian or file)");
  throw ConfigError(r.field("type"), "unknown datum type \"" + type + "\"");
}

Json datum_json(const DatumSpec& spec) {
  Json j;
  if (const auto* h = std::get_if<HermiteGaussian>(&spec)) {
    j["type"] = "hermite_gaussian";
    j["order"] = h->order;
    j["center"] = h->center;
    j["width"] = h->width;
    j["momentum"] = h->momentum;
    j["amplitude"] = h->amplitude;
  } else {
    j["type"] = "file";
    j["path"] = std::get<FileDatum>(spec).path;
  }
  return j;
}

ScatteringMode parse_mode(const std::string& s, const std::string& field) {
  if (s == "none") return ScatteringMode::none;
  if (s == "monitor") return ScatteringMode::monitor;
  if (s == "wave_operator") return ScatteringMode::wave_operator;
  if (s == "long_range") return ScatteringMode::long_range;
  throw ConfigError(field, "unknown scattering mode \"" + s + "\" (none, monitor, wave_operator, long_range)");
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

void validate_config(const ScenarioConfig& c) {
  try {
    validate(c.grid);
  } catch (const Error& e) {
    throw ConfigError("grid", e.what());
  }
  try {
    validate(c.params);
  } catch (const Error& e) {
    throw ConfigError("params", e.what());
  }
  try {
    (void)Probes::from_names(c.probes);
  } catch (const Error& e) {
    throw ConfigError("probes", e.what());
  }
  if (c.snapshot_every < 0) throw ConfigError("snapshot_every", "must be >= 0");
  for (double t : c.snapshot_times) {
    if (t < c.params.t0 || t > c.params.t1) throw ConfigError("snapshot_times", "times must lie in [t0, t1]");
  }
  if (c.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");

  const ScatteringConfig& s = c.scattering;
  if (s.mode != ScatteringMode::wave_operator && !c.initial_datum) {
    throw ConfigError("initial_datum", "required unless scattering.mode is wave_operator");
  }
  if (s.mode != ScatteringMode::monitor && !s.times.empty()) {
    throw ConfigError("scattering.times", "only used in monitor mode");
  }
  if (s.mode != ScatteringMode::wave_operator && s.u_minus) {
    throw ConfigError("scattering.u_minus", "only used in wave_operator mode");
  }
  if (s.mode != ScatteringMode::long_range && s.reference) {
    throw ConfigError("scattering.reference", "only used in long_range mode");
  }
  switch (s.mode) {
    case ScatteringMode::none: break;
    case ScatteringMode::monitor:
      if (s.times.size() < 3) throw ConfigError("scattering.times", "needs at least three times");
      for (std::size_t i = 0; i < s.times.size(); ++i) {
        if (s.times[i] < c.params.t0 || s.times[i] > c.params.t1) {
          throw ConfigError("scattering.times", "times must lie in [t0, t1]");
        }
        if (i > 0 && !(s.times[i] > s.times[i - 1])) throw ConfigError("scattering.times", "times must increase");
      }
      if (!(s.thresholds.converging_ratio > 0.0) || !(s.thresholds.diverging_ratio >= s.thresholds.converging_ratio)) {
        throw ConfigError("scattering.converging_ratio", "need 0 < converging_ratio <= diverging_ratio");
      }
      break;
    case ScatteringMode::wave_operator: {
      if (!s.u_minus) throw ConfigError("scattering.u_minus", "required in wave_operator mode");
      if (c.initial_datum) {
        throw ConfigError("initial_datum", "must be omitted in wave_operator mode (the run starts from the wave state)");
      }
      if (!(s.wave.T > 0.0) || !(s.wave.window > 0.0) || s.wave.window > s.wave.T) {
        throw ConfigError("scattering.window", "need 0 < window <= T");
      }
      const double start = -s.wave.T + s.wave.window;
      if (c.params.t0 != start) {
        throw ConfigError("params.t0", "must equal -T + window = " + std::to_string(start) + " in wave_operator mode");
      }
      if (!(s.wave.ds > 0.0) || !(s.wave.round_trip_dt > 0.0)) throw ConfigError("scattering.ds", "steps must be positive");
      if (s.wave.max_iterations < 1) throw ConfigError("scattering.max_iterations", "must be >= 1");
      if (!(s.wave.tolerance > 0.0)) throw ConfigError("scattering.tolerance", "must be positive");
      break;
    }
    case ScatteringMode::long_range:
      if (c.snapshot_every == 0 && c.snapshot_times.size() < 3) {
        throw ConfigError("snapshot_times", "long_range mode needs snapshot_every or at least three snapshot_times");
      }
      break;
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ConfigSyntaxError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg, line,
                            column);
  }
  ScenarioConfig c;
  ObjectReader r(root, "");
  r.read("name", c.name);
  if (const Json* g = r.get("grid")) {
    ObjectReader gr(*g, "grid");
    gr.read("d", c.grid.d);
    gr.read("n", c.grid.n);
    gr.read("hermite_order", c.grid.hermite_order);
    gr.read("box_half_length", c.grid.box_half_length);
    gr.read("free_points", c.grid.free_points);
    gr.finish();
  }
  if (const Json* p = r.get("params")) {
    ObjectReader pr(*p, "params");
    pr.read("lambda", c.params.lambda);
    pr.read("sigma", c.params.sigma);
    pr.read("dt", c.params.dt);
    pr.read("t0", c.params.t0);
    pr.read("t1", c.params.t1);
    pr.read("boundary_mass_tol", c.params.boundary_mass_tol);
    pr.read("sample_stride", c.params.sample_stride);
    pr.finish();
  }
  if (const Json* d = r.get("initial_datum")) c.initial_datum = parse_datum(*d, "initial_datum", c.grid.d);
  r.read("probes", c.probes);
  r.read("snapshot_every", c.snapshot_every);
  r.read("snapshot_times", c.snapshot_times);
  if (const Json* s = r.get("scattering")) {
    ObjectReader sr(*s, "scattering");
    std::string mode = "none";
    sr.read("mode", mode);
    c.scattering.mode = parse_mode(mode, "scattering.mode");
    sr.read("times", c.scattering.times);
    sr.read("converging_ratio", c.scattering.thresholds.converging_ratio);
    sr.read("diverging_ratio", c.scattering.thresholds.diverging_ratio);
    if (const Json* u = sr.get("u_minus")) c.scattering.u_minus = parse_datum(*u, "scattering.u_minus", c.grid.d);
    sr.read("T", c.scattering.wave.T);
    sr.read("window", c.scattering.wave.window);
    sr.read("ds", c.scattering.wave.ds);
    sr.read("max_iterations", c.scattering.wave.max_iterations);
    sr.read("tolerance", c.scattering.wave.tolerance);
    sr.read("round_trip_dt", c.scattering.wave.round_trip_dt);
    if (const Json* v = sr.get("reference")) c.scattering.reference = parse_datum(*v, "scattering.reference", c.grid.d);
    sr.read("t_min", c.scattering.t_min);
    sr.finish();
  }
  r.read("output_dir", c.output_dir);
  r.read("seed", c.seed);
  r.finish();
  validate_config(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ScenarioConfig c = parse_config(ss.str());
  c.base_dir = path.parent_path();
  return c;
}

std::string serialize_config(const ScenarioConfig& c) {
  Json j;
  j["name"] = c.name;
  j["grid"] = {{"d", c.grid.d},
               {"n", c.grid.n},
               {"hermite_order", c.grid.hermite_order},
               {"box_half_length", c.grid.box_half_length},
               {"free_points", c.grid.free_points}};
  j["params"] = {{"lambda", c.params.lambda},
                 {"sigma", c.params.sigma},
                 {"dt", c.params.dt},
                 {"t0", c.params.t0},
                 {"t1", c.params.t1},
                 {"boundary_mass_tol", c.params.boundary_mass_tol},
                 {"sample_stride", c.params.sample_stride}};
  if (c.initial_datum) j["initial_datum"] = datum_json(*c.initial_datum);
  j["probes"] = c.probes;
  j["snapshot_every"] = c.snapshot_every;
  j["snapshot_times"] = c.snapshot_times;
  Json s;
  const ScatteringConfig& sc = c.scattering;
  s["mode"] = to_string(sc.mode);
  switch (sc.mode) {
    case ScatteringMode::none: break;
    case ScatteringMode::monitor:
      s["times"] = sc.times;
      s["converging_ratio"] = sc.thresholds.converging_ratio;
      s["diverging_ratio"] = sc.thresholds.diverging_ratio;
      break;
    case ScatteringMode::wave_operator:
      if (sc.u_minus) s["u_minus"] = datum_json(*sc.u_minus);
      s["T"] = sc.wave.T;
      s["window"] = sc.wave.window;
      s["ds"] = sc.wave.ds;
      s["max_iterations"] = sc.wave.max_iterations;
      s["tolerance"] = sc.wave.tolerance;
      s["round_trip_dt"] = sc.wave.round_trip_dt;
      break;
    case ScatteringMode::long_range:
      if (sc.reference) s["reference"] = datum_json(*sc.reference);
      s["t_min"] = sc.t_min;
      break;
  }
  j["scattering"] = s;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

Probes effective_probes(const ScenarioConfig& c) {
  Probes p = Probes::from_names(c.probes);
  p.snapshot_every = c.snapshot_every;
  p.snapshot_times = c.snapshot_times;
  if (c.scattering.mode == ScatteringMode::monitor) {
    for (double t : c.scattering.times) p.snapshot_times.push_back(t);
  }
  return p;
}

}  // namespace pnls

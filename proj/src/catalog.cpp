#include "pnls/catalog.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "pnls/datum.hpp"
#include "pnls/diagnostics.hpp"
#include "pnls/errors.hpp"
#include "pnls/propagators.hpp"
#include "pnls/runner.hpp"
#include "pnls/scattering.hpp"
#include "pnls/transform.hpp"

namespace pnls {

namespace {

using std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Check make(std::string label, double value, std::string rel, double limit, double hi, bool pass) {
  return Check{std::move(label), value, std::move(rel), limit, hi, pass};
}

// ---------------------------------------------------------------------------
// Scenario definitions

HermiteGaussian packet(int d, double amplitude, double free_width, double momentum = 0.0) {
  HermiteGaussian h;
  for (int a = 0; a < d; ++a) {
    h.order.push_back(0);
    h.center.push_back(0.0);
    h.width.push_back(a == 0 ? 1.0 : free_width);
    h.momentum.push_back(a == 0 ? 0.0 : momentum);
  }
  h.amplitude = amplitude;
  return h;
}

ScenarioConfig base(const std::string& name, GridSpec grid, double lambda, double sigma, double dt, double t1,
                    int stride, const HermiteGaussian& datum, std::vector<std::string> probes) {
  ScenarioConfig c;
  c.name = name;
  c.grid = grid;
  c.params.lambda = lambda;
  c.params.sigma = sigma;
  c.params.dt = dt;
  c.params.t1 = t1;
  c.params.sample_stride = stride;
  c.initial_datum = datum;
  c.probes = std::move(probes);
  c.output_dir = "out/" + name;
  return c;
}

// d = 2, n = 1 short-range cell: y-width 2 puts T = 10 past the dispersive
// time, and the box keeps the sigma = 0.5 run inside the boundary guard.
const GridSpec cell_grid{2, 1, 16, 160.0, 768};

ScenarioConfig mass_conservation() {
  // 10^4 Strang steps.
  return base("mass_conservation", cell_grid, 1.0, 3.0, 0.008, 80.0, 125, packet(2, 1.0, 2.0), {"conserved"});
}

ScenarioConfig energy_order(double dt) {
  return base(dt > 0.03 ? "energy_dt040" : "energy_dt020", GridSpec{2, 1, 24, 16.0, 64}, 1.0, 1.0, dt, 2.0, 1,
              packet(2, 1.0, 1.0, 0.3), {"conserved"});
}

ScenarioConfig morawetz_defocusing() {
  return base("morawetz_defocusing", GridSpec{2, 1, 16, 128.0, 512}, 1.0, 3.0, 0.02, 40.0, 5, packet(2, 1.0, 2.0),
              {"conserved", "morawetz"});
}

ScenarioConfig decay_linear() {
  // Samples every pi/4 include every t = j pi + pi/2.
  return base("decay_linear", GridSpec{2, 1, 16, 1024.0, 4096}, 0.0, 1.0, pi / 4.0, 26.0 * pi, 1, packet(2, 1.0, 1.0),
              {"conserved", "L2", "L4", "Linf"});
}

ScenarioConfig scattering_cell(double sigma) {
  ScenarioConfig c = base(sigma == 3.0 ? "scattering_sigma3" : "scattering_sigma05", cell_grid, 1.0, sigma, 0.05, 80.0,
                          20, packet(2, 1.0, 2.0), {"conserved", "L4", "Linf"});
  c.scattering.mode = ScatteringMode::monitor;
  c.scattering.times = {10.0, 20.0, 40.0, 80.0};
  return c;
}

ScenarioConfig wave_operator_cell() {
  ScenarioConfig c =
      base("wave_operator_sigma3", GridSpec{2, 1, 16, 110.0, 512}, 1.0, 3.0, 0.05, 0.0, 20, packet(2, 1.0, 2.0), {"conserved"});
  c.initial_datum.reset();
  c.scattering.mode = ScatteringMode::wave_operator;
  c.scattering.u_minus = packet(2, 1.0, 2.0);
  c.scattering.wave.T = 40.0;
  c.scattering.wave.window = 20.0;
  c.params.t0 = -20.0;
  return c;
}

ScenarioConfig strichartz_linear(int d, double horizon) {
  const int n = d - 1;
  const std::string r = d == 2 ? "L4" : "L3";
  const std::string name = "strichartz_d" + std::to_string(d) + "_T" + std::to_string(static_cast<int>(horizon / pi)) + "pi";
  return base(name, GridSpec{d, n, d == 2 ? 16 : 12, 256.0, 1024}, 0.0, 1.0, pi / 32.0, horizon, 1,
              packet(d, 1.0, 1.0), {"conserved", r});
}

ScenarioConfig cell_3d() {
  // 32 x 64^2; y-width 3 keeps the initial spectrum inside the coarse free
  // grid (k_max = pi / dy ~ 1.6), puts T = 10 past the dispersive time ~ 9,
  // and the box holds the spread at t = 80.
  HermiteGaussian h = packet(3, 1.0, 3.0);
  ScenarioConfig c = base("cell_3d", GridSpec{3, 1, 32, 64.0, 64}, 1.0, 1.5, 0.008, 80.0, 125, h,
                          {"conserved", "morawetz"});
  c.scattering.mode = ScatteringMode::monitor;
  c.scattering.times = {10.0, 20.0, 40.0, 80.0};
  c.scattering.thresholds.converging_ratio = 0.7;
  return c;
}

ScenarioOutcome execute(const ScenarioConfig& cfg, const CatalogContext& ctx, const std::string& sub = "") {
  const auto start = std::chrono::steady_clock::now();
  ScenarioOutcome out = execute_scenario(cfg);
  if (ctx.artifacts) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_artifacts(sub.empty() ? *ctx.artifacts : *ctx.artifacts / sub, cfg, out, wall);
  }
  return out;
}

CatalogContext nested(const CatalogContext& ctx, const std::string& name) {
  CatalogContext c;
  if (ctx.artifacts) c.artifacts = *ctx.artifacts / name;
  return c;
}

double max_relative_drift(const Trajectory& traj, double DiagnosticsRecord::*field) {
  const double ref = traj.records.front().*field;
  double worst = 0.0;
  for (const auto& r : traj.records) worst = std::max(worst, std::abs(r.*field - ref) / std::abs(ref));
  return worst;
}

double max_energy_drift(const Trajectory& traj) {
  const double e0 = traj.records.front().energy;
  double worst = 0.0;
  for (const auto& r : traj.records) worst = std::max(worst, std::abs(r.energy - e0));
  return worst;
}

// ---------------------------------------------------------------------------
// Criteria

std::vector<Check> eigenstructure(const CatalogContext&) {
  // (-1/2 d^2 + x^2/2) psi_k = (k + 1/2) psi_k through the grid's own operators.
  const auto grid = Grid::make(GridSpec{2, 1, 64, 8.0, 16});
  double worst = 0.0;
  for (int k = 0; k <= 20; ++k) {
    SpectralCoeffs c(grid);
    c.coeffs[static_cast<std::size_t>(k) * grid->free_size()] = 1.0;
    const Field f = inverse_transform(c);
    const Field hf = cplx(-0.5) * apply_gradient(apply_gradient(f, 0), 0) +
                     cplx(0.5) * apply_coordinate(apply_coordinate(f, 0), 0);
    worst = std::max(worst, norm(hf - cplx(k + 0.5) * f));
  }
  return {at_most("max_k<=20 ||H1 psi_k - (k+1/2) psi_k|| (K=64)", worst, 1e-10)};
}

std::vector<Check> mehler_oracle(const CatalogContext&) {
  const auto grid = Grid::make(GridSpec{2, 1, 64, 8.0, 16});
  const Field f = sample(grid, HermiteGaussian{{0, 0}, {0.5, 0.0}, {1.1, 1.0}, {-0.3, 0.0}, 1.0});
  std::vector<Check> out;
  double worst_kernel = 0.0;
  for (double t : {0.3, 1.0, 2.5}) {
    const Field spectral = linear_propagate(f, t, FlowFactor::confined);
    const double rel = norm(mehler_apply(f, t) - spectral) / norm(spectral);
    out.push_back(at_most("rel L2 spectral vs Mehler t=" + fmt(t), rel, 1e-8));
    worst_kernel = std::max(worst_kernel, std::abs(dispersive_bound_check(t, 1, 2).ratio - 1.0));
  }
  out.push_back(at_most("max_t | |K_t| (2 pi |sin t|)^{1/2} - 1 |", worst_kernel, 1e-12));
  return out;
}

std::vector<Check> refocusing(const CatalogContext&) {
  const auto grid = Grid::make(GridSpec{2, 1, 32, 16.0, 64});
  std::mt19937_64 rng(3);
  const Field f = random_localized_field(grid, rng);
  double worst = 0.0, scale = 0.0;
  for (double t : {0.4, 1.9, 7.0}) {
    const Field a = linear_propagate(f, t, FlowFactor::confined);
    const Field b = linear_propagate(f, t + 2.0 * pi, FlowFactor::confined);
    for (std::size_t i = 0; i < a.size(); ++i) {
      worst = std::max(worst, std::abs(std::abs(a.values[i]) - std::abs(b.values[i])));
      scale = std::max(scale, std::abs(a.values[i]));
    }
  }
  return {at_most("max | |u(t+2pi)| - |u(t)| | (max|u| = " + fmt(scale) + ")", worst, 1e-10)};
}

std::vector<Check> mass_conservation_check(const CatalogContext& ctx) {
  const ScenarioConfig cfg = mass_conservation();
  const ScenarioOutcome out = execute(cfg, ctx);
  const double steps = std::round((cfg.params.t1 - cfg.params.t0) / cfg.params.dt);
  return {at_least("Strang steps", steps, 1e4),
          at_most("max relative mass drift (d=2, sigma=3)", max_relative_drift(out.trajectory, &DiagnosticsRecord::mass), 1e-12)};
}

std::vector<Check> energy_order_check(const CatalogContext& ctx) {
  const double coarse = max_energy_drift(execute(energy_order(0.04), ctx, "dt040").trajectory);
  const double fine = max_energy_drift(execute(energy_order(0.02), ctx, "dt020").trajectory);
  return {within("max energy drift ratio dt=0.04 / dt=0.02", coarse / fine, 3.2, 4.8)};
}

std::vector<Check> vector_field_suite(const CatalogContext&) {
  const auto grid = Grid::make(GridSpec{2, 1, 32, 48.0, 256});
  std::mt19937_64 rng(25);
  const Field u0 = random_localized_field(grid, rng);
  SimParams p;
  p.dt = 0.1;
  p.t1 = 6.0;
  p.sample_stride = 5;
  Probes probes;
  probes.morawetz = false;
  const Trajectory traj = run_simulation(u0, p, probes);
  double drift = 0.0;
  for (const auto& r : traj.records) {
    for (int j = 0; j < 4; ++j) {
      const double ref = traj.records.front().vf_norms[j];
      drift = std::max(drift, std::abs(r.vf_norms[j] - ref) / ref);
    }
  }

  const auto small = Grid::make(GridSpec{2, 1, 16, 8.0, 32});
  std::mt19937_64 rng2(24);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Field f = random_field(small, rng2);
    const double t = 10.0 * (trial / 100.0) - 3.0;
    const Field a1 = apply_vector_field(1, t, f);
    const Field a2 = apply_vector_field(2, t, f);
    const Field xf = apply_coordinate(f, 0);
    const Field gf = apply_gradient(f, 0);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double rhs = std::norm(xf.values[i]) + std::norm(gf.values[i]);
      const double lhs = std::norm(a1.values[i]) + std::norm(a2.values[i]);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(rhs, 1e-300));
    }
  }
  return {at_most("max_j,t relative change of ||A_j(t) u_lin(t)||", drift, 1e-9),
          at_most("pointwise energy-rotation identity, 100 random fields", worst, 1e-12)};
}

std::vector<Check> morawetz_identity_check(const CatalogContext& ctx) {
  const MorawetzReport rep = morawetz_monitor(execute(morawetz_defocusing(), ctx).trajectory);
  return {at_most("max |dI/dt - M - defect| (tolerance C h^2 + floor)", rep.identity_max_error, rep.identity_tolerance),
          at_most("max |M| / (mass^{3/2} ||grad_y u||)", rep.action_bound_max_ratio, 1.0)};
}

std::vector<Check> morawetz_bound_check(const CatalogContext& ctx) {
  const MorawetzReport rep = morawetz_monitor(execute(morawetz_defocusing(), ctx).trajectory);
  if (!rep.bound_applicable) throw InvalidArgument("Morawetz bound not applicable to this run");
  return {at_most("int ||d_y R||^2 dt over [0,40] vs 2 mass^{3/2} sup||grad_y u||", rep.cumulative, rep.bound)};
}

std::vector<Check> decay_exponents(const CatalogContext& ctx) {
  const Trajectory traj = execute(decay_linear(), ctx).trajectory;
  const DecayFit f4 = decay_exponent_fit(traj, 4.0, 5.0, 80.0);
  auto half_periods = [](double t) { return std::abs(std::fmod(t, pi) - 0.5 * pi) < 1e-6; };
  const DecayFit finf = decay_exponent_fit(traj, inf, 5.0, 80.0, half_periods);
  return {within("L4 slope on [5,80]", f4.slope, -0.27, -0.23),
          within("Linf slope at t = j pi + pi/2 (" + std::to_string(finf.samples) + " samples)", finf.slope, -0.55, -0.45)};
}

std::vector<Check> scattering_check(const CatalogContext& ctx) {
  const ScatteringReport s3 = execute(scattering_cell(3.0), ctx, "sigma3").scattering;
  const ScatteringReport s05 = execute(scattering_cell(0.5), ctx, "sigma05").scattering;
  return {below("sigma=3 ratio ||v(40)-v(20)|| / ||v(20)-v(10)||", s3.ratios.at(0), 0.5),
          below("sigma=3 ratio ||v(80)-v(40)|| / ||v(40)-v(20)||", s3.ratios.at(1), 0.5),
          at_least("sigma=3 verdict converging (1 = yes)", s3.verdict == Verdict::converging ? 1.0 : 0.0, 1.0),
          above("sigma=0.5 / sigma=3 of ||v(80)-v(40)||_Sigma", s05.diff_sigma.at(2) / s3.diff_sigma.at(2), 10.0),
          at_most("sigma=0.5 verdict converging (1 = yes)", s05.verdict == Verdict::converging ? 1.0 : 0.0, 0.0)};
}

std::vector<Check> wave_operator_check(const CatalogContext& ctx) {
  const ScenarioConfig cfg = wave_operator_cell();
  const ScatteringReport rep = execute(cfg, ctx).scattering;
  double worst = 0.0;
  for (double f : rep.contraction_factors) worst = std::max(worst, f);
  std::vector<Check> out{at_most("sigma=3 T=40 max Picard contraction factor", worst, 0.5),
                         at_most("round trip max ||e^{itH}u(t) - u_-||_Sigma / ||u_-||_Sigma", rep.round_trip_mismatch, 0.05)};

  const auto grid = Grid::make(cfg.grid);
  const Field um = sample(grid, std::get<HermiteGaussian>(*cfg.scattering.u_minus));
  SimParams p = cfg.params;
  p.sigma = 0.5;
  int raised = 0;
  for (double T : {20.0, 40.0, 80.0}) {
    WaveOperatorOptions o = cfg.scattering.wave;
    o.T = T;
    o.window = T / 2.0;
    try {
      (void)wave_operator_picard(um, p, o);
    } catch (const NoContraction&) {
      ++raised;
    }
  }
  out.push_back(at_least("sigma=0.5 NoContraction raised at T in {20,40,80}", raised, 3.0));
  return out;
}

std::vector<Check> strichartz_stability(const CatalogContext& ctx) {
  std::vector<Check> out;
  struct Triple {
    int d;
    double p, q, r;
  };
  for (const Triple& tr : {Triple{2, 8.0, 4.0, 4.0}, Triple{3, 12.0, 4.0, 3.0}}) {
    double ratio[2];
    for (int k = 0; k < 2; ++k) {
      const ScenarioConfig cfg = strichartz_linear(tr.d, (k == 0 ? 16.0 : 32.0) * pi);
      ratio[k] = strichartz_window_norm(execute(cfg, ctx, cfg.name).trajectory, tr.p, tr.q, tr.r).ratio;
    }
    char label[160];
    std::snprintf(label, sizeof label, "d=%d (p,q,r)=(%g,%g,%g) |ratio(32pi)/ratio(16pi) - 1| (ratio %.4g)", tr.d,
                  tr.p, tr.q, tr.r, ratio[1]);
    out.push_back(at_most(label, std::abs(ratio[1] / ratio[0] - 1.0), 0.05));
  }
  return out;
}

std::vector<Check> cell_3d_check(const CatalogContext& ctx) {
  const auto start = std::chrono::steady_clock::now();
  const ScenarioConfig cfg = cell_3d();
  const ScenarioOutcome out = execute(cfg, ctx);
  const MorawetzReport mor = morawetz_monitor(out.trajectory);
  const ScatteringReport& s = out.scattering;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {at_most("max relative mass drift (10^4 steps)", max_relative_drift(out.trajectory, &DiagnosticsRecord::mass), 1e-10),
          at_most("Morawetz max |dI/dt - M - defect|", mor.identity_max_error, mor.identity_tolerance),
          at_most("max |M| / (mass^{3/2} ||grad_y u||)", mor.action_bound_max_ratio, 1.0),
          below("ratio ||v(40)-v(20)|| / ||v(20)-v(10)||", s.ratios.at(0), 0.7),
          below("ratio ||v(80)-v(40)|| / ||v(40)-v(20)||", s.ratios.at(1), 0.7),
          at_most("runtime seconds", wall, 600.0)};
}

}  // namespace

// ---------------------------------------------------------------------------

Check at_most(std::string label, double value, double limit) {
  return make(std::move(label), value, "<=", limit, 0.0, value <= limit);
}
Check below(std::string label, double value, double limit) {
  return make(std::move(label), value, "<", limit, 0.0, value < limit);
}
Check at_least(std::string label, double value, double limit) {
  return make(std::move(label), value, ">=", limit, 0.0, value >= limit);
}
Check above(std::string label, double value, double limit) {
  return make(std::move(label), value, ">", limit, 0.0, value > limit);
}
Check within(std::string label, double value, double lo, double hi) {
  return make(std::move(label), value, "in", lo, hi, value >= lo && value <= hi);
}

double Check::margin() const {
  if (relation == "in") {
    const double half = 0.5 * (limit_hi - limit);
    return std::min(value - limit, limit_hi - value) / half;
  }
  if (relation == "<=" || relation == "<") return value == 0.0 ? inf : limit / value;
  return limit == 0.0 ? inf : value / limit;
}

std::string Check::describe() const {
  std::ostringstream ss;
  ss << label << " = " << fmt(value);
  if (relation == "in") {
    ss << " in [" << fmt(limit) << ", " << fmt(limit_hi) << "] (margin " << fmt(margin()) << " of half-width)";
  } else {
    ss << " " << relation << " " << fmt(limit);
    const double m = margin();
    if (std::isfinite(m) && m > 0.0) ss << " (margin " << fmt(m) << "x)";
  }
  return ss.str();
}

bool CriterionResult::pass() const {
  if (!error.empty() || checks.empty()) return false;
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return seconds <= budget_seconds;
}

std::string CriterionResult::line() const {
  std::ostringstream ss;
  ss << (pass() ? "PASS" : "FAIL") << " criterion " << id << " [" << name << "] " << title << ": ";
  if (!error.empty()) {
    ss << "error " << error;
  } else {
    for (std::size_t i = 0; i < checks.size(); ++i) {
      ss << (i ? "; " : "") << (checks[i].pass ? "" : "FAILED ") << checks[i].describe();
    }
  }
  char t[64];
  std::snprintf(t, sizeof t, " [%.1f s / budget %.0f s]", seconds, budget_seconds);
  ss << t;
  return ss.str();
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries{
      {1, "eigenstructure", "Hermite eigenstructure of the confined oscillator", 180, eigenstructure},
      {2, "mehler_oracle", "spectral propagator vs Mehler kernel quadrature", 180, mehler_oracle},
      {3, "refocusing", "2 pi periodicity of the confined modulus", 180, refocusing},
      {4, "mass_conservation", "mass drift over 10^4 Strang steps", 180, mass_conservation_check},
      {5, "energy_drift_order", "energy drift is second order in dt", 180, energy_order_check},
      {6, "vector_fields", "vector-field invariance and energy rotation", 180, vector_field_suite},
      {7, "morawetz_identity", "virial identity and action bound along a defocusing run", 180, morawetz_identity_check},
      {8, "morawetz_bound", "cumulative Morawetz integral bound, d=2 sigma=3", 180, morawetz_bound_check},
      {9, "decay_exponents", "linear decay exponents of L4 and Linf", 180, decay_exponents},
      {10, "scattering", "profile Cauchy differences, d=2, sigma=3 vs sigma=0.5", 180, scattering_check},
      {11, "wave_operator", "Picard wave operator and round trip", 180, wave_operator_check},
      {12, "strichartz_stability", "window Strichartz norms under horizon doubling", 180, strichartz_stability},
      {13, "cell_3d", "d=3 sigma=1.5 cell on 32 x 64^2", 600, cell_3d_check},
  };
  return entries;
}

const CatalogEntry& catalog_entry(const std::string& name_or_id) {
  for (const auto& e : catalog()) {
    if (e.name == name_or_id || std::to_string(e.id) == name_or_id) return e;
  }
  std::string names;
  for (const auto& e : catalog()) names += (names.empty() ? "" : ", ") + e.name;
  throw InvalidArgument("unknown catalog entry \"" + name_or_id + "\" (known: " + names + ")");
}

CriterionResult run_criterion(const CatalogEntry& entry, const CatalogContext& ctx) {
  CriterionResult res;
  res.id = entry.id;
  res.name = entry.name;
  res.title = entry.title;
  res.budget_seconds = entry.budget_seconds;
  const auto start = std::chrono::steady_clock::now();
  try {
    res.checks = entry.run(nested(ctx, entry.name));
  } catch (const Error& e) {
    res.error = e.code() + ": " + e.what();
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::vector<std::pair<std::string, ScenarioConfig>> catalog_scenarios() {
  std::vector<ScenarioConfig> all{mass_conservation(),        energy_order(0.04),
                                  energy_order(0.02),         morawetz_defocusing(),
                                  decay_linear(),             scattering_cell(3.0),
                                  scattering_cell(0.5),       wave_operator_cell(),
                                  strichartz_linear(2, 16.0 * pi), strichartz_linear(2, 32.0 * pi),
                                  strichartz_linear(3, 16.0 * pi), strichartz_linear(3, 32.0 * pi),
                                  cell_3d()};
  std::vector<std::pair<std::string, ScenarioConfig>> out;
  for (auto& c : all) out.emplace_back(c.name, std::move(c));
  return out;
}

}  // namespace pnls

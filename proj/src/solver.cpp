#include "pnls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "pnls/diagnostics.hpp"
#include "pnls/errors.hpp"
#include "pnls/transform.hpp"

namespace pnls {

namespace {

long step_count(const SimParams& p) {
  const double steps = (p.t1 - p.t0) / p.dt;
  const long n = std::lround(steps);
  if (n < 0 || std::abs(steps - n) > 1e-9 * std::max(1.0, std::abs(steps))) {
    throw InvalidArgument("t1 - t0 must be a non-negative whole number of steps dt");
  }
  return n;
}

bool all_finite(const std::vector<cplx>& u) {
  for (const cplx& z : u) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

}  // namespace

void validate(const SimParams& p) {
  if (!(p.sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  if (!(p.dt > 0.0) || !std::isfinite(p.dt)) throw InvalidArgument("dt must be finite and positive");
  if (!std::isfinite(p.lambda)) throw InvalidArgument("lambda must be finite");
  if (!(p.boundary_mass_tol > 0.0 && p.boundary_mass_tol < 1.0)) {
    throw InvalidArgument("boundary_mass_tol must lie in (0, 1)");
  }
  if (p.sample_stride < 1) throw InvalidArgument("sample_stride must be >= 1");
  step_count(p);
}

std::vector<std::string> parameter_warnings(const SimParams& p, int d, bool long_horizon) {
  std::vector<std::string> out;
  if (d >= 3 && p.sigma >= 2.0 / (d - 2)) {
    out.push_back("sigma = " + std::to_string(p.sigma) + " is not energy-subcritical for d = " + std::to_string(d) +
                  " (needs sigma < " + std::to_string(2.0 / (d - 2)) + ")");
  }
  if (long_horizon && p.lambda < 0.0 && p.sigma >= 2.0 / d) {
    out.push_back("focusing nonlinearity at or above the mass-critical power: global existence is not guaranteed");
  }
  return out;
}

void nonlinear_step_inplace(std::vector<cplx>& u, double dt, double lambda, double sigma) {
  if (lambda == 0.0) return;
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(u.size());
  const bool cubic = sigma == 1.0;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const double rho = std::norm(u[i]);
    // |u|^{2 sigma}; pow(0, sigma) = 0 for sigma > 0.
    const double power = cubic ? rho : std::pow(rho, sigma);
    u[i] *= std::polar(1.0, -lambda * power * dt);
  }
}

Field nonlinear_step(const Field& f, double dt, double lambda, double sigma) {
  Field out = f;
  nonlinear_step_inplace(out.values, dt, lambda, sigma);
  return out;
}

StrangStepper::StrangStepper(GridPtr grid, double dt, double lambda, double sigma)
    : grid_(std::move(grid)), dt_(dt), lambda_(lambda), sigma_(sigma) {
  // The unitary transform pair scales by s and 1/(M^k s) and applies the box
  // signs twice; only their product 1/M^k matters here. Folding it into the
  // phases once (exact for power-of-two M) keeps the step free of a
  // systematic scale rounding that would otherwise accumulate as mass drift.
  const PropagatorPhaseTable table = phase_table(grid_, dt);
  const double inv = 1.0 / static_cast<double>(grid_->free_size());
  phases_.resize(table.phases.size());
  for (std::size_t i = 0; i < phases_.size(); ++i) phases_[i] = table.phases[i] * inv;
}

void StrangStepper::linear_step(std::vector<cplx>& u) const {
  const Grid& g = *grid_;
  std::vector<cplx> tmp;
  for (int axis = 0; axis < g.n(); ++axis) {
    detail::apply_confined_matrix(g, g.analysis(), axis, u, tmp);
    u.swap(tmp);
  }
  g.fft_free(u, -1);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= phases_[i];
  g.fft_free(u, +1);
  for (int axis = 0; axis < g.n(); ++axis) {
    detail::apply_confined_matrix(g, g.synthesis(), axis, u, tmp);
    u.swap(tmp);
  }
}

void StrangStepper::step(Field& f) const {
  require_same_grid(*f.grid, *grid_);
  nonlinear_step_inplace(f.values, 0.5 * dt_, lambda_, sigma_);
  linear_step(f.values);
  nonlinear_step_inplace(f.values, 0.5 * dt_, lambda_, sigma_);
}

Field strang_step(const Field& f, double dt, const SimParams& params) {
  Field out = f;
  StrangStepper(f.grid, dt, params.lambda, params.sigma).step(out);
  return out;
}

Trajectory run_simulation(const Field& u0, const SimParams& params, const Probes& probes,
                          const SampleObserver& observer) {
  validate(params);
  if (u0.values.size() != u0.grid->size()) throw ShapeMismatch("run_simulation: field does not match grid");
  const long steps = step_count(params);

  Trajectory traj;
  traj.grid = u0.grid;
  traj.lambda = params.lambda;
  traj.sigma = params.sigma;
  traj.dt = params.dt * params.sample_stride;

  const StrangStepper stepper(u0.grid, params.dt, params.lambda, params.sigma);
  Field u = u0;
  long samples_taken = 0;
  const double sample_spacing = params.dt * params.sample_stride;
  for (double ts : probes.snapshot_times) {
    if (ts < params.t0 - 0.5 * sample_spacing || ts > params.t1 + 0.5 * sample_spacing) {
      throw InvalidArgument("snapshot time " + std::to_string(ts) + " lies outside [t0, t1]");
    }
  }

  auto sample = [&](long step) {
    const double t = params.t0 + step * params.dt;
    if (!all_finite(u.values)) throw NonFinite("non-finite values at t = " + std::to_string(t), t);
    DiagnosticsRecord rec = compute_record(u, t, probes, params.lambda, params.sigma);
    if (rec.boundary_mass_fraction > params.boundary_mass_tol) {
      throw BoundaryMassExceeded("boundary mass fraction " + std::to_string(rec.boundary_mass_fraction) +
                                     " exceeds tolerance at t = " + std::to_string(t),
                                 t, rec.boundary_mass_fraction);
    }
    if (probes.morawetz) {
      if (traj.records.empty()) {
        rec.cumulative_morawetz = 0.0;
      } else {
        const DiagnosticsRecord& prev = traj.records.back();
        rec.cumulative_morawetz = prev.cumulative_morawetz +
                                  0.5 * std::abs(t - prev.t) * (prev.morawetz_integrand + rec.morawetz_integrand);
      }
    }
    bool wanted = probes.snapshot_every > 0 && samples_taken % probes.snapshot_every == 0;
    for (double ts : probes.snapshot_times) {
      if (std::abs(ts - t) <= 0.5 * sample_spacing) wanted = true;
    }
    if (wanted) {
      traj.snapshot_times.push_back(t);
      traj.snapshots.push_back(u);
    }
    ++samples_taken;
    if (observer) observer(t, u, rec);
    traj.records.push_back(std::move(rec));
  };

  sample(0);
  for (long s = 1; s <= steps; ++s) {
    stepper.step(u);
    if (s % params.sample_stride == 0 || s == steps) sample(s);
  }
  return traj;
}

}  // namespace pnls

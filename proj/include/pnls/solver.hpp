#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pnls/field.hpp"
#include "pnls/propagators.hpp"
#include "pnls/trajectory.hpp"

namespace pnls {

struct SimParams {
  double lambda = 0.0;
  double sigma = 1.0;
  double dt = 0.01;
  double t0 = 0.0;
  double t1 = 1.0;
  double boundary_mass_tol = 0.01;
  int sample_stride = 1;

  bool operator==(const SimParams&) const = default;
};

/// Throws InvalidArgument on sigma <= 0, dt <= 0, tol outside (0,1), stride < 1,
/// or an interval that is not a whole number of steps.
void validate(const SimParams& p);

/// Advisory messages for energy-supercritical sigma and for focusing runs
/// at or above the mass-critical power on long horizons.
std::vector<std::string> parameter_warnings(const SimParams& p, int d, bool long_horizon);

/// u <- u exp(-i lambda |u|^{2 sigma} dt), pointwise.
Field nonlinear_step(const Field& f, double dt, double lambda, double sigma);
void nonlinear_step_inplace(std::vector<cplx>& u, double dt, double lambda, double sigma);

/// Strang splitting N(dt/2) L(dt) N(dt/2) with a cached linear phase table.
/// A negative dt steps backwards and inverts a forward step exactly.
class StrangStepper {
 public:
  StrangStepper(GridPtr grid, double dt, double lambda, double sigma);
  void step(Field& f) const;
  /// e^{-i dt H} on node values.
  void linear_step(std::vector<cplx>& u) const;
  double dt() const { return dt_; }

 private:
  GridPtr grid_;
  std::vector<cplx> phases_;  // propagator phases / M^{d-n}
  double dt_;
  double lambda_;
  double sigma_;
};

Field strang_step(const Field& f, double dt, const SimParams& params);

/// Called after every sample with the current state and its record.
using SampleObserver = std::function<void(double t, const Field& u, const DiagnosticsRecord& record)>;

/// Steps from t0 to t1, sampling every sample_stride
/// steps including both endpoints. Throws BoundaryMassExceeded or NonFinite.
Trajectory run_simulation(const Field& u0, const SimParams& params, const Probes& probes,
                          const SampleObserver& observer = {});

}  // namespace pnls

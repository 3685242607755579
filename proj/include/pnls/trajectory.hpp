#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "pnls/field.hpp"

namespace pnls {

inline constexpr double not_computed = std::numeric_limits<double>::quiet_NaN();

/// One row of observables at a sample time. Quantities whose probe was not
/// selected stay NaN.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = not_computed;
  double energy = not_computed;
  std::array<double, 3> sigma_norm_parts{not_computed, not_computed, not_computed};  // ||xu||, ||yu||, ||grad u||
  std::array<double, 4> vf_norms{not_computed, not_computed, not_computed, not_computed};  // ||A_1 u||..||A_4 u||
  double grad_x_norm = not_computed;
  double grad_y_norm = not_computed;
  double virial_I = not_computed;
  double action_M = not_computed;
  double morawetz_defect = not_computed;  // predicted lattice defect of dI/dt - M
  double morawetz_integrand = not_computed;
  double cumulative_morawetz = not_computed;
  double boundary_mass_fraction = not_computed;
  std::vector<std::pair<double, double>> lr_norms;  // (r, ||u||_{L^r}), r = inf allowed

  /// ||u||_{L^r} for a recorded exponent; throws InvalidArgument if absent.
  double lr(double r) const;
};

/// Which observables run_simulation evaluates at each sample.
struct Probes {
  bool conserved = true;
  bool sigma = true;
  bool vector_fields = true;
  bool morawetz = true;
  std::vector<double> lr_exponents;
  /// Keep a Field snapshot every `snapshot_every` samples (0 = none).
  int snapshot_every = 0;
  /// Also keep snapshots at the samples nearest these times.
  std::vector<double> snapshot_times;

  /// Names: "conserved", "sigma", "vector_fields", "morawetz", "all", and
  /// "L<r>" / "Linf" for Lebesgue norms. Throws InvalidArgument on unknown names.
  static Probes from_names(const std::vector<std::string>& names);
  std::vector<std::string> names() const;
};

/// Sampled solution history. Record times are strictly increasing; every
/// snapshot lives on `grid`.
struct Trajectory {
  GridPtr grid;
  double lambda = 0.0;
  double sigma = 1.0;
  double dt = 0.0;
  std::vector<DiagnosticsRecord> records;
  std::vector<double> snapshot_times;
  std::vector<Field> snapshots;

  std::vector<double> times() const;
  /// Snapshot taken at time t (within tol); throws InvalidArgument if absent.
  const Field& snapshot_at(double t, double tol = 1e-9) const;
};

}  // namespace pnls

#pragma once

#include <string>
#include <vector>

#include "pnls/field.hpp"
#include "pnls/solver.hpp"
#include "pnls/trajectory.hpp"

namespace pnls {

/// v = e^{itH} u, the profile seen in the interaction picture.
Field interaction_profile(const Field& u, double t);

enum class Verdict { converging, plateau, diverging };
std::string to_string(Verdict v);

/// Classifier for the per-doubling ratios of profile differences. These are
/// configuration, not claims about rates.
struct VerdictThresholds {
  double converging_ratio = 0.5;  // last ratio below this (with monotone decrease)
  double diverging_ratio = 1.1;   // last ratio above this
};

struct ScatteringReport {
  std::vector<double> times;        // T_j
  std::vector<double> diff_l2;      // ||v(T_{j+1}) - v(T_j)||
  std::vector<double> diff_sigma;   // same in the Sigma norm
  std::vector<double> diff_vf;      // sum_{j=0..4} ||A_j(0)(v(T_{j+1}) - v(T_j))||
  std::vector<double> ratios;       // diff_sigma[j+1] / diff_sigma[j]
  Verdict verdict = Verdict::plateau;
  Field u_plus;                     // final profile
  double u_plus_error = 0.0;        // last Sigma difference

  // Wave-operator mode.
  std::vector<double> contraction_factors;
  std::vector<double> picard_increments;  // max_j ||V^{(m+1)}(s_j) - V^{(m)}(s_j)||_Sigma
  int iterations = 0;
  double duhamel_residual = 0.0;          // relative, re-evaluated at the fixed point
  double round_trip_mismatch = 0.0;       // max over the window of ||e^{itH}u(t) - u_-||_Sigma / ||u_-||_Sigma
  double solver_mismatch = 0.0;           // max over the window of ||e^{itH}u(t) - V(t)||_Sigma / ||u_-||_Sigma
  Field wave_state;                       // u at the window end -T + W

  // Long-range mode.
  std::vector<double> phase_times;
  std::vector<double> phase;              // unwrapped arg <v_ref, v(t)>
  double log_coefficient = 0.0;           // c in theta ~ c log t + b
  double log_intercept = 0.0;
  double log_residual = 0.0;              // RMS misfit
};

/// Profile differences between consecutive `times` (each must have a
/// snapshot in `traj`). Throws InsufficientSamples with fewer than 3 times.
ScatteringReport scattering_monitor(const Trajectory& traj, const std::vector<double>& times,
                                    const VerdictThresholds& thresholds = {});

/// Ratio sequence classifier used by scattering_monitor. `diffs` are the
/// Sigma differences; `scale` is ||v||_Sigma for the zero-difference test.
Verdict classify(const std::vector<double>& diffs, double scale, const VerdictThresholds& thresholds);

struct WaveOperatorOptions {
  double T = 40.0;              // window starts at -T
  double window = 20.0;         // window length W
  double ds = 0.05;             // Duhamel quadrature step
  int max_iterations = 40;
  double tolerance = 1e-12;     // stop when the increment is below tol * ||u_-||_Sigma
  double round_trip_dt = 0.01;  // Strang step of the round-trip check (rounded to divide ds)
};

/// Picard iteration on V(t) = u_- - i lambda int_{-T}^t e^{isH} N(e^{-isH} V(s)) ds
/// over t in [-T, -T + W] with trapezoid quadrature, then a Strang
/// integration of the solver from -T across the window (u(t) is the
/// solver state, V the Picard fixed point). Throws NoContraction when an
/// iterate fails to shrink the increment or the iteration does not converge.
ScatteringReport wave_operator_picard(const Field& u_minus, const SimParams& params, const WaveOperatorOptions& opts);

/// theta(t) = arg <e^{-itH} v_ref, u(t)> over the trajectory snapshots with
/// t >= t_min, fitted against log t; also the profile differences between
/// consecutive snapshots. Throws VanishingOverlap if |<.,.>| < 1e-8.
ScatteringReport long_range_probe(const Trajectory& traj, const Field& v_ref, double t_min = 1.0);

}  // namespace pnls

#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "pnls/field.hpp"
#include "pnls/trajectory.hpp"

namespace pnls {

struct ConservedQuantities {
  double mass = 0.0;
  double energy = 0.0;
};

/// Mass by Parseval; <u,Hu> spectrally; lambda/(sigma+1) ||u||^{2sigma+2}
/// by collocation quadrature.
ConservedQuantities conserved_quantities(const Field& f, double lambda, double sigma);

/// A_0 = 1, A_1 = x sin t - i cos t d_x, A_2 = x cos t + i sin t d_x,
/// A_3 = -i d_y, A_4 = y + i t d_y. `component` picks the confined axis
/// (j = 1, 2) or free axis (j = 3, 4). Throws InvalidArgument on bad j/component.
Field apply_vector_field(int j, double t, const Field& f, int component = 0);
/// sqrt(sum over components ||A_j^c f||^2).
double vector_field_norm(int j, double t, const Field& f);

struct SigmaParts {
  double x = 0.0;     // ||x f||
  double y = 0.0;     // ||y f||
  double grad = 0.0;  // ||grad_{x,y} f||
  double total() const { return x + y + grad; }
};
SigmaParts sigma_parts(const Field& f);
double sigma_norm(const Field& f);

/// ||grad_x f|| and ||grad_y f||.
double confined_gradient_norm(const Field& f);
double free_gradient_norm(const Field& f);

/// Largest fraction of mass with |y_a| >= 0.9 L over the free axes.
double boundary_mass_fraction(const Field& f);

/// Full record at time t (Morawetz cumulative left to the caller).
DiagnosticsRecord compute_record(const Field& f, double t, const Probes& probes, double lambda, double sigma);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS deviation of log||u||_r from the fit
  int samples = 0;
};

/// Least-squares slope of log ||u(t)||_{L^r} versus log t over records with
/// t in [t_begin, t_end] (and `select(t)` if given). Needs t_begin >= 1 and
/// at least three samples, else InsufficientSamples.
DecayFit decay_exponent_fit(const Trajectory& traj, double r, double t_begin, double t_end,
                            const std::function<bool(double)>& select = {});

/// R(y) = int |u|^2 dx and J(y) = int Im(conj(u) grad_y u) dx on the free grid.
struct MarginalDensity {
  GridPtr grid;
  double t = 0.0;
  std::vector<double> R;
  std::vector<std::vector<double>> J;  // one array per free axis
};
MarginalDensity marginal_density(const Field& f, double t = 0.0);

struct VirialAction {
  double I = 0.0;
  double M = 0.0;
};
/// I = 1/2 sum R(y)|y-y'|R(y'), M = sum R(y') (y-y')/|y-y'| . J(y), both with
/// the free-grid cell measure. One free axis uses prefix sums; more free axes
/// use a zero-padded FFT convolution.
VirialAction virial_and_action(const MarginalDensity& md);
/// Direct O(M^{2k}) evaluation of the same sums; reference for tests.
VirialAction virial_and_action_direct(const MarginalDensity& md);

/// || |grad_y|^{(3-k)/2} R ||^2 with k = d - n, via the Fourier multiplier.
double morawetz_seminorm(const MarginalDensity& md);

/// Leading lattice-quadrature defect of dI/dt - M for the sums above:
/// h^{k+1} Z_k(-1/2) (1 + 1/k) int J . grad R, with Z_k the Epstein zeta of
/// Z^k. The continuum identity dI/dt = M holds for the sums up to this term.
double morawetz_quadrature_defect(const MarginalDensity& md);

/// C_k in  int_0^T seminorm dt <= C_k mass^{3/2} sup ||grad_y u||.
double morawetz_constant(int free_dims);

struct MorawetzReport {
  std::vector<double> times;
  std::vector<double> dIdt;           // centered differences at interior samples
  std::vector<double> action;         // M at the same samples
  double identity_raw_max_error = 0.0;  // max |dI/dt - M|
  double identity_max_error = 0.0;      // max |dI/dt - M - quadrature defect|
  double identity_tolerance = 0.0;
  bool identity_pass = false;
  double action_bound_max_ratio = 0.0;  // max |M| / (mass^{3/2} ||grad_y u||)
  bool action_bound_pass = false;
  double cumulative = 0.0;
  double bound = 0.0;                 // C_k mass^{3/2} sup ||grad_y u||
  bool bound_pass = false;
  bool bound_applicable = false;      // lambda > 0
};

/// Relative quadrature floor of the dI/dt = M check, as a fraction of max |M|.
inline constexpr double identity_floor_rel = 1e-6;

/// Checks dI/dt = M, |M| <= mass^{3/2} ||grad_y u||, and the cumulative bound.
/// Needs the Morawetz probe on every record and uniformly spaced samples.
MorawetzReport morawetz_monitor(const Trajectory& traj);

/// (q, r) is k-admissible: 2 <= q, r <= inf, 2/q + k/r = k/2, (q, r, k) != (2, inf, 2).
bool is_admissible(double q, double r, int k);

struct StrichartzNorm {
  double value = 0.0;
  double ratio = 0.0;  // value / ||u_0||
  int windows = 0;
};
/// l^p over gamma of L^q(I_gamma; L^r), I_gamma = pi [gamma-1, gamma+1),
/// trapezoid in time. Requires (q, r) d-admissible and (p, r) (d-n)-admissible.
StrichartzNorm strichartz_window_norm(const Trajectory& traj, double p, double q, double r);

}  // namespace pnls

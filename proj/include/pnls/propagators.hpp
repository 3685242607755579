#pragma once

#include "pnls/field.hpp"

namespace pnls {

enum class FlowFactor { full, confined, free };

/// exp(-i t (|k| + n/2)) * exp(-i t |eta|^2 / 2) per spectral coefficient,
/// or one of the two commuting factors alone.
struct PropagatorPhaseTable {
  GridPtr grid;
  double t = 0.0;
  FlowFactor factor = FlowFactor::full;
  std::vector<cplx> phases;
};

PropagatorPhaseTable phase_table(const GridPtr& grid, double t, FlowFactor factor = FlowFactor::full);

/// e^{-itH} in the spectral basis; t may be negative.
SpectralCoeffs linear_propagate(const SpectralCoeffs& c, double t);
SpectralCoeffs linear_propagate(const SpectralCoeffs& c, const PropagatorPhaseTable& table);
/// Field-level convenience: transform, propagate, transform back.
Field linear_propagate(const Field& f, double t, FlowFactor factor = FlowFactor::full);

/// (2 pi i sin t)^{-n/2} with the branch continued from t -> 0+ and the
/// phase e^{-i pi n m / 2} picked up at each refocusing time m pi.
/// Throws SingularTime when |sin t| < 1e-6.
cplx mehler_prefactor(double t, int n);

/// 1D Mehler kernel K_t(x, x') (without quadrature weight).
cplx mehler_kernel(double t, double x, double xp);

/// e^{-itH_1} on the confined axes by direct quadrature of the Mehler kernel:
/// the field's Hermite interpolant is sampled on a uniform x' grid fine enough
/// for the kernel's chirp, and the integral is a trapezoid sum. Never touches
/// the spectral phases; free axes untouched.
Field mehler_apply(const Field& f, double t);

struct DispersiveBound {
  double measured = 0.0;        // max |Mehler kernel| over sampled (x, x')
  double bound = 0.0;           // (2 pi |sin t|)^{-n/2}
  double ratio = 0.0;           // measured / bound
  double free_measured = 0.0;   // max |free kernel| over sampled (y, y')
  double free_bound = 0.0;      // (2 pi |t|)^{-(d-n)/2}
};

DispersiveBound dispersive_bound_check(double t, int n, int d);

}  // namespace pnls

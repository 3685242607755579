#include "pnls/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pnls/errors.hpp"
#include "pnls/hermite.hpp"
#include "pnls/transform.hpp"

namespace pnls {

using std::numbers::pi;

PropagatorPhaseTable phase_table(const GridPtr& grid, double t, FlowFactor factor) {
  const Grid& g = *grid;
  PropagatorPhaseTable table{grid, t, factor, std::vector<cplx>(g.size())};
  const std::size_t fs = g.free_size();
  const auto& levels = g.hermite_levels();
  const auto& eta2 = g.free_eta_squared();
  const bool with_confined = factor != FlowFactor::free;
  const bool with_free = factor != FlowFactor::confined;

  std::vector<cplx> free_phase(fs, cplx(1.0));
  if (with_free) {
    for (std::size_t fi = 0; fi < fs; ++fi) free_phase[fi] = std::polar(1.0, -0.5 * t * eta2[fi]);
  }
  for (std::size_t ci = 0; ci < g.confined_size(); ++ci) {
    const cplx cp = with_confined ? std::polar(1.0, -t * (levels[ci] + 0.5 * g.n())) : cplx(1.0);
    for (std::size_t fi = 0; fi < fs; ++fi) table.phases[ci * fs + fi] = cp * free_phase[fi];
  }
  return table;
}

SpectralCoeffs linear_propagate(const SpectralCoeffs& c, const PropagatorPhaseTable& table) {
  require_same_grid(*c.grid, *table.grid);
  SpectralCoeffs out = c;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] *= table.phases[i];
  return out;
}

SpectralCoeffs linear_propagate(const SpectralCoeffs& c, double t) {
  return linear_propagate(c, phase_table(c.grid, t));
}

Field linear_propagate(const Field& f, double t, FlowFactor factor) {
  return inverse_transform(linear_propagate(forward_transform(f), phase_table(f.grid, t, factor)));
}

cplx mehler_prefactor(double t, int n) {
  const double s = std::sin(t);
  if (std::abs(s) < 1e-6) throw SingularTime("Mehler kernel is singular at t = " + std::to_string(t));
  const double m = std::floor(t / pi);
  const double modulus = std::pow(2.0 * pi * std::abs(s), -0.5 * n);
  return std::polar(modulus, -0.25 * pi * n - 0.5 * pi * n * m);
}

cplx mehler_kernel(double t, double x, double xp) {
  const double s = std::sin(t);
  const double c = std::cos(t);
  const double phase = ((x * x + xp * xp) * c - 2.0 * x * xp) / (2.0 * s);
  return mehler_prefactor(t, 1) * std::polar(1.0, phase);
}

Field mehler_apply(const Field& f, double t) {
  const Grid& g = *f.grid;
  if (f.values.size() != g.size()) throw ShapeMismatch("mehler_apply: field does not match grid");
  const int K = g.hermite_order();
  const auto& x = g.nodes();
  const cplx pref = mehler_prefactor(t, 1);
  const double s = std::sin(t);
  const double c = std::cos(t);

  // Uniform trapezoid in x' over the support of the Hermite interpolant.
  // The step resolves the largest phase gradient |x' cot t - x / sin t|.
  const double reach = std::sqrt(2.0 * K + 1.0) + 6.0;
  const double omega = reach * (std::abs(c) + 1.0) / std::abs(s);
  const double h = std::min(0.05, std::numbers::pi / (4.0 * omega));
  const int half = static_cast<int>(std::ceil(reach / h));
  const int count = 2 * half + 1;

  // interp(j, l): value at x'_j of the interpolant of node value e_l.
  Matrix<double> interp(count, K);
  std::vector<double> psi(K);
  for (int j = 0; j < count; ++j) {
    hermite_functions(K, (j - half) * h, psi);
    for (int l = 0; l < K; ++l) {
      double v = 0.0;
      for (int k = 0; k < K; ++k) v += psi[k] * g.analysis()(k, l);
      interp(j, l) = v;
    }
  }
  Matrix<cplx> kernel(K, K);
  for (int i = 0; i < K; ++i) {
    std::vector<cplx> row(K);
    for (int j = 0; j < count; ++j) {
      const double xp = (j - half) * h;
      const double phase = ((x[i] * x[i] + xp * xp) * c - 2.0 * x[i] * xp) / (2.0 * s);
      const cplx kv = std::polar(h, phase);
      for (int l = 0; l < K; ++l) row[l] += kv * interp(j, l);
    }
    for (int l = 0; l < K; ++l) kernel(i, l) = pref * row[l];
  }
  std::vector<cplx> a = f.values;
  std::vector<cplx> b;
  for (int axis = 0; axis < g.n(); ++axis) {
    detail::apply_confined_matrix(g, kernel, axis, a, b);
    a.swap(b);
  }
  return Field(f.grid, std::move(a));
}

DispersiveBound dispersive_bound_check(double t, int n, int d) {
  if (n < 1 || d <= n) throw InvalidArgument("dispersive_bound_check needs 1 <= n < d");
  DispersiveBound r;
  r.bound = std::pow(2.0 * pi * std::abs(std::sin(t)), -0.5 * n);
  const cplx pref = mehler_prefactor(t, n);
  const double s = std::sin(t);
  const double c = std::cos(t);
  // Sample the n-dimensional kernel on a lattice of (x, x') pairs.
  const int samples = 9;
  const int points = static_cast<int>(std::pow(samples, n));
  auto coord = [&](int idx, int axis) {
    for (int a = 0; a < axis; ++a) idx /= samples;
    return -4.0 + 8.0 * (idx % samples) / (samples - 1);
  };
  for (int p = 0; p < points; ++p)
    for (int q = 0; q < points; ++q) {
      double phase = 0.0;
      for (int a = 0; a < n; ++a) {
        const double xa = coord(p, a);
        const double xpa = 0.5 * coord(q, a) + 0.3;
        phase += ((xa * xa + xpa * xpa) * c - 2.0 * xa * xpa) / (2.0 * s);
      }
      r.measured = std::max(r.measured, std::abs(pref * std::polar(1.0, phase)));
    }
  r.ratio = r.measured / r.bound;

  const int k = d - n;
  r.free_bound = std::pow(2.0 * pi * std::abs(t), -0.5 * k);
  // Free kernel (2 pi i t)^{-k/2} e^{i|y-y'|^2/(2t)}.
  const cplx free_pref = std::pow(cplx(0.0, 2.0 * pi * t), -0.5 * k);
  for (int p = 0; p < samples; ++p) {
    const double dy = -4.0 + 8.0 * p / (samples - 1);
    r.free_measured = std::max(r.free_measured, std::abs(free_pref * std::polar(1.0, k * dy * dy / (2.0 * t))));
  }
  return r;
}

}  // namespace pnls

#include "pnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pnls/errors.hpp"
#include "pnls/transform.hpp"

namespace pnls {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

bool same_exponent(double a, double b) { return a == b || (std::isinf(a) && std::isinf(b)); }

// i * z
cplx times_i(cplx z) { return {-z.imag(), z.real()}; }

// sum_j w_j |a_j|^2 over all grid points.
double weighted_sq(const Grid& g, const std::vector<cplx>& a) {
  const auto& w = g.cell_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * std::norm(a[i]);
  return s;
}

}  // namespace

double DiagnosticsRecord::lr(double r) const {
  for (const auto& [exponent, value] : lr_norms) {
    if (same_exponent(exponent, r)) return value;
  }
  throw InvalidArgument("record has no L^" + std::to_string(r) + " norm");
}

Probes Probes::from_names(const std::vector<std::string>& names) {
  Probes p;
  p.conserved = p.sigma = p.vector_fields = p.morawetz = false;
  for (const std::string& name : names) {
    if (name == "conserved") {
      p.conserved = true;
    } else if (name == "sigma") {
      p.sigma = true;
    } else if (name == "vector_fields") {
      p.vector_fields = true;
    } else if (name == "morawetz") {
      p.morawetz = true;
    } else if (name == "all") {
      p.conserved = p.sigma = p.vector_fields = p.morawetz = true;
    } else if (name == "Linf") {
      p.lr_exponents.push_back(inf);
    } else if (name.size() > 1 && name[0] == 'L') {
      std::size_t used = 0;
      double r = 0.0;
      try {
        r = std::stod(name.substr(1), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != name.size() - 1 || !(r >= 1.0)) throw InvalidArgument("unknown probe \"" + name + "\"");
      p.lr_exponents.push_back(r);
    } else {
      throw InvalidArgument("unknown probe \"" + name + "\"");
    }
  }
  return p;
}

std::vector<std::string> Probes::names() const {
  std::vector<std::string> out;
  if (conserved) out.emplace_back("conserved");
  if (sigma) out.emplace_back("sigma");
  if (vector_fields) out.emplace_back("vector_fields");
  if (morawetz) out.emplace_back("morawetz");
  for (double r : lr_exponents) {
    if (std::isinf(r)) {
      out.emplace_back("Linf");
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "L%.17g", r);
      out.emplace_back(buf);
    }
  }
  return out;
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(records.size());
  for (const auto& r : records) t.push_back(r.t);
  return t;
}

const Field& Trajectory::snapshot_at(double t, double tol) const {
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    if (std::abs(snapshot_times[i] - t) <= tol * std::max(1.0, std::abs(t))) return snapshots[i];
  }
  throw InvalidArgument("trajectory has no snapshot at t = " + std::to_string(t));
}

ConservedQuantities conserved_quantities(const Field& f, double lambda, double sigma) {
  const Grid& g = *f.grid;
  const SpectralCoeffs c = forward_transform(f);
  const std::size_t fs = g.free_size();
  const auto& levels = g.hermite_levels();
  const auto& eta2 = g.free_eta_squared();
  ConservedQuantities q;
  double linear = 0.0;
  for (std::size_t ci = 0; ci < g.confined_size(); ++ci) {
    const double osc = levels[ci] + 0.5 * g.n();
    for (std::size_t fi = 0; fi < fs; ++fi) {
      const double a = std::norm(c.coeffs[ci * fs + fi]);
      q.mass += a;
      linear += (osc + 0.5 * eta2[fi]) * a;
    }
  }
  double potential = 0.0;
  if (lambda != 0.0) {
    const auto& w = g.cell_weights();
    for (std::size_t i = 0; i < f.values.size(); ++i) potential += w[i] * std::pow(std::norm(f.values[i]), sigma + 1.0);
    potential *= lambda / (sigma + 1.0);
  }
  q.energy = linear + potential;
  return q;
}

Field apply_vector_field(int j, double t, const Field& f, int component) {
  const Grid& g = *f.grid;
  if (j == 0) return f;
  if (j < 0 || j > 4) throw InvalidArgument("vector field index must be 0..4, got " + std::to_string(j));
  const bool confined = j <= 2;
  const int count = confined ? g.n() : g.free_dims();
  if (component < 0 || component >= count) {
    throw InvalidArgument("vector field component out of range: " + std::to_string(component));
  }
  const int axis = confined ? component : g.n() + component;
  const Field coord = apply_coordinate(f, axis);
  const Field grad = apply_gradient(f, axis);
  Field out(f.grid);
  const double s = std::sin(t);
  const double c = std::cos(t);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const cplx ig = times_i(grad.values[i]);
    switch (j) {
      case 1: out.values[i] = s * coord.values[i] - c * ig; break;
      case 2: out.values[i] = c * coord.values[i] + s * ig; break;
      case 3: out.values[i] = -ig; break;
      default: out.values[i] = coord.values[i] + t * ig; break;
    }
  }
  return out;
}

double vector_field_norm(int j, double t, const Field& f) {
  if (j == 0) return norm(f);
  const int count = j <= 2 ? f.grid->n() : f.grid->free_dims();
  double s = 0.0;
  for (int c = 0; c < count; ++c) s += norm_squared(apply_vector_field(j, t, f, c));
  return std::sqrt(s);
}

SigmaParts sigma_parts(const Field& f) {
  const Grid& g = *f.grid;
  SigmaParts p;
  double x2 = 0.0, y2 = 0.0, g2 = 0.0;
  for (int a = 0; a < g.d(); ++a) {
    const double c2 = norm_squared(apply_coordinate(f, a));
    (a < g.n() ? x2 : y2) += c2;
    g2 += norm_squared(apply_gradient(f, a));
  }
  p.x = std::sqrt(x2);
  p.y = std::sqrt(y2);
  p.grad = std::sqrt(g2);
  return p;
}

double sigma_norm(const Field& f) { return sigma_parts(f).total(); }

double confined_gradient_norm(const Field& f) {
  double s = 0.0;
  for (int a = 0; a < f.grid->n(); ++a) s += norm_squared(apply_gradient(f, a));
  return std::sqrt(s);
}

double free_gradient_norm(const Field& f) {
  const Grid& g = *f.grid;
  double s = 0.0;
  for (int a = 0; a < g.free_dims(); ++a) s += norm_squared(apply_gradient(f, g.n() + a));
  return std::sqrt(s);
}

double boundary_mass_fraction(const Field& f) {
  const Grid& g = *f.grid;
  const auto& w = g.cell_weights();
  const std::size_t fs = g.free_size();
  const double edge = 0.9 * g.box_half_length();
  double total = 0.0;
  std::vector<double> outer(g.free_dims(), 0.0);
  for (std::size_t ci = 0; ci < g.confined_size(); ++ci) {
    for (std::size_t fi = 0; fi < fs; ++fi) {
      const std::size_t i = ci * fs + fi;
      const double m = w[i] * std::norm(f.values[i]);
      total += m;
      for (int a = 0; a < g.free_dims(); ++a) {
        if (std::abs(g.free_coord(fi, a)) >= edge) outer[a] += m;
      }
    }
  }
  if (total == 0.0) return 0.0;
  return *std::max_element(outer.begin(), outer.end()) / total;
}

DiagnosticsRecord compute_record(const Field& f, double t, const Probes& probes, double lambda, double sigma) {
  const Grid& g = *f.grid;
  DiagnosticsRecord rec;
  rec.t = t;
  rec.boundary_mass_fraction = boundary_mass_fraction(f);
  if (probes.conserved) {
    const ConservedQuantities q = conserved_quantities(f, lambda, sigma);
    rec.mass = q.mass;
    rec.energy = q.energy;
  }
  if (probes.sigma || probes.vector_fields || probes.morawetz) {
    // One coordinate and one gradient per axis feed the Sigma parts and all
    // four vector fields.
    double x2 = 0.0, y2 = 0.0, gx2 = 0.0, gy2 = 0.0;
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
    const double s = std::sin(t);
    const double c = std::cos(t);
    std::vector<cplx> tmp(f.values.size());
    for (int a = 0; a < g.d(); ++a) {
      const bool confined = a < g.n();
      const Field coord = apply_coordinate(f, a);
      const Field grad = apply_gradient(f, a);
      (confined ? x2 : y2) += weighted_sq(g, coord.values);
      (confined ? gx2 : gy2) += weighted_sq(g, grad.values);
      if (!probes.vector_fields) continue;
      if (confined) {
        for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = s * coord.values[i] - c * times_i(grad.values[i]);
        a1 += weighted_sq(g, tmp);
        for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = c * coord.values[i] + s * times_i(grad.values[i]);
        a2 += weighted_sq(g, tmp);
      } else {
        a3 += weighted_sq(g, grad.values);
        for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = coord.values[i] + t * times_i(grad.values[i]);
        a4 += weighted_sq(g, tmp);
      }
    }
    rec.grad_x_norm = std::sqrt(gx2);
    rec.grad_y_norm = std::sqrt(gy2);
    if (probes.sigma) rec.sigma_norm_parts = {std::sqrt(x2), std::sqrt(y2), std::sqrt(gx2 + gy2)};
    if (probes.vector_fields) rec.vf_norms = {std::sqrt(a1), std::sqrt(a2), std::sqrt(a3), std::sqrt(a4)};
  }
  if (probes.morawetz) {
    const MarginalDensity md = marginal_density(f, t);
    const VirialAction va = virial_and_action(md);
    rec.virial_I = va.I;
    rec.action_M = va.M;
    rec.morawetz_defect = morawetz_quadrature_defect(md);
    rec.morawetz_integrand = morawetz_seminorm(md);
  }
  for (double r : probes.lr_exponents) rec.lr_norms.emplace_back(r, lr_norm(f, r));
  return rec;
}

DecayFit decay_exponent_fit(const Trajectory& traj, double r, double t_begin, double t_end,
                            const std::function<bool(double)>& select) {
  if (!(t_begin >= 1.0) || !(t_end > t_begin)) throw InvalidArgument("decay fit window must satisfy 1 <= T1 < T2");
  std::vector<double> lx, ly;
  for (const auto& rec : traj.records) {
    if (rec.t < t_begin || rec.t > t_end) continue;
    if (select && !select(rec.t)) continue;
    lx.push_back(std::log(rec.t));
    ly.push_back(std::log(rec.lr(r)));
  }
  const int n = static_cast<int>(lx.size());
  if (n < 3) throw InsufficientSamples("decay fit needs at least 3 samples in the window, got " + std::to_string(n));
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw InsufficientSamples("decay fit samples share one time");
  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.samples = n;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

bool is_admissible(double q, double r, int k) {
  if (k < 1) return false;
  if (!(q >= 2.0) || !(r >= 2.0)) return false;
  if (k == 2 && q == 2.0 && std::isinf(r)) return false;
  const double lhs = 2.0 / q + k / r;  // 1/inf == 0
  return std::abs(lhs - 0.5 * k) <= 1e-12 * std::max(1.0, 0.5 * k);
}

StrichartzNorm strichartz_window_norm(const Trajectory& traj, double p, double q, double r) {
  const Grid& g = *traj.grid;
  if (!is_admissible(q, r, g.d())) {
    throw AdmissibilityError("(q, r) = (" + std::to_string(q) + ", " + std::to_string(r) + ") is not " +
                             std::to_string(g.d()) + "-admissible");
  }
  if (!is_admissible(p, r, g.free_dims())) {
    throw AdmissibilityError("(p, r) = (" + std::to_string(p) + ", " + std::to_string(r) + ") is not " +
                             std::to_string(g.free_dims()) + "-admissible");
  }
  const auto& recs = traj.records;
  if (recs.size() < 2) throw InsufficientSamples("Strichartz norm needs at least two samples");
  const double pi = std::numbers::pi;
  const double t_first = recs.front().t;
  const double t_last = recs.back().t;
  const double h_max = [&] {
    double h = 0.0;
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) h = std::max(h, recs[i + 1].t - recs[i].t);
    return h;
  }();
  // Trapezoid in time needs several samples per window of length 2 pi.
  if (h_max > 2.0 * pi / 16.0) {
    throw InsufficientSamples("sample spacing " + std::to_string(h_max) + " too coarse for windows of length 2 pi");
  }

  std::vector<double> lr(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) lr[i] = recs[i].lr(r);

  const long g_lo = static_cast<long>(std::floor(t_first / pi)) - 1;
  const long g_hi = static_cast<long>(std::ceil(t_last / pi)) + 1;
  std::vector<double> window_norms;
  for (long gamma = g_lo; gamma <= g_hi; ++gamma) {
    const double a = pi * (gamma - 1);
    const double b = pi * (gamma + 1);
    if (b <= t_first || a >= t_last) continue;
    double value = 0.0;
    if (std::isinf(q)) {
      for (std::size_t i = 0; i < recs.size(); ++i) {
        if (recs[i].t >= a && recs[i].t < b) value = std::max(value, lr[i]);
      }
    } else {
      double integral = 0.0;
      for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
        const double lo = std::max(a, recs[i].t);
        const double hi = std::min(b, recs[i + 1].t);
        if (hi <= lo) continue;
        integral += (hi - lo) * 0.5 * (std::pow(lr[i], q) + std::pow(lr[i + 1], q));
      }
      value = std::pow(integral, 1.0 / q);
    }
    window_norms.push_back(value);
  }

  StrichartzNorm out;
  out.windows = static_cast<int>(window_norms.size());
  if (std::isinf(p)) {
    for (double v : window_norms) out.value = std::max(out.value, v);
  } else {
    double s = 0.0;
    for (double v : window_norms) s += std::pow(v, p);
    out.value = std::pow(s, 1.0 / p);
  }
  const double m0 = recs.front().mass;
  const double u0 = std::isfinite(m0) ? std::sqrt(m0) : recs.front().lr(2.0);
  out.ratio = out.value / u0;
  return out;
}

}  // namespace pnls

#include "pnls/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pnls/diagnostics.hpp"
#include "pnls/errors.hpp"
#include "pnls/propagators.hpp"
#include "pnls/transform.hpp"

namespace pnls {

namespace {

double vf_equivalent_norm(const Field& f) {
  double s = 0.0;
  for (int j = 0; j <= 4; ++j) s += vector_field_norm(j, 0.0, f);
  return s;
}

// e^{isH} N(e^{-isH} v) with N(u) = |u|^{2 sigma} u, in spectral coefficients.
SpectralCoeffs duhamel_integrand(const SpectralCoeffs& v, double s, double sigma) {
  Field u = inverse_transform(linear_propagate(v, s));
  for (auto& z : u.values) z *= (sigma == 1.0 ? std::norm(z) : std::pow(std::norm(z), sigma));
  return linear_propagate(forward_transform(u), -s);
}

double sigma_of(const SpectralCoeffs& c) { return sigma_norm(inverse_transform(c)); }

}  // namespace

Field interaction_profile(const Field& u, double t) { return linear_propagate(u, -t); }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::converging: return "converging";
    case Verdict::plateau: return "plateau";
    default: return "diverging";
  }
}

Verdict classify(const std::vector<double>& diffs, double scale, const VerdictThresholds& th) {
  if (diffs.empty()) return Verdict::plateau;
  const double zero = 1e-13 * std::max(scale, 1e-300);
  if (std::all_of(diffs.begin(), diffs.end(), [&](double d) { return d <= zero; })) return Verdict::converging;
  if (diffs.size() < 2) return Verdict::plateau;
  const double last = diffs.back() / diffs[diffs.size() - 2];
  if (last > th.diverging_ratio) return Verdict::diverging;
  const std::size_t tail = std::min<std::size_t>(3, diffs.size());
  bool monotone = true;
  for (std::size_t i = diffs.size() - tail; i + 1 < diffs.size(); ++i) monotone = monotone && diffs[i + 1] < diffs[i];
  if (monotone && last < th.converging_ratio) return Verdict::converging;
  return Verdict::plateau;
}

ScatteringReport scattering_monitor(const Trajectory& traj, const std::vector<double>& times,
                                    const VerdictThresholds& thresholds) {
  if (times.size() < 3) throw InsufficientSamples("scattering monitor needs at least three sample times");
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    if (!(times[i + 1] > times[i])) throw InvalidArgument("scattering times must increase");
  }
  ScatteringReport rep;
  rep.times = times;
  std::vector<Field> profiles;
  for (double t : times) {
    const Field* snap = nullptr;
    try {
      snap = &traj.snapshot_at(t);
    } catch (const InvalidArgument&) {
      throw InsufficientSamples("trajectory has no snapshot at T = " + std::to_string(t) + " (horizon too short?)");
    }
    profiles.push_back(interaction_profile(*snap, t));
  }
  for (std::size_t i = 0; i + 1 < profiles.size(); ++i) {
    const Field diff = profiles[i + 1] - profiles[i];
    rep.diff_l2.push_back(norm(diff));
    rep.diff_sigma.push_back(sigma_norm(diff));
    rep.diff_vf.push_back(vf_equivalent_norm(diff));
  }
  for (std::size_t i = 0; i + 1 < rep.diff_sigma.size(); ++i) {
    rep.ratios.push_back(rep.diff_sigma[i] > 0.0 ? rep.diff_sigma[i + 1] / rep.diff_sigma[i] : 0.0);
  }
  rep.u_plus = profiles.back();
  rep.u_plus_error = rep.diff_sigma.back();
  rep.verdict = classify(rep.diff_sigma, sigma_norm(rep.u_plus), thresholds);
  return rep;
}

ScatteringReport wave_operator_picard(const Field& u_minus, const SimParams& params, const WaveOperatorOptions& o) {
  if (!(o.T > 0.0) || !(o.window > 0.0) || !(o.window <= o.T) || !(o.ds > 0.0)) {
    throw InvalidArgument("wave operator needs 0 < window <= T and ds > 0");
  }
  const long n_steps = std::lround(o.window / o.ds);
  if (n_steps < 2 || std::abs(n_steps * o.ds - o.window) > 1e-9 * o.window) {
    throw QuadratureResolution("window must be a whole number (>= 2) of quadrature steps ds");
  }
  const double lambda = params.lambda;
  const double sigma = params.sigma;
  const std::size_t count = static_cast<std::size_t>(n_steps) + 1;
  auto s_at = [&](std::size_t j) { return -o.T + static_cast<double>(j) * o.ds; };

  const SpectralCoeffs cminus = forward_transform(u_minus);
  const double scale = sigma_norm(u_minus);
  std::vector<SpectralCoeffs> V(count, cminus);

  // One Picard sweep: V_new(s_j) = u_- - i lambda trapz_{s_0..s_j} F(V_old).
  auto sweep = [&](const std::vector<SpectralCoeffs>& old) {
    std::vector<SpectralCoeffs> integrand(count);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(count); ++j) {
      integrand[j] = duhamel_integrand(old[j], s_at(j), sigma);
    }
    std::vector<SpectralCoeffs> out(count, cminus);
    std::vector<cplx> acc(cminus.coeffs.size(), cplx(0.0));
    const cplx factor(0.0, -lambda * 0.5 * o.ds);
    for (std::size_t j = 1; j < count; ++j) {
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += integrand[j - 1].coeffs[i] + integrand[j].coeffs[i];
      for (std::size_t i = 0; i < acc.size(); ++i) out[j].coeffs[i] += factor * acc[i];
    }
    return out;
  };
  auto max_increment = [&](const std::vector<SpectralCoeffs>& a, const std::vector<SpectralCoeffs>& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < count; ++j) m = std::max(m, sigma_of(a[j] - b[j]));
    return m;
  };

  ScatteringReport rep;
  bool converged = false;
  for (int it = 0; it < o.max_iterations; ++it) {
    std::vector<SpectralCoeffs> next = sweep(V);
    const double inc = max_increment(next, V);
    V.swap(next);
    rep.iterations = it + 1;
    rep.picard_increments.push_back(inc);
    if (inc <= o.tolerance * scale) {
      converged = true;
      break;
    }
    const std::size_t m = rep.picard_increments.size();
    if (m >= 2) {
      const double factor = inc / rep.picard_increments[m - 2];
      rep.contraction_factors.push_back(factor);
      if (!(factor < 1.0)) {
        throw NoContraction("Picard increment grew by a factor " + std::to_string(factor) + " at iteration " +
                            std::to_string(it + 1) + " (T = " + std::to_string(o.T) + ")");
      }
    }
    if (!std::isfinite(inc)) throw NoContraction("Picard iterate became non-finite");
  }
  if (!converged) {
    throw NoContraction("Picard iteration did not converge in " + std::to_string(o.max_iterations) + " iterations");
  }
  rep.duhamel_residual = max_increment(sweep(V), V) / scale;

  // Round trip: the splitting solver, started from e^{iTH}u_- at -T, must
  // keep its interaction profile next to u_- and on the Picard iterate.
  const double t_end = s_at(count - 1);
  rep.wave_state = inverse_transform(linear_propagate(V.back(), t_end));
  Field u = inverse_transform(linear_propagate(cminus, -o.T));
  const long sub = std::max(1L, std::lround(o.ds / o.round_trip_dt));
  const StrangStepper stepper(u.grid, o.ds / sub, lambda, sigma);
  for (std::size_t j = 1; j < count; ++j) {
    for (long s = 0; s < sub; ++s) stepper.step(u);
    const Field v = interaction_profile(u, s_at(j));
    rep.round_trip_mismatch = std::max(rep.round_trip_mismatch, sigma_norm(v - u_minus) / scale);
    rep.solver_mismatch = std::max(rep.solver_mismatch, sigma_norm(v - inverse_transform(V[j])) / scale);
  }
  rep.times = {-o.T, t_end};
  rep.verdict = Verdict::converging;
  rep.u_plus = inverse_transform(V.back());
  return rep;
}

ScatteringReport long_range_probe(const Trajectory& traj, const Field& v_ref, double t_min) {
  ScatteringReport rep;
  std::vector<Field> profiles;
  double prev = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const double t = traj.snapshot_times[i];
    if (t < t_min) continue;
    const Field v = interaction_profile(traj.snapshots[i], t);
    const cplx overlap = inner_product(v_ref, v);
    if (std::abs(overlap) < 1e-8) {
      throw VanishingOverlap("overlap with the reference profile vanishes at t = " + std::to_string(t));
    }
    double theta = std::arg(overlap);
    if (!first) {
      // Unwrap onto the branch nearest the previous sample.
      theta += 2.0 * std::numbers::pi * std::round((prev - theta) / (2.0 * std::numbers::pi));
    }
    first = false;
    prev = theta;
    rep.phase_times.push_back(t);
    rep.phase.push_back(theta);
    if (!profiles.empty()) {
      const Field diff = v - profiles.back();
      rep.diff_l2.push_back(norm(diff));
      rep.diff_sigma.push_back(sigma_norm(diff));
      rep.diff_vf.push_back(vf_equivalent_norm(diff));
    }
    profiles.push_back(v);
    rep.times.push_back(t);
  }
  const std::size_t n = rep.phase.size();
  if (n < 3) throw InsufficientSamples("long-range probe needs at least three snapshots with t >= t_min");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(rep.phase_times[i]);
    my += rep.phase[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(rep.phase_times[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (rep.phase[i] - my);
  }
  rep.log_coefficient = sxx > 0.0 ? sxy / sxx : 0.0;
  rep.log_intercept = my - rep.log_coefficient * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = rep.phase[i] - (rep.log_intercept + rep.log_coefficient * std::log(rep.phase_times[i]));
    ss += e * e;
  }
  rep.log_residual = std::sqrt(ss / n);
  for (std::size_t i = 0; i + 1 < rep.diff_sigma.size(); ++i) {
    rep.ratios.push_back(rep.diff_sigma[i] > 0.0 ? rep.diff_sigma[i + 1] / rep.diff_sigma[i] : 0.0);
  }
  rep.verdict = classify(rep.diff_sigma, sigma_norm(profiles.back()), {});
  rep.u_plus = profiles.back();
  rep.u_plus_error = rep.diff_sigma.empty() ? 0.0 : rep.diff_sigma.back();
  return rep;
}

}  // namespace pnls

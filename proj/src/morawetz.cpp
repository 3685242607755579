#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pnls/diagnostics.hpp"
#include "pnls/errors.hpp"
#include "pnls/fft.hpp"
#include "pnls/transform.hpp"

namespace pnls {

namespace {

// Free-grid multi-index of a flat free index.
std::vector<int> unflatten(std::size_t fi, int k, int M) {
  std::vector<int> j(k);
  for (int a = k - 1; a >= 0; --a) {
    j[a] = static_cast<int>(fi % M);
    fi /= M;
  }
  return j;
}

std::size_t flatten(const std::vector<int>& j, int P) {
  std::size_t idx = 0;
  for (int v : j) idx = idx * P + v;
  return idx;
}

// Linear (non-cyclic) correlation sum_{j'} kernel(j - j') data(j') on the
// M^k grid, via a cyclic convolution on the zero-padded (2M)^k grid. The
// kernel is given as a function of the integer offset vector.
template <typename Kernel>
std::vector<double> linear_convolution(const std::vector<double>& data, int k, int M, Kernel kernel) {
  const int P = 2 * M;
  const FftPlan& plan = FftPlan::cached(k, P);
  const std::size_t padded = plan.size();
  std::vector<cplx> a(padded, cplx(0.0)), b(padded);
  for (std::size_t fi = 0; fi < data.size(); ++fi) a[flatten(unflatten(fi, k, M), P)] = data[fi];
  std::vector<int> offset(k);
  for (std::size_t pi = 0; pi < padded; ++pi) {
    const std::vector<int> idx = unflatten(pi, k, P);
    bool unused = false;
    for (int c = 0; c < k; ++c) {
      offset[c] = idx[c] < M ? idx[c] : idx[c] - P;
      if (idx[c] == M) unused = true;  // offset -M never occurs
    }
    b[pi] = unused ? 0.0 : kernel(offset);
  }
  plan.execute(a.data(), -1);
  plan.execute(b.data(), -1);
  for (std::size_t i = 0; i < padded; ++i) a[i] *= b[i];
  plan.execute(a.data(), +1);
  std::vector<double> out(data.size());
  const double scale = 1.0 / static_cast<double>(padded);
  for (std::size_t fi = 0; fi < data.size(); ++fi) out[fi] = a[flatten(unflatten(fi, k, M), P)].real() * scale;
  return out;
}

double offset_length(const std::vector<int>& o) {
  double s = 0.0;
  for (int v : o) s += static_cast<double>(v) * v;
  return std::sqrt(s);
}

}  // namespace

MarginalDensity marginal_density(const Field& f, double t) {
  const Grid& g = *f.grid;
  const std::size_t fs = g.free_size();
  const auto& cw = g.confined_weights();
  MarginalDensity md;
  md.grid = f.grid;
  md.t = t;
  md.R.assign(fs, 0.0);
  md.J.assign(g.free_dims(), std::vector<double>(fs, 0.0));
  for (std::size_t ci = 0; ci < g.confined_size(); ++ci) {
    for (std::size_t fi = 0; fi < fs; ++fi) md.R[fi] += cw[ci] * std::norm(f.values[ci * fs + fi]);
  }
  for (int a = 0; a < g.free_dims(); ++a) {
    const Field grad = apply_gradient(f, g.n() + a);
    auto& J = md.J[a];
    for (std::size_t ci = 0; ci < g.confined_size(); ++ci) {
      for (std::size_t fi = 0; fi < fs; ++fi) {
        const std::size_t i = ci * fs + fi;
        J[fi] += cw[ci] * (std::conj(f.values[i]) * grad.values[i]).imag();
      }
    }
  }
  return md;
}

VirialAction virial_and_action(const MarginalDensity& md) {
  const Grid& g = *md.grid;
  const int k = g.free_dims();
  const int M = g.free_points();
  const double dy = g.dy();
  const double cell = std::pow(dy, k);
  VirialAction va;
  if (k == 1) {
    // Prefix sums of R and yR below and above each point.
    const auto& y = g.free_coords();
    double total0 = 0.0, total1 = 0.0;
    for (int j = 0; j < M; ++j) {
      total0 += md.R[j];
      total1 += md.R[j] * y[j];
    }
    double below0 = 0.0, below1 = 0.0;
    for (int j = 0; j < M; ++j) {
      const double above0 = total0 - below0 - md.R[j];
      const double above1 = total1 - below1 - md.R[j] * y[j];
      const double abs_sum = (y[j] * below0 - below1) + (above1 - y[j] * above0);
      const double sign_sum = below0 - above0;
      va.I += md.R[j] * abs_sum;
      va.M += md.J[0][j] * sign_sum;
      below0 += md.R[j];
      below1 += md.R[j] * y[j];
    }
    va.I *= 0.5 * cell * cell;
    va.M *= cell * cell;
    return va;
  }
  const std::vector<double> abs_conv =
      linear_convolution(md.R, k, M, [&](const std::vector<int>& o) { return dy * offset_length(o); });
  for (std::size_t fi = 0; fi < md.R.size(); ++fi) va.I += md.R[fi] * abs_conv[fi];
  va.I *= 0.5 * cell * cell;
  for (int a = 0; a < k; ++a) {
    const std::vector<double> dir_conv = linear_convolution(md.R, k, M, [a](const std::vector<int>& o) {
      const double len = offset_length(o);
      return len == 0.0 ? 0.0 : o[a] / len;
    });
    for (std::size_t fi = 0; fi < md.R.size(); ++fi) va.M += md.J[a][fi] * dir_conv[fi];
  }
  va.M *= cell * cell;
  return va;
}

VirialAction virial_and_action_direct(const MarginalDensity& md) {
  const Grid& g = *md.grid;
  const int k = g.free_dims();
  const std::size_t fs = g.free_size();
  const double cell = std::pow(g.dy(), k);
  VirialAction va;
  std::vector<double> z(k);
  for (std::size_t i = 0; i < fs; ++i) {
    for (std::size_t j = 0; j < fs; ++j) {
      double len2 = 0.0;
      for (int a = 0; a < k; ++a) {
        z[a] = g.free_coord(i, a) - g.free_coord(j, a);
        len2 += z[a] * z[a];
      }
      const double len = std::sqrt(len2);
      va.I += md.R[i] * len * md.R[j];
      if (len > 0.0) {
        for (int a = 0; a < k; ++a) va.M += md.R[j] * z[a] / len * md.J[a][i];
      }
    }
  }
  va.I *= 0.5 * cell * cell;
  va.M *= cell * cell;
  return va;
}

double morawetz_seminorm(const MarginalDensity& md) {
  const Grid& g = *md.grid;
  const int k = g.free_dims();
  const std::size_t fs = g.free_size();
  const double s = 0.5 * (3 - k);
  std::vector<cplx> hat(md.R.begin(), md.R.end());
  g.fft_block(hat, -1);
  // Parseval: sum |FFT R|^2 = M^k sum |R|^2, and the L^2 norm carries dy^k.
  const double scale = std::pow(g.dy(), k) / static_cast<double>(fs);
  const auto& eta2 = g.free_eta_squared();
  double total = 0.0;
  for (std::size_t m = 0; m < fs; ++m) {
    const double mult = s == 0.0 ? 1.0 : std::pow(eta2[m], s);
    total += mult * std::norm(hat[m]);
  }
  return scale * total;
}

double morawetz_quadrature_defect(const MarginalDensity& md) {
  // Epstein zeta of the lattice Z^k at s = -1/2 (k = 1: 2 zeta(-1) = -1/6;
  // k = 2: 4 zeta(-1/2) beta(-1/2); k = 3 by Ewald summation).
  static constexpr double epstein[] = {-1.0 / 6.0, -0.22882431037721881, -0.26659627871839237};
  const Grid& g = *md.grid;
  const int k = g.free_dims();
  if (k < 1 || k > 3) throw InvalidArgument("quadrature defect defined for 1 <= d - n <= 3");
  // The lattice sums of R(y')|y - y'| and R(y') (y - y')/|y - y'| miss their
  // integrals by -h^{k+1} Z R(y) and +h^{k+1} (Z/k) grad R(y) respectively
  // (generalized Euler–Maclaurin at the kernel singularity). Propagating both
  // through dI/dt = M with R_t = -div J leaves h^{k+1} Z (1 + 1/k) int J . grad R.
  const double h = g.dy();
  const std::size_t fs = g.free_size();
  double dot = 0.0;
  for (int a = 0; a < k; ++a) {
    std::vector<cplx> hat(md.R.begin(), md.R.end());
    g.fft_block(hat, -1);
    const double inv = 1.0 / static_cast<double>(fs);
    for (std::size_t m = 0; m < fs; ++m) {
      std::size_t j = m;
      for (int b = k - 1; b > a; --b) j /= g.free_points();
      j %= g.free_points();
      const double eta = static_cast<int>(j) == g.free_points() / 2 ? 0.0 : g.wavenumbers()[j];
      hat[m] *= cplx(0.0, eta * inv);
    }
    g.fft_block(hat, +1);
    for (std::size_t fi = 0; fi < fs; ++fi) dot += md.J[a][fi] * hat[fi].real();
  }
  dot *= std::pow(h, k);
  return std::pow(h, k + 1) * epstein[k - 1] * (1.0 + 1.0 / k) * dot;
}

// With the weight a = |y| and H_2 = -1/2 Delta_y, the term 1/4 Delta^2 a in
// dM/dt is, in Fourier variables, (1/4) |FT(-Delta Delta a)|:
//   k = 1: Delta a = 2 delta,           1/4 * 2 |eta|^2     -> 1/2 ||d_y R||^2
//   k = 2: Delta a = 1/|y|,             1/4 * 2 pi |eta|    -> pi/2 || |grad|^{1/2} R ||^2
//   k = 3: Delta a = 2/|y|,             1/4 * 8 pi          -> 2 pi ||R||^2
// The remaining terms are nonnegative; for k = 1 Cauchy–Schwarz over x makes
// them at least another 1/2 ||d_y R||^2. Hence dM/dt >= c_k * seminorm with
// c = (1, pi/2, 2 pi), and integrating with M(T) - M(0) <= 2 sup |M| <=
// 2 mass^{3/2} sup ||grad_y u|| gives C_k = 2 / c_k.
double morawetz_constant(int free_dims) {
  switch (free_dims) {
    case 1: return 2.0;
    case 2: return 4.0 / std::numbers::pi;
    case 3: return 1.0 / std::numbers::pi;
    default: throw InvalidArgument("Morawetz constant defined for 1 <= d - n <= 3");
  }
}

MorawetzReport morawetz_monitor(const Trajectory& traj) {
  const auto& recs = traj.records;
  if (recs.size() < 3) throw InsufficientSamples("Morawetz monitor needs at least three samples");
  for (const auto& r : recs) {
    if (std::isnan(r.virial_I) || std::isnan(r.action_M) || std::isnan(r.morawetz_defect) || std::isnan(r.grad_y_norm) || std::isnan(r.mass)) {
      throw InvalidArgument("Morawetz monitor needs the morawetz and conserved probes on every sample");
    }
  }
  const double h = recs[1].t - recs[0].t;
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    if (std::abs((recs[i + 1].t - recs[i].t) - h) > 1e-9 * std::abs(h)) {
      throw InvalidArgument("Morawetz monitor needs uniformly spaced samples");
    }
  }

  MorawetzReport rep;
  double max_M = 0.0, max_M2 = 0.0;
  for (const auto& r : recs) max_M = std::max(max_M, std::abs(r.action_M));
  for (std::size_t i = 1; i + 1 < recs.size(); ++i) {
    const double dI = (recs[i + 1].virial_I - recs[i - 1].virial_I) / (2.0 * h);
    rep.times.push_back(recs[i].t);
    rep.dIdt.push_back(dI);
    rep.action.push_back(recs[i].action_M);
    const double raw = dI - recs[i].action_M;
    rep.identity_raw_max_error = std::max(rep.identity_raw_max_error, std::abs(raw));
    rep.identity_max_error = std::max(rep.identity_max_error, std::abs(raw - recs[i].morawetz_defect));
    const double M2 = (recs[i + 1].action_M - 2.0 * recs[i].action_M + recs[i - 1].action_M) / (h * h);
    max_M2 = std::max(max_M2, std::abs(M2));
  }
  // Centered-difference error h^2/6 |I'''| = h^2/6 |M''| with a safety factor
  // of 2, plus a floor for quadrature/aliasing relative to the size of M.
  rep.identity_tolerance = 2.0 * h * h / 6.0 * max_M2 + identity_floor_rel * max_M + 1e-12;
  rep.identity_pass = rep.identity_max_error <= rep.identity_tolerance;

  const double mass = recs.front().mass;
  double sup_grad = 0.0;
  rep.action_bound_max_ratio = 0.0;
  for (const auto& r : recs) {
    sup_grad = std::max(sup_grad, r.grad_y_norm);
    const double cap = std::pow(r.mass, 1.5) * r.grad_y_norm;
    const double ratio = cap > 0.0 ? std::abs(r.action_M) / cap : (r.action_M == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    rep.action_bound_max_ratio = std::max(rep.action_bound_max_ratio, ratio);
  }
  rep.action_bound_pass = rep.action_bound_max_ratio <= 1.0;

  rep.cumulative = recs.back().cumulative_morawetz;
  rep.bound = morawetz_constant(traj.grid->free_dims()) * std::pow(mass, 1.5) * sup_grad;
  rep.bound_applicable = traj.lambda > 0.0;
  rep.bound_pass = rep.cumulative <= rep.bound;
  return rep;
}

}  // namespace pnls

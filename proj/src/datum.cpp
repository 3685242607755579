#include "pnls/datum.hpp"

#include <cmath>

#include "pnls/hermite.hpp"

namespace pnls {

namespace {
template <typename T>
T pick(const std::vector<T>& v, int axis, T fallback) {
  return axis < static_cast<int>(v.size()) ? v[axis] : fallback;
}
}  // namespace

cplx HermiteGaussian::axis_factor(int axis, double z) const {
  const int k = pick(order, axis, 0);
  const double c = pick(center, axis, 0.0);
  const double w = pick(width, axis, 1.0);
  const double p = pick(momentum, axis, 0.0);
  std::vector<double> psi(k + 1);
  hermite_functions(k + 1, (z - c) / w, psi);
  return psi[k] / std::sqrt(w) * std::polar(1.0, p * z);
}

cplx HermiteGaussian::operator()(std::span<const double> z) const {
  cplx v = amplitude;
  for (std::size_t a = 0; a < z.size(); ++a) v *= axis_factor(static_cast<int>(a), z[a]);
  return v;
}

Field sample(const GridPtr& grid, const HermiteGaussian& datum) {
  const Grid& g = *grid;
  const int K = g.hermite_order();
  const int M = g.free_points();
  // Separable: tabulate each axis once.
  std::vector<std::vector<cplx>> confined(g.n(), std::vector<cplx>(K));
  std::vector<std::vector<cplx>> free(g.free_dims(), std::vector<cplx>(M));
  for (int a = 0; a < g.n(); ++a)
    for (int i = 0; i < K; ++i) confined[a][i] = datum.axis_factor(a, g.nodes()[i]);
  for (int a = 0; a < g.free_dims(); ++a)
    for (int j = 0; j < M; ++j) free[a][j] = datum.axis_factor(g.n() + a, g.free_coords()[j]);

  Field f(grid);
  const std::size_t fs = g.free_size();
  for (std::size_t ci = 0; ci < g.confined_size(); ++ci) {
    cplx cv = datum.amplitude;
    std::size_t rem = ci;
    for (int a = g.n() - 1; a >= 0; --a) {
      cv *= confined[a][rem % K];
      rem /= K;
    }
    for (std::size_t fi = 0; fi < fs; ++fi) {
      cplx v = cv;
      std::size_t r2 = fi;
      for (int a = g.free_dims() - 1; a >= 0; --a) {
        v *= free[a][r2 % M];
        r2 /= M;
      }
      f.values[ci * fs + fi] = v;
    }
  }
  return f;
}

Field random_localized_field(const GridPtr& grid, std::mt19937_64& rng, int packets) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Grid& g = *grid;
  Field out(grid);
  for (int p = 0; p < packets; ++p) {
    HermiteGaussian datum;
    for (int a = 0; a < g.d(); ++a) {
      const bool confined = a < g.n();
      datum.order.push_back(static_cast<int>(std::floor(3.0 * (unit(rng) + 1.0))));
      datum.center.push_back(confined ? 0.5 * unit(rng) : 0.15 * g.box_half_length() * unit(rng));
      datum.width.push_back(confined ? 1.0 + 0.2 * unit(rng) : 1.5 + 0.5 * unit(rng));
      datum.momentum.push_back(confined ? 0.5 * unit(rng) : unit(rng));
    }
    datum.amplitude = 1.0;
    const cplx coeff(normal(rng), normal(rng));
    out = out + coeff * sample(grid, datum);
  }
  return out;
}

Field random_field(const GridPtr& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Field f(grid);
  for (auto& v : f.values) v = cplx(normal(rng), normal(rng));
  return f;
}

}  // namespace pnls

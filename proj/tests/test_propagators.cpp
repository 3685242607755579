#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pnls/errors.hpp"
#include "pnls/propagators.hpp"
#include "test_support.hpp"

using namespace pnls;
using namespace pnls::testing;
using std::numbers::pi;

namespace {

// Free evolution of pi^{-1/4} e^{-y^2/2}: pi^{-1/4} (1+it)^{-1/2} e^{-y^2/(2(1+it))}.
cplx free_gaussian(double t, double y) {
  const cplx a(1.0, t);
  return std::pow(pi, -0.25) / std::sqrt(a) * std::exp(-y * y / (2.0 * a));
}

// Direct trapezoid quadrature of the free kernel (2 pi i t)^{-1/2} e^{i(y-y')^2/(2t)}.
cplx free_kernel_quadrature(double t, double y) {
  const int N = 24000;
  const double a = -14.0, b = 14.0, h = (b - a) / N;
  cplx s{};
  for (int j = 0; j <= N; ++j) {
    const double yp = a + j * h;
    const double w = (j == 0 || j == N) ? 0.5 : 1.0;
    s += w * std::polar(1.0, (y - yp) * (y - yp) / (2.0 * t)) * std::pow(pi, -0.25) * std::exp(-0.5 * yp * yp);
  }
  return s * h / std::sqrt(cplx(0.0, 2.0 * pi * t));
}

}  // namespace

TEST_CASE("phase table entries are unimodular") {
  const auto grid = small_grid(3, 1, 12, 10.0, 16);
  for (double t : {0.0, 0.7, -3.1, 123.4}) {
    const auto table = phase_table(grid, t);
    double worst = 0.0;
    for (const auto& p : table.phases) worst = std::max(worst, std::abs(std::abs(p) - 1.0));
    CHECK(worst <= 1e-14);
  }
}

TEST_CASE("ground state only acquires the phase e^{-itn/2}") {
  for (auto spec : {GridSpec{2, 1, 16, 10.0, 32}, GridSpec{3, 2, 10, 10.0, 16}}) {
    const auto grid = Grid::make(spec);
    SpectralCoeffs c(grid);
    c.coeffs[0] = 1.0;
    for (double t : {0.3, 2.0, -5.5}) {
      const auto out = linear_propagate(c, t);
      CHECK(std::abs(out.coeffs[0] - std::polar(1.0, -t * spec.n / 2.0)) <= 1e-14);
    }
  }
}

TEST_CASE("t = 0 is the identity") {
  std::mt19937_64 rng(3);
  const auto grid = small_grid();
  const Field f = random_field(grid, rng);
  const auto c = forward_transform(f);
  CHECK(linear_propagate(c, 0.0).coeffs == c.coeffs);
}

TEST_CASE("free Gaussian: closed form agrees with kernel quadrature") {
  for (double y : {-3.0, 0.0, 1.7, 5.0}) {
    CHECK(std::abs(free_gaussian(2.0, y) - free_kernel_quadrature(2.0, y)) <= 1e-10);
  }
}

TEST_CASE("spectral propagation of a free Gaussian matches the closed form at t = 2") {
  const auto grid = Grid::make({2, 1, 16, 24.0, 256});
  const Field f = sample(grid, HermiteGaussian{});
  const Field u = linear_propagate(f, 2.0, FlowFactor::free);
  const std::size_t fs = grid->free_size();
  std::vector<double> psi(1);
  double worst = 0.0;
  for (std::size_t ci = 0; ci < grid->confined_size(); ++ci) {
    hermite_functions(1, grid->nodes()[ci], psi);
    for (std::size_t fi = 0; fi < fs; ++fi) {
      const double y = grid->free_coords()[fi];
      const double expected = psi[0] * std::abs(free_gaussian(2.0, y));
      worst = std::max(worst, std::abs(std::abs(u.values[ci * fs + fi]) - expected));
    }
  }
  CHECK(worst <= 1e-8);
  // Closed form of the modulus as stated: pi^{-1/4} (1+t^2)^{-1/4} e^{-y^2/(2(1+t^2))}.
  CHECK(std::abs(free_gaussian(2.0, 1.0)) ==
        doctest::Approx(std::pow(pi, -0.25) * std::pow(5.0, -0.25) * std::exp(-1.0 / 10.0)).epsilon(1e-14));
}

TEST_CASE("unitarity and group law") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> times(-20.0, 20.0);
  const auto grid = small_grid(3, 1, 12, 10.0, 16);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = forward_transform(random_field(grid, rng));
    const double t1 = times(rng), t2 = times(rng);
    const auto a = linear_propagate(linear_propagate(c, t1), t2);
    const auto b = linear_propagate(c, t1 + t2);
    CHECK(std::abs(norm_squared(a) - norm_squared(c)) / norm_squared(c) <= 1e-12);
    CHECK(std::sqrt(norm_squared(a - b) / norm_squared(c)) <= 1e-12);
  }
}

TEST_CASE("confined factor refocuses with period 2 pi") {
  std::mt19937_64 rng(5);
  const auto grid = small_grid(3, 2, 12, 10.0, 16);
  const Field f = random_localized_field(grid, rng);
  for (double t : {0.4, 1.9, 7.0}) {
    const Field a = linear_propagate(f, t, FlowFactor::confined);
    const Field b = linear_propagate(f, t + 2.0 * pi, FlowFactor::confined);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(std::abs(a.values[i]) - std::abs(b.values[i])));
    CHECK(worst <= 1e-10);
    // Global phase e^{-i pi n}.
    CHECK(max_abs_diff(b.values, (std::polar(1.0, -pi * 2) * a).values) <= 1e-10);
  }
}

TEST_CASE("Mehler at t = pi/2 is e^{-i pi/4} times the Fourier transform") {
  const auto grid = Grid::make({2, 1, 64, 8.0, 16});
  const Field f = sample(grid, HermiteGaussian{{0, 0}, {0.7, 0.0}, {0.9, 1.0}, {0.4, 0.0}, 1.0});
  // Eigen-phase oracle: psi_k is an eigenfunction of the unitary Fourier
  // transform with eigenvalue (-i)^k.
  auto c = forward_transform(f);
  const std::size_t fs = grid->free_size();
  for (std::size_t ci = 0; ci < grid->confined_size(); ++ci) {
    const cplx eig = std::polar(1.0, -pi / 4.0) * std::pow(cplx(0.0, -1.0), static_cast<int>(ci));
    for (std::size_t fi = 0; fi < fs; ++fi) c.coeffs[ci * fs + fi] *= eig;
  }
  const Field oracle = inverse_transform(c);
  CHECK(rel_diff(mehler_apply(f, pi / 2.0), oracle) <= 1e-8);
}

TEST_CASE("Mehler quadrature agrees with the spectral confined factor") {
  const auto grid = Grid::make({2, 1, 64, 8.0, 16});
  const Field f = sample(grid, HermiteGaussian{{0, 0}, {0.5, 0.0}, {1.1, 1.0}, {-0.3, 0.0}, 1.0});
  for (double t : {0.3, 1.0, 2.5, 4.0, -1.2}) {
    CAPTURE(t);
    CHECK(rel_diff(mehler_apply(f, t), linear_propagate(f, t, FlowFactor::confined)) <= 1e-8);
  }
}

TEST_CASE("Mehler refuses refocusing times") {
  const auto grid = Grid::make({2, 1, 16, 8.0, 16});
  const Field f = sample(grid, HermiteGaussian{});
  CHECK_THROWS_AS(mehler_apply(f, pi), SingularTime);
  CHECK_THROWS_AS(mehler_apply(f, 0.0), SingularTime);
  CHECK_THROWS_AS(dispersive_bound_check(pi, 1, 2), SingularTime);
}

TEST_CASE("dispersive bound") {
  const auto half = dispersive_bound_check(pi / 2.0, 1, 2);
  CHECK(half.bound == doctest::Approx(1.0 / std::sqrt(2.0 * pi)).epsilon(1e-15));
  CHECK(half.measured == doctest::Approx(0.39894).epsilon(1e-5));
  const auto r = dispersive_bound_check(0.3, 1, 2);
  CHECK(std::abs(r.ratio - 1.0) <= 1e-12);
  CHECK(std::abs(r.free_measured / r.free_bound - 1.0) <= 1e-12);
  const auto r3 = dispersive_bound_check(2.2, 2, 4);
  CHECK(std::abs(r3.ratio - 1.0) <= 1e-12);
}

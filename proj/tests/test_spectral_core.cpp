#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pnls/errors.hpp"
#include "pnls/hermite.hpp"
#include "test_support.hpp"

using namespace pnls;
using namespace pnls::testing;
using std::numbers::pi;

namespace {

// Normalized Hermite polynomial H_k(x) / sqrt(sqrt(pi) 2^k k!) from the
// physicists' polynomial recurrence, independent of the function recurrence.
std::vector<double> normalized_hermite_polys(int count, double x) {
  std::vector<double> h(count);
  double hm1 = 0.0, h0 = 1.0;
  for (int k = 0; k < count; ++k) {
    const double lognorm = 0.5 * (0.5 * std::log(pi) + k * std::log(2.0) + std::lgamma(k + 1.0));
    h[k] = h0 / std::exp(lognorm);
    const double hp1 = 2.0 * x * h0 - 2.0 * k * hm1;
    hm1 = h0;
    h0 = hp1;
  }
  return h;
}

}  // namespace

TEST_CASE("ground state value at the origin") {
  std::vector<double> psi(1);
  hermite_functions(1, 0.0, psi);
  CHECK(psi[0] == doctest::Approx(std::pow(pi, -0.25)).epsilon(1e-15));
  CHECK(psi[0] == doctest::Approx(0.7511255).epsilon(1e-7));
}

TEST_CASE("Gram matrix with classical Gauss-Hermite weights, K = 32") {
  const int K = 32;
  const auto rule = gauss_hermite(K);
  double worst = 0.0;
  std::vector<std::vector<double>> poly(K);
  for (int i = 0; i < K; ++i) poly[i] = normalized_hermite_polys(K, rule.nodes[i]);
  for (int j = 0; j < K; ++j)
    for (int k = 0; k < K; ++k) {
      double s = 0.0;
      for (int i = 0; i < K; ++i) s += rule.weights[i] * poly[i][j] * poly[i][k];
      worst = std::max(worst, std::abs(s - (j == k ? 1.0 : 0.0)));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("Hermite basis is orthonormal under the scaled weights up to K = 64") {
  for (int K : {8, 16, 33, 64}) {
    const auto rule = gauss_hermite(K);
    const auto B = hermite_basis(K, rule.nodes);
    double worst = 0.0;
    for (int j = 0; j < K; ++j)
      for (int k = 0; k < K; ++k) {
        double s = 0.0;
        for (int i = 0; i < K; ++i) s += rule.scaled_weights[i] * B(i, j) * B(i, k);
        worst = std::max(worst, std::abs(s - (j == k ? 1.0 : 0.0)));
      }
    CAPTURE(K);
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("Gauss-Hermite weights sum to sqrt(pi) and nodes are symmetric") {
  const auto rule = gauss_hermite(21);
  double s = 0.0;
  for (double w : rule.weights) s += w;
  CHECK(s == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
  CHECK(rule.nodes[10] == 0.0);
  CHECK(rule.nodes.front() == -rule.nodes.back());
}

TEST_CASE("hermite_basis errors") {
  const auto rule = gauss_hermite(8);
  CHECK_THROWS_AS(hermite_basis(9, rule.nodes), ShapeMismatch);
  const std::vector<double> far{40.0};
  CHECK_THROWS_AS(hermite_basis(1, far), RecurrenceOverflow);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid::make({1, 1, 16, 10.0, 32}), InvalidGrid);
  CHECK_THROWS_AS(Grid::make({5, 1, 16, 10.0, 32}), InvalidGrid);
  CHECK_THROWS_AS(Grid::make({3, 3, 16, 10.0, 32}), InvalidGrid);
  CHECK_THROWS_AS(Grid::make({2, 0, 16, 10.0, 32}), InvalidGrid);
  CHECK_THROWS_AS(Grid::make({2, 1, 4, 10.0, 32}), InvalidGrid);
  CHECK_THROWS_AS(Grid::make({2, 1, 16, 10.0, 33}), InvalidGrid);
  CHECK_THROWS_AS(Grid::make({2, 1, 16, 10.0, 8}), InvalidGrid);
  CHECK_THROWS_AS(Grid::make({2, 1, 16, -1.0, 32}), InvalidGrid);

  const auto g = Grid::make({4, 2, 8, 10.0, 16});
  CHECK(g->size() == 8u * 8u * 16u * 16u);
  CHECK(g->confined_size() == 64u);
  CHECK(g->free_size() == 256u);
}

TEST_CASE("free-axis wavenumbers are pi m / L") {
  const auto g = Grid::make({2, 1, 8, 5.0, 16});
  const auto& eta = g->wavenumbers();
  CHECK(eta[0] == 0.0);
  CHECK(eta[1] == doctest::Approx(pi / 5.0));
  CHECK(eta[8] == doctest::Approx(-8.0 * pi / 5.0));
  CHECK(eta[15] == doctest::Approx(-pi / 5.0));
  CHECK(g->free_coords()[0] == -5.0);
}

TEST_CASE("harmonic oscillator residual applied spectrally") {
  // (-1/2 d^2 + x^2/2) psi_k = (k + 1/2) psi_k
  for (int K : {32, 64}) {
    const auto grid = Grid::make({2, 1, K, 8.0, 16});
    const int kmax = K == 64 ? 20 : K - 4;
    for (int k = 0; k <= kmax; ++k) {
      SpectralCoeffs c(grid);
      c.coeffs[static_cast<std::size_t>(k) * grid->free_size()] = 1.0;
      const Field f = inverse_transform(c);
      const Field d2 = apply_gradient(apply_gradient(f, 0), 0);
      const Field x2 = apply_coordinate(apply_coordinate(f, 0), 0);
      const Field hf = cplx(-0.5) * d2 + cplx(0.5) * x2;
      const double res = norm(hf - cplx(k + 0.5) * f);
      CAPTURE(K);
      CAPTURE(k);
      CHECK(res <= 1e-10);
    }
  }
}

TEST_CASE("basis element transforms to a single coefficient") {
  const auto grid = Grid::make({2, 1, 16, 10.0, 32});
  const double eta1 = pi / 10.0;
  HermiteGaussian g0;  // psi_0 in x
  Field f(grid);
  const std::size_t fs = grid->free_size();
  std::vector<double> psi(1);
  for (std::size_t ci = 0; ci < grid->confined_size(); ++ci) {
    hermite_functions(1, grid->nodes()[ci], psi);
    for (std::size_t fi = 0; fi < fs; ++fi)
      f.values[ci * fs + fi] = psi[0] * std::polar(1.0, eta1 * grid->free_coords()[fi]);
  }
  const auto c = forward_transform(f);
  const std::size_t hit = 1;  // k = 0, m = 1
  CHECK(std::abs(c.coeffs[hit]) == doctest::Approx(std::sqrt(20.0)).epsilon(1e-12));
  double others = 0.0;
  for (std::size_t i = 0; i < c.coeffs.size(); ++i)
    if (i != hit) others = std::max(others, std::abs(c.coeffs[i]));
  CHECK(others / std::abs(c.coeffs[hit]) < 1e-10);
}

TEST_CASE("transform round trip and Parseval on random fields") {
  std::mt19937_64 rng(7);
  for (auto spec : {GridSpec{2, 1, 16, 12.0, 32}, GridSpec{3, 1, 12, 10.0, 16}, GridSpec{3, 2, 10, 10.0, 16},
                    GridSpec{4, 1, 8, 8.0, 16}}) {
    const auto grid = Grid::make(spec);
    const Field f = random_field(grid, rng);
    const auto c = forward_transform(f);
    const Field back = inverse_transform(c);
    CAPTURE(spec.d);
    CAPTURE(spec.n);
    CHECK(norm(back - f) / norm(f) <= 1e-10);

    // Parseval against an independently assembled quadrature.
    const Grid& g = *grid;
    double quad = 0.0;
    const std::size_t fs = g.free_size();
    const int K = g.hermite_order();
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      std::size_t ci = i / fs;
      double w = std::pow(g.dy(), g.free_dims());
      for (int a = 0; a < g.n(); ++a) {
        w *= g.scaled_weights()[ci % K];
        ci /= K;
      }
      quad += w * std::norm(f.values[i]);
    }
    CHECK(std::abs(norm_squared(c) - quad) / quad <= 1e-10);
  }
}

TEST_CASE("Parseval for a Gaussian bump") {
  const auto grid = Grid::make({2, 1, 32, 16.0, 128});
  HermiteGaussian bump{{0, 0}, {0.4, -1.0}, {0.8, 1.3}, {0.3, 0.7}, 1.7};
  const Field f = sample(grid, bump);
  const double coeff = norm_squared(forward_transform(f));
  // The continuum mass is amplitude^2; the field is resolved well enough for
  // quadrature to reproduce it too.
  CHECK(std::abs(coeff - norm_squared(f)) / norm_squared(f) <= 1e-10);
  CHECK(coeff == doctest::Approx(1.7 * 1.7).epsilon(1e-9));
}

TEST_CASE("gradient and coordinate operators") {
  const auto grid = Grid::make({2, 1, 32, 10.0, 32});
  const std::size_t fs = grid->free_size();
  // psi_0(x) tensor 1(y)
  HermiteGaussian g0{{0, 0}, {}, {1.0, 1e9}, {}, 1.0};
  Field f(grid);
  std::vector<double> psi(2);
  for (std::size_t ci = 0; ci < grid->confined_size(); ++ci) {
    hermite_functions(2, grid->nodes()[ci], psi);
    for (std::size_t fi = 0; fi < fs; ++fi) f.values[ci * fs + fi] = psi[0];
  }

  SUBCASE("d/dx psi_0 = -x psi_0") {
    const Field d = apply_gradient(f, 0);
    const Field xf = apply_coordinate(f, 0);
    CHECK(max_abs_diff(d.values, (cplx(-1.0) * xf).values) <= 1e-10);
  }
  SUBCASE("x psi_0 = psi_1 / sqrt(2)") {
    const auto c = forward_transform(apply_coordinate(f, 0));
    // Oracle: Hermite coefficients by direct quadrature sum_i W_i x_i psi_0 psi_k.
    const auto& x = grid->nodes();
    const auto& w = grid->scaled_weights();
    const int K = grid->hermite_order();
    std::vector<double> row(K);
    for (int k = 0; k < K; ++k) {
      double s = 0.0;
      for (int i = 0; i < K; ++i) {
        hermite_functions(K, x[i], row);
        s += w[i] * x[i] * row[0] * row[k];
      }
      const double expected = k == 1 ? 1.0 / std::sqrt(2.0) : 0.0;
      CHECK(std::abs(s - expected) <= 1e-10);
    }
    // Free factor is the constant: its coefficient is sqrt(2L) at m = 0.
    const double scale = std::sqrt(20.0);
    CHECK(std::abs(c.coeffs[1 * fs] / scale - 1.0 / std::sqrt(2.0)) <= 1e-10);
    double rest = 0.0;
    for (std::size_t i = 0; i < c.coeffs.size(); ++i)
      if (i != fs) rest = std::max(rest, std::abs(c.coeffs[i]) / scale);
    CHECK(rest <= 1e-10);
  }
  SUBCASE("d/dy of a plane wave") {
    const double eta1 = pi / 10.0;
    Field p(grid);
    for (std::size_t ci = 0; ci < grid->confined_size(); ++ci)
      for (std::size_t fi = 0; fi < fs; ++fi) p.values[ci * fs + fi] = std::polar(1.0, eta1 * grid->free_coords()[fi]);
    const Field dp = apply_gradient(p, 1);
    CHECK(max_abs_diff(dp.values, (cplx(0.0, eta1) * p).values) <= 1e-13);
  }
  SUBCASE("axis out of range") {
    CHECK_THROWS_AS(apply_gradient(f, 2), InvalidArgument);
    CHECK_THROWS_AS(apply_coordinate(f, -1), InvalidArgument);
  }
}

TEST_CASE("shape mismatch is reported") {
  const auto a = Grid::make({2, 1, 16, 10.0, 32});
  const auto b = Grid::make({2, 1, 16, 10.0, 64});
  CHECK_THROWS_AS(Field(a, std::vector<cplx>(3)), ShapeMismatch);
  CHECK_THROWS_AS(Field(a) - Field(b), ShapeMismatch);
}

TEST_CASE("L^r norms") {
  const auto grid = Grid::make({2, 1, 32, 16.0, 128});
  const Field f = sample(grid, HermiteGaussian{{}, {}, {}, {}, 2.0});
  // psi_0 tensor psi_0 scaled by 2: L^2 = 2, L^inf = 2/sqrt(pi),
  // L^4^4 = 16 * (int psi_0^4)^2 = 16 / (2 pi).
  CHECK(lr_norm(f, 2.0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(lr_norm(f, std::numeric_limits<double>::infinity()) <= 2.0 / std::sqrt(pi) + 1e-14);
  CHECK(lr_norm(f, std::numeric_limits<double>::infinity()) >= 2.0 / std::sqrt(pi) * 0.97);
  CHECK(std::pow(lr_norm(f, 4.0), 4) == doctest::Approx(16.0 / (2.0 * pi)).epsilon(1e-9));
}

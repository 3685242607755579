#include "pnls/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pnls/errors.hpp"

namespace pnls {

Field::Field(GridPtr g) : grid(std::move(g)), values(grid->size()) {}

Field::Field(GridPtr g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->size()) {
    throw ShapeMismatch("field has " + std::to_string(values.size()) + " values, grid expects " +
                        std::to_string(grid->size()));
  }
}

SpectralCoeffs::SpectralCoeffs(GridPtr g) : grid(std::move(g)), coeffs(grid->size()) {}

SpectralCoeffs::SpectralCoeffs(GridPtr g, std::vector<cplx> c) : grid(std::move(g)), coeffs(std::move(c)) {
  if (coeffs.size() != grid->size()) throw ShapeMismatch("coefficient array does not match grid");
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (&a != &b && !(a.spec() == b.spec())) throw ShapeMismatch("operands live on different grids");
}

namespace {

template <typename A>
A combine(const A& a, const A& b, double sb) {
  require_same_grid(*a.grid, *b.grid);
  A out = a;
  auto& dst = [&]() -> std::vector<cplx>& {
    if constexpr (std::is_same_v<A, Field>) return out.values;
    else return out.coeffs;
  }();
  const auto& src = [&]() -> const std::vector<cplx>& {
    if constexpr (std::is_same_v<A, Field>) return b.values;
    else return b.coeffs;
  }();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += sb * src[i];
  return out;
}

void check(const Field& f) {
  if (!f.grid) throw ShapeMismatch("field has no grid");
  if (f.values.size() != f.grid->size()) throw ShapeMismatch("field does not match its grid");
}

void check(const SpectralCoeffs& c) {
  if (!c.grid) throw ShapeMismatch("coefficients have no grid");
  if (c.coeffs.size() != c.grid->size()) throw ShapeMismatch("coefficients do not match their grid");
}

}  // namespace

Field operator+(const Field& a, const Field& b) { return combine(a, b, 1.0); }
Field operator-(const Field& a, const Field& b) { return combine(a, b, -1.0); }
Field operator*(cplx s, const Field& f) {
  Field out = f;
  for (auto& v : out.values) v *= s;
  return out;
}
SpectralCoeffs operator+(const SpectralCoeffs& a, const SpectralCoeffs& b) { return combine(a, b, 1.0); }
SpectralCoeffs operator-(const SpectralCoeffs& a, const SpectralCoeffs& b) { return combine(a, b, -1.0); }
SpectralCoeffs operator*(cplx s, const SpectralCoeffs& c) {
  SpectralCoeffs out = c;
  for (auto& v : out.coeffs) v *= s;
  return out;
}

namespace detail {

template <typename T>
void apply_confined_matrix(const Grid& g, const Matrix<T>& mat, int axis, const std::vector<cplx>& in,
                           std::vector<cplx>& out) {
  const std::size_t K = g.hermite_order();
  std::size_t outer = 1;
  for (int a = 0; a < axis; ++a) outer *= K;
  std::size_t inner = g.free_size();
  for (int a = axis + 1; a < g.n(); ++a) inner *= K;
  out.assign(in.size(), cplx{});
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(outer * K);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ok = 0; ok < rows; ++ok) {
    const std::size_t o = ok / K;
    const std::size_t k = ok % K;
    cplx* dst = out.data() + (o * K + k) * inner;
    for (std::size_t j = 0; j < K; ++j) {
      const T m = mat(k, j);
      if (m == T{}) continue;
      const cplx* src = in.data() + (o * K + j) * inner;
      for (std::size_t i = 0; i < inner; ++i) dst[i] += m * src[i];
    }
  }
}

template void apply_confined_matrix<double>(const Grid&, const Matrix<double>&, int, const std::vector<cplx>&,
                                            std::vector<cplx>&);
template void apply_confined_matrix<cplx>(const Grid&, const Matrix<cplx>&, int, const std::vector<cplx>&,
                                          std::vector<cplx>&);

}  // namespace detail

SpectralCoeffs forward_transform(const Field& f) {
  check(f);
  const Grid& g = *f.grid;
  std::vector<cplx> a = f.values;
  std::vector<cplx> b;
  for (int axis = 0; axis < g.n(); ++axis) {
    detail::apply_confined_matrix(g, g.analysis(), axis, a, b);
    a.swap(b);
  }
  g.fft_free(a, -1);
  const double scale = std::pow(g.dy() / g.free_points(), 0.5 * g.free_dims());
  const auto& signs = g.free_signs();
  const std::size_t fs = g.free_size();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= scale * signs[i % fs];
  return SpectralCoeffs(f.grid, std::move(a));
}

Field inverse_transform(const SpectralCoeffs& c) {
  check(c);
  const Grid& g = *c.grid;
  std::vector<cplx> a = c.coeffs;
  const double scale = std::pow(g.dy() * g.free_points(), -0.5 * g.free_dims());
  const auto& signs = g.free_signs();
  const std::size_t fs = g.free_size();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= scale * signs[i % fs];
  g.fft_free(a, +1);
  std::vector<cplx> b;
  for (int axis = 0; axis < g.n(); ++axis) {
    detail::apply_confined_matrix(g, g.synthesis(), axis, a, b);
    a.swap(b);
  }
  return Field(c.grid, std::move(a));
}

Field apply_gradient(const Field& f, int axis) {
  check(f);
  const Grid& g = *f.grid;
  if (axis < 0 || axis >= g.d()) throw InvalidArgument("gradient axis out of range");
  if (axis < g.n()) {
    std::vector<cplx> out;
    detail::apply_confined_matrix(g, g.node_gradient(), axis, f.values, out);
    return Field(f.grid, std::move(out));
  }
  const int free_axis = axis - g.n();
  std::vector<cplx> a = f.values;
  g.fft_free(a, -1);
  const std::size_t fs = g.free_size();
  const double inv = 1.0 / static_cast<double>(fs);
  std::vector<cplx> mult(fs);
  for (std::size_t fi = 0; fi < fs; ++fi) {
    const std::size_t M = g.free_points();
    std::size_t j = fi;
    for (int a2 = g.free_dims() - 1; a2 > free_axis; --a2) j /= M;
    j %= M;
    // The Nyquist mode has no odd counterpart; its derivative is dropped.
    const double eta = (static_cast<int>(j) == g.free_points() / 2) ? 0.0 : g.wavenumbers()[j];
    mult[fi] = cplx(0.0, eta * inv);
  }
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= mult[i % fs];
  g.fft_free(a, +1);
  return Field(f.grid, std::move(a));
}

Field apply_coordinate(const Field& f, int axis) {
  check(f);
  const Grid& g = *f.grid;
  if (axis < 0 || axis >= g.d()) throw InvalidArgument("coordinate axis out of range");
  Field out = f;
  const std::size_t fs = g.free_size();
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double c = axis < g.n() ? g.confined_coord(i / fs, axis) : g.free_coord(i % fs, axis - g.n());
    out.values[i] *= c;
  }
  return out;
}

double norm_squared(const Field& f) {
  check(f);
  const auto& w = f.grid->cell_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) s += w[i] * std::norm(f.values[i]);
  return s;
}

double norm(const Field& f) { return std::sqrt(norm_squared(f)); }

double norm_squared(const SpectralCoeffs& c) {
  check(c);
  double s = 0.0;
  for (const auto& v : c.coeffs) s += std::norm(v);
  return s;
}

cplx inner_product(const Field& f, const Field& g) {
  check(f);
  check(g);
  require_same_grid(*f.grid, *g.grid);
  const auto& w = f.grid->cell_weights();
  cplx s{};
  for (std::size_t i = 0; i < f.values.size(); ++i) s += w[i] * std::conj(f.values[i]) * g.values[i];
  return s;
}

double lr_norm(const Field& f, double r) {
  check(f);
  if (!(r >= 1.0)) throw InvalidArgument("L^r norm needs r >= 1");
  if (std::isinf(r)) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  const auto& w = f.grid->cell_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) s += w[i] * std::pow(std::abs(f.values[i]), r);
  return std::pow(s, 1.0 / r);
}

}  // namespace pnls

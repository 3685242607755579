#pragma once

#include <complex>
#include <vector>

#include "pnls/grid.hpp"

namespace pnls {

/// Samples of a wavefunction on the collocation grid (nodes x periodic points).
struct Field {
  GridPtr grid;
  std::vector<cplx> values;

  Field() = default;
  explicit Field(GridPtr g);
  Field(GridPtr g, std::vector<cplx> v);

  std::size_t size() const { return values.size(); }
};

/// Coefficients in the Hermite (x) tensor Fourier (y) basis, where the
/// linear propagator is diagonal.
struct SpectralCoeffs {
  GridPtr grid;
  std::vector<cplx> coeffs;

  SpectralCoeffs() = default;
  explicit SpectralCoeffs(GridPtr g);
  SpectralCoeffs(GridPtr g, std::vector<cplx> c);

  std::size_t size() const { return coeffs.size(); }
};

/// Throws ShapeMismatch unless both live on the same grid (same spec).
void require_same_grid(const Grid& a, const Grid& b);

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(cplx s, const Field& f);
SpectralCoeffs operator+(const SpectralCoeffs& a, const SpectralCoeffs& b);
SpectralCoeffs operator-(const SpectralCoeffs& a, const SpectralCoeffs& b);
SpectralCoeffs operator*(cplx s, const SpectralCoeffs& c);

}  // namespace pnls

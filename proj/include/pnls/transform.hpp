#pragma once

#include "pnls/field.hpp"

namespace pnls {

/// Hermite analysis on each confined axis, then unitary DFT on the free axes.
/// sum |c|^2 equals the quadrature L^2 norm of f.
SpectralCoeffs forward_transform(const Field& f);
Field inverse_transform(const SpectralCoeffs& c);

/// Axes are numbered 0..d-1 with the n confined axes first.
/// Confined: truncated Hermite ladder. Free: Fourier multiplier i eta.
Field apply_gradient(const Field& f, int axis);
/// Pointwise multiplication by the coordinate of `axis`.
Field apply_coordinate(const Field& f, int axis);

/// sum_i w_i |f_i|^2 with the grid quadrature.
double norm_squared(const Field& f);
double norm(const Field& f);
double norm_squared(const SpectralCoeffs& c);
/// Quadrature inner product <f, g> (antilinear in f).
cplx inner_product(const Field& f, const Field& g);
/// ||f||_{L^r}; r = infinity gives the max over collocation points.
double lr_norm(const Field& f, double r);

namespace detail {

/// out[o, k, i] = sum_j mat(k, j) in[o, j, i] along confined axis `axis`.
template <typename T>
void apply_confined_matrix(const Grid& g, const Matrix<T>& mat, int axis, const std::vector<cplx>& in,
                           std::vector<cplx>& out);

}  // namespace detail

}  // namespace pnls

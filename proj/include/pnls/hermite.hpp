#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pnls {

/// Dense row-major matrix; just enough for the small per-axis operators.
template <typename T>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T{}) {}

  T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Gauss–Hermite rule for the weight e^{-x^2}.
///
/// `nodes` are the roots of H_K in increasing order. `weights` are the
/// classical weights w_i; `scaled_weights` are W_i = w_i e^{x_i^2}
/// = 1 / (K psi_{K-1}(x_i)^2), the weights that integrate products of
/// Hermite functions directly:  sum_i W_i psi_j(x_i) psi_k(x_i) = delta_jk
/// for j, k < K.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> scaled_weights;
};

GaussHermiteRule gauss_hermite(int order);

/// psi_0..psi_{count-1} at a single point, via the three-term recurrence.
void hermite_functions(int count, double x, std::span<double> out);

/// Values psi_k(node_i) as a (nodes x K) matrix. Requires nodes.size() == K.
/// Throws RecurrenceOverflow when the Gaussian envelope underflows at a node,
/// which happens once K is too large for double precision.
Matrix<double> hermite_basis(int order, std::span<const double> nodes);

/// Rule plus the transform matrices of one confined axis:
/// synthesis(i, k) = psi_k(x_i), analysis(k, i) = W_i psi_k(x_i).
/// Entries are evaluated in extended precision at extended-precision nodes
/// and rounded once.
struct HermiteTables {
  GaussHermiteRule rule;
  Matrix<double> synthesis;
  Matrix<double> analysis;
};

HermiteTables hermite_tables(int order);

}  // namespace pnls

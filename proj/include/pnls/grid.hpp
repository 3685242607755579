#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pnls/hermite.hpp"

namespace pnls {

using cplx = std::complex<double>;

/// Discretization of R^n_x (harmonic directions) x R^{d-n}_y (free directions).
/// Every confined axis carries `hermite_order` Gauss–Hermite nodes; every
/// free axis is the periodic box [-L, L) with `free_points` samples.
struct GridSpec {
  int d = 2;
  int n = 1;
  int hermite_order = 32;
  double box_half_length = 32.0;
  int free_points = 128;

  bool operator==(const GridSpec&) const = default;
};

/// Throws InvalidGrid unless 2 <= d <= 4, 1 <= n <= d-1, K >= 8,
/// M even and >= 16, L > 0.
void validate(const GridSpec& spec);

class FftPlan;

/// Immutable grid data shared by every field living on it.
///
/// Flat layout is row-major over (x_1..x_n, y_1..y_{d-n}): the confined
/// multi-index is outermost and the free block of M^{d-n} samples is
/// contiguous. Spectral coefficients use the same layout with Hermite
/// indices in place of nodes and FFT-ordered wavenumbers in place of y.
class Grid {
 public:
  explicit Grid(const GridSpec& spec);
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  static std::shared_ptr<const Grid> make(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int d() const { return spec_.d; }
  int n() const { return spec_.n; }
  int free_dims() const { return spec_.d - spec_.n; }
  int hermite_order() const { return spec_.hermite_order; }
  int free_points() const { return spec_.free_points; }
  double box_half_length() const { return spec_.box_half_length; }
  double dy() const { return 2.0 * spec_.box_half_length / spec_.free_points; }

  std::size_t size() const { return confined_size_ * free_size_; }
  std::size_t confined_size() const { return confined_size_; }
  std::size_t free_size() const { return free_size_; }

  const std::vector<double>& nodes() const { return rule_.nodes; }
  const std::vector<double>& scaled_weights() const { return rule_.scaled_weights; }
  /// psi_k(x_i): maps Hermite coefficients to node values.
  const Matrix<double>& synthesis() const { return synthesis_; }
  /// W_i psi_k(x_i): maps node values to Hermite coefficients.
  const Matrix<double>& analysis() const { return analysis_; }
  /// d/dx on node values through the truncated ladder relation.
  const Matrix<double>& node_gradient() const { return node_gradient_; }

  /// y_j = -L + j dy.
  const std::vector<double>& free_coords() const { return free_coords_; }
  /// eta_m = pi m / L in FFT order (m = 0..M/2-1, -M/2..-1).
  const std::vector<double>& wavenumbers() const { return wavenumbers_; }

  /// Quadrature weight of every flat grid point (prod W_i * dy^{d-n}).
  const std::vector<double>& cell_weights() const { return cell_weights_; }
  /// Quadrature weight of the confined part only (prod W_i), per confined flat index.
  const std::vector<double>& confined_weights() const { return confined_weights_; }
  /// Sum of Hermite indices |k| per confined flat index.
  const std::vector<int>& hermite_levels() const { return hermite_levels_; }
  /// |eta|^2 per free flat index (FFT order).
  const std::vector<double>& free_eta_squared() const { return free_eta_squared_; }
  /// Sign (-1)^{m_1+...} per free flat index, from the box offset y_0 = -L.
  const std::vector<double>& free_signs() const { return free_signs_; }

  /// Coordinate of confined axis `axis` at confined flat index `ci`.
  double confined_coord(std::size_t ci, int axis) const;
  /// Coordinate of free axis `axis` at free flat index `fi`.
  double free_coord(std::size_t fi, int axis) const;
  /// Signed wavenumber on free axis `axis` at free flat index `fi` (FFT order).
  double free_wavenumber(std::size_t fi, int axis) const;

  /// In-place unnormalized DFT over the free axes of every confined block.
  /// sign = -1 forward, +1 backward.
  void fft_free(std::span<cplx> data, int sign) const;
  /// Same transform on a single free block of length free_size().
  void fft_block(std::span<cplx> block, int sign) const;

 private:
  GridSpec spec_;
  GaussHermiteRule rule_;
  Matrix<double> synthesis_;
  Matrix<double> analysis_;
  Matrix<double> node_gradient_;
  std::vector<double> free_coords_;
  std::vector<double> wavenumbers_;
  std::size_t confined_size_ = 1;
  std::size_t free_size_ = 1;
  std::vector<double> cell_weights_;
  std::vector<double> confined_weights_;
  std::vector<int> hermite_levels_;
  std::vector<double> free_eta_squared_;
  std::vector<double> free_signs_;
  const FftPlan* fft_ = nullptr;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace pnls

#include "pnls/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "pnls/errors.hpp"
#include "pnls/fft.hpp"

namespace pnls {

namespace {
// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPlan::FftPlan(int rank, int points) {
  std::vector<int> dims(rank, points);
  size_ = 1;
  for (int r = 0; r < rank; ++r) size_ *= points;
  std::vector<cplx> scratch(size_);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_ = fftw_plan_dft(rank, dims.data(), p, p, FFTW_FORWARD, flags);
  backward_ = fftw_plan_dft(rank, dims.data(), p, p, FFTW_BACKWARD, flags);
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

void FftPlan::execute(cplx* data, int sign) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(sign < 0 ? forward_ : backward_), p, p);
}

const FftPlan& FftPlan::cached(int rank, int points) {
  static std::mutex m;
  static std::map<std::pair<int, int>, std::unique_ptr<FftPlan>> plans;
  std::lock_guard lock(m);
  auto& slot = plans[{rank, points}];
  if (!slot) slot = std::make_unique<FftPlan>(rank, points);
  return *slot;
}

void validate(const GridSpec& s) {
  if (s.d < 2 || s.d > 4) throw InvalidGrid("d must satisfy 2 <= d <= 4, got " + std::to_string(s.d));
  if (s.n < 1 || s.n > s.d - 1) {
    throw InvalidGrid("n must satisfy 1 <= n <= d-1, got n=" + std::to_string(s.n) +
                      " d=" + std::to_string(s.d));
  }
  if (s.hermite_order < 8) throw InvalidGrid("hermite_order must be >= 8");
  if (s.free_points < 16 || s.free_points % 2 != 0) {
    throw InvalidGrid("free_points must be even and >= 16");
  }
  if (!(s.box_half_length > 0.0) || !std::isfinite(s.box_half_length)) {
    throw InvalidGrid("box_half_length must be positive");
  }
}

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  validate(spec);
  const int K = spec.hermite_order;
  const int M = spec.free_points;
  const double L = spec.box_half_length;

  HermiteTables tables = hermite_tables(K);
  rule_ = std::move(tables.rule);
  synthesis_ = std::move(tables.synthesis);
  analysis_ = std::move(tables.analysis);

  // d psi_k = sqrt(k/2) psi_{k-1} - sqrt((k+1)/2) psi_{k+1}, truncated at K.
  Matrix<double> ladder(K, K);
  for (int k = 0; k < K; ++k) {
    if (k >= 1) ladder(k - 1, k) = std::sqrt(0.5 * k);
    if (k + 1 < K) ladder(k + 1, k) = -std::sqrt(0.5 * (k + 1));
  }
  Matrix<double> tmp(K, K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) {
      double s = 0.0;
      for (int c = 0; c < K; ++c) s += ladder(a, c) * analysis_(c, b);
      tmp(a, b) = s;
    }
  node_gradient_ = Matrix<double>(K, K);
  for (int i = 0; i < K; ++i)
    for (int b = 0; b < K; ++b) {
      double s = 0.0;
      for (int a = 0; a < K; ++a) s += synthesis_(i, a) * tmp(a, b);
      node_gradient_(i, b) = s;
    }

  const double dy = 2.0 * L / M;
  free_coords_.resize(M);
  wavenumbers_.resize(M);
  for (int j = 0; j < M; ++j) {
    free_coords_[j] = -L + j * dy;
    const int m = j < M / 2 ? j : j - M;
    wavenumbers_[j] = std::numbers::pi * m / L;
  }

  for (int a = 0; a < spec.n; ++a) confined_size_ *= K;
  for (int a = 0; a < free_dims(); ++a) free_size_ *= M;

  confined_weights_.assign(confined_size_, 1.0);
  hermite_levels_.assign(confined_size_, 0);
  for (std::size_t ci = 0; ci < confined_size_; ++ci) {
    std::size_t rem = ci;
    for (int a = spec.n - 1; a >= 0; --a) {
      const std::size_t i = rem % K;
      rem /= K;
      confined_weights_[ci] *= rule_.scaled_weights[i];
      hermite_levels_[ci] += static_cast<int>(i);
    }
  }
  free_eta_squared_.assign(free_size_, 0.0);
  free_signs_.assign(free_size_, 1.0);
  for (std::size_t fi = 0; fi < free_size_; ++fi) {
    std::size_t rem = fi;
    for (int a = free_dims() - 1; a >= 0; --a) {
      const std::size_t j = rem % M;
      rem /= M;
      free_eta_squared_[fi] += wavenumbers_[j] * wavenumbers_[j];
      const int m = static_cast<int>(j) < M / 2 ? static_cast<int>(j) : static_cast<int>(j) - M;
      if (m % 2 != 0) free_signs_[fi] = -free_signs_[fi];
    }
  }
  const double free_cell = std::pow(dy, free_dims());
  cell_weights_.resize(size());
  for (std::size_t ci = 0; ci < confined_size_; ++ci)
    for (std::size_t fi = 0; fi < free_size_; ++fi)
      cell_weights_[ci * free_size_ + fi] = confined_weights_[ci] * free_cell;

  fft_ = &FftPlan::cached(free_dims(), M);
}


std::shared_ptr<const Grid> Grid::make(const GridSpec& spec) { return std::make_shared<const Grid>(spec); }

double Grid::confined_coord(std::size_t ci, int axis) const {
  const std::size_t K = spec_.hermite_order;
  for (int a = spec_.n - 1; a > axis; --a) ci /= K;
  return rule_.nodes[ci % K];
}

double Grid::free_coord(std::size_t fi, int axis) const {
  const std::size_t M = spec_.free_points;
  for (int a = free_dims() - 1; a > axis; --a) fi /= M;
  return free_coords_[fi % M];
}

double Grid::free_wavenumber(std::size_t fi, int axis) const {
  const std::size_t M = spec_.free_points;
  for (int a = free_dims() - 1; a > axis; --a) fi /= M;
  return wavenumbers_[fi % M];
}

void Grid::fft_free(std::span<cplx> data, int sign) const {
  if (data.size() != size()) throw ShapeMismatch("fft_free: data size does not match grid");
  const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>(confined_size_);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) fft_->execute(data.data() + b * free_size_, sign);
}

void Grid::fft_block(std::span<cplx> block, int sign) const {
  if (block.size() != free_size_) throw ShapeMismatch("fft_block: block size does not match grid");
  fft_->execute(block.data(), sign);
}

}  // namespace pnls

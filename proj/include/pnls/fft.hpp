#pragma once

#include <complex>
#include <cstddef>
#include <memory>

namespace pnls {

/// In-place complex DFT of a rank-r cube with `points` samples per axis.
/// Plans are FFTW_ESTIMATE, so planning is deterministic across runs.
class FftPlan {
 public:
  FftPlan(int rank, int points);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  /// sign = -1 forward, +1 backward; unnormalized.
  void execute(std::complex<double>* data, int sign) const;
  std::size_t size() const { return size_; }

  /// Process-wide cached plan for a given shape.
  static const FftPlan& cached(int rank, int points);

 private:
  void* forward_ = nullptr;
  void* backward_ = nullptr;
  std::size_t size_ = 0;
};

}  // namespace pnls

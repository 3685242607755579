#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "pnls/datum.hpp"
#include "pnls/field.hpp"
#include "pnls/transform.hpp"

namespace pnls::testing {

inline GridPtr small_grid(int d = 2, int n = 1, int K = 24, double L = 16.0, int M = 64) {
  return Grid::make(GridSpec{d, n, K, L, M});
}

/// Relative L^2 (quadrature) distance between two fields.
inline double rel_diff(const Field& a, const Field& b) { return norm(a - b) / norm(b); }

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<cplx>& a) {
  double m = 0.0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace pnls::testing

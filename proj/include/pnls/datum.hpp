#pragma once

#include <random>
#include <span>
#include <vector>

#include "pnls/field.hpp"

namespace pnls {

/// Separable Hermite–Gaussian wave packet
///   amplitude * prod_a w_a^{-1/2} psi_{k_a}((z_a - c_a)/w_a) e^{i p_a z_a},
/// unit L^2 norm per factor, so the mass is amplitude^2.
/// Vectors have one entry per axis (confined axes first); an empty vector
/// means the default (order 0, center 0, width 1, momentum 0).
struct HermiteGaussian {
  std::vector<int> order;
  std::vector<double> center;
  std::vector<double> width;
  std::vector<double> momentum;
  double amplitude = 1.0;

  cplx operator()(std::span<const double> z) const;
  cplx axis_factor(int axis, double z) const;
  bool operator==(const HermiteGaussian&) const = default;
};

Field sample(const GridPtr& grid, const HermiteGaussian& datum);

/// Random field resolved on the grid: a sum of `packets` Hermite-Gaussian
/// packets with random low orders, centers, widths, momenta and complex
/// coefficients.
Field random_localized_field(const GridPtr& grid, std::mt19937_64& rng, int packets = 3);

/// Independent normal samples at every node (not resolved); only for
/// pointwise identities.
Field random_field(const GridPtr& grid, std::mt19937_64& rng);

}  // namespace pnls

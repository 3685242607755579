#include "pnls/hermite.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <string>

#include "pnls/errors.hpp"

namespace pnls {

void hermite_functions(int count, double x, std::span<double> out) {
  if (count <= 0) return;
  const double psi0 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  out[0] = psi0;
  if (count == 1) return;
  out[1] = std::sqrt(2.0) * x * psi0;
  for (int k = 1; k + 1 < count; ++k) {
    out[k + 1] = x * std::sqrt(2.0 / (k + 1)) * out[k] - std::sqrt(double(k) / (k + 1)) * out[k - 1];
  }
}

namespace {

using ext = long double;

// Same recurrence in extended precision. The rule and the transform
// matrices are built from these values and rounded once, so the discrete
// orthogonality sum_i W_i psi_j(x_i) psi_k(x_i) = delta_jk holds to the
// rounding of the stored entries. Node and recurrence error would otherwise
// bias every transform round trip the same way and show up as mass drift.
void hermite_functions_ext(int count, ext x, std::vector<ext>& out) {
  out.assign(count, 0.0L);
  out[0] = std::pow(std::numbers::pi_v<ext>, -0.25L) * std::exp(-0.5L * x * x);
  if (count == 1) return;
  out[1] = std::sqrt(2.0L) * x * out[0];
  for (int k = 1; k + 1 < count; ++k) {
    out[k + 1] = x * std::sqrt(2.0L / (k + 1)) * out[k] - std::sqrt(ext(k) / (k + 1)) * out[k - 1];
  }
}

struct ExtendedRule {
  std::vector<ext> nodes;
  std::vector<ext> scaled_weights;
};

ExtendedRule extended_rule(int order) {
  // Golub–Welsch: nodes are the eigenvalues of the Jacobi matrix of the
  // physicists' Hermite recurrence; Newton on psi_K then polishes them.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);

  ExtendedRule rule;
  rule.nodes.resize(order);
  rule.scaled_weights.resize(order);
  std::vector<ext> v;
  for (int i = 0; i < order; ++i) {
    ext x = solver.eigenvalues()(i);
    // psi_K' = sqrt(2K) psi_{K-1} - x psi_K
    for (int it = 0; it < 8; ++it) {
      hermite_functions_ext(order + 1, x, v);
      const ext deriv = std::sqrt(2.0L * order) * v[order - 1] - x * v[order];
      if (deriv == 0.0L) break;
      const ext step = v[order] / deriv;
      x -= step;
      if (std::abs(step) < 1e-19L * (1.0L + std::abs(x))) break;
    }
    hermite_functions_ext(order + 1, x, v);
    const double pkm1 = static_cast<double>(v[order - 1]);
    if (!(pkm1 != 0.0) || !std::isfinite(pkm1) || std::fpclassify(pkm1) == FP_SUBNORMAL) {
      throw RecurrenceOverflow("Hermite recurrence underflowed at node " + std::to_string(static_cast<double>(x)) +
                               " for order " + std::to_string(order));
    }
    rule.nodes[i] = x;
    rule.scaled_weights[i] = 1.0L / (order * v[order - 1] * v[order - 1]);
  }
  // Exact symmetry of the rule keeps odd moments at roundoff.
  for (int i = 0; i < order / 2; ++i) {
    const int j = order - 1 - i;
    const ext x = 0.5L * (rule.nodes[j] - rule.nodes[i]);
    const ext w = 0.5L * (rule.scaled_weights[i] + rule.scaled_weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.scaled_weights[i] = rule.scaled_weights[j] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0L;
  return rule;
}

Matrix<double> basis_at(int order, const std::vector<ext>& nodes) {
  Matrix<double> basis(nodes.size(), order);
  std::vector<ext> row;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    hermite_functions_ext(order, nodes[i], row);
    const double psi0 = static_cast<double>(row[0]);
    if (psi0 == 0.0 || std::fpclassify(psi0) == FP_SUBNORMAL) {
      throw RecurrenceOverflow("Gaussian envelope underflows at node " +
                               std::to_string(static_cast<double>(nodes[i])) + "; order " + std::to_string(order) +
                               " is too large for double");
    }
    for (int k = 0; k < order; ++k) {
      basis(i, k) = static_cast<double>(row[k]);
      if (!std::isfinite(basis(i, k))) throw RecurrenceOverflow("non-finite Hermite function value");
    }
  }
  return basis;
}

GaussHermiteRule round_rule(const ExtendedRule& e) {
  GaussHermiteRule rule;
  for (std::size_t i = 0; i < e.nodes.size(); ++i) {
    rule.nodes.push_back(static_cast<double>(e.nodes[i]));
    rule.scaled_weights.push_back(static_cast<double>(e.scaled_weights[i]));
    rule.weights.push_back(static_cast<double>(e.scaled_weights[i] * std::exp(-e.nodes[i] * e.nodes[i])));
  }
  return rule;
}

}  // namespace

GaussHermiteRule gauss_hermite(int order) {
  if (order < 1) throw InvalidArgument("Gauss-Hermite order must be >= 1");
  return round_rule(extended_rule(order));
}

HermiteTables hermite_tables(int order) {
  if (order < 1) throw InvalidArgument("Hermite order must be >= 1");
  const ExtendedRule e = extended_rule(order);
  HermiteTables t;
  t.rule = round_rule(e);
  t.synthesis = basis_at(order, e.nodes);
  t.analysis = Matrix<double>(order, order);
  std::vector<ext> row;
  for (int i = 0; i < order; ++i) {
    hermite_functions_ext(order, e.nodes[i], row);
    for (int k = 0; k < order; ++k) t.analysis(k, i) = static_cast<double>(e.scaled_weights[i] * row[k]);
  }
  return t;
}

Matrix<double> hermite_basis(int order, std::span<const double> nodes) {
  if (order < 1) throw InvalidArgument("Hermite order must be >= 1");
  if (nodes.size() != static_cast<std::size_t>(order)) {
    throw ShapeMismatch("hermite_basis: " + std::to_string(nodes.size()) + " nodes for order " +
                        std::to_string(order));
  }
  return basis_at(order, std::vector<ext>(nodes.begin(), nodes.end()));
}

}  // namespace pnls

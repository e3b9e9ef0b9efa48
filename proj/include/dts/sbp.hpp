#pragma once

#include <span>
#include <vector>

namespace dts {

/// Dense row-major square matrix; the operators here never exceed 13x13.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

/// Diagonal-norm Legendre-Gauss-Lobatto SBP operators of order p on [-1, 1].
///
/// Node i sits between flux points i and i+1 (0-based); the flux-point
/// spacing equals the quadrature weight of the enclosed node. Immutable after
/// construction, so one instance can be shared by all element evaluations.
struct LglOperatorSet {
  int order = 0;
  std::vector<double> nodes;        // N_p ascending LGL points
  std::vector<double> weights;      // diagonal of P
  DenseMatrix stiffness;            // Q, with Q + Q^T = B
  DenseMatrix derivative;           // D = P^{-1} Q
  std::vector<double> flux_points;  // N_p + 1 points, -1 ... +1

  int size() const { return order + 1; }
};

/// Legendre polynomial P_n(x) and its derivative, by three-term recurrence.
void legendre(int n, double x, double& value, double& derivative);

/// Builds the operator set. Throws InvalidOrderError unless 1 <= p <= 12.
LglOperatorSet build_lgl_operators(int p);

/// D * values. Throws DimensionError on a length mismatch.
std::vector<double> apply_derivative(const LglOperatorSet& ops, std::span<const double> values);

/// P^{-1} Delta f: node i receives (f_{i+1} - f_i) / P_ii for flux-point values f.
std::vector<double> telescope_divergence(const LglOperatorSet& ops,
                                         std::span<const double> flux_values);

}  // namespace dts

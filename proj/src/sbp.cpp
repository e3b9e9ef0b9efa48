#include "dts/sbp.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dts/errors.hpp"

namespace dts {

void legendre(int n, double x, double& value, double& derivative) {
  double p0 = 1.0;
  double p1 = x;
  double d0 = 0.0;
  double d1 = 1.0;
  if (n == 0) {
    value = 1.0;
    derivative = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    const double d2 = d0 + (2.0 * k - 1.0) * p1;
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  value = p1;
  derivative = d1;
}

namespace {

// Interior LGL nodes are the roots of P'_p. Newton on q(x) = (1 - x^2) P'_p(x)
// = p (P_{p-1} - x P_p) started from Chebyshev-Gauss-Lobatto points.
double newton_lgl_node(int p, double guess) {
  double x = guess;
  for (int it = 0; it < 100; ++it) {
    double pp, dp, pm, dm;
    legendre(p, x, pp, dp);
    legendre(p - 1, x, pm, dm);
    const double q = pm - x * pp;
    const double dq = dm - pp - x * dp;
    const double step = q / dq;
    x -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return x;
}

}  // namespace

LglOperatorSet build_lgl_operators(int p) {
  if (p < 1 || p > 12) {
    throw InvalidOrderError("LGL order must lie in [1, 12], got " + std::to_string(p));
  }
  const int n = p + 1;
  LglOperatorSet ops;
  ops.order = p;
  ops.nodes.assign(n, 0.0);
  ops.weights.assign(n, 0.0);
  ops.nodes.front() = -1.0;
  ops.nodes.back() = 1.0;
  for (int j = 1; j < p; ++j) {
    const double guess = -std::cos(std::numbers::pi * j / p);
    ops.nodes[j] = newton_lgl_node(p, guess);
  }
  // Symmetrize to remove any roundoff asymmetry of the root finder.
  for (int j = 0; j < n / 2; ++j) {
    const double a = 0.5 * (ops.nodes[n - 1 - j] - ops.nodes[j]);
    ops.nodes[j] = -a;
    ops.nodes[n - 1 - j] = a;
  }
  if (n % 2 == 1) ops.nodes[n / 2] = 0.0;

  std::vector<double> lp(n);
  for (int j = 0; j < n; ++j) {
    double v, d;
    legendre(p, ops.nodes[j], v, d);
    lp[j] = v;
    ops.weights[j] = 2.0 / (p * (p + 1.0) * v * v);
  }

  // Lagrange derivative matrix; the diagonal comes from the row-sum identity.
  DenseMatrix d(n, n);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = lp[i] / (lp[j] * (ops.nodes[i] - ops.nodes[j]));
      row += d(i, j);
    }
    d(i, i) = -row;
  }

  // Q = P D, then project onto the SBP set: Q = (Q - Q^T)/2 + B/2.
  DenseMatrix q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) q(i, j) = ops.weights[i] * d(i, j);
  DenseMatrix qs(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) qs(i, j) = 0.5 * (q(i, j) - q(j, i));
  qs(0, 0) = -0.5;
  qs(n - 1, n - 1) = 0.5;
  ops.stiffness = qs;
  ops.derivative = DenseMatrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ops.derivative(i, j) = qs(i, j) / ops.weights[i];

  ops.flux_points.assign(n + 1, 0.0);
  ops.flux_points[0] = -1.0;
  for (int i = 1; i <= n; ++i) ops.flux_points[i] = ops.flux_points[i - 1] + ops.weights[i - 1];
  return ops;
}

std::vector<double> apply_derivative(const LglOperatorSet& ops, std::span<const double> values) {
  const int n = ops.size();
  if (static_cast<int>(values.size()) != n) {
    throw DimensionError("apply_derivative: expected " + std::to_string(n) + " values, got " +
                         std::to_string(values.size()));
  }
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += ops.derivative(i, j) * values[j];
    out[i] = s;
  }
  return out;
}

std::vector<double> telescope_divergence(const LglOperatorSet& ops,
                                         std::span<const double> flux_values) {
  const int n = ops.size();
  if (static_cast<int>(flux_values.size()) != n + 1) {
    throw DimensionError("telescope_divergence: expected " + std::to_string(n + 1) +
                         " flux values, got " + std::to_string(flux_values.size()));
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = (flux_values[i + 1] - flux_values[i]) / ops.weights[i];
  return out;
}

}  // namespace dts

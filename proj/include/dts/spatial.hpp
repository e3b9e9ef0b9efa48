#pragma once

#include <array>
#include <vector>

#include "dts/flux.hpp"
#include "dts/mesh.hpp"

namespace dts {

/// Number of worker threads used by residual evaluation (default 1). Results
/// do not depend on the count: every thread writes only its own elements.
void set_thread_count(int threads);
int thread_count();

/// Everything a residual evaluation needs besides the field itself.
struct Discretization {
  Mesh mesh;
  LglOperatorSet ops;
  GasParameters gas;
  /// Exterior state for Dirichlet faces, evaluated at the boundary node.
  PointFunction boundary_state;
  bool use_artificial_viscosity = true;

  Discretization(Mesh m, GasParameters g, PointFunction bc = {})
      : mesh(std::move(m)), ops(build_lgl_operators(mesh.order())), gas(g),
        boundary_state(std::move(bc)) {}
};

/// First- and high-order right-hand sides for the same field. Residuals act
/// on the Jacobian-scaled solution: J du/dt = R.
struct ResidualPair {
  Field first_order;
  Field high_order;
  std::vector<double> mu_ad;  // per element
  /// Per node: sum_d 2 (D+ + D-) / dxi_bar in contravariant units, the
  /// first-order mass dissipation entering the density bounds.
  std::vector<double> dissipation_sum;
  /// Per node: nu * sum_d (2 / (h_d P_min))^2, an estimate of the diffusive
  /// spectral radius used for the pseudotime stability limit.
  std::vector<double> diffusion_rate;
};

std::vector<double> element_artificial_viscosity(const Field& field, const Discretization& disc);

/// theta[d] holds dw/dx_d at every node; directions beyond the mesh dimension are zero.
std::array<Field, 3> ldg_gradients(const Field& field, const Discretization& disc);

ResidualPair compute_residuals(const Field& field, const Discretization& disc);
Field residual_first_order(const Field& field, const Discretization& disc);
Field residual_high_order(const Field& field, const Discretization& disc);

/// Throws InadmissibleStateError (with location) at the first node with rho <= 0 or rho e <= 0.
void require_admissible(const Field& field, const GasParameters& gas);

/// Largest per-element theta in [0, 1] such that the convex blend
/// (1 - theta) low + theta high stays above the floors at every node.
/// Throws InvariantViolationError when `low` itself violates them.
std::vector<double> limit_blend(const Field& low, const Field& high, const GasParameters& gas,
                                const PositivityFloors& floors);

/// Flux limiter for the blended pseudotime update
/// u(theta) = c_tau (u_kn + dtau (theta R_p + (1 - theta) R_1) / J),
/// with u_kn = u^k + (dtau / dt) u^n (or its BDF2 counterpart) in unscaled form.
std::vector<double> flux_limiter_theta(const Field& u_kn, const Field& r_high,
                                       const Field& r_low, double dtau, double c_tau,
                                       const Mesh& mesh, const GasParameters& gas,
                                       const PositivityFloors& floors);

/// Applies per-element theta: (1 - theta) low + theta high.
Field blend(const Field& low, const Field& high, const std::vector<double>& theta);

}  // namespace dts

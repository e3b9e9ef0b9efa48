#pragma once

#include <span>
#include <vector>

#include "dts/mesh.hpp"

namespace dts {

struct ErrorNorms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

/// Quadrature-weighted norms of field - exact. L1 and L2 are normalized by
/// 5 * sum(P J); Linf is the largest componentwise deviation.
ErrorNorms error_norms(const Field& field, const Field& exact, const Mesh& mesh,
                       const LglOperatorSet& ops);
double l2_difference(const Field& a, const Field& b, const Mesh& mesh, const LglOperatorSet& ops);

struct ResidualMeasures {
  double eps_abs = 0.0;
  double eps_rel = 0.0;
};

/// eps_abs = |u^{k+1} - u^k| / dtau, eps_rel = (|u^{k+1} - u^k| / |u^1 - u^0|) dtau0 / dtau.
/// A zero first-iteration change reports eps_rel = 0.
ResidualMeasures residual_measures(double step_norm, double first_step_norm, double dtau,
                                   double dtau0);
ResidualMeasures residual_measures(const Field& u_next, const Field& u_k, const Field& u_1,
                                   const Field& u_0, double dtau, double dtau0, const Mesh& mesh,
                                   const LglOperatorSet& ops);

/// Sum of values in a fixed pairwise order.
double pairwise_sum(std::span<const double> values);

/// Integrals of the conserved variables, sum(P J u).
State conserved_totals(const Field& field, const Mesh& mesh, const LglOperatorSet& ops);
/// Total mathematical entropy sum(P J S) with S = -rho ln(p rho^-gamma).
double total_entropy(const Field& field, const Mesh& mesh, const LglOperatorSet& ops,
                     const GasParameters& gas);

struct TgvQuantities {
  double kinetic_energy = 0.0;
  double solenoidal = 0.0;
  double dilatational = 0.0;
  double total() const { return solenoidal + dilatational; }
};

/// Domain-averaged kinetic energy and its solenoidal and dilatational viscous
/// dissipation rates. Velocity gradients use the element derivative operator.
/// Throws UnsupportedConfigurationError on a non-periodic mesh.
TgvQuantities tgv_diagnostics(const Field& field, const Mesh& mesh, const LglOperatorSet& ops,
                              const GasParameters& gas);

struct HistoryRecord {
  int step = 0;
  double time = 0.0;
  double dt = 0.0;
  int pseudo_iterations = 0;
  double eps_abs = 0.0;
  double eps_rel = 0.0;
  State totals{};
  double entropy = 0.0;
  double kinetic_energy = 0.0;
  double eps_s = 0.0;
  double eps_d = 0.0;
  double eps_v = 0.0;
  double min_density = 0.0;
  double min_internal_energy = 0.0;
  double theta_min = 1.0;
  double theta_mean = 1.0;
};

/// Fills the field-derived entries of a record. Dissipation rates stay zero
/// on non-periodic meshes.
HistoryRecord measure(const Field& field, const Mesh& mesh, const LglOperatorSet& ops,
                      const GasParameters& gas);

struct ConservationReport {
  State max_relative_drift{};
  double max_entropy_increase = 0.0;
  int entropy_increase_events = 0;
};

/// Drift of each conserved total relative to the first record, and entropy
/// increases between consecutive records larger than `entropy_slack`.
ConservationReport conservation_audit(std::span<const HistoryRecord> history,
                                      double entropy_slack = 0.0);

}  // namespace dts

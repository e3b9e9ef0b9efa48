#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "dts/spatial.hpp"

namespace dts {

enum class Integrator { ForwardEuler, Ssprk3, Bdf1Dual, Bdf2Dual };
enum class BdfScheme { Bdf1, Bdf2 };

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct DualTimeConfig {
  double dt = 1e-3;
  /// Optional ramp: after `ramp_start` the step shrinks by `ramp_factor`
  /// each physical step until it reaches `dt_final`.
  std::optional<double> dt_final;
  double ramp_start = 0.0;
  double ramp_factor = 0.5;

  double kappa_tau = 2.0;  // multiplier on the forward-Euler density bound
  double safety = 0.9;
  double eps_abs = 1e-8;
  double eps_rel = 1e-6;
  int max_pseudo_iterations = 20000;
  int max_halvings = 30;
  /// Optional absolute cap on the pseudotime step (0 disables it).
  double max_dtau = 0.0;
  /// Stability limit for the diffusive terms: dtau <= diffusion_number / max(diffusion_rate).
  double diffusion_number = 0.5;
  PositivityFloors floors;

  /// Throws ConfigError on dt <= 0, kappa_tau < 1, safety outside (0, 1] or nonpositive thresholds.
  void validate() const;
  /// Physical step to take from time t, given the previous step.
  double step_at(double t, double previous) const;
};

struct TimeLevelBuffer {
  Field u_n;
  std::optional<Field> u_nm1;
  Field u_k;
};

using ResidualFunction = std::function<ResidualPair(const Field&)>;

double c1_tau(double dt, double dtau);
double c2_tau(double dt, double dtau);

/// Physical-time source (unscaled): u^n / dt for BDF1, (2 u^n - u^{n-1} / 2) / dt for BDF2.
Field bdf_source(const TimeLevelBuffer& buffer, BdfScheme scheme, double dt);

/// u^{k+1} = C1 (u^k + (dtau / dt) u^n + dtau R / J).
Field bdf1_pseudo_update(const TimeLevelBuffer& buffer, const Field& r, double dt, double dtau,
                         const Mesh& mesh);
/// u^{k+1} = C2 (u^k + (2 dtau / dt) u^n - (dtau / (2 dt)) u^{n-1} + dtau R / J).
Field bdf2_pseudo_update(const TimeLevelBuffer& buffer, const Field& r, double dt, double dtau,
                         const Mesh& mesh);

/// min over nodes of 1 / (S / J - rho_source / rho^k), where S is the per-node
/// dissipation sum. Nodes with a nonpositive denominator impose nothing.
double dtau_density_bound(const Field& u_k, const std::vector<double>& rho_source,
                          const Mesh& mesh, const std::vector<double>& dissipation_sum);
double dtau_density_bound_bdf1(const Field& u_k, const Field& u_n, const Mesh& mesh,
                               const std::vector<double>& dissipation_sum, double dt);
double dtau_density_bound_bdf2(const Field& u_k, const Field& u_n, const Field& u_nm1,
                               const Mesh& mesh, const std::vector<double>& dissipation_sum,
                               double dt);
/// Explicit forward-Euler bound, the dt -> infinity limit of the BDF bounds.
double dtau_density_bound_fe(const Field& u_k, const Mesh& mesh,
                             const std::vector<double>& dissipation_sum);

struct Trinomial {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double operator()(double x) const { return (a * x + b) * x + c; }
};

/// Coefficients of (rho e rho)^{k+1} / C^2 as a quadratic in dtau / J for the
/// update u^{k+1} = C (u^k + (dtau / J) g) with g = R + J s, s the unscaled
/// physical-time source.
Trinomial internal_energy_quadratic(const State& u_k, const State& g, const GasParameters& gas);
Trinomial internal_energy_quadratic_bdf1(const State& u_k, const State& u_n, const State& r,
                                         double dt, double jacobian, const GasParameters& gas);
Trinomial internal_energy_quadratic_bdf2(const State& u_k, const State& u_n, const State& u_nm1,
                                         const State& r, double dt, double jacobian,
                                         const GasParameters& gas);

/// Largest dtau with a (dtau/J)^2 + b (dtau/J) + c - floor > 0 on [0, dtau).
/// Returns kUnbounded when no positive root exists.
double max_dtau_internal_energy(const Trinomial& q, double jacobian, double floor);

struct PseudoIteration {
  int iteration = 0;
  double dtau = 0.0;
  double eps_abs = 0.0;
  double eps_rel = 0.0;
  double theta_min = 1.0;
  double theta_mean = 1.0;
};

struct PseudoResult {
  Field solution;
  std::vector<PseudoIteration> history;
  bool converged = false;
  int iterations = 0;
  int retries = 0;
  /// First-order updates at a bound-selected step that fell below a floor.
  int positivity_violations = 0;
  double theta_min = 1.0;
  double theta_mean = 1.0;
  double eps_abs = 0.0;
  double eps_rel = 0.0;
};

/// Drives the pseudotime iteration to a steady state for one physical step.
PseudoResult pseudo_converge(const TimeLevelBuffer& buffer, const DualTimeConfig& config,
                             BdfScheme scheme, const ResidualFunction& residual, double dt,
                             const Mesh& mesh, const LglOperatorSet& ops,
                             const GasParameters& gas);

/// Largest explicit step keeping density and internal energy above the floors
/// for the first-order update.
double explicit_step_bound(const Field& u, const ResidualPair& pair, const Mesh& mesh,
                           const GasParameters& gas, const PositivityFloors& floors);
/// diffusion_number / max(diffusion_rate), unbounded without diffusive terms.
double diffusive_step_bound(const ResidualPair& pair, double diffusion_number);

struct ExplicitStep {
  Field solution;
  std::vector<double> theta;
};

/// u + dt R / J with per-element limiting between the first- and high-order
/// residuals. Throws DomainError when dt exceeds explicit_step_bound.
ExplicitStep forward_euler_step(const Field& u, double dt, const ResidualFunction& residual,
                                const Mesh& mesh, const GasParameters& gas,
                                const PositivityFloors& floors);
/// Shu-Osher three-stage SSP Runge-Kutta built from forward_euler_step.
ExplicitStep ssprk3_step(const Field& u, double dt, const ResidualFunction& residual,
                         const Mesh& mesh, const GasParameters& gas,
                         const PositivityFloors& floors);

struct StepReport {
  int step = 0;
  double time = 0.0;
  double dt = 0.0;
  int pseudo_iterations = 0;
  bool converged = true;
  double eps_abs = 0.0;
  double eps_rel = 0.0;
  double theta_min = 1.0;
  double theta_mean = 1.0;
  int retries = 0;
  int positivity_violations = 0;
};

using StepObserver = std::function<void(const Field&, const StepReport&)>;

struct MarchResult {
  Field solution;
  double time = 0.0;
  int steps = 0;
  int nonconverged_steps = 0;
  int retries = 0;
  int positivity_violations = 0;
  double theta_min = 1.0;
};

/// Advances u0 from t0 to t_end. Explicit integrators take
/// safety * explicit_step_bound (capped by config.dt); dual integrators follow
/// the physical step schedule of `config`. BDF2 starts with one BDF1 step.
MarchResult march(const Field& u0, double t0, double t_end, Integrator integrator,
                  const DualTimeConfig& config, const ResidualFunction& residual,
                  const Mesh& mesh, const LglOperatorSet& ops, const GasParameters& gas,
                  const StepObserver& observer = {});

}  // namespace dts

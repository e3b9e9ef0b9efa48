#pragma once

#include <span>

#include "dts/gas.hpp"
#include "dts/sbp.hpp"

namespace dts {

/// Gradients of the primitive variables at one point.
/// dv[i][d] = dv_i/dx_d, dT[d] = dT/dx_d, drho[d] = drho/dx_d.
struct PrimitiveGradients {
  std::array<Vec3, 3> dv{};
  Vec3 dT{};
  Vec3 drho{};
};

/// Inviscid flux in direction `direction`; the pressure term of the momentum
/// equation carries the factor 1 / (gamma M^2) and the energy flux is
/// (rhoE + (gamma - 1) p / gamma) v_d.
State euler_flux(const State& u, int direction, const GasParameters& gas);

/// Largest characteristic speed |v_d| + c.
double max_wave_speed(const State& u, int direction, const GasParameters& gas);

/// Kinetic-energy-preserving entropy-conservative two-point flux.
State ec_flux(const State& left, const State& right, int direction, const GasParameters& gas);

/// Matrix dissipation 1/2 R |Lambda| T R^T (w_R - w_L), eigen-decomposition
/// evaluated at the arithmetic average of the primitives. `speed_scale`
/// multiplies every |lambda|.
State ed_dissipation(const State& left, const State& right, int direction,
                     const GasParameters& gas, double speed_scale = 1.0);

/// |m| / (2 rho_A), the smallest mass dissipation keeping the density positive.
double min_mass_dissipation(double mass_flux, double rho_left, double rho_right);

/// m - D (rho_R - rho_L); throws InsufficientDissipationError below the minimum.
double first_order_mass_flux(double rho_left, double rho_right, double mass_flux,
                             double dissipation);

/// Stress and heat flux with explicit coefficients. `heat_coefficient`
/// multiplies grad(T / (gamma M^2)) in the standard energy scaling.
State diffusive_flux(const State& u, const PrimitiveGradients& g, int direction,
                     const GasParameters& gas, double mu, double heat_coefficient);

/// Physical Navier-Stokes flux with mu(T) / Re and the Prandtl-number heat flux.
State viscous_flux(const State& u, const PrimitiveGradients& g, int direction,
                   const GasParameters& gas);

/// Brenner-form artificial dissipation flux: diffusive_flux with mu = mu_ad,
/// kappa = c_T mu_ad, plus sigma drho/dx_d [1, v, E] with sigma = c_rho mu_ad / rho.
State brenner_ad_flux(const State& u, const PrimitiveGradients& g, int direction,
                      double mu_ad, const GasParameters& gas);

/// Converts entropy-variable gradients theta[d] = dw/dx_d to primitive gradients.
PrimitiveGradients gradients_from_entropy(const State& u, const std::array<State, 3>& theta,
                                          const GasParameters& gas);

/// Element artificial viscosity from the highest-mode energy fraction of the
/// modal Legendre expansion of density, ramped up to rho_mean h lambda / (p+1)
/// with lambda the largest |v| + c in the element. `values` holds the
/// (p+1)^dim nodal states in x-fastest order; `h` is the smallest element extent.
double artificial_viscosity(std::span<const State> values, int dim, const LglOperatorSet& ops,
                            const GasParameters& gas, double h);

/// Fraction of the density modal energy carried by modes of degree p.
double highest_mode_fraction(std::span<const State> values, int dim, const LglOperatorSet& ops);

}  // namespace dts

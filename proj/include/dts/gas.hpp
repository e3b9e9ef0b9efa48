#pragma once

#include <array>
#include <optional>

namespace dts {

/// Conservative variables (rho, m_x, m_y, m_z, rhoE). Unused momentum
/// components stay zero in 1D and 2D runs.
using State = std::array<double, 5>;
using Vec3 = std::array<double, 3>;

inline constexpr int kNumVars = 5;
inline constexpr int kRho = 0;
inline constexpr int kEnergy = 4;

enum class ViscosityLaw { Constant, PowerLaw };

/// Freestream parameters of the nondimensional system where p = rho T and
/// E = T / gamma + (gamma - 1) M^2 |v|^2 / 2.
struct GasParameters {
  double gamma = 1.4;
  double mach = 1.0;
  double reynolds = 0.0;  // <= 0 switches the physical viscous terms off
  double prandtl = 0.72;
  ViscosityLaw viscosity_law = ViscosityLaw::Constant;
  double viscosity_exponent = 0.7;
  double c_rho = 0.9;
  std::optional<double> c_temperature;  // defaults to c_rho / (gamma - 1)

  double c_t() const { return c_temperature.value_or(c_rho / (gamma - 1.0)); }
  /// Coefficient k in rhoE = rho T / gamma + k |m|^2 / rho.
  double kinetic_coefficient() const { return 0.5 * (gamma - 1.0) * mach * mach; }
  /// Factor mapping the energy equation onto the standard Euler scaling.
  double energy_scale() const { return (gamma - 1.0) * mach * mach; }
  /// Pressure coefficient of the momentum equation, 1 / (gamma M^2).
  double pressure_scale() const { return 1.0 / (gamma * mach * mach); }
  bool viscous() const { return reynolds > 0.0; }

  /// Throws DomainError on gamma <= 1, M <= 0, Pr <= 0 or c_rho outside (0, 1].
  void validate() const;
};

struct PositivityFloors {
  double rho = 1e-11;
  double internal_energy = 1e-11;
};

struct Primitives {
  double rho = 0.0;
  Vec3 v{};
  double p = 0.0;
  double T = 0.0;
  double e = 0.0;  // specific internal energy, T / gamma
};

double internal_energy_density(const State& u, const GasParameters& gas);

/// Throws InadmissibleStateError when rho <= 0 or rho e <= 0.
Primitives primitives(const State& u, const GasParameters& gas);
State conservative(double rho, const Vec3& v, double T, const GasParameters& gas);

double sound_speed(double T, const GasParameters& gas);
double dynamic_viscosity(double T, const GasParameters& gas);

/// Entropy function S = -rho s with s = ln(p rho^-gamma).
double entropy(const State& u, const GasParameters& gas);
/// w = dS/dU.
State entropy_variables(const State& u, const GasParameters& gas);
/// psi_d = w^T F_d - S v_d.
double entropy_potential(const State& u, int direction, const GasParameters& gas);

bool is_admissible(const State& u, const PositivityFloors& floors, const GasParameters& gas);

/// (a - b) / (ln a - ln b), with a series branch near a == b.
double log_mean(double a, double b);

}  // namespace dts

#include "dts/gas.hpp"

#include <cmath>

#include "dts/errors.hpp"
#include "dts/flux.hpp"

namespace dts {

void GasParameters::validate() const {
  if (!(gamma > 1.0)) throw DomainError("gamma must exceed 1");
  if (!(mach > 0.0)) throw DomainError("Mach number must be positive");
  if (!(prandtl > 0.0)) throw DomainError("Prandtl number must be positive");
  if (!(c_rho > 0.0 && c_rho <= 1.0)) throw DomainError("c_rho must lie in (0, 1]");
  if (c_t() < 0.0) throw DomainError("c_T must be nonnegative");
}

double internal_energy_density(const State& u, const GasParameters& gas) {
  const double m2 = u[1] * u[1] + u[2] * u[2] + u[3] * u[3];
  return u[kEnergy] - gas.kinetic_coefficient() * m2 / u[kRho];
}

Primitives primitives(const State& u, const GasParameters& gas) {
  if (!(u[kRho] > 0.0)) throw InadmissibleStateError("nonpositive density");
  const double rho_e = internal_energy_density(u, gas);
  if (!(rho_e > 0.0)) throw InadmissibleStateError("nonpositive internal energy");
  Primitives w;
  w.rho = u[kRho];
  for (int i = 0; i < 3; ++i) w.v[i] = u[1 + i] / u[kRho];
  w.e = rho_e / u[kRho];
  w.T = gas.gamma * w.e;
  w.p = w.rho * w.T;
  return w;
}

State conservative(double rho, const Vec3& v, double T, const GasParameters& gas) {
  const double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  return {rho, rho * v[0], rho * v[1], rho * v[2],
          rho * T / gas.gamma + gas.kinetic_coefficient() * rho * v2};
}

double sound_speed(double T, const GasParameters& gas) { return std::sqrt(T) / gas.mach; }

double dynamic_viscosity(double T, const GasParameters& gas) {
  if (gas.viscosity_law == ViscosityLaw::PowerLaw) return std::pow(T, gas.viscosity_exponent);
  return 1.0;
}

double entropy(const State& u, const GasParameters& gas) {
  const Primitives w = primitives(u, gas);
  const double s = std::log(w.p) - gas.gamma * std::log(w.rho);
  return -w.rho * s;
}

State entropy_variables(const State& u, const GasParameters& gas) {
  const Primitives w = primitives(u, gas);
  const double g = gas.gamma;
  const double k = gas.kinetic_coefficient();
  const double s = std::log(w.p) - g * std::log(w.rho);
  const double v2 = w.v[0] * w.v[0] + w.v[1] * w.v[1] + w.v[2] * w.v[2];
  State out;
  out[kRho] = g - s - g * k * v2 / w.T;
  for (int i = 0; i < 3; ++i) out[1 + i] = 2.0 * g * k * w.v[i] / w.T;
  out[kEnergy] = -g / w.T;
  return out;
}

double entropy_potential(const State& u, int direction, const GasParameters& gas) {
  const State w = entropy_variables(u, gas);
  const State f = euler_flux(u, direction, gas);
  double psi = 0.0;
  for (int c = 0; c < kNumVars; ++c) psi += w[c] * f[c];
  return psi - entropy(u, gas) * u[1 + direction] / u[kRho];
}

bool is_admissible(const State& u, const PositivityFloors& floors, const GasParameters& gas) {
  if (!(u[kRho] >= floors.rho)) return false;
  return internal_energy_density(u, gas) >= floors.internal_energy;
}

double log_mean(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("log_mean requires positive arguments");
  const double f = (a - b) / (a + b);
  const double u = f * f;
  if (std::abs(f) < 1e-4) {
    const double series = 1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0;
    return 0.5 * (a + b) / series;
  }
  return (a - b) / (std::log(a) - std::log(b));
}

}  // namespace dts

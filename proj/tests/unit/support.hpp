#pragma once

#include <random>

#include "dts/gas.hpp"

namespace dts::test {

inline State random_state(std::mt19937_64& rng, const GasParameters& gas, double rho_lo = 0.1,
                          double rho_hi = 2.0) {
  std::uniform_real_distribution<double> rho(rho_lo, rho_hi), v(-1.0, 1.0), t(0.2, 3.0);
  const double r = rho(rng);
  const Vec3 vel{v(rng), v(rng), v(rng)};
  return conservative(r, vel, t(rng), gas);
}

inline GasParameters mach_gas(double mach, double reynolds = 0.0) {
  GasParameters g;
  g.mach = mach;
  g.reynolds = reynolds;
  return g;
}

}  // namespace dts::test

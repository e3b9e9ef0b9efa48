#pragma once

#include <vector>

#include "dts/gas.hpp"

namespace dts {

/// Steady 1D viscous shock standing at the origin. The upstream state is
/// rho = 1, v = 1, T = 1, so the upstream Mach number equals gas.mach. The
/// profile solves the integrated momentum and energy balances and is centered
/// where the velocity is halfway between its end values.
class ViscousShockProfile {
public:
  /// Throws DomainError for an inviscid gas or a subsonic upstream state.
  explicit ViscousShockProfile(const GasParameters& gas);

  State state(double x) const;
  double velocity(double x) const;
  double downstream_velocity() const { return u2_; }
  double downstream_temperature() const;
  /// Residuals of the two integrated balances at x (zero up to integration error).
  std::array<double, 2> balance_residual(double x) const;

private:
  struct Sample {
    double x, u, t, du, dt;
  };
  std::array<double, 2> rhs(double u, double t_hat) const;
  void interpolate(double x, double& u, double& t_hat) const;
  double viscosity(double t_hat) const;

  GasParameters gas_;
  double m0_ = 1.0, p0_ = 0.0, h0_ = 0.0;
  double u1_ = 1.0, t1_ = 0.0, u2_ = 0.0, t2_ = 0.0;
  std::vector<Sample> samples_;  // ascending x
};

}  // namespace dts

#include "dts/viscous_shock.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "dts/errors.hpp"

namespace dts {

namespace odeint = boost::numeric::odeint;

// Variables in the standard Euler scaling: velocity u and T_hat = P_hat / rho.
ViscousShockProfile::ViscousShockProfile(const GasParameters& gas) : gas_(gas) {
  gas_.validate();
  if (!gas_.viscous()) throw DomainError("viscous shock needs a positive Reynolds number");
  if (gas_.mach <= 1.0) throw DomainError("viscous shock needs a supersonic upstream state");
  const double g = gas_.gamma;
  const double m2 = gas_.mach * gas_.mach;
  t1_ = 1.0 / (g * m2);
  m0_ = 1.0;
  p0_ = m0_ * u1_ + t1_;
  h0_ = m0_ * (g / (g - 1.0) * t1_ + 0.5 * u1_ * u1_);
  u2_ = u1_ * ((g - 1.0) * m2 + 2.0) / ((g + 1.0) * m2);
  t2_ = u2_ * (p0_ - m0_ * u2_) / m0_;

  // Stable direction of the downstream saddle from a finite-difference Jacobian.
  const double eps = 1e-7;
  const auto f0 = rhs(u2_, t2_);
  const auto fu = rhs(u2_ + eps, t2_);
  const auto ft = rhs(u2_, t2_ + eps);
  const double a = (fu[0] - f0[0]) / eps, b = (ft[0] - f0[0]) / eps;
  const double c = (fu[1] - f0[1]) / eps, d = (ft[1] - f0[1]) / eps;
  const double tr = a + d, det = a * d - b * c;
  const double lambda = 0.5 * (tr - std::sqrt(tr * tr - 4.0 * det));  // negative eigenvalue
  std::array<double, 2> dir = std::abs(b) > std::abs(lambda - a) * 1e-12
                                  ? std::array<double, 2>{b, lambda - a}
                                  : std::array<double, 2>{lambda - d, c};
  const double norm = std::hypot(dir[0], dir[1]);
  dir = {dir[0] / norm, dir[1] / norm};
  if (dir[0] < 0.0) dir = {-dir[0], -dir[1]};  // toward larger u, i.e. upstream

  using Vec = std::array<double, 2>;
  const double offset = 1e-9 * (u1_ - u2_);
  Vec y{u2_ + offset * dir[0], t2_ + offset * dir[1]};
  auto system = [this](const Vec& s, Vec& dsdx, double) { dsdx = rhs(s[0], s[1]); };
  auto stepper = odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<Vec>());

  // March toward -x until the upstream state is reached.
  std::vector<Sample> backward;
  const double dx = -1e-3 * std::abs(1.0 / lambda);
  double x = 0.0;
  stepper.initialize(y, x, dx);
  auto push = [&](double xx, const Vec& s) {
    const Vec f = rhs(s[0], s[1]);
    backward.push_back({xx, s[0], s[1], f[0], f[1]});
  };
  push(x, y);
  const double target = u1_ - 1e-10 * (u1_ - u2_);
  for (int i = 0; i < 2000000 && y[0] < target; ++i) {
    stepper.do_step(system);
    x = stepper.current_time();
    y = stepper.current_state();
    push(x, y);
  }
  std::reverse(backward.begin(), backward.end());
  samples_ = std::move(backward);

  // Shift so that u = (u1 + u2) / 2 sits at x = 0.
  const double mid = 0.5 * (u1_ + u2_);
  auto it = std::adjacent_find(samples_.begin(), samples_.end(),
                               [&](const Sample& l, const Sample& r) { return l.u >= mid && r.u < mid; });
  if (it == samples_.end()) throw DomainError("viscous shock profile did not cross its midpoint");
  double lo = it->x, hi = std::next(it)->x;
  for (int k = 0; k < 200; ++k) {
    const double m = 0.5 * (lo + hi);
    double u, t;
    interpolate(m, u, t);
    (u >= mid ? lo : hi) = m;
  }
  const double shift = 0.5 * (lo + hi);
  for (auto& s : samples_) s.x -= shift;
}

double ViscousShockProfile::viscosity(double t_hat) const {
  const double t = t_hat * gas_.gamma * gas_.mach * gas_.mach;
  return dynamic_viscosity(t, gas_);
}

std::array<double, 2> ViscousShockProfile::rhs(double u, double t_hat) const {
  const double g = gas_.gamma;
  const double mu = viscosity(t_hat) / gas_.reynolds;
  const double kappa = g * mu / ((g - 1.0) * gas_.prandtl);
  const double du = (m0_ * u + m0_ * t_hat / u - p0_) / (4.0 / 3.0 * mu);
  const double dt = (m0_ * (t_hat / (g - 1.0) - 0.5 * u * u) + p0_ * u - h0_) / kappa;
  return {du, dt};
}

void ViscousShockProfile::interpolate(double x, double& u, double& t_hat) const {
  if (x <= samples_.front().x) {
    u = samples_.front().u;
    t_hat = samples_.front().t;
    return;
  }
  if (x >= samples_.back().x) {
    u = u2_;
    t_hat = t2_;
    return;
  }
  auto it = std::upper_bound(samples_.begin(), samples_.end(), x,
                             [](double v, const Sample& s) { return v < s.x; });
  const Sample& r = *it;
  const Sample& l = *std::prev(it);
  // Cubic Hermite interpolation with exact slopes.
  const double h = r.x - l.x;
  const double s = (x - l.x) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  u = h00 * l.u + h10 * h * l.du + h01 * r.u + h11 * h * r.du;
  t_hat = h00 * l.t + h10 * h * l.dt + h01 * r.t + h11 * h * r.dt;
}

double ViscousShockProfile::velocity(double x) const {
  double u, t;
  interpolate(x, u, t);
  return u;
}

double ViscousShockProfile::downstream_temperature() const {
  return t2_ * gas_.gamma * gas_.mach * gas_.mach;
}

State ViscousShockProfile::state(double x) const {
  double u, t_hat;
  interpolate(x, u, t_hat);
  const double rho = m0_ / u;
  return conservative(rho, {u, 0.0, 0.0}, t_hat * gas_.gamma * gas_.mach * gas_.mach, gas_);
}

std::array<double, 2> ViscousShockProfile::balance_residual(double x) const {
  double u, t;
  interpolate(x, u, t);
  // Compare interpolated slopes with those of the ODE at the interpolated state.
  const double h = 1e-6;
  double up, tp, um, tm;
  interpolate(x + h, up, tp);
  interpolate(x - h, um, tm);
  const auto f = rhs(u, t);
  return {(up - um) / (2 * h) - f[0], (tp - tm) / (2 * h) - f[1]};
}

}  // namespace dts

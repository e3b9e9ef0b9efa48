#include "dts/flux.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dts/errors.hpp"

namespace dts {

namespace {

// Variables of the standard Euler scaling: pressure P = p / (gamma M^2) and
// total energy rhoE / ((gamma - 1) M^2). Velocities are unchanged.
struct StandardPrimitives {
  double rho;
  Vec3 v;
  double P;
};

StandardPrimitives to_standard(const State& u, const GasParameters& gas) {
  const Primitives w = primitives(u, gas);
  return {w.rho, w.v, w.p * gas.pressure_scale()};
}

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

State euler_flux(const State& u, int direction, const GasParameters& gas) {
  const Primitives w = primitives(u, gas);
  const double vd = w.v[direction];
  const double pm = w.p * gas.pressure_scale();
  State f;
  f[kRho] = u[kRho] * vd;
  for (int i = 0; i < 3; ++i) f[1 + i] = u[1 + i] * vd;
  f[1 + direction] += pm;
  f[kEnergy] = (u[kEnergy] + (gas.gamma - 1.0) / gas.gamma * w.p) * vd;
  return f;
}

double max_wave_speed(const State& u, int direction, const GasParameters& gas) {
  const Primitives w = primitives(u, gas);
  return std::abs(w.v[direction]) + sound_speed(w.T, gas);
}

State ec_flux(const State& left, const State& right, int direction, const GasParameters& gas) {
  const StandardPrimitives l = to_standard(left, gas);
  const StandardPrimitives r = to_standard(right, gas);
  const double beta_l = 0.5 * l.rho / l.P;
  const double beta_r = 0.5 * r.rho / r.P;
  const double rho_ln = log_mean(l.rho, r.rho);
  const double beta_ln = log_mean(beta_l, beta_r);
  const double rho_avg = 0.5 * (l.rho + r.rho);
  const double beta_avg = 0.5 * (beta_l + beta_r);
  const double p_hat = 0.5 * rho_avg / beta_avg;
  Vec3 v_avg;
  for (int i = 0; i < 3; ++i) v_avg[i] = 0.5 * (l.v[i] + r.v[i]);
  const double v2_avg = 0.5 * (dot3(l.v, l.v) + dot3(r.v, r.v));

  State f;
  f[kRho] = rho_ln * v_avg[direction];
  for (int i = 0; i < 3; ++i) f[1 + i] = f[kRho] * v_avg[i];
  f[1 + direction] += p_hat;
  const double energy_standard =
      f[kRho] * (0.5 / ((gas.gamma - 1.0) * beta_ln) - 0.5 * v2_avg) +
      v_avg[0] * f[1] + v_avg[1] * f[2] + v_avg[2] * f[3];
  f[kEnergy] = gas.energy_scale() * energy_standard;
  return f;
}

State ed_dissipation(const State& left, const State& right, int direction,
                     const GasParameters& gas, double speed_scale) {
  const StandardPrimitives l = to_standard(left, gas);
  const StandardPrimitives r = to_standard(right, gas);
  const double g = gas.gamma;
  const double s = gas.energy_scale();

  // Entropy-variable jump in the standard scaling.
  const State wl = entropy_variables(left, gas);
  const State wr = entropy_variables(right, gas);
  State dw;
  for (int c = 0; c < kNumVars; ++c) dw[c] = (wr[c] - wl[c]) / (g - 1.0);
  dw[kEnergy] *= s;

  const double rho = 0.5 * (l.rho + r.rho);
  const double P = 0.5 * (l.P + r.P);
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = 0.5 * (l.v[i] + r.v[i]);
  const double a = std::sqrt(g * P / rho);
  const double v2 = dot3(v, v);
  const double H = a * a / (g - 1.0) + 0.5 * v2;
  const double vn = v[direction];
  const int t1 = (direction + 1) % 3;
  const int t2 = (direction + 2) % 3;

  std::array<State, 5> R{};
  R[0] = {1.0, v[0], v[1], v[2], H - a * vn};
  R[0][1 + direction] -= a;
  R[1] = {1.0, v[0], v[1], v[2], 0.5 * v2};
  R[2] = {0.0, 0.0, 0.0, 0.0, v[t1]};
  R[2][1 + t1] = 1.0;
  R[3] = {0.0, 0.0, 0.0, 0.0, v[t2]};
  R[3][1 + t2] = 1.0;
  R[4] = {1.0, v[0], v[1], v[2], H + a * vn};
  R[4][1 + direction] += a;
  const std::array<double, 5> scale{rho / (2.0 * g), (g - 1.0) * rho / g, P, P, rho / (2.0 * g)};
  const std::array<double, 5> lambda{std::abs(vn - a), std::abs(vn), std::abs(vn), std::abs(vn),
                                     std::abs(vn + a)};

  State out{};
  for (int k = 0; k < 5; ++k) {
    double proj = 0.0;
    for (int c = 0; c < kNumVars; ++c) proj += R[k][c] * dw[c];
    const double coeff = 0.5 * speed_scale * lambda[k] * scale[k] * proj;
    for (int c = 0; c < kNumVars; ++c) out[c] += coeff * R[k][c];
  }
  out[kEnergy] *= s;
  return out;
}

double min_mass_dissipation(double mass_flux, double rho_left, double rho_right) {
  return std::abs(mass_flux) / (rho_left + rho_right);
}

double first_order_mass_flux(double rho_left, double rho_right, double mass_flux,
                             double dissipation) {
  const double d_min = min_mass_dissipation(mass_flux, rho_left, rho_right);
  if (dissipation < d_min * (1.0 - 1e-14)) {
    throw InsufficientDissipationError("mass dissipation below |m| / (2 rho_A)");
  }
  return mass_flux - dissipation * (rho_right - rho_left);
}

State diffusive_flux(const State& u, const PrimitiveGradients& g, int direction,
                     const GasParameters& gas, double mu, double heat_coefficient) {
  const Primitives w = primitives(u, gas);
  const double div = g.dv[0][0] + g.dv[1][1] + g.dv[2][2];
  State f{};
  double work = 0.0;
  for (int i = 0; i < 3; ++i) {
    double tau = mu * (g.dv[i][direction] + g.dv[direction][i]);
    if (i == direction) tau -= 2.0 / 3.0 * mu * div;
    f[1 + i] = tau;
    work += tau * w.v[i];
  }
  f[kEnergy] = gas.energy_scale() * work +
               heat_coefficient * (gas.gamma - 1.0) / gas.gamma * g.dT[direction];
  return f;
}

State viscous_flux(const State& u, const PrimitiveGradients& g, int direction,
                   const GasParameters& gas) {
  if (!gas.viscous()) return State{};
  const Primitives w = primitives(u, gas);
  const double mu = dynamic_viscosity(w.T, gas) / gas.reynolds;
  const double kappa = mu * gas.gamma / ((gas.gamma - 1.0) * gas.prandtl);
  return diffusive_flux(u, g, direction, gas, mu, kappa);
}

State brenner_ad_flux(const State& u, const PrimitiveGradients& g, int direction,
                      double mu_ad, const GasParameters& gas) {
  if (mu_ad < 0.0) throw NegativeViscosityError("artificial viscosity must be nonnegative");
  State f = diffusive_flux(u, g, direction, gas, mu_ad, gas.c_t() * mu_ad);
  const double sigma_drho = gas.c_rho * mu_ad / u[kRho] * g.drho[direction];
  f[kRho] += sigma_drho;
  for (int i = 0; i < 3; ++i) f[1 + i] += sigma_drho * u[1 + i] / u[kRho];
  f[kEnergy] += sigma_drho * u[kEnergy] / u[kRho];
  return f;
}

PrimitiveGradients gradients_from_entropy(const State& u, const std::array<State, 3>& theta,
                                          const GasParameters& gas) {
  const Primitives w = primitives(u, gas);
  const double g = gas.gamma;
  const double k = gas.kinetic_coefficient();
  const double T = w.T;
  const double v2 = dot3(w.v, w.v);
  PrimitiveGradients out;
  for (int d = 0; d < 3; ++d) {
    const State& th = theta[d];
    const double dT = T * T / g * th[kEnergy];
    double v_dv = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double dvi = T / (2.0 * g * k) * th[1 + i] + w.v[i] * T / g * th[kEnergy];
      out.dv[i][d] = dvi;
      v_dv += w.v[i] * dvi;
    }
    // w_rho = gamma - s - gamma k |v|^2 / T with s = ln T + (1 - gamma) ln rho.
    const double d_v2_over_T = 2.0 * v_dv / T - v2 * dT / (T * T);
    const double ds = -th[kRho] - g * k * d_v2_over_T;
    out.dT[d] = dT;
    out.drho[d] = w.rho / (1.0 - g) * (ds - dT / T);
  }
  return out;
}

namespace {

// Inverse of the orthonormal-Legendre Vandermonde matrix at the LGL nodes.
Eigen::MatrixXd inverse_vandermonde(const LglOperatorSet& ops) {
  const int n = ops.size();
  Eigen::MatrixXd V(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double val, der;
      legendre(j, ops.nodes[i], val, der);
      V(i, j) = val * std::sqrt((2.0 * j + 1.0) / 2.0);
    }
  return V.inverse();
}

}  // namespace

double highest_mode_fraction(std::span<const State> values, int dim, const LglOperatorSet& ops) {
  const int n = ops.size();
  const Eigen::MatrixXd vinv = inverse_vandermonde(ops);
  const int n2 = dim >= 2 ? n : 1;
  const int n3 = dim >= 3 ? n : 1;
  std::vector<double> modal(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) modal[i] = values[i][kRho];

  // Apply V^{-1} along each active direction.
  std::vector<double> line(n), out(n);
  const std::array<int, 3> stride{1, n, n * n2};
  const std::array<int, 3> extent{n, n2, n3};
  for (int d = 0; d < dim; ++d) {
    for (int c = 0; c < n3; ++c)
      for (int b = 0; b < n2; ++b)
        for (int a = 0; a < n; ++a) {
          std::array<int, 3> idx{a, b, c};
          if (idx[d] != 0) continue;
          int base = idx[0] * stride[0] + idx[1] * stride[1] + idx[2] * stride[2];
          for (int i = 0; i < extent[d]; ++i) line[i] = modal[base + i * stride[d]];
          for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += vinv(i, j) * line[j];
            out[i] = s;
          }
          for (int i = 0; i < n; ++i) modal[base + i * stride[d]] = out[i];
        }
  }
  double total = 0.0;
  double top = 0.0;
  const int p = ops.order;
  for (int c = 0; c < n3; ++c)
    for (int b = 0; b < n2; ++b)
      for (int a = 0; a < n; ++a) {
        const double m = modal[a + n * (b + n2 * c)];
        total += m * m;
        if (a == p || (dim >= 2 && b == p) || (dim >= 3 && c == p)) top += m * m;
      }
  if (total <= 0.0) return 0.0;
  return top / total;
}

double artificial_viscosity(std::span<const State> values, int dim, const LglOperatorSet& ops,
                            const GasParameters& gas, double h) {
  const double fraction = highest_mode_fraction(values, dim, ops);
  if (fraction <= 0.0) return 0.0;
  const double p = ops.order;
  // Smooth ramp in log10 of the highest-mode fraction.
  const double s0 = -2.0 - 2.0 * std::log10(p);
  const double width = 1.0;
  const double se = std::log10(fraction);
  if (se < s0 - width) return 0.0;
  double lambda = 0.0;
  double rho_mean = 0.0;
  for (const State& u : values) {
    const Primitives w = primitives(u, gas);
    lambda = std::max(lambda, std::sqrt(dot3(w.v, w.v)) + sound_speed(w.T, gas));
    rho_mean += w.rho;
  }
  rho_mean /= static_cast<double>(values.size());
  const double mu_max = rho_mean * h * lambda / (p + 1.0);
  if (se > s0 + width) return mu_max;
  return 0.5 * mu_max * (1.0 + std::sin(0.5 * std::numbers::pi * (se - s0) / width));
}

}  // namespace dts

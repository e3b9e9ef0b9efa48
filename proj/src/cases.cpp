#include "dts/cases.hpp"

#include <cmath>
#include <numbers>

#include "dts/errors.hpp"

namespace dts {

namespace {

constexpr double kPi = std::numbers::pi;

std::array<int, 3> active_elements(const CaseParameters& p) {
  std::array<int, 3> n{1, 1, 1};
  for (int d = 0; d < p.dim; ++d) n[d] = p.elements[d];
  return n;
}

std::unique_ptr<Discretization> make_disc(const CaseParameters& p, std::array<double, 3> lo,
                                          std::array<double, 3> hi, BoundaryKind bc,
                                          PointFunction boundary = {}) {
  std::array<BoundaryKind, 3> bcs{BoundaryKind::Periodic, BoundaryKind::Periodic,
                                  BoundaryKind::Periodic};
  bcs[0] = bc;
  Mesh mesh(p.dim, p.order, active_elements(p), lo, hi, bcs);
  if (p.jitter > 0.0) mesh.jitter(p.jitter, p.seed);
  auto disc = std::make_unique<Discretization>(std::move(mesh), p.gas, std::move(boundary));
  disc->use_artificial_viscosity = p.artificial_viscosity;
  return disc;
}

}  // namespace

double tgv_pressure(const std::array<double, 3>& x, const GasParameters& gas, int dim,
                    double constant) {
  const double z = dim >= 3 ? x[2] : 0.0;
  return 1.0 + gas.gamma * gas.mach * gas.mach / constant * (std::cos(2 * x[0]) + std::cos(2 * x[1])) *
                   (std::cos(2 * z) + 2.0);
}

State tgv_state(const std::array<double, 3>& x, const GasParameters& gas, int dim,
                double constant) {
  const double z = dim >= 3 ? x[2] : 0.0;
  const Vec3 v{std::sin(x[0]) * std::cos(x[1]) * std::cos(z),
               -std::cos(x[0]) * std::sin(x[1]) * std::cos(z), 0.0};
  const double p = tgv_pressure(x, gas, dim, constant);
  return conservative(p, v, 1.0, gas);
}

BenchmarkCase make_case(const CaseParameters& params) {
  if (params.dim < 1 || params.dim > 3) throw ConfigError("mesh.dim must be 1, 2 or 3");
  params.gas.validate();
  BenchmarkCase out;
  out.params = params;
  const GasParameters gas = params.gas;

  if (params.name == "density-wave") {
    // rho = 1 + a sin(2 pi sum_d (x_d - t)), unit velocity in every active
    // direction, uniform pressure.
    const double amp = params.wave_amplitude;
    if (!(amp > -1.0 && amp < 1.0)) throw ConfigError("case.wave_amplitude must lie in (-1, 1)");
    const int dim = params.dim;
    auto state_at = [amp, dim, gas](const std::array<double, 3>& x, double t) {
      double phase = 0.0;
      Vec3 v{0.0, 0.0, 0.0};
      for (int d = 0; d < dim; ++d) {
        phase += x[d] - t;
        v[d] = 1.0;
      }
      const double rho = 1.0 + amp * std::sin(2.0 * kPi * phase);
      return conservative(rho, v, 1.0 / rho, gas);
    };
    out.disc = make_disc(params, {0, 0, 0}, {1, 1, 1}, BoundaryKind::Periodic);
    out.initial = interpolate(out.disc->mesh, out.disc->ops,
                              [state_at](const std::array<double, 3>& x) { return state_at(x, 0.0); });
    if (!gas.viscous()) {
      const Discretization* disc = out.disc.get();
      out.exact = [disc, state_at](double t) {
        return interpolate(disc->mesh, disc->ops,
                           [&](const std::array<double, 3>& x) { return state_at(x, t); });
      };
    }
  } else if (params.name == "viscous-shock") {
    auto shock = std::make_shared<const ViscousShockProfile>(gas);
    out.shock = shock;
    const double w = params.shock_halfwidth;
    if (!(w > 0.0)) throw ConfigError("case.shock_halfwidth must be positive");
    PointFunction profile = [shock](const std::array<double, 3>& x) { return shock->state(x[0]); };
    out.disc = make_disc(params, {-w, 0, 0}, {w, 1, 1}, BoundaryKind::Dirichlet, profile);
    out.initial = interpolate(out.disc->mesh, out.disc->ops, profile);
    const Discretization* disc = out.disc.get();
    out.exact = [disc, profile](double) { return interpolate(disc->mesh, disc->ops, profile); };
  } else if (params.name == "sod-torture") {
    if (params.dim != 1) throw ConfigError("sod-torture is one-dimensional");
    const double rr = params.sod_density_ratio;
    const double pr = params.sod_pressure_ratio;
    if (!(rr > 0.0) || !(pr > 0.0)) throw ConfigError("sod ratios must be positive");
    const State left = conservative(1.0, {0, 0, 0}, 1.0, gas);
    const State right = conservative(rr, {0, 0, 0}, pr / rr, gas);
    PointFunction f = [left, right](const std::array<double, 3>& x) {
      return x[0] < 0.5 ? left : right;
    };
    out.disc = make_disc(params, {0, 0, 0}, {1, 1, 1}, BoundaryKind::Dirichlet, f);
    out.initial = interpolate(out.disc->mesh, out.disc->ops, f);
  } else if (params.name == "tgv") {
    if (params.dim < 2) throw ConfigError("tgv requires mesh.dim >= 2");
    const int dim = params.dim;
    const double cm = params.tgv_constant;
    out.disc = make_disc(params, {-kPi, -kPi, -kPi}, {kPi, kPi, kPi}, BoundaryKind::Periodic);
    out.initial = interpolate(out.disc->mesh, out.disc->ops,
                              [gas, dim, cm](const std::array<double, 3>& x) {
                                return tgv_state(x, gas, dim, cm);
                              });
  } else {
    throw ConfigError("case.name: unknown case '" + params.name + "'");
  }
  return out;
}

}  // namespace dts

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "dts/errors.hpp"
#include "dts/time_integration.hpp"
#include "support.hpp"

using namespace dts;

namespace {

// One 1D element of order 1 with Jacobian `jac`: two nodes.
Mesh tiny_mesh(double jac = 1.0, BoundaryKind bc = BoundaryKind::Periodic) {
  return Mesh(1, 1, {1, 1, 1}, {0, 0, 0}, {2 * jac, 1, 1}, {bc, bc, bc});
}

Field uniform(const Mesh& mesh, const State& u) {
  Field f(mesh);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = u;
  return f;
}

// Linear decay R = -lambda J u for every component.
ResidualFunction decay(const Mesh& mesh, double lambda) {
  return [&mesh, lambda](const Field& u) {
    ResidualPair p;
    p.first_order = Field(mesh);
    for (int e = 0; e < mesh.num_elements(); ++e)
      for (int i = 0; i < mesh.nodes_per_element(); ++i)
        for (int v = 0; v < kNumVars; ++v) p.first_order.at(e, i)[v] = -lambda * mesh.jacobian(e) * u.at(e, i)[v];
    p.high_order = p.first_order;
    p.dissipation_sum.assign(u.size(), 0.0);
    p.diffusion_rate.assign(u.size(), 0.0);
    p.mu_ad.assign(mesh.num_elements(), 0.0);
    return p;
  };
}

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    for (int v = 0; v < kNumVars; ++v) m = std::max(m, std::abs(a[k][v] - b[k][v]));
  return m;
}

}  // namespace

TEST_CASE("pseudotime contraction factors") {
  CHECK(c1_tau(1.0, 1.0) == doctest::Approx(0.5));
  CHECK(c1_tau(0.1, 0.05) == doctest::Approx(2.0 / 3.0));
  CHECK(c1_tau(1.0, 1e-300) == 1.0);
  CHECK(c2_tau(1.0, 1.0) == doctest::Approx(0.4));
  CHECK(c2_tau(1.5, 1.0) == doctest::Approx(0.5));
  CHECK(c2_tau(1.0, 1e-300) == 1.0);
  CHECK_THROWS_AS(c1_tau(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(c2_tau(1.0, -1.0), DomainError);
}

TEST_CASE("density bounds reproduce the closed-form examples") {
  const GasParameters gas;
  const Mesh mesh = tiny_mesh();
  REQUIRE(mesh.jacobian(0) == 1.0);
  const Field u = uniform(mesh, conservative(1.0, {0, 0, 0}, 1.0, gas));
  const std::vector<double> s(u.size(), 10.0);
  CHECK(dtau_density_bound_bdf1(u, u, mesh, s, 1.0) == doctest::Approx(1.0 / 9.0));
  CHECK(dtau_density_bound_bdf1(u, u, mesh, s, 1e30) == doctest::Approx(0.1));
  CHECK(dtau_density_bound_fe(u, mesh, s) == doctest::Approx(0.1));
  CHECK(dtau_density_bound_bdf2(u, u, u, mesh, s, 1.0) == doctest::Approx(2.0 / 17.0));
  CHECK(dtau_density_bound_bdf2(u, u, u, mesh, s, 1e30) == doctest::Approx(0.1));
  const std::vector<double> small(u.size(), 0.5);
  CHECK(dtau_density_bound_bdf1(u, u, mesh, small, 1.0) == kUnbounded);
}

TEST_CASE("internal-energy step limit") {
  CHECK(max_dtau_internal_energy({0.0, 0.0, 1.0}, 1.0, 0.0) == kUnbounded);
  CHECK(max_dtau_internal_energy({-1.0, 0.0, 1.0}, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(max_dtau_internal_energy({1.0, -3.0, 1.0}, 1.0, 0.0) == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0));
  CHECK(max_dtau_internal_energy({-1.0, 0.0, 1.0}, 2.0, 0.0) == doctest::Approx(2.0));
  CHECK(max_dtau_internal_energy({0.0, -2.0, 1.0}, 1.0, 0.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(max_dtau_internal_energy({1.0, 1.0, 0.0}, 1.0, 0.0), DomainError);
}

TEST_CASE("internal-energy trinomial matches the pseudotime update") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uni(-1.0, 1.0), pos(0.1, 2.0);
  for (double mach : {0.3, 1.0, 3.0}) {
    const GasParameters gas = test::mach_gas(mach);
    double worst = 0.0;
    for (int k = 0; k < 300; ++k) {
      const double jac = pos(rng), dt = pos(rng), dtau = 0.5 * pos(rng);
      const Mesh mesh = tiny_mesh(jac);
      TimeLevelBuffer buf;
      buf.u_k = uniform(mesh, test::random_state(rng, gas));
      buf.u_n = uniform(mesh, test::random_state(rng, gas));
      buf.u_nm1 = uniform(mesh, test::random_state(rng, gas));
      State r;
      for (double& c : r) c = uni(rng);
      const Field rf = uniform(mesh, r);
      for (BdfScheme scheme : {BdfScheme::Bdf1, BdfScheme::Bdf2}) {
        const bool one = scheme == BdfScheme::Bdf1;
        const Field next = one ? bdf1_pseudo_update(buf, rf, dt, dtau, mesh) : bdf2_pseudo_update(buf, rf, dt, dtau, mesh);
        const double c = one ? c1_tau(dt, dtau) : c2_tau(dt, dtau);
        const State& u1 = next[0];
        const double direct = u1[kRho] * (u1[kEnergy] - gas.kinetic_coefficient() *
                                                             (u1[1] * u1[1] + u1[2] * u1[2] + u1[3] * u1[3]) / u1[kRho]) /
                              (c * c);
        const Trinomial q = one ? internal_energy_quadratic_bdf1(buf.u_k[0], buf.u_n[0], r, dt, jac, gas)
                                : internal_energy_quadratic_bdf2(buf.u_k[0], buf.u_n[0], (*buf.u_nm1)[0], r, dt, jac, gas);
        const double scale = std::abs(q.a) * std::pow(dtau / jac, 2) + std::abs(q.b) * dtau / jac + q.c;
        worst = std::max(worst, std::abs(q(dtau / jac) - direct) / scale);
        CHECK(q.c > 0.0);
        CHECK(q.c == doctest::Approx(internal_energy_density(buf.u_k[0], gas) * buf.u_k[0][kRho]));
      }
    }
    CHECK(worst < 1e-11);
  }
}

TEST_CASE("pseudo updates have the physical level as fixed point") {
  const GasParameters gas;
  const Mesh mesh = tiny_mesh(0.7);
  TimeLevelBuffer buf;
  buf.u_n = uniform(mesh, conservative(1.2, {0.3, 0, 0}, 0.9, gas));
  buf.u_k = buf.u_n;
  buf.u_nm1 = buf.u_n;
  const Field zero(mesh);
  CHECK(max_diff(bdf1_pseudo_update(buf, zero, 0.1, 0.37, mesh), buf.u_n) < 1e-15);
  CHECK(max_diff(bdf2_pseudo_update(buf, zero, 0.1, 0.37, mesh), buf.u_n) < 1e-15);
  CHECK(max_diff(bdf1_pseudo_update(buf, zero, 0.1, 1e12, mesh), buf.u_n) < 1e-12);

  // Frozen pseudotime leaves the iterate unchanged.
  buf.u_k = uniform(mesh, conservative(0.8, {0.1, 0, 0}, 1.1, gas));
  CHECK(max_diff(bdf2_pseudo_update(buf, zero, 0.1, 1e-15, mesh), buf.u_k) < 1e-12);
}

TEST_CASE("scalar relaxation contracts by C1 per iteration") {
  const GasParameters gas;
  const Mesh mesh = tiny_mesh();
  TimeLevelBuffer buf;
  buf.u_n = uniform(mesh, conservative(1.0, {0, 0, 0}, 1.0, gas));
  buf.u_k = uniform(mesh, conservative(1.5, {0, 0, 0}, 1.0, gas));
  const Field zero(mesh);
  const double dt = 0.2, dtau = 0.05, ratio = c1_tau(dt, dtau);
  double err = buf.u_k[0][kRho] - buf.u_n[0][kRho];
  for (int k = 0; k < 20; ++k) {
    buf.u_k = bdf1_pseudo_update(buf, zero, dt, dtau, mesh);
    const double next = buf.u_k[0][kRho] - buf.u_n[0][kRho];
    CHECK(next / err == doctest::Approx(ratio).epsilon(1e-12));
    err = next;
  }
}

TEST_CASE("converged BDF2 reproduces the amplification factor of linear decay") {
  const GasParameters gas;
  const Mesh mesh = tiny_mesh();
  const double lambda = 1.3, dt = 0.1;
  const Field u0 = uniform(mesh, conservative(1.0, {0.5, 0, 0}, 1.0, gas));
  TimeLevelBuffer buf;
  buf.u_nm1 = u0;
  buf.u_n = u0;
  for (std::size_t k = 0; k < buf.u_n.size(); ++k)
    for (double& c : buf.u_n[k]) c /= 1.0 + lambda * dt;  // one BDF1 step
  buf.u_k = buf.u_n;
  DualTimeConfig cfg;
  cfg.eps_abs = 1e-15;
  cfg.eps_rel = 1e-15;
  cfg.max_dtau = 0.05;
  const LglOperatorSet ops = build_lgl_operators(1);
  const PseudoResult res = pseudo_converge(buf, cfg, BdfScheme::Bdf2, decay(mesh, lambda), dt, mesh, ops, gas);
  for (std::size_t k = 0; k < u0.size(); ++k)
    for (int v = 0; v < kNumVars; ++v) {
      const double expect = (4.0 * buf.u_n[k][v] - u0[k][v]) / (3.0 + 2.0 * lambda * dt);
      CHECK(std::abs(res.solution[k][v] - expect) < 1e-12);
    }
}

TEST_CASE("SSPRK3 amplification factor of linear decay") {
  const GasParameters gas;
  const Mesh mesh = tiny_mesh();
  const double lambda = 2.0, dt = 0.1, z = lambda * dt;
  const Field u0 = uniform(mesh, conservative(1.0, {0.5, 0, 0}, 1.0, gas));
  const ExplicitStep s = ssprk3_step(u0, dt, decay(mesh, lambda), mesh, gas, PositivityFloors{});
  const double amp = 1.0 - z + z * z / 2.0 - z * z * z / 6.0;
  for (std::size_t k = 0; k < u0.size(); ++k)
    for (int v = 0; v < kNumVars; ++v) CHECK(std::abs(s.solution[k][v] - amp * u0[k][v]) < 1e-12);
  for (double t : s.theta) CHECK(t == 1.0);

  const ExplicitStep id = forward_euler_step(u0, dt, decay(mesh, 0.0), mesh, gas, PositivityFloors{});
  CHECK(max_diff(id.solution, u0) == 0.0);
  const ExplicitStep id3 = ssprk3_step(u0, dt, decay(mesh, 0.0), mesh, gas, PositivityFloors{});
  CHECK(max_diff(id3.solution, u0) < 1e-15);
}

TEST_CASE("steady state converges in one pseudo iteration") {
  const GasParameters gas = test::mach_gas(0.5, 100.0);
  Discretization disc(Mesh(1, 3, {4, 1, 1}, {0, 0, 0}, {1, 1, 1},
                           {BoundaryKind::Periodic, BoundaryKind::Periodic, BoundaryKind::Periodic}),
                      gas);
  TimeLevelBuffer buf;
  buf.u_n = interpolate(disc.mesh, disc.ops, [&](const auto&) { return conservative(1.0, {0.3, 0, 0}, 1.0, gas); });
  buf.u_k = buf.u_n;
  const ResidualFunction rf = [&](const Field& f) { return compute_residuals(f, disc); };
  const PseudoResult res = pseudo_converge(buf, DualTimeConfig{}, BdfScheme::Bdf1, rf, 0.1, disc.mesh, disc.ops, gas);
  CHECK(res.converged);
  CHECK(res.iterations == 1);
  CHECK(res.eps_abs < 1e-13);  // roundoff of the uniform-state residual
}

TEST_CASE("pseudo convergence matches a direct implicit BDF1 solve") {
  GasParameters gas = test::mach_gas(0.5);
  Discretization disc(Mesh(1, 6, {1, 1, 1}, {0, 0, 0}, {1, 1, 1},
                           {BoundaryKind::Periodic, BoundaryKind::Periodic, BoundaryKind::Periodic}),
                      gas);
  disc.use_artificial_viscosity = false;
  const Field u0 = interpolate(disc.mesh, disc.ops, [&](const auto& x) {
    return conservative(1.0 + 0.2 * std::sin(2 * std::numbers::pi * x[0]), {1.0, 0, 0}, 1.0, gas);
  });
  const ResidualFunction rf = [&](const Field& f) { return compute_residuals(f, disc); };
  const ResidualPair p0 = rf(u0);
  const double dt = 10.0 * dtau_density_bound_fe(u0, disc.mesh, p0.dissipation_sum);

  TimeLevelBuffer buf{u0, std::nullopt, u0};
  DualTimeConfig cfg;
  cfg.eps_abs = 1e-13;
  cfg.eps_rel = 1e-14;
  const PseudoResult res = pseudo_converge(buf, cfg, BdfScheme::Bdf1, rf, dt, disc.mesh, disc.ops, gas);
  REQUIRE(res.converged);

  // Newton on J (u - u^n) / dt - R(u) = 0 with a finite-difference Jacobian over
  // the density, x-momentum and energy unknowns.
  const int n = disc.mesh.nodes_per_element();
  const std::array<int, 3> comps{0, 1, 4};
  const int m = 3 * n;
  const double jac = disc.mesh.jacobian(0);
  auto pack = [&](const Field& f) {
    Eigen::VectorXd x(m);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < 3; ++c) x(3 * i + c) = f.at(0, i)[comps[c]];
    return x;
  };
  auto unpack = [&](const Eigen::VectorXd& x) {
    Field f(disc.mesh);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < 3; ++c) f.at(0, i)[comps[c]] = x(3 * i + c);
    return f;
  };
  const Eigen::VectorXd xn = pack(u0);
  auto system = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return jac * (x - xn) / dt - pack(rf(unpack(x)).high_order);
  };
  Eigen::VectorXd x = xn;
  for (int it = 0; it < 20; ++it) {
    const Eigen::VectorXd f = system(x);
    if (f.norm() < 1e-14) break;
    Eigen::MatrixXd a(m, m);
    for (int j = 0; j < m; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(x(j)));
      Eigen::VectorXd xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      a.col(j) = (system(xp) - system(xm)) / (2 * h);
    }
    x -= a.partialPivLu().solve(f);
  }
  CHECK((pack(res.solution) - x).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("forward Euler converges at first order in time") {
  GasParameters gas = test::mach_gas(0.5);
  Discretization disc(Mesh(1, 4, {4, 1, 1}, {0, 0, 0}, {1, 1, 1},
                           {BoundaryKind::Periodic, BoundaryKind::Periodic, BoundaryKind::Periodic}),
                      gas);
  disc.use_artificial_viscosity = false;
  const Field u0 = interpolate(disc.mesh, disc.ops, [&](const auto& x) {
    return conservative(1.0 + 0.2 * std::sin(2 * std::numbers::pi * x[0]), {1.0, 0, 0}, 1.0, gas);
  });
  const ResidualFunction rf = [&](const Field& f) { return compute_residuals(f, disc); };
  const double t_end = 0.05;
  auto run = [&](Integrator integ, double dt) {
    DualTimeConfig cfg;
    cfg.dt = dt;
    return march(u0, 0.0, t_end, integ, cfg, rf, disc.mesh, disc.ops, gas).solution;
  };
  const Field ref = run(Integrator::Ssprk3, 1e-5);
  std::vector<double> err;
  for (double dt : {2e-3, 1e-3, 5e-4}) err.push_back(max_diff(run(Integrator::ForwardEuler, dt), ref));
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    const double slope = std::log2(err[i] / err[i + 1]);
    CHECK(slope == doctest::Approx(1.0).epsilon(0.1));
  }
}

TEST_CASE("physical step schedule and validation") {
  DualTimeConfig cfg;
  cfg.dt = 0.1;
  cfg.dt_final = 0.0125;
  cfg.ramp_start = 1.0;
  CHECK(cfg.step_at(0.5, 0.1) == doctest::Approx(0.1));
  CHECK(cfg.step_at(1.0, 0.1) == doctest::Approx(0.05));
  CHECK(cfg.step_at(2.0, 0.025) == doctest::Approx(0.0125));
  CHECK(cfg.step_at(3.0, 0.0125) == doctest::Approx(0.0125));
  cfg.kappa_tau = 0.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dts/cases.hpp"
#include "dts/diagnostics.hpp"
#include "dts/errors.hpp"
#include "support.hpp"

using namespace dts;

namespace {

constexpr double kPi = std::numbers::pi;

Mesh box(int dim, int order, int n, double lo, double hi, BoundaryKind bc = BoundaryKind::Periodic) {
  std::array<int, 3> el{1, 1, 1};
  for (int d = 0; d < dim; ++d) el[d] = n;
  return Mesh(dim, order, el, {lo, lo, lo}, {hi, hi, hi}, {bc, bc, bc});
}

}  // namespace

TEST_CASE("error norms") {
  const GasParameters gas;
  const Mesh mesh = box(1, 3, 1, 0.0, 1.0);
  const LglOperatorSet ops = build_lgl_operators(3);
  const Field f = interpolate(mesh, ops, [&](const auto& x) { return conservative(1.0 + x[0], {0.2, 0, 0}, 1.0, gas); });
  const ErrorNorms zero = error_norms(f, f, mesh, ops);
  CHECK(zero.l1 == 0.0);
  CHECK(zero.l2 == 0.0);
  CHECK(zero.linf == 0.0);

  Field g = f;
  g.at(0, 2)[3] += 0.25;
  CHECK(error_norms(g, f, mesh, ops).linf == doctest::Approx(0.25));

  Field shifted = f;
  for (std::size_t k = 0; k < shifted.size(); ++k)
    for (double& c : shifted[k]) c += 0.3;
  const ErrorNorms n = error_norms(shifted, f, mesh, ops);
  CHECK(std::abs(n.l1 - 0.3) < 1e-14);
  CHECK(std::abs(n.l2 - 0.3) < 1e-14);

  // Homogeneity and L2 <= Linf.
  Field twice = f;
  for (std::size_t k = 0; k < twice.size(); ++k)
    for (int c = 0; c < kNumVars; ++c) twice[k][c] = f[k][c] + 2.0 * (g[k][c] - f[k][c]);
  const ErrorNorms a = error_norms(g, f, mesh, ops), b = error_norms(twice, f, mesh, ops);
  CHECK(b.l1 == doctest::Approx(2 * a.l1));
  CHECK(b.l2 == doctest::Approx(2 * a.l2));
  CHECK(b.linf == doctest::Approx(2 * a.linf));
  CHECK(a.l2 <= a.linf);

  CHECK_THROWS_AS(error_norms(f, Field(2, 4), mesh, ops), DimensionError);
}

TEST_CASE("pseudotime residual measures") {
  const ResidualMeasures first = residual_measures(0.4, 0.4, 0.1, 0.1);
  CHECK(first.eps_abs == doctest::Approx(4.0));
  CHECK(first.eps_rel == doctest::Approx(1.0));
  const ResidualMeasures halved = residual_measures(0.4, 0.4, 0.05, 0.1);
  CHECK(halved.eps_abs == doctest::Approx(8.0));
  const ResidualMeasures still = residual_measures(0.0, 0.4, 0.1, 0.1);
  CHECK(still.eps_abs == 0.0);
  CHECK(still.eps_rel == 0.0);
  CHECK(residual_measures(0.1, 0.0, 0.1, 0.1).eps_rel == 0.0);
}

TEST_CASE("pairwise summation is order independent of thread layout") {
  std::vector<double> v(1001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + static_cast<double>(i));
  double naive = 0.0;
  for (double x : v) naive += x;
  CHECK(pairwise_sum(v) == doctest::Approx(naive).epsilon(1e-14));
  CHECK(pairwise_sum({}) == 0.0);
}

TEST_CASE("TGV diagnostics of simple fields") {
  GasParameters gas = test::mach_gas(2.0, 400.0);
  const Mesh mesh = box(2, 4, 4, -kPi, kPi);
  const LglOperatorSet ops = build_lgl_operators(4);

  const Field rest = interpolate(mesh, ops, [&](const auto&) { return conservative(1.0, {0, 0, 0}, 1.0, gas); });
  const TgvQuantities r = tgv_diagnostics(rest, mesh, ops, gas);
  CHECK(r.kinetic_energy == 0.0);
  CHECK(r.total() == 0.0);

  const Vec3 v{0.3, -0.4, 0.0};
  const Field moving = interpolate(mesh, ops, [&](const auto&) { return conservative(1.2, v, 1.0, gas); });
  const TgvQuantities m = tgv_diagnostics(moving, mesh, ops, gas);
  CHECK(m.kinetic_energy == doctest::Approx(gas.energy_scale() * 1.2 * 0.25 / 2.0).epsilon(1e-13));
  CHECK(std::abs(m.solenoidal) < 1e-24);
  CHECK(std::abs(m.dilatational) < 1e-24);

  CHECK_THROWS_AS(tgv_diagnostics(rest, box(2, 4, 2, 0.0, 1.0, BoundaryKind::Dirichlet), ops, gas),
                  UnsupportedConfigurationError);
}

TEST_CASE("TGV initial dissipation rates match the analytic field") {
  // Velocity (sin x cos y, -cos x sin y) has vorticity 2 sin x sin y and zero
  // divergence, so with T = 1 the solenoidal rate is s / Re and the
  // dilatational rate vanishes as the grid is refined.
  GasParameters gas = test::mach_gas(2.0, 400.0);
  double previous_dil = 1.0;
  for (int n : {2, 4, 8}) {
    const Mesh mesh = box(2, 4, n, -kPi, kPi);
    const LglOperatorSet ops = build_lgl_operators(4);
    const Field f = interpolate(mesh, ops, [&](const auto& x) { return tgv_state(x, gas, 2); });
    const TgvQuantities q = tgv_diagnostics(f, mesh, ops, gas);
    CHECK(q.solenoidal >= 0.0);
    CHECK(q.dilatational >= 0.0);
    if (n == 8) CHECK(q.solenoidal == doctest::Approx(gas.energy_scale() / gas.reynolds).epsilon(1e-4));
    CHECK(q.dilatational < previous_dil);
    previous_dil = q.dilatational;
  }
  CHECK(previous_dil < 1e-8);
}

TEST_CASE("TGV initial pressure") {
  GasParameters gas = test::mach_gas(2.0);
  CHECK(tgv_pressure({0, 0, 0}, gas, 3) == doctest::Approx(1.375).epsilon(1e-15));
  CHECK(tgv_pressure({0, 0, 0}, gas, 2) == doctest::Approx(1.375).epsilon(1e-15));
}

TEST_CASE("conservation audit") {
  HistoryRecord a;
  a.totals = {1.0, 0.5, 0.0, 0.0, 2.0};
  a.entropy = -1.0;
  const std::vector<HistoryRecord> one{a};
  const ConservationReport r1 = conservation_audit(one);
  for (double d : r1.max_relative_drift) CHECK(d == 0.0);
  CHECK(r1.entropy_increase_events == 0);

  HistoryRecord b = a;
  b.totals[0] = 1.0 + 1e-10;
  b.entropy = -0.9;
  HistoryRecord c = b;
  c.entropy = -0.95;
  const std::vector<HistoryRecord> three{a, b, c};
  const ConservationReport r3 = conservation_audit(three, 1e-3);
  CHECK(r3.max_relative_drift[0] == doctest::Approx(1e-10).epsilon(1e-4));
  CHECK(r3.entropy_increase_events == 1);
  CHECK(r3.max_entropy_increase == doctest::Approx(0.1));
  CHECK(conservation_audit(three, 0.2).entropy_increase_events == 0);
}

TEST_CASE("history records satisfy the dissipation split") {
  GasParameters gas = test::mach_gas(2.0, 400.0);
  const Mesh mesh = box(2, 3, 4, -kPi, kPi);
  const LglOperatorSet ops = build_lgl_operators(3);
  const Field f = interpolate(mesh, ops, [&](const auto& x) { return tgv_state(x, gas, 2); });
  const HistoryRecord r = measure(f, mesh, ops, gas);
  CHECK(r.eps_v == r.eps_s + r.eps_d);
  CHECK(r.min_density > 0.0);
  CHECK(r.min_internal_energy > 0.0);
  CHECK(r.totals[0] == doctest::Approx(4 * kPi * kPi).epsilon(1e-2));
}

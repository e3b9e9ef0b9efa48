#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dts/errors.hpp"
#include "dts/spatial.hpp"
#include "support.hpp"

using namespace dts;

namespace {

constexpr double kPi = std::numbers::pi;

double node_weight(const Mesh& mesh, const LglOperatorSet& ops, int i) {
  const auto c = mesh.node_coords(i);
  double w = 1.0;
  for (int d = 0; d < mesh.dim(); ++d) w *= ops.weights[c[d]];
  return w;
}

Mesh periodic_mesh(int dim, int order, int n, double jitter) {
  std::array<int, 3> el{1, 1, 1};
  for (int d = 0; d < dim; ++d) el[d] = n;
  Mesh mesh(dim, order, el, {0, 0, 0}, {1, 1, 1},
            {BoundaryKind::Periodic, BoundaryKind::Periodic, BoundaryKind::Periodic});
  if (jitter > 0) mesh.jitter(jitter, 7);
  return mesh;
}

// Smooth periodic field with a sharp-ish bump so the artificial viscosity is active.
State wavy(const std::array<double, 3>& x, const GasParameters& gas) {
  const double s = std::sin(2 * kPi * x[0]) * std::cos(2 * kPi * x[1]);
  const double bump = 0.6 * std::exp(-200.0 * ((x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.4) * (x[1] - 0.4)));
  return conservative(1.0 + 0.3 * s + bump, {0.4 + 0.2 * s, -0.3 * s, 0.0}, 1.0 + 0.2 * std::cos(2 * kPi * x[0]),
                      gas);
}

}  // namespace

TEST_CASE("free stream is preserved on a jittered mesh") {
  GasParameters gas = test::mach_gas(0.8, 100.0);
  Discretization disc(periodic_mesh(2, 4, 4, 0.2), gas);
  const State u0 = conservative(1.3, {0.7, -0.4, 0.0}, 1.1, gas);
  const Field f = interpolate(disc.mesh, disc.ops, [&](const auto&) { return u0; });
  const ResidualPair r = compute_residuals(f, disc);
  double worst = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    for (int c = 0; c < kNumVars; ++c)
      worst = std::max({worst, std::abs(r.first_order[k][c]), std::abs(r.high_order[k][c])});
  CHECK(worst < 1e-12);
}

TEST_CASE("periodic residuals conserve mass, momentum and energy") {
  for (int dim : {1, 2}) {
    GasParameters gas = test::mach_gas(1.0, 200.0);
    Discretization disc(periodic_mesh(dim, 3, 6, 0.15), gas);
    const Field f = interpolate(disc.mesh, disc.ops, [&](const auto& x) { return wavy(x, gas); });
    const ResidualPair r = compute_residuals(f, disc);
    for (const Field* res : {&r.first_order, &r.high_order}) {
      State total{};
      for (int e = 0; e < f.num_elements(); ++e)
        for (int i = 0; i < f.nodes_per_element(); ++i)
          for (int c = 0; c < kNumVars; ++c) total[c] += node_weight(disc.mesh, disc.ops, i) * res->at(e, i)[c];
      for (int c = 0; c < kNumVars; ++c) CHECK(std::abs(total[c]) < 1e-12);
    }
  }
}

TEST_CASE("periodic residuals do not produce entropy") {
  GasParameters gas = test::mach_gas(1.5, 100.0);
  Discretization disc(periodic_mesh(2, 4, 4, 0.1), gas);
  const Field f = interpolate(disc.mesh, disc.ops, [&](const auto& x) { return wavy(x, gas); });
  const ResidualPair r = compute_residuals(f, disc);
  bool ad_active = false;
  for (double m : r.mu_ad) ad_active = ad_active || m > 0.0;
  CHECK(ad_active);
  for (const Field* res : {&r.first_order, &r.high_order}) {
    double production = 0.0;
    for (int e = 0; e < f.num_elements(); ++e)
      for (int i = 0; i < f.nodes_per_element(); ++i) {
        const State w = entropy_variables(f.at(e, i), gas);
        for (int c = 0; c < kNumVars; ++c) production += node_weight(disc.mesh, disc.ops, i) * w[c] * res->at(e, i)[c];
      }
    CHECK(production <= 1e-12);
  }
}

TEST_CASE("residuals do not depend on the thread count") {
  GasParameters gas = test::mach_gas(1.0, 100.0);
  Discretization disc(periodic_mesh(2, 3, 5, 0.1), gas);
  const Field f = interpolate(disc.mesh, disc.ops, [&](const auto& x) { return wavy(x, gas); });
  set_thread_count(1);
  const ResidualPair a = compute_residuals(f, disc);
  set_thread_count(4);
  const ResidualPair b = compute_residuals(f, disc);
  set_thread_count(1);
  CHECK(a.high_order.values() == b.high_order.values());
  CHECK(a.first_order.values() == b.first_order.values());
  CHECK(a.mu_ad == b.mu_ad);
}

TEST_CASE("limiter keeps the blend admissible") {
  const GasParameters gas;
  const PositivityFloors floors;
  Field low(2, 2), high(2, 2);
  for (int i = 0; i < 2; ++i) {
    low.at(0, i) = conservative(1.0, {0, 0, 0}, 1.0, gas);
    high.at(0, i) = conservative(2.0, {0, 0, 0}, 1.0, gas);
    low.at(1, i) = conservative(0.1, {0, 0, 0}, 1.0, gas);
  }
  high.at(1, 0) = {-0.1, 0, 0, 0, 0.1};
  high.at(1, 1) = conservative(0.1, {0, 0, 0}, 1.0, gas);
  const auto theta = limit_blend(low, high, gas, floors);
  CHECK(theta[0] == 1.0);
  CHECK(theta[1] >= 0.0);
  CHECK(theta[1] < 1.0);
  const Field mixed = blend(low, high, theta);
  for (std::size_t k = 0; k < mixed.size(); ++k) CHECK(is_admissible(mixed[k], floors, gas));

  low.at(1, 0) = {-1.0, 0, 0, 0, 1.0};
  CHECK_THROWS_AS(limit_blend(low, high, gas, floors), InvariantViolationError);
}

TEST_CASE("inadmissible fields are reported with their location") {
  const GasParameters gas;
  Field f(3, 2);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = conservative(1.0, {0, 0, 0}, 1.0, gas);
  f.at(2, 1)[kEnergy] = -1.0;
  try {
    require_admissible(f, gas);
    FAIL("expected an exception");
  } catch (const InadmissibleStateError& e) {
    CHECK(e.element() == 2);
    CHECK(e.node() == 1);
  }
}

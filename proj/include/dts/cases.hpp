#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "dts/spatial.hpp"
#include "dts/viscous_shock.hpp"

namespace dts {

/// Geometry and physics of one benchmark problem.
struct CaseParameters {
  std::string name = "density-wave";  // density-wave | viscous-shock | sod-torture | tgv
  int dim = 1;
  std::array<int, 3> elements{16, 1, 1};
  int order = 4;
  GasParameters gas;
  bool artificial_viscosity = true;
  double jitter = 0.0;  // interface perturbation as a fraction of the spacing
  std::uint64_t seed = 1;

  double wave_amplitude = 0.2;   // density-wave
  double shock_halfwidth = 1.0;  // viscous-shock domain is [-w, w]
  double sod_density_ratio = 1e-5;
  double sod_pressure_ratio = 1e-5;
  double tgv_constant = 89.6;
};

struct BenchmarkCase {
  CaseParameters params;
  std::unique_ptr<Discretization> disc;
  Field initial;
  /// Exact solution at time t where one is known.
  std::function<Field(double)> exact;
  std::shared_ptr<const ViscousShockProfile> shock;
};

/// Builds mesh, initial data and exact solution. Throws ConfigError for an
/// unknown case or a case/dimension mismatch.
BenchmarkCase make_case(const CaseParameters& params);

/// TGV initial pressure at x for the given gas.
double tgv_pressure(const std::array<double, 3>& x, const GasParameters& gas, int dim,
                    double constant = 89.6);
/// TGV initial state.
State tgv_state(const std::array<double, 3>& x, const GasParameters& gas, int dim,
                double constant = 89.6);

}  // namespace dts

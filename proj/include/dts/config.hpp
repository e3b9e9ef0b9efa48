#pragma once

#include <string>
#include <vector>

#include "dts/cases.hpp"
#include "dts/time_integration.hpp"

namespace dts {

enum class SweepParameter { TimeStep, Elements };

struct SweepSettings {
  SweepParameter parameter = SweepParameter::TimeStep;
  std::vector<double> values;
};

/// Everything needed for one benchmark run.
struct RunConfig {
  CaseParameters case_params;
  Integrator integrator = Integrator::Bdf1Dual;
  DualTimeConfig time;
  double t_end = 0.1;
  SweepSettings sweep;
};

/// Parses an INI file. Overrides are "section.key=value" strings applied on
/// top of the file. Unknown sections or keys raise ConfigError naming the key.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

Integrator parse_integrator(const std::string& name);
std::string integrator_name(Integrator integrator);

/// Configs of a sweep: one per value, varying dt or the element count in every active direction.
std::vector<RunConfig> expand_sweep(const RunConfig& base);

}  // namespace dts

#include "dts/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dts/errors.hpp"

namespace dts {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"case",
       {"name", "dim", "elements", "order", "jitter", "seed", "artificial_viscosity",
        "wave_amplitude", "shock_halfwidth", "sod_density_ratio", "sod_pressure_ratio",
        "tgv_constant"}},
      {"gas",
       {"gamma", "mach", "reynolds", "prandtl", "viscosity_law", "viscosity_exponent", "c_rho",
        "c_temperature"}},
      {"time", {"integrator", "t_end", "dt", "dt_final", "ramp_start", "ramp_factor"}},
      {"pseudo",
       {"kappa_tau", "safety", "eps_abs", "eps_rel", "max_iterations", "max_halvings",
        "max_dtau", "diffusion_number", "floor_density", "floor_internal_energy"}},
      {"sweep", {"parameter", "values"}},
  };
  return s;
}

template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto node = tree.get_child_optional(pt::ptree::path_type(key, '.'));
  if (!node) return fallback;
  try {
    return node->get_value<T>();
  } catch (const pt::ptree_error&) {
    throw ConfigError(key + ": cannot parse '" + node->data() + "'");
  }
}

std::vector<double> get_list(const pt::ptree& tree, const std::string& key) {
  std::vector<double> out;
  const auto node = tree.get_child_optional(pt::ptree::path_type(key, '.'));
  if (!node) return out;
  std::string text = node->data();
  for (char& c : text)
    if (c == ',') c = ' ';
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError(key + ": cannot parse '" + tok + "'");
    }
  }
  return out;
}

void check_schema(const pt::ptree& tree) {
  for (const auto& [section, keys] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError(section + ": unknown section");
    for (const auto& [key, value] : keys)
      if (!it->second.count(key)) throw ConfigError(section + "." + key + ": unknown key");
  }
}

void apply_overrides(pt::ptree& tree, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("override '" + o + "' is not of the form section.key=value");
    tree.put(pt::ptree::path_type(o.substr(0, eq), '.'), o.substr(eq + 1));
  }
}

RunConfig from_tree(const pt::ptree& tree) {
  check_schema(tree);
  RunConfig cfg;
  CaseParameters& c = cfg.case_params;
  c.name = get<std::string>(tree, "case.name", c.name);
  c.dim = get(tree, "case.dim", c.dim);
  if (c.dim < 1 || c.dim > 3) throw ConfigError("case.dim: must be 1, 2 or 3");
  const auto elements = get_list(tree, "case.elements");
  if (!elements.empty()) {
    if (elements.size() != 1 && static_cast<int>(elements.size()) != c.dim)
      throw ConfigError("case.elements: give one count or one per dimension");
    for (int d = 0; d < 3; ++d) {
      const double v = elements.size() == 1 ? elements[0] : (d < c.dim ? elements[d] : 1.0);
      if (v < 1.0 || v != static_cast<int>(v)) throw ConfigError("case.elements: positive integers required");
      c.elements[d] = d < c.dim ? static_cast<int>(v) : 1;
    }
  } else {
    for (int d = c.dim; d < 3; ++d) c.elements[d] = 1;
    for (int d = 1; d < c.dim; ++d) c.elements[d] = c.elements[0];
  }
  c.order = get(tree, "case.order", c.order);
  c.jitter = get(tree, "case.jitter", c.jitter);
  c.seed = get<std::uint64_t>(tree, "case.seed", c.seed);
  c.artificial_viscosity = get(tree, "case.artificial_viscosity", c.artificial_viscosity);
  c.wave_amplitude = get(tree, "case.wave_amplitude", c.wave_amplitude);
  c.shock_halfwidth = get(tree, "case.shock_halfwidth", c.shock_halfwidth);
  c.sod_density_ratio = get(tree, "case.sod_density_ratio", c.sod_density_ratio);
  c.sod_pressure_ratio = get(tree, "case.sod_pressure_ratio", c.sod_pressure_ratio);
  c.tgv_constant = get(tree, "case.tgv_constant", c.tgv_constant);

  GasParameters& g = c.gas;
  g.gamma = get(tree, "gas.gamma", g.gamma);
  g.mach = get(tree, "gas.mach", g.mach);
  g.reynolds = get(tree, "gas.reynolds", g.reynolds);
  g.prandtl = get(tree, "gas.prandtl", g.prandtl);
  const std::string law = get<std::string>(tree, "gas.viscosity_law", "constant");
  if (law == "constant") g.viscosity_law = ViscosityLaw::Constant;
  else if (law == "power") g.viscosity_law = ViscosityLaw::PowerLaw;
  else throw ConfigError("gas.viscosity_law: expected 'constant' or 'power'");
  g.viscosity_exponent = get(tree, "gas.viscosity_exponent", g.viscosity_exponent);
  g.c_rho = get(tree, "gas.c_rho", g.c_rho);
  if (tree.get_child_optional(pt::ptree::path_type("gas.c_temperature", '.')))
    g.c_temperature = get(tree, "gas.c_temperature", 0.0);
  try {
    g.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("gas: ") + e.what());
  }

  cfg.integrator = parse_integrator(get<std::string>(tree, "time.integrator", "BDF1-dual"));
  cfg.t_end = get(tree, "time.t_end", cfg.t_end);
  if (!(cfg.t_end > 0.0)) throw ConfigError("time.t_end: must be positive");
  DualTimeConfig& t = cfg.time;
  t.dt = get(tree, "time.dt", t.dt);
  if (tree.get_child_optional(pt::ptree::path_type("time.dt_final", '.')))
    t.dt_final = get(tree, "time.dt_final", 0.0);
  t.ramp_start = get(tree, "time.ramp_start", t.ramp_start);
  t.ramp_factor = get(tree, "time.ramp_factor", t.ramp_factor);
  t.kappa_tau = get(tree, "pseudo.kappa_tau", t.kappa_tau);
  t.safety = get(tree, "pseudo.safety", t.safety);
  t.eps_abs = get(tree, "pseudo.eps_abs", t.eps_abs);
  t.eps_rel = get(tree, "pseudo.eps_rel", t.eps_rel);
  t.max_pseudo_iterations = get(tree, "pseudo.max_iterations", t.max_pseudo_iterations);
  t.max_halvings = get(tree, "pseudo.max_halvings", t.max_halvings);
  t.max_dtau = get(tree, "pseudo.max_dtau", t.max_dtau);
  t.diffusion_number = get(tree, "pseudo.diffusion_number", t.diffusion_number);
  t.floors.rho = get(tree, "pseudo.floor_density", t.floors.rho);
  t.floors.internal_energy = get(tree, "pseudo.floor_internal_energy", t.floors.internal_energy);
  t.validate();

  const std::string sweep = get<std::string>(tree, "sweep.parameter", "dt");
  if (sweep == "dt") cfg.sweep.parameter = SweepParameter::TimeStep;
  else if (sweep == "elements") cfg.sweep.parameter = SweepParameter::Elements;
  else throw ConfigError("sweep.parameter: expected 'dt' or 'elements'");
  cfg.sweep.values = get_list(tree, "sweep.values");
  return cfg;
}

}  // namespace

Integrator parse_integrator(const std::string& name) {
  if (name == "FE") return Integrator::ForwardEuler;
  if (name == "SSPRK3") return Integrator::Ssprk3;
  if (name == "BDF1-dual") return Integrator::Bdf1Dual;
  if (name == "BDF2-dual") return Integrator::Bdf2Dual;
  throw ConfigError("time.integrator: expected FE, SSPRK3, BDF1-dual or BDF2-dual, got '" +
                    name + "'");
}

std::string integrator_name(Integrator integrator) {
  switch (integrator) {
    case Integrator::ForwardEuler: return "FE";
    case Integrator::Ssprk3: return "SSPRK3";
    case Integrator::Bdf1Dual: return "BDF1-dual";
    case Integrator::Bdf2Dual: return "BDF2-dual";
  }
  return "unknown";
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  apply_overrides(tree, overrides);
  return from_tree(tree);
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::vector<RunConfig> expand_sweep(const RunConfig& base) {
  std::vector<RunConfig> out;
  for (double v : base.sweep.values) {
    RunConfig c = base;
    if (base.sweep.parameter == SweepParameter::TimeStep) {
      if (!(v > 0.0)) throw ConfigError("sweep.values: time steps must be positive");
      c.time.dt = v;
      c.time.dt_final.reset();
    } else {
      if (v < 1.0 || v != static_cast<int>(v)) throw ConfigError("sweep.values: element counts must be positive integers");
      for (int d = 0; d < c.case_params.dim; ++d) c.case_params.elements[d] = static_cast<int>(v);
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace dts

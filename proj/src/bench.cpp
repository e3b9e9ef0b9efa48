#include "dts/bench.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <fmt/format.h>
#include "json.hpp"

#include "dts/errors.hpp"

namespace dts {

namespace {

std::string num(double v) { return fmt::format("{:.12e}", v); }

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("output directory '" + dir.string() + "': " + ec.message());
}

template <class T>
void put_le(std::ofstream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::ifstream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in) throw ConfigError("snapshot: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

nlohmann::json norms_json(const ErrorNorms& n) {
  return {{"l1", n.l1}, {"l2", n.l2}, {"linf", n.linf}};
}

nlohmann::json summary_json(const RunConfig& cfg, const RunOutcome& run) {
  const CaseParameters& c = cfg.case_params;
  nlohmann::json j;
  j["format_version"] = kHistoryFormatVersion;
  j["case"] = c.name;
  j["dim"] = c.dim;
  j["elements"] = {c.elements[0], c.elements[1], c.elements[2]};
  j["order"] = c.order;
  j["seed"] = c.seed;
  j["integrator"] = integrator_name(cfg.integrator);
  j["gas"] = {{"gamma", c.gas.gamma}, {"mach", c.gas.mach}, {"reynolds", c.gas.reynolds},
              {"prandtl", c.gas.prandtl}};
  j["t_end"] = cfg.t_end;
  j["final_time"] = run.result.time;
  j["physical_steps"] = run.result.steps;
  j["pseudo_iterations"] = run.pseudo_iterations;
  j["nonconverged_steps"] = run.result.nonconverged_steps;
  j["converged"] = run.converged();
  j["retries"] = run.result.retries;
  j["positivity_violations"] = run.result.positivity_violations;
  j["theta_min"] = run.result.theta_min;
  j["error"] = run.error ? norms_json(*run.error) : nlohmann::json(nullptr);
  j["conservation"] = {{"max_relative_drift",
                        {run.audit.max_relative_drift[0], run.audit.max_relative_drift[1],
                         run.audit.max_relative_drift[2], run.audit.max_relative_drift[3],
                         run.audit.max_relative_drift[4]}},
                       {"max_entropy_increase", run.audit.max_entropy_increase}};
  return j;
}

}  // namespace

void write_history_csv(const std::filesystem::path& path, const std::vector<HistoryRecord>& history,
                       const std::vector<StepReport>& steps) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << "step,time,dt,pseudo_iterations,converged,eps_abs,eps_rel,mass,momentum_x,momentum_y,"
         "momentum_z,energy,entropy,kinetic_energy,eps_s,eps_d,eps_v,min_density,"
         "min_internal_energy,theta_min,theta_mean,retries,positivity_violations\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    const HistoryRecord& r = history[i];
    const StepReport s = i == 0 ? StepReport{} : steps[i - 1];
    out << r.step << ',' << num(r.time) << ',' << num(r.dt) << ',' << r.pseudo_iterations << ','
        << (s.converged ? 1 : 0) << ',' << num(r.eps_abs) << ',' << num(r.eps_rel);
    for (double t : r.totals) out << ',' << num(t);
    out << ',' << num(r.entropy) << ',' << num(r.kinetic_energy) << ',' << num(r.eps_s) << ','
        << num(r.eps_d) << ',' << num(r.eps_v) << ',' << num(r.min_density) << ','
        << num(r.min_internal_energy) << ',' << num(r.theta_min) << ',' << num(r.theta_mean)
        << ',' << s.retries << ',' << s.positivity_violations << '\n';
  }
}

void write_snapshot(const std::filesystem::path& path, const Field& field, const Mesh& mesh,
                    double time) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out.write("DTSF", 4);
  put_le<std::uint32_t>(out, kSnapshotFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mesh.dim()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mesh.order()));
  put_le<std::uint32_t>(out, kNumVars);
  for (int d = 0; d < 3; ++d) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mesh.elements_in(d)));
  put_le<std::uint64_t>(out, field.size());
  put_le<double>(out, time);
  for (std::size_t k = 0; k < field.size(); ++k)
    for (double v : field[k]) put_le<double>(out, v);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "DTSF") throw ConfigError("snapshot: bad magic");
  if (get_le<std::uint32_t>(in) != kSnapshotFormatVersion) throw ConfigError("snapshot: unknown version");
  Snapshot s;
  s.dim = static_cast<int>(get_le<std::uint32_t>(in));
  s.order = static_cast<int>(get_le<std::uint32_t>(in));
  if (get_le<std::uint32_t>(in) != kNumVars) throw ConfigError("snapshot: unexpected component count");
  for (int d = 0; d < 3; ++d) s.elements[d] = static_cast<int>(get_le<std::uint32_t>(in));
  const auto count = get_le<std::uint64_t>(in);
  s.time = get_le<double>(in);
  s.values.resize(count);
  for (auto& st : s.values)
    for (double& v : st) v = get_le<double>(in);
  return s;
}

RunOutcome run_case(const RunConfig& config, const std::optional<std::filesystem::path>& out_dir) {
  BenchmarkCase bc = make_case(config.case_params);
  const Discretization& disc = *bc.disc;
  if (out_dir) ensure_dir(*out_dir);

  RunOutcome run;
  HistoryRecord first = measure(bc.initial, disc.mesh, disc.ops, disc.gas);
  run.history.push_back(first);
  ResidualFunction residual = [&disc](const Field& u) { return compute_residuals(u, disc); };
  auto observer = [&](const Field& u, const StepReport& s) {
    HistoryRecord r = measure(u, disc.mesh, disc.ops, disc.gas);
    r.step = s.step;
    r.time = s.time;
    r.dt = s.dt;
    r.pseudo_iterations = s.pseudo_iterations;
    r.eps_abs = s.eps_abs;
    r.eps_rel = s.eps_rel;
    r.theta_min = s.theta_min;
    r.theta_mean = s.theta_mean;
    run.history.push_back(r);
    run.steps.push_back(s);
    run.pseudo_iterations += s.pseudo_iterations;
  };

  try {
    run.result = march(bc.initial, 0.0, config.t_end, config.integrator, config.time, residual,
                       disc.mesh, disc.ops, disc.gas, observer);
  } catch (...) {
    if (out_dir) write_history_csv(*out_dir / "history.csv", run.history, run.steps);
    throw;
  }
  if (bc.exact) run.error = error_norms(run.result.solution, bc.exact(run.result.time), disc.mesh, disc.ops);
  run.audit = conservation_audit(run.history);

  if (out_dir) {
    write_history_csv(*out_dir / "history.csv", run.history, run.steps);
    write_snapshot(*out_dir / "final_state.bin", run.result.solution, disc.mesh, run.result.time);
    std::ofstream(*out_dir / "summary.json") << summary_json(config, run).dump(2) << '\n';
  }
  return run;
}

std::vector<double> observed_rates(const std::vector<double>& errors,
                                   const std::vector<double>& steps) {
  if (errors.size() != steps.size()) throw DimensionError("observed_rates: size mismatch");
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i)
    out.push_back(std::log(errors[i] / errors[i + 1]) / std::log(steps[i] / steps[i + 1]));
  return out;
}

std::vector<SweepRow> convergence_table(const std::vector<double>& dts,
                                        const std::vector<int>& elements,
                                        const std::vector<ErrorNorms>& errors,
                                        SweepParameter parameter) {
  const std::size_t n = errors.size();
  if (n < 3) throw InsufficientSweepError("a sweep needs at least three runs");
  if (dts.size() != n || elements.size() != n) throw DimensionError("convergence_table: size mismatch");
  std::vector<double> step(n), e1(n), e2(n);
  for (std::size_t i = 0; i < n; ++i) {
    step[i] = parameter == SweepParameter::TimeStep ? dts[i] : 1.0 / elements[i];
    e1[i] = errors[i].l1;
    e2[i] = errors[i].l2;
  }
  const auto r1 = observed_rates(e1, step);
  const auto r2 = observed_rates(e2, step);
  std::vector<SweepRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i].dt = dts[i];
    rows[i].elements = elements[i];
    rows[i].error = errors[i];
    if (i > 0) {
      rows[i].rate_l1 = r1[i - 1];
      rows[i].rate_l2 = r2[i - 1];
      rows[i].warning = !(e2[i] < e2[i - 1]) || !(e1[i] < e1[i - 1]);
    }
  }
  return rows;
}

void write_convergence_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << "dt,n_elem,l1,l1_rate,l2,l2_rate,warning\n";
  for (const auto& r : rows) {
    out << num(r.dt) << ',' << r.elements << ',' << num(r.error.l1) << ','
        << (r.rate_l1 ? fmt::format("{:.4f}", *r.rate_l1) : "") << ',' << num(r.error.l2) << ','
        << (r.rate_l2 ? fmt::format("{:.4f}", *r.rate_l2) : "") << ',' << (r.warning ? 1 : 0)
        << '\n';
  }
}

std::vector<SweepRow> sweep(const std::vector<RunConfig>& configs, SweepParameter parameter,
                            const std::optional<std::filesystem::path>& out_dir) {
  if (configs.size() < 3) throw InsufficientSweepError("a sweep needs at least three runs");
  std::vector<double> dts;
  std::vector<int> elements;
  std::vector<ErrorNorms> errors;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::optional<std::filesystem::path> dir;
    if (out_dir) dir = *out_dir / fmt::format("run_{:02d}", i);
    const RunOutcome run = run_case(configs[i], dir);
    if (!run.error) throw ConfigError("case.name: sweeps need a case with an exact solution");
    if (!run.converged())
      throw ConfigError("sweep run " + std::to_string(i) + " did not converge in pseudotime");
    dts.push_back(configs[i].time.dt);
    int n = 1;
    for (int d = 0; d < configs[i].case_params.dim; ++d) n *= configs[i].case_params.elements[d];
    elements.push_back(n);
    errors.push_back(*run.error);
  }
  auto rows = convergence_table(dts, elements, errors, parameter);
  if (out_dir) write_convergence_csv(*out_dir / "convergence.csv", rows);
  return rows;
}

}  // namespace dts

#include "dts/time_integration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dts/diagnostics.hpp"
#include "dts/errors.hpp"

namespace dts {

void DualTimeConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("time.dt must be positive");
  if (dt_final && !(*dt_final > 0.0)) throw ConfigError("time.dt_final must be positive");
  if (!(ramp_factor > 0.0)) throw ConfigError("time.ramp_factor must be positive");
  if (!(kappa_tau >= 1.0)) throw ConfigError("pseudo.kappa_tau must be at least 1");
  if (!(safety > 0.0 && safety <= 1.0)) throw ConfigError("pseudo.safety must lie in (0, 1]");
  if (!(eps_abs > 0.0)) throw ConfigError("pseudo.eps_abs must be positive");
  if (!(eps_rel > 0.0)) throw ConfigError("pseudo.eps_rel must be positive");
  if (max_pseudo_iterations < 1) throw ConfigError("pseudo.max_iterations must be positive");
  if (max_dtau < 0.0) throw ConfigError("pseudo.max_dtau must be nonnegative");
  if (!(diffusion_number > 0.0)) throw ConfigError("pseudo.diffusion_number must be positive");
}

double DualTimeConfig::step_at(double t, double previous) const {
  if (!dt_final || t < ramp_start || previous <= 0.0) return dt;
  const double next = previous * ramp_factor;
  return ramp_factor < 1.0 ? std::max(*dt_final, next) : std::min(*dt_final, next);
}

double c1_tau(double dt, double dtau) {
  if (!(dt > 0.0) || !(dtau > 0.0)) throw DomainError("c1_tau: steps must be positive");
  return 1.0 / (1.0 + dtau / dt);
}

double c2_tau(double dt, double dtau) {
  if (!(dt > 0.0) || !(dtau > 0.0)) throw DomainError("c2_tau: steps must be positive");
  return 1.0 / (1.0 + 1.5 * dtau / dt);
}

namespace {

double implicit_weight(BdfScheme s) { return s == BdfScheme::Bdf1 ? 1.0 : 1.5; }

// C (u^k + dtau s + dtau R / J) for every node.
Field pseudo_update(const Field& u_k, const Field& source, const Field& r, double c,
                    double dtau, const Mesh& mesh) {
  if (!u_k.same_layout(source) || !u_k.same_layout(r))
    throw DimensionError("pseudo update: layout mismatch");
  Field out(mesh);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double inv_j = 1.0 / mesh.jacobian(e);
    for (int i = 0; i < mesh.nodes_per_element(); ++i)
      for (int v = 0; v < kNumVars; ++v)
        out.at(e, i)[v] =
            c * (u_k.at(e, i)[v] + dtau * source.at(e, i)[v] + dtau * r.at(e, i)[v] * inv_j);
  }
  return out;
}

void require_positive_density(const Field& f) {
  for (int e = 0; e < f.num_elements(); ++e)
    for (int i = 0; i < f.nodes_per_element(); ++i)
      if (!(f.at(e, i)[kRho] > 0.0)) throw InadmissibleStateError("nonpositive density", e, i);
}

State source_state(const State& u_n, const State* u_nm1, double dt) {
  State s;
  for (int v = 0; v < kNumVars; ++v)
    s[v] = u_nm1 ? (2.0 * u_n[v] - 0.5 * (*u_nm1)[v]) / dt : u_n[v] / dt;
  return s;
}

}  // namespace

Field bdf_source(const TimeLevelBuffer& buffer, BdfScheme scheme, double dt) {
  if (scheme == BdfScheme::Bdf2 && !buffer.u_nm1)
    throw UnsupportedConfigurationError("BDF2 needs the previous time level");
  Field out = buffer.u_n;
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = source_state(buffer.u_n[k],
                          scheme == BdfScheme::Bdf2 ? &(*buffer.u_nm1)[k] : nullptr, dt);
  return out;
}

Field bdf1_pseudo_update(const TimeLevelBuffer& buffer, const Field& r, double dt, double dtau,
                         const Mesh& mesh) {
  return pseudo_update(buffer.u_k, bdf_source(buffer, BdfScheme::Bdf1, dt), r,
                       c1_tau(dt, dtau), dtau, mesh);
}

Field bdf2_pseudo_update(const TimeLevelBuffer& buffer, const Field& r, double dt, double dtau,
                         const Mesh& mesh) {
  return pseudo_update(buffer.u_k, bdf_source(buffer, BdfScheme::Bdf2, dt), r,
                       c2_tau(dt, dtau), dtau, mesh);
}

double dtau_density_bound(const Field& u_k, const std::vector<double>& rho_source,
                          const Mesh& mesh, const std::vector<double>& dissipation_sum) {
  if (rho_source.size() != u_k.size() || dissipation_sum.size() != u_k.size())
    throw DimensionError("density bound: size mismatch");
  require_positive_density(u_k);
  double bound = kUnbounded;
  std::size_t k = 0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double inv_j = 1.0 / mesh.jacobian(e);
    for (int i = 0; i < mesh.nodes_per_element(); ++i, ++k) {
      const double denom = dissipation_sum[k] * inv_j - rho_source[k] / u_k[k][kRho];
      if (denom > 0.0) bound = std::min(bound, 1.0 / denom);
    }
  }
  return bound;
}

double dtau_density_bound_bdf1(const Field& u_k, const Field& u_n, const Mesh& mesh,
                               const std::vector<double>& dissipation_sum, double dt) {
  require_positive_density(u_n);
  std::vector<double> s(u_k.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = u_n[k][kRho] / dt;
  return dtau_density_bound(u_k, s, mesh, dissipation_sum);
}

double dtau_density_bound_bdf2(const Field& u_k, const Field& u_n, const Field& u_nm1,
                               const Mesh& mesh, const std::vector<double>& dissipation_sum,
                               double dt) {
  require_positive_density(u_n);
  require_positive_density(u_nm1);
  std::vector<double> s(u_k.size());
  for (std::size_t k = 0; k < s.size(); ++k)
    s[k] = (2.0 * u_n[k][kRho] - 0.5 * u_nm1[k][kRho]) / dt;
  return dtau_density_bound(u_k, s, mesh, dissipation_sum);
}

double dtau_density_bound_fe(const Field& u_k, const Mesh& mesh,
                             const std::vector<double>& dissipation_sum) {
  return dtau_density_bound(u_k, std::vector<double>(u_k.size(), 0.0), mesh, dissipation_sum);
}

Trinomial internal_energy_quadratic(const State& u_k, const State& g, const GasParameters& gas) {
  if (!(u_k[kRho] > 0.0) || !(internal_energy_density(u_k, gas) > 0.0))
    throw InadmissibleStateError("internal-energy quadratic of an inadmissible state");
  const double k = gas.kinetic_coefficient();
  double gm2 = 0.0, mgm = 0.0, m2 = 0.0;
  for (int i = 1; i <= 3; ++i) {
    gm2 += g[i] * g[i];
    mgm += u_k[i] * g[i];
    m2 += u_k[i] * u_k[i];
  }
  Trinomial q;
  q.a = g[kRho] * g[kEnergy] - k * gm2;
  q.b = u_k[kRho] * g[kEnergy] + u_k[kEnergy] * g[kRho] - 2.0 * k * mgm;
  q.c = u_k[kRho] * u_k[kEnergy] - k * m2;
  return q;
}

Trinomial internal_energy_quadratic_bdf1(const State& u_k, const State& u_n, const State& r,
                                         double dt, double jacobian, const GasParameters& gas) {
  const State s = source_state(u_n, nullptr, dt);
  State g;
  for (int v = 0; v < kNumVars; ++v) g[v] = r[v] + jacobian * s[v];
  return internal_energy_quadratic(u_k, g, gas);
}

Trinomial internal_energy_quadratic_bdf2(const State& u_k, const State& u_n, const State& u_nm1,
                                         const State& r, double dt, double jacobian,
                                         const GasParameters& gas) {
  const State s = source_state(u_n, &u_nm1, dt);
  State g;
  for (int v = 0; v < kNumVars; ++v) g[v] = r[v] + jacobian * s[v];
  return internal_energy_quadratic(u_k, g, gas);
}

double max_dtau_internal_energy(const Trinomial& q, double jacobian, double floor) {
  if (!(q.c > 0.0)) throw DomainError("internal-energy trinomial needs a positive intercept");
  const double c = q.c - floor;
  if (!(c > 0.0)) return 0.0;
  if (q.a >= 0.0 && q.b >= 0.0) return kUnbounded;
  double root = kUnbounded;
  if (q.a == 0.0) {
    root = -c / q.b;  // b < 0 here
  } else {
    const double disc = q.b * q.b - 4.0 * q.a * c;
    if (disc < 0.0) return kUnbounded;  // a > 0, no real root
    const double sq = std::sqrt(disc);
    // Stable pair of roots; c / t and t / a.
    const double t = -0.5 * (q.b + std::copysign(sq, q.b));
    const double r1 = t / q.a;
    const double r2 = t != 0.0 ? c / t : kUnbounded;
    for (double r : {r1, r2})
      if (r > 0.0) root = std::min(root, r);
  }
  return root == kUnbounded ? kUnbounded : jacobian * root;
}

namespace {

// Largest pseudotime step from the internal-energy quadratics of every node.
double internal_energy_bound(const Field& u_k, const Field& r1, const Field* source,
                             const Mesh& mesh, const GasParameters& gas,
                             const PositivityFloors& floors) {
  double bound = kUnbounded;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double jac = mesh.jacobian(e);
    for (int i = 0; i < mesh.nodes_per_element(); ++i) {
      const State& u = u_k.at(e, i);
      State g = r1.at(e, i);
      if (source)
        for (int v = 0; v < kNumVars; ++v) g[v] += jac * source->at(e, i)[v];
      const Trinomial q = internal_energy_quadratic(u, g, gas);
      const double floor = std::min(floors.internal_energy * u[kRho], 0.5 * q.c);
      bound = std::min(bound, max_dtau_internal_energy(q, jac, floor));
    }
  }
  return bound;
}

void theta_stats(const std::vector<double>& theta, double& tmin, double& tmean) {
  tmin = 1.0;
  double s = 0.0;
  for (double t : theta) {
    tmin = std::min(tmin, t);
    s += t;
  }
  tmean = theta.empty() ? 1.0 : s / static_cast<double>(theta.size());
}

}  // namespace

PseudoResult pseudo_converge(const TimeLevelBuffer& buffer, const DualTimeConfig& config,
                             BdfScheme scheme, const ResidualFunction& residual, double dt,
                             const Mesh& mesh, const LglOperatorSet& ops,
                             const GasParameters& gas) {
  config.validate();
  if (!(dt > 0.0)) throw DomainError("physical step must be positive");
  require_admissible(buffer.u_n, gas);
  if (buffer.u_nm1) require_admissible(*buffer.u_nm1, gas);

  const Field source = bdf_source(buffer, scheme, dt);
  std::vector<double> rho_source(source.size());
  for (std::size_t k = 0; k < source.size(); ++k) rho_source[k] = source[k][kRho];
  const double beta = implicit_weight(scheme);

  PseudoResult out;
  out.solution = buffer.u_k;
  Field& u_k = out.solution;
  double first_norm = 0.0;
  double dtau0 = 0.0;
  double theta_sum = 0.0;

  for (int it = 1; it <= config.max_pseudo_iterations; ++it) {
    const ResidualPair pair = residual(u_k);
    const double fe = dtau_density_bound_fe(u_k, mesh, pair.dissipation_sum);
    const double rho_bound = dtau_density_bound(u_k, rho_source, mesh, pair.dissipation_sum);
    const double ie_bound =
        internal_energy_bound(u_k, pair.first_order, &source, mesh, gas, config.floors);
    double dtau = std::min({config.kappa_tau * fe, rho_bound, ie_bound});
    dtau = std::min(dtau, diffusive_step_bound(pair, config.diffusion_number));
    if (config.max_dtau > 0.0) dtau = std::min(dtau, config.max_dtau);
    if (!std::isfinite(dtau)) dtau = std::isfinite(dt) ? dt : 1.0;
    dtau *= config.safety;

    Field next;
    std::vector<double> theta;
    int halvings = 0;
    for (;; ++halvings) {
      if (halvings > config.max_halvings)
        throw PositivityDeadlockError("pseudotime step halved " +
                                      std::to_string(config.max_halvings) +
                                      " times without an admissible update");
      const double c = 1.0 / (1.0 + beta * dtau / dt);
      const Field low = pseudo_update(u_k, source, pair.first_order, c, dtau, mesh);
      const Field high = pseudo_update(u_k, source, pair.high_order, c, dtau, mesh);
      try {
        theta = limit_blend(low, high, gas, config.floors);
      } catch (const InvariantViolationError&) {
        ++out.positivity_violations;
        ++out.retries;
        dtau *= 0.5;
        continue;
      }
      next = blend(low, high, theta);
      bool ok = true;
      for (std::size_t k = 0; k < next.size() && ok; ++k)
        ok = is_admissible(next[k], config.floors, gas);
      if (ok) break;
      ++out.retries;
      dtau *= 0.5;
    }

    const double step_norm = l2_difference(next, u_k, mesh, ops);
    if (it == 1) {
      first_norm = step_norm;
      dtau0 = dtau;
    }
    const ResidualMeasures m = residual_measures(step_norm, first_norm, dtau, dtau0);
    PseudoIteration rec;
    rec.iteration = it;
    rec.dtau = dtau;
    rec.eps_abs = m.eps_abs;
    rec.eps_rel = m.eps_rel;
    theta_stats(theta, rec.theta_min, rec.theta_mean);
    out.history.push_back(rec);
    out.theta_min = std::min(out.theta_min, rec.theta_min);
    theta_sum += rec.theta_mean;
    out.iterations = it;
    out.eps_abs = m.eps_abs;
    out.eps_rel = m.eps_rel;
    u_k = std::move(next);
    if (m.eps_abs < config.eps_abs || m.eps_rel < config.eps_rel) {
      out.converged = true;
      break;
    }
  }
  out.theta_mean = out.iterations > 0 ? theta_sum / out.iterations : 1.0;
  return out;
}

double explicit_step_bound(const Field& u, const ResidualPair& pair, const Mesh& mesh,
                           const GasParameters& gas, const PositivityFloors& floors) {
  return std::min(dtau_density_bound_fe(u, mesh, pair.dissipation_sum),
                  internal_energy_bound(u, pair.first_order, nullptr, mesh, gas, floors));
}

double diffusive_step_bound(const ResidualPair& pair, double diffusion_number) {
  double rate = 0.0;
  for (double r : pair.diffusion_rate) rate = std::max(rate, r);
  return rate > 0.0 ? diffusion_number / rate : kUnbounded;
}

namespace {

ExplicitStep euler_from_pair(const Field& u, const ResidualPair& pair, double dt,
                             const Mesh& mesh, const GasParameters& gas,
                             const PositivityFloors& floors) {
  const double bound = explicit_step_bound(u, pair, mesh, gas, floors);
  if (dt > bound * (1.0 + 1e-12))
    throw DomainError("explicit step " + std::to_string(dt) + " exceeds the positivity bound " +
                      std::to_string(bound));
  const Field zero(mesh);
  const Field low = pseudo_update(u, zero, pair.first_order, 1.0, dt, mesh);
  const Field high = pseudo_update(u, zero, pair.high_order, 1.0, dt, mesh);
  ExplicitStep out;
  out.theta = limit_blend(low, high, gas, floors);
  out.solution = blend(low, high, out.theta);
  return out;
}

Field combine(double a, const Field& x, double b, const Field& y) {
  Field out = x;
  for (std::size_t k = 0; k < out.size(); ++k)
    for (int v = 0; v < kNumVars; ++v) out[k][v] = a * x[k][v] + b * y[k][v];
  return out;
}

}  // namespace

ExplicitStep forward_euler_step(const Field& u, double dt, const ResidualFunction& residual,
                                const Mesh& mesh, const GasParameters& gas,
                                const PositivityFloors& floors) {
  return euler_from_pair(u, residual(u), dt, mesh, gas, floors);
}

ExplicitStep ssprk3_step(const Field& u, double dt, const ResidualFunction& residual,
                         const Mesh& mesh, const GasParameters& gas,
                         const PositivityFloors& floors) {
  ExplicitStep s1 = forward_euler_step(u, dt, residual, mesh, gas, floors);
  ExplicitStep s2 = forward_euler_step(s1.solution, dt, residual, mesh, gas, floors);
  const Field u2 = combine(0.75, u, 0.25, s2.solution);
  ExplicitStep s3 = forward_euler_step(u2, dt, residual, mesh, gas, floors);
  ExplicitStep out;
  out.solution = combine(1.0 / 3.0, u, 2.0 / 3.0, s3.solution);
  out.theta = s1.theta;
  for (std::size_t e = 0; e < out.theta.size(); ++e)
    out.theta[e] = std::min({s1.theta[e], s2.theta[e], s3.theta[e]});
  return out;
}

MarchResult march(const Field& u0, double t0, double t_end, Integrator integrator,
                  const DualTimeConfig& config, const ResidualFunction& residual,
                  const Mesh& mesh, const LglOperatorSet& ops, const GasParameters& gas,
                  const StepObserver& observer) {
  config.validate();
  require_admissible(u0, gas);
  MarchResult out;
  out.solution = u0;
  out.time = t0;
  std::optional<Field> previous_level;
  double previous_dt = 0.0;
  const bool dual = integrator == Integrator::Bdf1Dual || integrator == Integrator::Bdf2Dual;

  while (out.time < t_end) {
    StepReport report;
    report.step = out.steps + 1;
    const double remaining = t_end - out.time;
    if (dual) {
      double dt = config.step_at(out.time, previous_dt);
      if (dt >= remaining * (1.0 - 1e-10)) dt = remaining;
      TimeLevelBuffer buffer{out.solution, std::nullopt, out.solution};
      BdfScheme scheme = BdfScheme::Bdf1;
      if (integrator == Integrator::Bdf2Dual && previous_level) {
        buffer.u_nm1 = *previous_level;
        scheme = BdfScheme::Bdf2;
      }
      PseudoResult r = pseudo_converge(buffer, config, scheme, residual, dt, mesh, ops, gas);
      previous_level = std::move(out.solution);
      out.solution = std::move(r.solution);
      report.dt = dt;
      report.pseudo_iterations = r.iterations;
      report.converged = r.converged;
      report.eps_abs = r.eps_abs;
      report.eps_rel = r.eps_rel;
      report.theta_min = r.theta_min;
      report.theta_mean = r.theta_mean;
      report.retries = r.retries;
      report.positivity_violations = r.positivity_violations;
      previous_dt = dt;
    } else {
      const ResidualPair pair = residual(out.solution);
      const double bound =
          std::min(explicit_step_bound(out.solution, pair, mesh, gas, config.floors),
                   diffusive_step_bound(pair, config.diffusion_number));
      double dt = std::min(config.dt, config.safety * bound);
      if (dt >= remaining * (1.0 - 1e-10)) dt = remaining;
      ExplicitStep s;
      for (int h = 0;; ++h) {
        if (h > config.max_halvings)
          throw PositivityDeadlockError("explicit step halved without an admissible update");
        try {
          s = integrator == Integrator::ForwardEuler
                  ? euler_from_pair(out.solution, pair, dt, mesh, gas, config.floors)
                  : ssprk3_step(out.solution, dt, residual, mesh, gas, config.floors);
          break;
        } catch (const DomainError&) {
          ++report.retries;
        } catch (const InvariantViolationError&) {
          ++report.retries;
          ++report.positivity_violations;
        }
        dt *= 0.5;
      }
      const double step_norm = l2_difference(s.solution, out.solution, mesh, ops);
      out.solution = std::move(s.solution);
      report.dt = dt;
      report.eps_abs = step_norm / dt;
      theta_stats(s.theta, report.theta_min, report.theta_mean);
    }
    out.time = report.dt == remaining ? t_end : out.time + report.dt;
    report.time = out.time;
    ++out.steps;
    if (!report.converged) ++out.nonconverged_steps;
    out.retries += report.retries;
    out.positivity_violations += report.positivity_violations;
    out.theta_min = std::min(out.theta_min, report.theta_min);
    if (observer) observer(out.solution, report);
  }
  return out;
}

}  // namespace dts

#include "dts/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dts/errors.hpp"
#include "dts/flux.hpp"

namespace dts {

namespace {

double pairwise(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise(x, h) + pairwise(x + h, n - h);
}

// Quadrature weight P J of every node, element-major.
std::vector<double> node_weights(const Mesh& mesh, const LglOperatorSet& ops) {
  std::vector<double> w(static_cast<std::size_t>(mesh.num_elements()) * mesh.nodes_per_element());
  std::size_t k = 0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double jac = mesh.jacobian(e);
    for (int i = 0; i < mesh.nodes_per_element(); ++i, ++k) {
      const auto c = mesh.node_coords(i);
      double p = 1.0;
      for (int d = 0; d < mesh.dim(); ++d) p *= ops.weights[c[d]];
      w[k] = p * jac;
    }
  }
  return w;
}

void check_layout(const Field& a, const Field& b, const Mesh& mesh) {
  if (!a.same_layout(b) || a.num_elements() != mesh.num_elements() ||
      a.nodes_per_element() != mesh.nodes_per_element()) {
    throw DimensionError("field layouts do not match the mesh");
  }
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise(values.data(), values.size());
}

ErrorNorms error_norms(const Field& field, const Field& exact, const Mesh& mesh,
                       const LglOperatorSet& ops) {
  check_layout(field, exact, mesh);
  const auto w = node_weights(mesh, ops);
  std::vector<double> t1(w.size()), t2(w.size());
  ErrorNorms out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    double s1 = 0.0, s2 = 0.0;
    for (int c = 0; c < kNumVars; ++c) {
      const double d = std::abs(field[k][c] - exact[k][c]);
      s1 += d;
      s2 += d * d;
      out.linf = std::max(out.linf, d);
    }
    t1[k] = w[k] * s1;
    t2[k] = w[k] * s2;
  }
  const double norm = kNumVars * pairwise_sum(w);
  out.l1 = pairwise_sum(t1) / norm;
  out.l2 = std::sqrt(pairwise_sum(t2) / norm);
  return out;
}

double l2_difference(const Field& a, const Field& b, const Mesh& mesh, const LglOperatorSet& ops) {
  return error_norms(a, b, mesh, ops).l2;
}

ResidualMeasures residual_measures(double step_norm, double first_step_norm, double dtau,
                                   double dtau0) {
  if (!(dtau > 0.0) || !(dtau0 > 0.0)) throw DomainError("pseudotime steps must be positive");
  ResidualMeasures m;
  m.eps_abs = step_norm / dtau;
  m.eps_rel = first_step_norm > 0.0 ? step_norm / first_step_norm * dtau0 / dtau : 0.0;
  return m;
}

ResidualMeasures residual_measures(const Field& u_next, const Field& u_k, const Field& u_1,
                                   const Field& u_0, double dtau, double dtau0, const Mesh& mesh,
                                   const LglOperatorSet& ops) {
  return residual_measures(l2_difference(u_next, u_k, mesh, ops),
                           l2_difference(u_1, u_0, mesh, ops), dtau, dtau0);
}

State conserved_totals(const Field& field, const Mesh& mesh, const LglOperatorSet& ops) {
  const auto w = node_weights(mesh, ops);
  State out{};
  std::vector<double> t(w.size());
  for (int c = 0; c < kNumVars; ++c) {
    for (std::size_t k = 0; k < w.size(); ++k) t[k] = w[k] * field[k][c];
    out[c] = pairwise_sum(t);
  }
  return out;
}

double total_entropy(const Field& field, const Mesh& mesh, const LglOperatorSet& ops,
                     const GasParameters& gas) {
  const auto w = node_weights(mesh, ops);
  std::vector<double> t(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) t[k] = w[k] * entropy(field[k], gas);
  return pairwise_sum(t);
}

TgvQuantities tgv_diagnostics(const Field& field, const Mesh& mesh, const LglOperatorSet& ops,
                              const GasParameters& gas) {
  if (!mesh.periodic()) throw UnsupportedConfigurationError("TGV diagnostics need a periodic mesh");
  const auto w = node_weights(mesh, ops);
  const int npe = mesh.nodes_per_element();
  const int n = ops.size();
  std::vector<double> ke(w.size()), sol(w.size()), dil(w.size());
  std::vector<Vec3> vel(npe);
  std::vector<double> mu(npe);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int i = 0; i < npe; ++i) {
      const Primitives q = primitives(field.at(e, i), gas);
      vel[i] = q.v;
      mu[i] = dynamic_viscosity(q.T, gas);
    }
    for (int i = 0; i < npe; ++i) {
      const std::size_t k = static_cast<std::size_t>(e) * npe + i;
      // grad[a][d] = dv_a / dx_d
      std::array<Vec3, 3> grad{};
      const auto c = mesh.node_coords(i);
      for (int d = 0; d < mesh.dim(); ++d) {
        const double scale = 2.0 / mesh.extent(e, d);
        const int base = i - c[d] * mesh.node_stride(d);
        for (int j = 0; j < n; ++j) {
          const double dij = ops.derivative(c[d], j) * scale;
          const Vec3& vj = vel[base + j * mesh.node_stride(d)];
          for (int a = 0; a < 3; ++a) grad[a][d] += dij * vj[a];
        }
      }
      const Vec3 omega{grad[2][1] - grad[1][2], grad[0][2] - grad[2][0], grad[1][0] - grad[0][1]};
      const double div = grad[0][0] + grad[1][1] + grad[2][2];
      const State& u = field[k];
      ke[k] = w[k] * 0.5 * (u[1] * vel[i][0] + u[2] * vel[i][1] + u[3] * vel[i][2]);
      sol[k] = w[k] * mu[i] * (omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2]);
      dil[k] = w[k] * mu[i] * div * div;
    }
  }
  const double volume = pairwise_sum(w);
  const double scale = gas.energy_scale() / volume;
  TgvQuantities out;
  out.kinetic_energy = scale * pairwise_sum(ke);
  if (gas.viscous()) {
    out.solenoidal = scale / gas.reynolds * pairwise_sum(sol);
    out.dilatational = 4.0 / 3.0 * scale / gas.reynolds * pairwise_sum(dil);
  }
  return out;
}

HistoryRecord measure(const Field& field, const Mesh& mesh, const LglOperatorSet& ops,
                      const GasParameters& gas) {
  HistoryRecord r;
  r.totals = conserved_totals(field, mesh, ops);
  r.entropy = total_entropy(field, mesh, ops, gas);
  r.min_density = std::numeric_limits<double>::infinity();
  r.min_internal_energy = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < field.size(); ++k) {
    r.min_density = std::min(r.min_density, field[k][kRho]);
    r.min_internal_energy = std::min(r.min_internal_energy, internal_energy_density(field[k], gas));
  }
  if (mesh.periodic()) {
    const TgvQuantities t = tgv_diagnostics(field, mesh, ops, gas);
    r.kinetic_energy = t.kinetic_energy;
    r.eps_s = t.solenoidal;
    r.eps_d = t.dilatational;
    r.eps_v = t.total();
  }
  return r;
}

ConservationReport conservation_audit(std::span<const HistoryRecord> history,
                                      double entropy_slack) {
  ConservationReport out;
  if (history.empty()) return out;
  const State& first = history.front().totals;
  for (const auto& r : history) {
    for (int c = 0; c < kNumVars; ++c) {
      const double scale = std::max(std::abs(first[c]), 1e-300);
      const double drift = std::abs(r.totals[c] - first[c]);
      // Components with a vanishing total are measured in absolute terms.
      const double rel = std::abs(first[c]) > 1e-14 ? drift / scale : drift;
      out.max_relative_drift[c] = std::max(out.max_relative_drift[c], rel);
    }
  }
  for (std::size_t i = 1; i < history.size(); ++i) {
    const double inc = history[i].entropy - history[i - 1].entropy;
    out.max_entropy_increase = std::max(out.max_entropy_increase, inc);
    if (inc > entropy_slack) ++out.entropy_increase_events;
  }
  return out;
}

}  // namespace dts

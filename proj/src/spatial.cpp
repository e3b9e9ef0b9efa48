#include "dts/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "dts/errors.hpp"

namespace dts {

namespace {

int g_threads = 1;

// Runs f(0) ... f(n - 1) over contiguous blocks, one block per thread.
template <class F>
void parallel_for(int n, F&& f) {
  const int t = std::min(g_threads, n);
  if (t <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = static_cast<int>(static_cast<long long>(w) * n / t);
             i < static_cast<int>(static_cast<long long>(w + 1) * n / t); ++i)
          f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// First-order flux-point flux f_EC - D (u_R - u_L) with the scalar dissipation
// D = max(|m| / (2 rho_A), max wave speed / 2, c_rho mu / (rho_A dx)).
State first_order_flux(const State& ul, const State& ur, int d, const GasParameters& gas,
                       double mu, double dx, double& dissipation) {
  State f = ec_flux(ul, ur, d, gas);
  const double rho_a = 0.5 * (ul[kRho] + ur[kRho]);
  const double d_min = min_mass_dissipation(f[kRho], ul[kRho], ur[kRho]);
  const double d_char = 0.5 * std::max(max_wave_speed(ul, d, gas), max_wave_speed(ur, d, gas));
  const double d_sigma = gas.c_rho * mu / (rho_a * dx);
  dissipation = std::max({d_min, d_char, d_sigma});
  for (int c = 0; c < kNumVars; ++c) f[c] -= dissipation * (ur[c] - ul[c]);
  return f;
}

State high_order_interface_flux(const State& ul, const State& ur, int d,
                                const GasParameters& gas) {
  State f = ec_flux(ul, ur, d, gas);
  const State diss = ed_dissipation(ul, ur, d, gas);
  for (int c = 0; c < kNumVars; ++c) f[c] -= diss[c];
  return f;
}

struct LineIndex {
  std::vector<int> nodes;  // node indices along direction d
};

// Every line of an element along direction d, identified by its first node.
std::vector<LineIndex> element_lines(const Mesh& mesh, int d) {
  std::vector<LineIndex> lines;
  const int n = mesh.points_per_direction();
  for (int i = 0; i < mesh.nodes_per_element(); ++i) {
    if (mesh.node_coords(i)[d] != 0) continue;
    LineIndex line;
    line.nodes.resize(n);
    for (int j = 0; j < n; ++j) line.nodes[j] = i + j * mesh.node_stride(d);
    lines.push_back(std::move(line));
  }
  return lines;
}

State ghost_state(const Discretization& disc, int e, int i) {
  if (!disc.boundary_state) {
    throw UnsupportedConfigurationError("Dirichlet face without a boundary state");
  }
  return disc.boundary_state(disc.mesh.position(e, i, disc.ops.nodes));
}

void axpy(State& y, double a, const State& x) {
  for (int c = 0; c < kNumVars; ++c) y[c] += a * x[c];
}

}  // namespace

void set_thread_count(int threads) {
  if (threads < 1) throw DomainError("thread count must be positive");
  g_threads = threads;
}

int thread_count() { return g_threads; }

void require_admissible(const Field& field, const GasParameters& gas) {
  for (int e = 0; e < field.num_elements(); ++e)
    for (int i = 0; i < field.nodes_per_element(); ++i) {
      const State& u = field.at(e, i);
      if (!(u[kRho] > 0.0)) throw InadmissibleStateError("nonpositive density", e, i);
      if (!(internal_energy_density(u, gas) > 0.0))
        throw InadmissibleStateError("nonpositive internal energy", e, i);
    }
}

std::vector<double> element_artificial_viscosity(const Field& field, const Discretization& disc) {
  const Mesh& mesh = disc.mesh;
  std::vector<double> mu(mesh.num_elements(), 0.0);
  if (!disc.use_artificial_viscosity) return mu;
  const int npe = mesh.nodes_per_element();
  parallel_for(mesh.num_elements(), [&](int e) {
    double h = mesh.extent(e, 0);
    for (int d = 1; d < mesh.dim(); ++d) h = std::min(h, mesh.extent(e, d));
    std::span<const State> values(&field.at(e, 0), static_cast<std::size_t>(npe));
    mu[e] = artificial_viscosity(values, mesh.dim(), disc.ops, disc.gas, h);
  });
  return mu;
}

std::array<Field, 3> ldg_gradients(const Field& field, const Discretization& disc) {
  const Mesh& mesh = disc.mesh;
  const LglOperatorSet& ops = disc.ops;
  const int n = ops.size();
  std::array<Field, 3> theta{Field(mesh), Field(mesh), Field(mesh)};

  Field w(mesh);
  for (std::size_t k = 0; k < field.size(); ++k) w[k] = entropy_variables(field[k], disc.gas);

  std::array<std::vector<LineIndex>, 3> lines;
  for (int d = 0; d < mesh.dim(); ++d) lines[d] = element_lines(mesh, d);
  parallel_for(mesh.num_elements(), [&](int e) {
    for (int d = 0; d < mesh.dim(); ++d) {
      const double scale = 2.0 / mesh.extent(e, d);
      const int left = mesh.neighbor(e, d, -1);
      const int right = mesh.neighbor(e, d, +1);
      for (const auto& line : lines[d]) {
        const auto& idx = line.nodes;
        // Interface value of w is taken from the element on the minus side.
        const State w_star_left =
            left >= 0 ? w.at(left, idx[n - 1])
                      : entropy_variables(ghost_state(disc, e, idx[0]), disc.gas);
        for (int j = 0; j < n; ++j) {
          State g{};
          for (int k = 0; k < n; ++k) axpy(g, ops.derivative(j, k), w.at(e, idx[k]));
          if (j == 0) {
            for (int c = 0; c < kNumVars; ++c)
              g[c] -= (w_star_left[c] - w.at(e, idx[0])[c]) / ops.weights[0];
          }
          if (j == n - 1 && right < 0) {
            const State wg = entropy_variables(ghost_state(disc, e, idx[n - 1]), disc.gas);
            for (int c = 0; c < kNumVars; ++c)
              g[c] += (wg[c] - w.at(e, idx[n - 1])[c]) / ops.weights[n - 1];
          }
          for (int c = 0; c < kNumVars; ++c) g[c] *= scale;
          theta[d].at(e, idx[j]) = g;
        }
      }
    }
  });
  return theta;
}

ResidualPair compute_residuals(const Field& field, const Discretization& disc) {
  const Mesh& mesh = disc.mesh;
  const LglOperatorSet& ops = disc.ops;
  const GasParameters& gas = disc.gas;
  const int n = ops.size();
  const int ne = mesh.num_elements();
  const int npe = mesh.nodes_per_element();
  require_admissible(field, gas);

  ResidualPair out;
  out.first_order = Field(mesh);
  out.high_order = Field(mesh);
  out.mu_ad = element_artificial_viscosity(field, disc);
  out.dissipation_sum.assign(field.size(), 0.0);
  out.diffusion_rate.assign(field.size(), 0.0);

  bool any_ad = false;
  for (double m : out.mu_ad) any_ad = any_ad || m > 0.0;
  const bool diffusive = gas.viscous() || any_ad;

  // Diffusive fluxes at every node from the LDG entropy-variable gradients.
  std::vector<std::array<State, 3>> f_visc, f_ad;
  if (diffusive) {
    const auto theta = ldg_gradients(field, disc);
    f_visc.assign(field.size(), {});
    f_ad.assign(field.size(), {});
    parallel_for(ne, [&](int e) {
      for (int i = 0; i < npe; ++i) {
        const std::size_t k = static_cast<std::size_t>(e) * npe + i;
        const State& u = field[k];
        const PrimitiveGradients g =
            gradients_from_entropy(u, {theta[0][k], theta[1][k], theta[2][k]}, gas);
        const Primitives q = primitives(u, gas);
        double nu = 0.0;
        if (gas.viscous())
          nu += std::max(4.0 / 3.0, gas.gamma / gas.prandtl) * dynamic_viscosity(q.T, gas) /
                (gas.reynolds * q.rho);
        nu += std::max({4.0 / 3.0, gas.c_rho, gas.c_t() * (gas.gamma - 1.0) / gas.gamma}) *
              out.mu_ad[e] / q.rho;
        for (int d = 0; d < mesh.dim(); ++d) {
          const double r = 2.0 / (mesh.extent(e, d) * ops.weights[0]);
          out.diffusion_rate[k] += nu * r * r;
          f_visc[k][d] = viscous_flux(u, g, d, gas);
          if (out.mu_ad[e] > 0.0) f_ad[k][d] = brenner_ad_flux(u, g, d, out.mu_ad[e], gas);
        }
      }
    });
  }

  std::array<std::vector<LineIndex>, 3> lines;
  for (int d = 0; d < mesh.dim(); ++d) lines[d] = element_lines(mesh, d);

  parallel_for(ne, [&](int e) {
    std::vector<State> u(n), fbar1(n + 1), fbarp(n + 1);
    std::vector<double> diss(n + 1);
    std::vector<State> pair(static_cast<std::size_t>(n) * n);
    for (int d = 0; d < mesh.dim(); ++d) {
      const double h = mesh.extent(e, d);
      const double scale = 2.0 / h;
      const double contravariant = mesh.jacobian(e) * scale;
      const int left = mesh.neighbor(e, d, -1);
      const int right = mesh.neighbor(e, d, +1);
      const double h_left = left >= 0 ? mesh.extent(left, d) : h;
      const double h_right = right >= 0 ? mesh.extent(right, d) : h;
      const double mu_e = out.mu_ad[e];
      const double mu_left = left >= 0 ? out.mu_ad[left] : mu_e;
      const double mu_right = right >= 0 ? out.mu_ad[right] : mu_e;

      for (const auto& line : lines[d]) {
        const auto& idx = line.nodes;
        for (int j = 0; j < n; ++j) u[j] = field.at(e, idx[j]);
        const State u_left = left >= 0 ? field.at(left, idx[n - 1]) : ghost_state(disc, e, idx[0]);
        const State u_right =
            right >= 0 ? field.at(right, idx[0]) : ghost_state(disc, e, idx[n - 1]);

        // First-order fluxes on the complementary grid.
        fbar1[0] = first_order_flux(u_left, u[0], d, gas, 0.5 * (mu_left + mu_e),
                                    0.25 * (h_left * ops.weights[n - 1] + h * ops.weights[0]),
                                    diss[0]);
        for (int j = 1; j < n; ++j) {
          fbar1[j] = first_order_flux(u[j - 1], u[j], d, gas, mu_e,
                                      0.25 * h * (ops.weights[j - 1] + ops.weights[j]), diss[j]);
        }
        fbar1[n] = first_order_flux(u[n - 1], u_right, d, gas, 0.5 * (mu_e + mu_right),
                                    0.25 * (h * ops.weights[n - 1] + h_right * ops.weights[0]),
                                    diss[n]);

        // High-order entropy-conservative flux differencing in telescoping form.
        for (int l = 0; l < n; ++l)
          for (int m = l + 1; m < n; ++m) pair[l * n + m] = ec_flux(u[l], u[m], d, gas);
        fbarp[0] = high_order_interface_flux(u_left, u[0], d, gas);
        fbarp[n] = high_order_interface_flux(u[n - 1], u_right, d, gas);
        for (int j = 1; j < n; ++j) {
          State s{};
          for (int l = 0; l < j; ++l)
            for (int m = j; m < n; ++m) axpy(s, 2.0 * ops.stiffness(l, m), pair[l * n + m]);
          fbarp[j] = s;
        }

        for (int j = 0; j < n; ++j) {
          const std::size_t k = static_cast<std::size_t>(e) * npe + idx[j];
          const double inv_w = 1.0 / ops.weights[j];
          out.dissipation_sum[k] += 2.0 * contravariant * (diss[j] + diss[j + 1]) * inv_w;
          State& r1 = out.first_order[k];
          State& rp = out.high_order[k];
          for (int c = 0; c < kNumVars; ++c) {
            r1[c] -= scale * (fbar1[j + 1][c] - fbar1[j][c]) * inv_w;
            rp[c] -= scale * (fbarp[j + 1][c] - fbarp[j][c]) * inv_w;
          }
        }

        if (!diffusive) continue;
        // Divergence of the diffusive fluxes; interface flux from the plus side.
        const std::size_t base = static_cast<std::size_t>(e) * npe;
        for (int j = 0; j < n; ++j) {
          State dv{}, da{};
          for (int k = 0; k < n; ++k) {
            axpy(dv, ops.derivative(j, k), f_visc[base + idx[k]][d]);
            axpy(da, ops.derivative(j, k), f_ad[base + idx[k]][d]);
          }
          if (j == n - 1 && right >= 0) {
            const std::size_t kr = static_cast<std::size_t>(right) * npe + idx[0];
            const std::size_t ko = base + idx[n - 1];
            for (int c = 0; c < kNumVars; ++c) {
              dv[c] += (f_visc[kr][d][c] - f_visc[ko][d][c]) / ops.weights[n - 1];
              da[c] += (f_ad[kr][d][c] - f_ad[ko][d][c]) / ops.weights[n - 1];
            }
          }
          State& r1 = out.first_order[base + idx[j]];
          State& rp = out.high_order[base + idx[j]];
          for (int c = 0; c < kNumVars; ++c) {
            r1[c] += scale * dv[c];
            rp[c] += scale * (dv[c] + da[c]);
          }
        }
      }
    }
  });

  for (int e = 0; e < ne; ++e) {
    const double jac = mesh.jacobian(e);
    for (int i = 0; i < npe; ++i) {
      for (int c = 0; c < kNumVars; ++c) {
        out.first_order.at(e, i)[c] *= jac;
        out.high_order.at(e, i)[c] *= jac;
      }
    }
  }
  return out;
}

Field residual_first_order(const Field& field, const Discretization& disc) {
  return compute_residuals(field, disc).first_order;
}

Field residual_high_order(const Field& field, const Discretization& disc) {
  return compute_residuals(field, disc).high_order;
}

namespace {

bool node_admissible(const State& u, const GasParameters& gas, const PositivityFloors& floors) {
  return u[kRho] >= floors.rho && internal_energy_density(u, gas) >= floors.internal_energy;
}

State mix(const State& a, const State& b, double t) {
  State out;
  for (int c = 0; c < kNumVars; ++c) out[c] = (1.0 - t) * a[c] + t * b[c];
  return out;
}

}  // namespace

std::vector<double> limit_blend(const Field& low, const Field& high, const GasParameters& gas,
                                const PositivityFloors& floors) {
  if (!low.same_layout(high)) throw DimensionError("limit_blend: layout mismatch");
  const int npe = low.nodes_per_element();
  std::vector<double> theta(low.num_elements(), 1.0);
  for (int e = 0; e < low.num_elements(); ++e) {
    bool all_high = true;
    for (int i = 0; i < npe; ++i) {
      if (!node_admissible(low.at(e, i), gas, floors)) {
        throw InvariantViolationError("first-order update inadmissible (element " +
                                      std::to_string(e) + ", node " + std::to_string(i) + ")");
      }
      all_high = all_high && node_admissible(high.at(e, i), gas, floors);
    }
    if (all_high) continue;

    // Density is affine in theta: closed form.
    double t = 1.0;
    for (int i = 0; i < npe; ++i) {
      const double r0 = low.at(e, i)[kRho];
      const double r1 = high.at(e, i)[kRho];
      if (r1 < floors.rho) t = std::min(t, (r0 - floors.rho) / (r0 - r1));
    }
    t = std::clamp(t, 0.0, 1.0);
    auto feasible = [&](double tt) {
      for (int i = 0; i < npe; ++i)
        if (!node_admissible(mix(low.at(e, i), high.at(e, i), tt), gas, floors)) return false;
      return true;
    };
    if (!feasible(t)) {
      // Internal energy: bisection between a feasible and an infeasible theta.
      double lo = 0.0;
      double hi = t;
      while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
      }
      t = lo;
    }
    theta[e] = t;
  }
  return theta;
}

std::vector<double> flux_limiter_theta(const Field& u_kn, const Field& r_high,
                                       const Field& r_low, double dtau, double c_tau,
                                       const Mesh& mesh, const GasParameters& gas,
                                       const PositivityFloors& floors) {
  Field low(mesh), high(mesh);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double inv_j = 1.0 / mesh.jacobian(e);
    for (int i = 0; i < mesh.nodes_per_element(); ++i)
      for (int c = 0; c < kNumVars; ++c) {
        const double base = u_kn.at(e, i)[c];
        low.at(e, i)[c] = c_tau * (base + dtau * r_low.at(e, i)[c] * inv_j);
        high.at(e, i)[c] = c_tau * (base + dtau * r_high.at(e, i)[c] * inv_j);
      }
  }
  return limit_blend(low, high, gas, floors);
}

Field blend(const Field& low, const Field& high, const std::vector<double>& theta) {
  Field out = low;
  for (int e = 0; e < low.num_elements(); ++e)
    for (int i = 0; i < low.nodes_per_element(); ++i)
      out.at(e, i) = mix(low.at(e, i), high.at(e, i), theta[e]);
  return out;
}

}  // namespace dts

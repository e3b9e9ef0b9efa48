#include "dts/mesh.hpp"

#include <random>
#include <string>

#include "dts/errors.hpp"

namespace dts {

Mesh::Mesh(int dim, int order, std::array<int, 3> elements, std::array<double, 3> lo,
           std::array<double, 3> hi, std::array<BoundaryKind, 3> boundaries)
    : dim_(dim), order_(order), n_(elements), bc_(boundaries) {
  if (dim < 1 || dim > 3) throw DimensionError("mesh dimension must be 1, 2 or 3");
  for (int d = 0; d < 3; ++d) {
    if (d >= dim) {
      n_[d] = 1;
      bc_[d] = BoundaryKind::Periodic;
    }
    if (n_[d] < 1) throw DimensionError("need at least one element per direction");
    const double a = d < dim ? lo[d] : 0.0;
    const double b = d < dim ? hi[d] : 2.0;
    if (!(b > a)) throw DimensionError("mesh extent must be positive in direction " + std::to_string(d));
    edges_[d].resize(n_[d] + 1);
    for (int k = 0; k <= n_[d]; ++k) edges_[d][k] = a + (b - a) * k / n_[d];
  }
  const int np = order + 1;
  nodes_per_element_ = 1;
  for (int d = 0; d < dim; ++d) nodes_per_element_ *= np;
  stride_ = {1, np, np * np};
}

void Mesh::jitter(double fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-fraction, fraction);
  for (int d = 0; d < dim_; ++d) {
    const double h = (edges_[d].back() - edges_[d].front()) / n_[d];
    for (int k = 1; k < n_[d]; ++k) edges_[d][k] += dist(rng) * h;
  }
}

bool Mesh::periodic() const {
  for (int d = 0; d < dim_; ++d)
    if (bc_[d] != BoundaryKind::Periodic) return false;
  return true;
}

std::array<int, 3> Mesh::element_coords(int e) const {
  return {e % n_[0], (e / n_[0]) % n_[1], e / (n_[0] * n_[1])};
}

int Mesh::neighbor(int e, int d, int side) const {
  auto c = element_coords(e);
  c[d] += side;
  if (c[d] < 0 || c[d] >= n_[d]) {
    if (bc_[d] != BoundaryKind::Periodic) return -1;
    c[d] = (c[d] + n_[d]) % n_[d];
  }
  return element_index(c);
}

double Mesh::extent(int e, int d) const {
  const int c = element_coords(e)[d];
  return edges_[d][c + 1] - edges_[d][c];
}

double Mesh::jacobian(int e) const {
  double j = 1.0;
  for (int d = 0; d < dim_; ++d) j *= 0.5 * extent(e, d);
  return j;
}

double Mesh::volume() const {
  double v = 1.0;
  for (int d = 0; d < dim_; ++d) v *= edges_[d].back() - edges_[d].front();
  return v;
}

std::array<int, 3> Mesh::node_coords(int i) const {
  const int np = order_ + 1;
  std::array<int, 3> c{0, 0, 0};
  for (int d = 0; d < dim_; ++d) {
    c[d] = i % np;
    i /= np;
  }
  return c;
}

int Mesh::node_index(std::array<int, 3> c) const {
  int i = 0;
  for (int d = 0; d < dim_; ++d) i += c[d] * stride_[d];
  return i;
}

std::array<double, 3> Mesh::position(int e, int i, const std::vector<double>& xi) const {
  const auto ec = element_coords(e);
  const auto nc = node_coords(i);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int d = 0; d < dim_; ++d) {
    const double a = edges_[d][ec[d]];
    const double b = edges_[d][ec[d] + 1];
    x[d] = a + 0.5 * (b - a) * (xi[nc[d]] + 1.0);
  }
  return x;
}

Field interpolate(const Mesh& mesh, const LglOperatorSet& ops, const PointFunction& f) {
  Field out(mesh);
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int i = 0; i < mesh.nodes_per_element(); ++i)
      out.at(e, i) = f(mesh.position(e, i, ops.nodes));
  return out;
}

}  // namespace dts

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "dts/gas.hpp"
#include "dts/sbp.hpp"

namespace dts {

enum class BoundaryKind { Periodic, Dirichlet };

/// Cartesian tensor-product mesh of LGL elements. Each element has a constant
/// Jacobian J = prod_d h_d / 2.
class Mesh {
public:
  Mesh(int dim, int order, std::array<int, 3> elements, std::array<double, 3> lo,
       std::array<double, 3> hi, std::array<BoundaryKind, 3> boundaries);

  /// Moves interior element interfaces by up to `fraction` of the local spacing.
  void jitter(double fraction, std::uint64_t seed);

  int dim() const { return dim_; }
  int order() const { return order_; }
  int points_per_direction() const { return order_ + 1; }
  int nodes_per_element() const { return nodes_per_element_; }
  int num_elements() const { return n_[0] * n_[1] * n_[2]; }
  int elements_in(int d) const { return n_[d]; }
  BoundaryKind boundary(int d) const { return bc_[d]; }
  bool periodic() const;

  std::array<int, 3> element_coords(int e) const;
  int element_index(std::array<int, 3> c) const { return c[0] + n_[0] * (c[1] + n_[1] * c[2]); }
  /// Neighbor across the face on side -1 / +1 of direction d, or -1 at a Dirichlet boundary.
  int neighbor(int e, int d, int side) const;

  double extent(int e, int d) const;
  double jacobian(int e) const;
  double volume() const;

  std::array<int, 3> node_coords(int i) const;
  int node_index(std::array<int, 3> c) const;
  int node_stride(int d) const { return stride_[d]; }
  /// Physical position of node i in element e for reference nodes `xi`.
  std::array<double, 3> position(int e, int i, const std::vector<double>& xi) const;

  double lo(int d) const { return edges_[d].front(); }
  double hi(int d) const { return edges_[d].back(); }
  const std::vector<double>& edges(int d) const { return edges_[d]; }

private:
  int dim_;
  int order_;
  std::array<int, 3> n_;
  std::array<std::vector<double>, 3> edges_;
  std::array<BoundaryKind, 3> bc_;
  int nodes_per_element_;
  std::array<int, 3> stride_;
};

/// Nodal conservative states, element-major.
class Field {
public:
  Field() = default;
  Field(int num_elements, int nodes_per_element)
      : num_elements_(num_elements), nodes_per_element_(nodes_per_element),
        values_(static_cast<std::size_t>(num_elements) * nodes_per_element, State{}) {}
  explicit Field(const Mesh& mesh) : Field(mesh.num_elements(), mesh.nodes_per_element()) {}

  int num_elements() const { return num_elements_; }
  int nodes_per_element() const { return nodes_per_element_; }
  std::size_t size() const { return values_.size(); }

  State& at(int e, int i) { return values_[static_cast<std::size_t>(e) * nodes_per_element_ + i]; }
  const State& at(int e, int i) const {
    return values_[static_cast<std::size_t>(e) * nodes_per_element_ + i];
  }
  State& operator[](std::size_t k) { return values_[k]; }
  const State& operator[](std::size_t k) const { return values_[k]; }
  std::vector<State>& values() { return values_; }
  const std::vector<State>& values() const { return values_; }

  bool same_layout(const Field& other) const {
    return num_elements_ == other.num_elements_ && nodes_per_element_ == other.nodes_per_element_;
  }

private:
  int num_elements_ = 0;
  int nodes_per_element_ = 0;
  std::vector<State> values_;
};

using PointFunction = std::function<State(const std::array<double, 3>& x)>;

/// Samples a pointwise function at every node.
Field interpolate(const Mesh& mesh, const LglOperatorSet& ops, const PointFunction& f);

}  // namespace dts

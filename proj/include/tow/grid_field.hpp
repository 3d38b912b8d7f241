#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tow/domain.hpp"
#include "tow/vec.hpp"

namespace tow {

enum class NodeClass : std::uint8_t { Interior, Collar, Exterior };

const char* to_string(NodeClass c);

/// Real values sampled on a uniform lattice x = (i_1, ..., i_N) * dx that
/// covers Omega_eps, with a per-node classification. Multilinear
/// interpolation is available wherever every contributing corner is
/// interior or collar.
class GridField {
 public:
  GridField() = default;
  GridField(int dim, std::array<std::int64_t, 3> first_index, std::array<std::int64_t, 3> counts,
            double dx);

  /// Lattice aligned with integer multiples of dx. Interior nodes lie in
  /// Omega; collar nodes lie within eps + (sqrt(N) + 1) dx of Omega, so every
  /// multilinear corner of a point in Omega_eps is covered with one spare
  /// cell. Rejects dx > eps.
  static GridField cover(const DomainSpec& domain, double dx);

  /// Distance from Omega up to which nodes are classified as collar.
  double collar_thickness() const noexcept { return thickness_; }

  int dim() const noexcept { return dim_; }
  double dx() const noexcept { return dx_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::array<std::int64_t, 3>& counts() const noexcept { return counts_; }
  const std::array<std::int64_t, 3>& first_index() const noexcept { return first_; }
  /// Linear offset between neighbors along each axis.
  const std::array<std::int64_t, 3>& strides() const noexcept { return strides_; }

  Vec coords(std::size_t idx) const;
  std::size_t index(const std::array<std::int64_t, 3>& lattice) const;
  std::array<std::int64_t, 3> lattice(std::size_t idx) const;

  double value(std::size_t idx) const { return values_[idx]; }
  double& value(std::size_t idx) { return values_[idx]; }
  NodeClass node_class(std::size_t idx) const { return classes_[idx]; }
  void set_class(std::size_t idx, NodeClass c) { classes_[idx] = c; }

  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }
  const std::vector<NodeClass>& classes() const noexcept { return classes_; }

  std::vector<std::size_t> nodes_of(NodeClass c) const;

  /// Samples fn at every node of the given class.
  void fill(NodeClass c, const std::function<double(const Vec&)>& fn);

  /// Multilinear interpolation from the 2^N surrounding nodes; throws
  /// OutOfDomain when a contributing corner is exterior or off the lattice.
  double interpolate(const Vec& x) const;
  bool try_interpolate(const Vec& x, double& out) const;

  /// True when geometry (dimension, spacing, index box) matches.
  bool same_lattice(const GridField& other) const;

  /// Nearest lattice node to x (clamped to the lattice).
  std::size_t nearest(const Vec& x) const;

  /// CSV with header x1,...,xN,value,class and one row per lattice node.
  void write_csv(std::ostream& out) const;

 private:
  int dim_ = 2;
  double dx_ = 1.0;
  double thickness_ = 0.0;
  std::array<std::int64_t, 3> first_{0, 0, 0};
  std::array<std::int64_t, 3> counts_{1, 1, 1};
  std::array<std::int64_t, 3> strides_{1, 1, 1};
  std::vector<double> values_;
  std::vector<NodeClass> classes_;
};

}  // namespace tow

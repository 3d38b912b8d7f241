#pragma once

#include <string>

#include "tow/vec.hpp"

namespace tow {

enum class Shape { Ball, Box, Annulus };

/// Bounded domain Omega together with the step eps defining the collar
/// Gamma_eps = Omega_eps \ Omega.
struct DomainSpec {
  Shape shape = Shape::Ball;
  int dim = 2;
  Vec center{};          ///< ball / annulus
  double radius = 1.0;   ///< ball radius, or outer radius of an annulus
  double inner_radius = 0.0;
  Vec box_min{};
  Vec box_max{};
  double eps = 0.1;

  /// Throws InvalidArgument when the geometry is degenerate or eps is not
  /// small compared with the domain: eps < half_width()/2, i.e. eps < R/2 for
  /// balls.
  void validate() const;

  bool contains(const Vec& x) const;
  /// Euclidean distance from x to Omega (0 inside).
  double distance_outside(const Vec& x) const;
  /// Distance from an interior point to the boundary of Omega.
  double distance_to_boundary(const Vec& x) const;
  /// Nearest point of the boundary of Omega.
  Vec project_to_boundary(const Vec& x) const;
  /// Axis-aligned bounding box of Omega.
  Vec lower() const;
  Vec upper() const;
  /// Half of the inradius-like width: R for balls, (R_out - R_in)/2 for
  /// annuli, half the shortest side for boxes.
  double half_width() const;
};

const char* to_string(Shape shape);
Shape shape_from_string(const std::string& name);

}  // namespace tow

#include "tow/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tow/errors.hpp"

namespace tow {

void DomainSpec::validate() const {
  if (dim < 2 || dim > 3) throw Error(ErrorKind::UnsupportedDimension, "domains exist for N = 2 and N = 3");
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  switch (shape) {
    case Shape::Ball:
      if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "ball radius must be positive");
      break;
    case Shape::Annulus:
      if (!(inner_radius > 0.0) || !(radius > inner_radius))
        throw Error(ErrorKind::InvalidArgument, "annulus needs 0 < inner_radius < radius");
      break;
    case Shape::Box:
      for (int d = 0; d < dim; ++d)
        if (!(box_max[d] > box_min[d])) throw Error(ErrorKind::InvalidArgument, "box needs min < max");
      break;
  }
  if (!(eps < 0.5 * half_width()))
    throw Error(ErrorKind::InvalidArgument, "eps must be smaller than half of the domain half-width");
}

bool DomainSpec::contains(const Vec& x) const {
  switch (shape) {
    case Shape::Ball: return norm(x - center, dim) < radius;
    case Shape::Annulus: {
      const double r = norm(x - center, dim);
      return r > inner_radius && r < radius;
    }
    case Shape::Box:
      for (int d = 0; d < dim; ++d)
        if (!(x[d] > box_min[d] && x[d] < box_max[d])) return false;
      return true;
  }
  return false;
}

double DomainSpec::distance_outside(const Vec& x) const {
  switch (shape) {
    case Shape::Ball: return std::max(0.0, norm(x - center, dim) - radius);
    case Shape::Annulus: {
      const double r = norm(x - center, dim);
      return std::max({0.0, r - radius, inner_radius - r});
    }
    case Shape::Box: {
      double s = 0.0;
      for (int d = 0; d < dim; ++d) {
        const double e = std::max({0.0, box_min[d] - x[d], x[d] - box_max[d]});
        s += e * e;
      }
      return std::sqrt(s);
    }
  }
  return 0.0;
}

double DomainSpec::distance_to_boundary(const Vec& x) const {
  switch (shape) {
    case Shape::Ball: return std::abs(radius - norm(x - center, dim));
    case Shape::Annulus: {
      const double r = norm(x - center, dim);
      return std::min(std::abs(r - inner_radius), std::abs(radius - r));
    }
    case Shape::Box: {
      if (!contains(x)) return distance_outside(x);
      double m = std::numeric_limits<double>::infinity();
      for (int d = 0; d < dim; ++d) m = std::min({m, x[d] - box_min[d], box_max[d] - x[d]});
      return m;
    }
  }
  return 0.0;
}

Vec DomainSpec::project_to_boundary(const Vec& x) const {
  const Vec rel = x - center;
  const double r = norm(rel, dim);
  Vec dir{1.0, 0.0, 0.0};
  if (r > 0.0) dir = scaled(rel, 1.0 / r);
  switch (shape) {
    case Shape::Ball: return center + scaled(dir, radius);
    case Shape::Annulus:
      return center + scaled(dir, (r - inner_radius < radius - r) ? inner_radius : radius);
    case Shape::Box: {
      Vec y = x;
      for (int d = 0; d < dim; ++d) y[d] = std::clamp(y[d], box_min[d], box_max[d]);
      if (contains(x)) {
        int best = 0;
        double gap = std::numeric_limits<double>::infinity();
        bool upper_side = false;
        for (int d = 0; d < dim; ++d) {
          if (x[d] - box_min[d] < gap) gap = x[d] - box_min[d], best = d, upper_side = false;
          if (box_max[d] - x[d] < gap) gap = box_max[d] - x[d], best = d, upper_side = true;
        }
        y[best] = upper_side ? box_max[best] : box_min[best];
      }
      return y;
    }
  }
  return x;
}

Vec DomainSpec::lower() const {
  if (shape == Shape::Box) return box_min;
  Vec v{};
  for (int d = 0; d < dim; ++d) v[d] = center[d] - radius;
  return v;
}

Vec DomainSpec::upper() const {
  if (shape == Shape::Box) return box_max;
  Vec v{};
  for (int d = 0; d < dim; ++d) v[d] = center[d] + radius;
  return v;
}

double DomainSpec::half_width() const {
  switch (shape) {
    case Shape::Ball: return radius;
    case Shape::Annulus: return 0.5 * (radius - inner_radius);
    case Shape::Box: {
      double m = std::numeric_limits<double>::infinity();
      for (int d = 0; d < dim; ++d) m = std::min(m, 0.5 * (box_max[d] - box_min[d]));
      return m;
    }
  }
  return 0.0;
}

const char* to_string(Shape shape) {
  switch (shape) {
    case Shape::Ball: return "ball";
    case Shape::Box: return "box";
    case Shape::Annulus: return "annulus";
  }
  return "unknown";
}

Shape shape_from_string(const std::string& name) {
  if (name == "ball") return Shape::Ball;
  if (name == "box") return Shape::Box;
  if (name == "annulus") return Shape::Annulus;
  throw Error(ErrorKind::InvalidArgument, "unknown domain shape '" + name + "'");
}

}  // namespace tow

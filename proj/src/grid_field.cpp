#include "tow/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "tow/errors.hpp"

namespace tow {

const char* to_string(NodeClass c) {
  switch (c) {
    case NodeClass::Interior: return "interior";
    case NodeClass::Collar: return "collar";
    case NodeClass::Exterior: return "exterior";
  }
  return "unknown";
}

GridField::GridField(int dim, std::array<std::int64_t, 3> first_index,
                     std::array<std::int64_t, 3> counts, double dx)
    : dim_(dim), dx_(dx), first_(first_index), counts_(counts) {
  if (dim < 2 || dim > 3) throw Error(ErrorKind::UnsupportedDimension, "grid fields exist for N = 2 and N = 3");
  if (!(dx > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
  for (int d = dim; d < 3; ++d) first_[d] = 0, counts_[d] = 1;
  std::int64_t total = 1;
  for (int d = 0; d < 3; ++d) {
    if (counts_[d] < 1) throw Error(ErrorKind::InvalidArgument, "grid counts must be positive");
    strides_[d] = total;
    total *= counts_[d];
  }
  values_.assign(static_cast<std::size_t>(total), 0.0);
  classes_.assign(static_cast<std::size_t>(total), NodeClass::Exterior);
}

GridField GridField::cover(const DomainSpec& domain, double dx) {
  domain.validate();
  if (!(dx > 0.0) || !(dx <= domain.eps))
    throw Error(ErrorKind::InvalidArgument, "grid spacing must lie in (0, eps]");
  const int dim = domain.dim;
  const double thickness = domain.eps + (std::sqrt(static_cast<double>(dim)) + 1.0) * dx;
  const Vec lo = domain.lower();
  const Vec hi = domain.upper();
  std::array<std::int64_t, 3> first{0, 0, 0}, counts{1, 1, 1};
  for (int d = 0; d < dim; ++d) {
    first[d] = static_cast<std::int64_t>(std::floor((lo[d] - thickness) / dx)) - 1;
    const auto last = static_cast<std::int64_t>(std::ceil((hi[d] + thickness) / dx)) + 1;
    counts[d] = last - first[d] + 1;
  }
  GridField field(dim, first, counts, dx);
  field.thickness_ = thickness;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Vec x = field.coords(i);
    if (domain.contains(x))
      field.classes_[i] = NodeClass::Interior;
    else if (domain.distance_outside(x) <= thickness)
      field.classes_[i] = NodeClass::Collar;
  }
  return field;
}

std::array<std::int64_t, 3> GridField::lattice(std::size_t idx) const {
  std::array<std::int64_t, 3> l{0, 0, 0};
  auto rest = static_cast<std::int64_t>(idx);
  for (int d = 2; d >= 0; --d) {
    l[d] = rest / strides_[d] + first_[d];
    rest %= strides_[d];
  }
  return l;
}

Vec GridField::coords(std::size_t idx) const {
  const auto l = lattice(idx);
  Vec x{};
  for (int d = 0; d < dim_; ++d) x[d] = static_cast<double>(l[d]) * dx_;
  return x;
}

std::size_t GridField::index(const std::array<std::int64_t, 3>& l) const {
  std::int64_t idx = 0;
  for (int d = 0; d < dim_; ++d) {
    const std::int64_t k = l[d] - first_[d];
    if (k < 0 || k >= counts_[d]) throw Error(ErrorKind::OutOfDomain, "lattice index outside the grid");
    idx += k * strides_[d];
  }
  return static_cast<std::size_t>(idx);
}

std::vector<std::size_t> GridField::nodes_of(NodeClass c) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < classes_.size(); ++i)
    if (classes_[i] == c) out.push_back(i);
  return out;
}

void GridField::fill(NodeClass c, const std::function<double(const Vec&)>& fn) {
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (classes_[i] == c) values_[i] = fn(coords(i));
}

bool GridField::try_interpolate(const Vec& x, double& out) const {
  std::int64_t base = 0;
  double frac[3] = {0.0, 0.0, 0.0};
  std::int64_t cell[3] = {0, 0, 0};
  for (int d = 0; d < dim_; ++d) {
    const double pos = x[d] / dx_ - static_cast<double>(first_[d]);
    if (!(pos >= 0.0) || pos > static_cast<double>(counts_[d] - 1)) return false;
    double c = std::floor(pos);
    if (c >= static_cast<double>(counts_[d] - 1)) c = static_cast<double>(counts_[d] - 1);
    cell[d] = static_cast<std::int64_t>(c);
    frac[d] = pos - c;
    base += cell[d] * strides_[d];
  }
  double acc = 0.0;
  const int corners = 1 << dim_;
  for (int mask = 0; mask < corners; ++mask) {
    double w = 1.0;
    std::int64_t idx = base;
    for (int d = 0; d < dim_; ++d) {
      if (mask & (1 << d)) {
        w *= frac[d];
        idx += strides_[d];
      } else {
        w *= 1.0 - frac[d];
      }
    }
    if (w == 0.0) continue;
    for (int d = 0; d < dim_; ++d)
      if ((mask & (1 << d)) && cell[d] + 1 >= counts_[d]) return false;
    if (classes_[static_cast<std::size_t>(idx)] == NodeClass::Exterior) return false;
    acc += w * values_[static_cast<std::size_t>(idx)];
  }
  out = acc;
  return true;
}

double GridField::interpolate(const Vec& x) const {
  double v = 0.0;
  if (!try_interpolate(x, v)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "point (%.6g, %.6g, %.6g) is not covered by the grid", x[0], x[1], x[2]);
    throw Error(ErrorKind::OutOfDomain, buf);
  }
  return v;
}

bool GridField::same_lattice(const GridField& other) const {
  return dim_ == other.dim_ && dx_ == other.dx_ && first_ == other.first_ && counts_ == other.counts_;
}

std::size_t GridField::nearest(const Vec& x) const {
  std::int64_t idx = 0;
  for (int d = 0; d < dim_; ++d) {
    auto k = static_cast<std::int64_t>(std::llround(x[d] / dx_)) - first_[d];
    k = std::clamp<std::int64_t>(k, 0, counts_[d] - 1);
    idx += k * strides_[d];
  }
  return static_cast<std::size_t>(idx);
}

void GridField::write_csv(std::ostream& out) const {
  for (int d = 0; d < dim_; ++d) out << 'x' << (d + 1) << ',';
  out << "value,class\n";
  char buf[64];
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const Vec x = coords(i);
    for (int d = 0; d < dim_; ++d) {
      std::snprintf(buf, sizeof buf, "%.17g,", x[d]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,", values_[i]);
    out << buf << to_string(classes_[i]) << '\n';
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing grid CSV");
}

}  // namespace tow

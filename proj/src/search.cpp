#include "tow/search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tow/errors.hpp"

namespace tow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Best {
  double value;
  Vec z;
};

// sign = +1 maximizes, -1 minimizes.
Best golden_refine(const std::function<double(const Vec&)>& f, double center, double half,
                   double tol, double sign, Best incumbent, int& evals) {
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = center - half, b = center + half;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = sign * f(direction_from_angle(c)), fd = sign * f(direction_from_angle(d));
  evals += 2;
  while (b - a > tol) {
    if (fc >= fd) {
      b = d, d = c, fd = fc;
      c = b - invphi * (b - a);
      fc = sign * f(direction_from_angle(c));
    } else {
      a = c, c = d, fc = fd;
      d = a + invphi * (b - a);
      fd = sign * f(direction_from_angle(d));
    }
    ++evals;
  }
  const double m = 0.5 * (a + b);
  const Vec zm = direction_from_angle(m);
  const double fm = sign * f(zm);
  ++evals;
  if (fm > sign * incumbent.value) return {sign * fm, zm};
  return incumbent;
}

Vec tangent_step(const Vec& z, const Vec& e1, const Vec& e2, double a, double b) {
  return normalized(axpy(b, e2, axpy(a, e1, z)), 3);
}

void tangent_basis(const Vec& z, Vec& e1, Vec& e2) {
  const Vec helper = std::abs(z[0]) < 0.9 ? Vec{1.0, 0.0, 0.0} : Vec{0.0, 1.0, 0.0};
  e1 = normalized(axpy(-dot(helper, z, 3), z, helper), 3);
  e2 = {z[1] * e1[2] - z[2] * e1[1], z[2] * e1[0] - z[0] * e1[2], z[0] * e1[1] - z[1] * e1[0]};
}

// Parabola vertex offset through (-h, fm), (0, f0), (h, fp), clamped to [-h, h];
// 0 when the curvature points the wrong way.
double vertex_offset(double fm, double f0, double fp, double h) {
  const double curv = fp - 2.0 * f0 + fm;
  if (!(curv < 0.0)) return 0.0;
  const double off = 0.5 * h * (fm - fp) / curv;
  return std::clamp(off, -h, h);
}

Best sphere_refine(const std::function<double(const Vec&)>& f, Best start, double h, double tol,
                   double sign, int& evals) {
  Best cur{sign * start.value, start.z};
  while (h > tol) {
    Vec e1, e2;
    tangent_basis(cur.z, e1, e2);
    const double f1p = sign * f(tangent_step(cur.z, e1, e2, h, 0.0));
    const double f1m = sign * f(tangent_step(cur.z, e1, e2, -h, 0.0));
    const double f2p = sign * f(tangent_step(cur.z, e1, e2, 0.0, h));
    const double f2m = sign * f(tangent_step(cur.z, e1, e2, 0.0, -h));
    evals += 4;
    Best next = cur;
    auto consider = [&](double v, const Vec& z) {
      if (v > next.value) next = {v, z};
    };
    consider(f1p, tangent_step(cur.z, e1, e2, h, 0.0));
    consider(f1m, tangent_step(cur.z, e1, e2, -h, 0.0));
    consider(f2p, tangent_step(cur.z, e1, e2, 0.0, h));
    consider(f2m, tangent_step(cur.z, e1, e2, 0.0, -h));
    const double a = vertex_offset(f1m, cur.value, f1p, h);
    const double b = vertex_offset(f2m, cur.value, f2p, h);
    if (a != 0.0 || b != 0.0) {
      const Vec zq = tangent_step(cur.z, e1, e2, a, b);
      consider(sign * f(zq), zq);
      ++evals;
    }
    if (next.value > cur.value) {
      cur = next;
    } else {
      h *= 0.5;
    }
  }
  return {sign * cur.value, cur.z};
}

}  // namespace

int default_coarse_count(int dim) { return dim == 2 ? 64 : 256; }

Vec direction_from_angle(double theta) { return {std::cos(theta), std::sin(theta), 0.0}; }

std::vector<Vec> fibonacci_sphere(int count) {
  std::vector<Vec> pts;
  pts.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double zc = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - zc * zc));
    const double phi = golden * i;
    pts.push_back(normalized({r * std::cos(phi), r * std::sin(phi), zc}, 3));
  }
  return pts;
}

Extrema search_extrema(int dim, const std::function<double(const Vec&)>& objective,
                       const SearchConfig& config) {
  const int m = config.coarse > 0 ? config.coarse : default_coarse_count(dim);
  if (m < 4) throw Error(ErrorKind::InvalidArgument, "direction search needs at least 4 coarse candidates");
  if (!(config.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "search tolerance must be positive");
  Extrema out;
  int evals = 0;
  if (dim == 2) {
    int imax = 0, imin = 0;
    std::vector<double> vals(m);
    for (int i = 0; i < m; ++i) {
      vals[i] = objective(direction_from_angle(kTwoPi * i / m));
      if (vals[i] > vals[imax]) imax = i;
      if (vals[i] < vals[imin]) imin = i;
    }
    evals += m;
    const double step = kTwoPi / m;
    const Best hi = golden_refine(objective, step * imax, step, config.tol, 1.0,
                                  {vals[imax], direction_from_angle(step * imax)}, evals);
    const Best lo = golden_refine(objective, step * imin, step, config.tol, -1.0,
                                  {vals[imin], direction_from_angle(step * imin)}, evals);
    out = {hi.value, hi.z, lo.value, lo.z, evals};
    return out;
  }
  if (dim != 3) throw Error(ErrorKind::UnsupportedDimension, "direction search exists for N = 2 and N = 3");
  const auto pts = fibonacci_sphere(m);
  int imax = 0, imin = 0;
  std::vector<double> vals(m);
  for (int i = 0; i < m; ++i) {
    vals[i] = objective(pts[i]);
    if (vals[i] > vals[imax]) imax = i;
    if (vals[i] < vals[imin]) imin = i;
  }
  evals += m;
  const double h0 = std::sqrt(4.0 * std::numbers::pi / m);
  const Best hi = sphere_refine(objective, {vals[imax], pts[imax]}, h0, config.tol, 1.0, evals);
  const Best lo = sphere_refine(objective, {vals[imin], pts[imin]}, h0, config.tol, -1.0, evals);
  out = {hi.value, hi.z, lo.value, lo.z, evals};
  return out;
}

}  // namespace tow

#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace tow {

/// Points and directions live in at most three dimensions; unused trailing
/// components are kept at zero so the dimension only matters to callers.
using Vec = std::array<double, 3>;

inline double dot(const Vec& a, const Vec& b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += a[d] * b[d];
  return s;
}

inline double norm(const Vec& a, int dim) { return std::sqrt(dot(a, a, dim)); }

inline Vec axpy(double alpha, const Vec& x, const Vec& y) {
  return {alpha * x[0] + y[0], alpha * x[1] + y[1], alpha * x[2] + y[2]};
}

inline Vec scaled(const Vec& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator-(const Vec& a) { return {-a[0], -a[1], -a[2]}; }

inline Vec normalized(const Vec& a, int dim) {
  const double n = norm(a, dim);
  return scaled(a, 1.0 / n);
}

}  // namespace tow

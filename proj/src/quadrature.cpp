#include "tow/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "tow/errors.hpp"

namespace tow {

GaussLegendre gauss_legendre(int count) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre needs at least one node");
  GaussLegendre gl;
  gl.nodes.resize(count);
  gl.weights.resize(count);
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= count; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = count * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[i] = -x;
    gl.nodes[count - 1 - i] = x;
    gl.weights[i] = w;
    gl.weights[count - 1 - i] = w;
  }
  if (count % 2 == 1) gl.nodes[count / 2] = 0.0;
  return gl;
}

QuadratureRule build_rule(const KernelParams& params, int axial_count, int cross_count) {
  const int dim = params.dim();
  if (dim > 3) throw Error(ErrorKind::UnsupportedDimension, "quadrature rules exist for N = 2 and N = 3 only");
  if (axial_count < 4 || cross_count < 4)
    throw Error(ErrorKind::InvalidArgument, "quadrature node counts must be at least 4");

  const double p = params.p();
  QuadratureRule rule;
  rule.dim = dim;
  rule.p = p;

  const GaussLegendre axial = gauss_legendre(axial_count);
  for (int i = 0; i < axial_count; ++i) {
    const double sigma = 0.5 * (axial.nodes[i] + 1.0);
    const double w_sigma = 0.5 * axial.weights[i];
    const double one_minus_sigma2 = 1.0 - sigma * sigma;
    const double log_s = std::log1p(-one_minus_sigma2 * one_minus_sigma2);
    const double t = std::exp(log_s / (p - 1.0));
    const double one_minus_t2 = -std::expm1(2.0 * log_s / (p - 1.0));
    const double ds = 4.0 * sigma * one_minus_sigma2;
    const double section = std::pow(one_minus_t2, 0.5 * (dim - 1));
    rule.axial_nodes.push_back({t, w_sigma * ds / (p - 1.0) * section});
  }

  const GaussLegendre cross = gauss_legendre(cross_count);
  if (dim == 2) {
    for (int j = 0; j < cross_count; ++j) rule.cross_nodes.push_back({{cross.nodes[j], 0.0, 0.0}, cross.weights[j]});
  } else {
    const int angles = cross_count;
    for (int k = 0; k < cross_count; ++k) {
      const double r = 0.5 * (cross.nodes[k] + 1.0);
      const double w_r = 0.5 * cross.weights[k] * r;
      for (int m = 0; m < angles; ++m) {
        const double phi = 2.0 * std::numbers::pi * (m + 0.5) / angles;
        rule.cross_nodes.push_back(
            {{r * std::cos(phi), r * std::sin(phi), 0.0}, w_r * 2.0 * std::numbers::pi / angles});
      }
    }
  }

  const double norm = 1.0 / (params.gamma() * unit_ball_volume(dim));
  double total = 0.0;
  rule.nodes.reserve(rule.axial_nodes.size() * rule.cross_nodes.size());
  for (const auto& a : rule.axial_nodes) {
    const double rho = std::sqrt(std::max(0.0, 1.0 - a.t * a.t));
    for (const auto& c : rule.cross_nodes) {
      rule.nodes.push_back({a.t, rho * c.y[0], rho * c.y[1]});
      const double w = a.weight * c.weight * norm;
      rule.weights.push_back(w);
      total += w;
    }
  }
  rule.normalization_defect = total - 1.0;
  return rule;
}

Frame::Frame(const Vec& z, int dim) {
  const double n = norm(z, dim);
  if (!(std::abs(n - 1.0) <= 1e-12))
    throw Error(ErrorKind::InvalidArgument, "direction must be a unit vector");
  if (dim == 2) {
    m_[0][0] = z[0];
    m_[1][0] = z[1];
    m_[0][1] = -z[1];
    m_[1][1] = z[0];
    m_[2][2] = 1.0;
    return;
  }
  if (dim != 3) throw Error(ErrorKind::UnsupportedDimension, "frames exist for N = 2 and N = 3 only");
  const Vec v{1.0 - z[0], -z[1], -z[2]};
  const double vv = dot(v, v, 3);
  for (int i = 0; i < 3; ++i) m_[i][i] = 1.0;
  if (vv < 1e-30) return;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m_[i][j] -= 2.0 * v[i] * v[j] / vv;
}

}  // namespace tow

#include "tow/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tow/errors.hpp"
#include "tow/rng.hpp"
#include "tow/search.hpp"

namespace tow {

namespace {

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

// Halton points inside B_Lambda, the origin, and points on the sphere of
// radius Lambda (delta u is continuous, so the sup over the open ball equals
// the max over its closure).
std::vector<Vec> candidate_points(int dim, double lambda, int samples) {
  std::vector<Vec> pts{Vec{}};
  const std::uint64_t bases[3] = {2, 3, 5};
  for (std::uint64_t i = 1; static_cast<int>(pts.size()) <= samples; ++i) {
    Vec h{};
    for (int d = 0; d < dim; ++d) h[d] = lambda * (2.0 * radical_inverse(i, bases[d]) - 1.0);
    if (norm(h, dim) < lambda) pts.push_back(h);
  }
  if (dim == 2) {
    for (int j = 0; j < 256; ++j) pts.push_back(scaled(direction_from_angle(2.0 * std::numbers::pi * j / 256), lambda));
  } else {
    for (const Vec& z : fibonacci_sphere(256)) pts.push_back(scaled(z, lambda));
  }
  return pts;
}

template <class U>
double delta_at(U&& u, const Vec& x, double ux, const Vec& h, double eps) {
  return u(axpy(eps, h, x)) + u(axpy(-eps, h, x)) - 2.0 * ux;
}

// sign = +1 for the supremum, -1 for the infimum.
template <class U>
double extreme_delta(U&& u, const Vec& x, double ux, const ExtremalParams& params, double eps, int dim,
                     double sign, double& final_step) {
  const auto pts = candidate_points(dim, params.lambda, params.samples);
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) scored.push_back({-sign * delta_at(u, x, ux, pts[i], eps), i});
  const std::size_t keep = std::min<std::size_t>(8, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end());

  double best = -sign * scored[0].first;
  const double start_step = params.lambda * std::pow(1.0 / params.samples, 1.0 / dim);
  const double min_step = 1e-7 * params.lambda;
  for (std::size_t c = 0; c < keep; ++c) {
    Vec h = pts[scored[c].second];
    double val = -sign * scored[c].first;
    double step = start_step;
    while (step > min_step) {
      bool moved = false;
      for (int d = 0; d < dim && !moved; ++d) {
        for (double s : {step, -step}) {
          Vec trial = h;
          trial[d] += s;
          const double n = norm(trial, dim);
          if (n > params.lambda) trial = scaled(trial, params.lambda / n);
          const double v = delta_at(u, x, ux, trial, eps);
          if (sign * v > sign * val) {
            h = trial, val = v, moved = true;
            break;
          }
        }
      }
      if (!moved) step *= 0.5;
    }
    if (sign * val > sign * best) best = val;
    final_step = min_step;
  }
  return best;
}

template <class U>
PucciValue pucci(U&& u, const Vec& x, const ExtremalParams& params, const KernelParams& kernel, double sign) {
  params.validate();
  const int dim = kernel.dim();
  const double eps = kernel.eps();
  const double ux = u(x);
  PucciValue out;
  out.extreme = extreme_delta(u, x, ux, params, eps, dim, sign, out.step);
  const KernelParams uniform(dim, 2.0, eps);
  const QuadratureRule rule = build_rule(uniform, params.quad, params.quad);
  Vec e1{};
  e1[0] = 1.0;
  const ScalarFn fn = [&](const Vec& y) { return u(y); };
  out.mean = apply(rule, fn, x, e1, uniform) + apply(rule, fn, x, -e1, uniform) - 2.0 * ux;
  out.value = (params.alpha * out.extreme + params.beta * out.mean) / (2.0 * eps * eps);
  return out;
}

}  // namespace

ExtremalParams ExtremalParams::for_kernel(const KernelParams& kernel) {
  if (kernel.p() > 2.0)
    throw Error(ErrorKind::ExponentOutOfRange,
                "extremal inequalities do not hold for p > 2: the decomposition measure has a negative density");
  ExtremalParams e;
  e.beta = 1.0 / (2.0 * kernel.gamma());
  e.alpha = 1.0 - e.beta;
  return e;
}

void ExtremalParams::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1)");
  if (!(beta > 0.0) || std::abs(alpha + beta - 1.0) > 1e-12)
    throw Error(ErrorKind::InvalidArgument, "beta must be positive with alpha + beta = 1");
  if (!(lambda >= 1.0)) throw Error(ErrorKind::InvalidArgument, "Lambda must be at least 1");
  if (samples < 16) throw Error(ErrorKind::InvalidArgument, "extremal search needs at least 16 samples");
  if (quad < 4) throw Error(ErrorKind::InvalidArgument, "quadrature count must be at least 4");
}

double second_difference(const GridField& field, const Vec& x, const Vec& h, double eps) {
  return field.interpolate(axpy(eps, h, x)) + field.interpolate(axpy(-eps, h, x)) - 2.0 * field.interpolate(x);
}

double second_difference(const ScalarFn& u, const Vec& x, const Vec& h, double eps) {
  return u(axpy(eps, h, x)) + u(axpy(-eps, h, x)) - 2.0 * u(x);
}

PucciValue pucci_plus(const GridField& field, const Vec& x, const ExtremalParams& params, const KernelParams& kernel) {
  return pucci([&](const Vec& y) { return field.interpolate(y); }, x, params, kernel, 1.0);
}

PucciValue pucci_plus(const ScalarFn& u, const Vec& x, const ExtremalParams& params, const KernelParams& kernel) {
  return pucci(u, x, params, kernel, 1.0);
}

PucciValue pucci_minus(const GridField& field, const Vec& x, const ExtremalParams& params, const KernelParams& kernel) {
  return pucci([&](const Vec& y) { return field.interpolate(y); }, x, params, kernel, -1.0);
}

PucciValue pucci_minus(const ScalarFn& u, const Vec& x, const ExtremalParams& params, const KernelParams& kernel) {
  return pucci(u, x, params, kernel, -1.0);
}

double symmetric_quotient(const QuadratureRule& rule, const GridField& field, const Vec& x, const Vec& z,
                          const KernelParams& kernel) {
  const double eps = kernel.eps();
  return (apply(rule, field, x, z, kernel) + apply(rule, field, x, -z, kernel) - 2.0 * field.interpolate(x)) /
         (2.0 * eps * eps);
}

ExtremalReport verify_extremal_inequalities(const GridField& solution, const DppProblem& problem,
                                            std::span<const Vec> sample_nodes, double slack, int samples) {
  ExtremalReport rep;
  rep.params = ExtremalParams::for_kernel(problem.params);
  rep.params.samples = samples;
  rep.slack = slack;
  rep.worst_plus = rep.worst_minus = std::numeric_limits<double>::infinity();
  for (const Vec& x : sample_nodes) {
    if (!problem.domain.contains(x)) throw Error(ErrorKind::OutOfDomain, "extremal checks need interior points");
    ExtremalNode node;
    node.x = x;
    node.f = problem.f(x);
    node.lplus = pucci_plus(solution, x, rep.params, problem.params).value;
    node.lminus = pucci_minus(solution, x, rep.params, problem.params).value;
    node.margin_plus = node.lplus + node.f;
    node.margin_minus = -(node.lminus + node.f);
    rep.worst_plus = std::min(rep.worst_plus, node.margin_plus);
    rep.worst_minus = std::min(rep.worst_minus, node.margin_minus);
    if (node.margin_plus < -slack || node.margin_minus < -slack) rep.ok = false;
    rep.nodes.push_back(node);
  }
  return rep;
}

std::vector<Vec> sample_interior_nodes(const GridField& field, int count, std::uint64_t seed) {
  std::vector<std::size_t> idx = field.nodes_of(NodeClass::Interior);
  Philox rng(seed, 0x51de);
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(std::max(0, count)), idx.size());
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(idx.size() - i));
    std::swap(idx[i], idx[std::min(j, idx.size() - 1)]);
  }
  std::vector<Vec> out;
  for (std::size_t i = 0; i < take; ++i) out.push_back(field.coords(idx[i]));
  return out;
}

namespace {

double axial_abs(int dim, const Vec& z, const Vec& h) {
  if (std::abs(norm(z, dim) - 1.0) > 1e-12) throw Error(ErrorKind::InvalidArgument, "z must be a unit vector");
  if (norm(h, dim) > 1.0) throw Error(ErrorKind::InvalidArgument, "h must lie in the unit ball");
  return std::abs(dot(z, h, dim));
}

}  // namespace

double decomposition_density(double p, int dim, const Vec& z, const Vec& h) {
  if (p == 2.0) throw Error(ErrorKind::DegenerateDecomposition, "p = 2 gives gamma = 1/2 and a zero denominator");
  const double t = axial_abs(dim, z, h);
  return (std::pow(t, p - 2.0) - 1.0) / (2.0 * gamma_constant(dim, p) - 1.0);
}

double decomposition_density(double p, int dim, const Vec& z, const Vec& h, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorKind::InvalidArgument, "beta must lie in (0, 1)");
  const double t = axial_abs(dim, z, h);
  return (std::pow(t, p - 2.0) / (2.0 * gamma_constant(dim, p)) - beta) / (1.0 - beta);
}

double decomposition_alpha(double p, int dim) { return 1.0 - 1.0 / (2.0 * gamma_constant(dim, p)); }

}  // namespace tow

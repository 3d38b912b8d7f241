#include "tow/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tow/errors.hpp"
#include "tow/rng.hpp"

namespace tow {

namespace {

template <class Eval>
double apply_rule(const QuadratureRule& rule, Eval&& eval, const Vec& x, const Vec& z,
                  const KernelParams& params) {
  if (rule.dim != params.dim() || rule.p != params.p())
    throw Error(ErrorKind::InvalidArgument, "quadrature rule was built for different kernel parameters");
  const Frame frame(z, params.dim());
  const double eps = params.eps();
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const Vec y = axpy(eps, frame.apply(rule.nodes[k]), x);
    acc += rule.weights[k] * eval(y);
  }
  return acc;
}

template <class Eval>
double probe(const QuadratureRule& rule, Eval&& eval, const Vec& x, const KernelParams& params,
             std::span<const DirectionPair> pairs, double delta) {
  double worst = 0.0;
  for (const auto& pr : pairs) {
    if (norm(pr.z - pr.w, params.dim()) > delta) continue;
    if (pr.z == pr.w) continue;
    const double a = apply_rule(rule, eval, x, pr.z, params);
    const double b = apply_rule(rule, eval, x, pr.w, params);
    worst = std::max(worst, std::abs(a - b));
  }
  return worst;
}

Vec rotate_in_plane(const Vec& z, const Vec& t, double angle) {
  return axpy(std::sin(angle), t, scaled(z, std::cos(angle)));
}

}  // namespace

double apply(const QuadratureRule& rule, const GridField& field, const Vec& x, const Vec& z,
             const KernelParams& params) {
  return apply_rule(rule, [&](const Vec& y) { return field.interpolate(y); }, x, z, params);
}

double apply(const QuadratureRule& rule, const ScalarFn& u, const Vec& x, const Vec& z,
             const KernelParams& params) {
  return apply_rule(rule, u, x, z, params);
}

Vec random_direction(int dim, std::uint64_t seed, std::uint64_t stream) {
  Philox rng(seed, stream);
  for (;;) {
    Vec v{};
    for (int d = 0; d < dim; ++d) v[d] = rng.symmetric();
    const double n = norm(v, dim);
    if (n > 1e-3 && n <= 1.0) return scaled(v, 1.0 / n);
  }
}

std::vector<DirectionPair> probe_pairs(int dim, int count, double delta, std::uint64_t seed) {
  std::vector<DirectionPair> out;
  out.reserve(count);
  Philox rng(seed, 0x9a11);
  for (int i = 0; i < count; ++i) {
    const Vec z = random_direction(dim, seed, static_cast<std::uint64_t>(i));
    // Unit tangent to z, then rotate by an angle whose chord is <= delta.
    Vec t = random_direction(dim, seed ^ 0x5bd1e995u, static_cast<std::uint64_t>(i));
    t = axpy(-dot(t, z, dim), z, t);
    const double tn = norm(t, dim);
    t = tn > 1e-12 ? scaled(t, 1.0 / tn) : Vec{-z[1], z[0], 0.0};
    const double max_angle = 2.0 * std::asin(std::min(1.0, 0.5 * delta));
    const double angle = rng.uniform() * max_angle;
    out.push_back({z, normalized(rotate_in_plane(z, t, angle), dim)});
  }
  return out;
}

double continuity_probe(const QuadratureRule& rule, const GridField& field, const Vec& x,
                        const KernelParams& params, std::span<const DirectionPair> pairs, double delta) {
  return probe(rule, [&](const Vec& y) { return field.interpolate(y); }, x, params, pairs, delta);
}

double continuity_probe(const QuadratureRule& rule, const ScalarFn& u, const Vec& x,
                        const KernelParams& params, std::span<const DirectionPair> pairs, double delta) {
  return probe(rule, u, x, params, pairs, delta);
}

}  // namespace tow

#include <cmath>

#include "doctest.h"
#include "tow/averaging.hpp"
#include "tow/quadrature.hpp"
#include "tow/rng.hpp"

using namespace tow;

namespace {

Vec random_unit(int dim, Philox& r) {
  for (;;) {
    Vec v{};
    for (int d = 0; d < dim; ++d) v[d] = r.symmetric();
    const double n = norm(v, dim);
    if (n > 0.1 && n <= 1.0) return scaled(v, 1.0 / n);
  }
}

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto gl = gauss_legendre(8);
  double s0 = 0.0, s14 = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    s0 += gl.weights[i];
    s14 += gl.weights[i] * std::pow(gl.nodes[i], 14);
  }
  CHECK(s0 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("averages reproduce constants, linear and quadratic moments") {
  Philox r(2024, 0);
  for (int dim : {2, 3})
    for (double p : {1.25, 1.5, 2.0, 3.0}) {
      const KernelParams k(dim, p, 0.3);
      const QuadratureRule rule = build_rule(k, 32, 32);
      CHECK(std::abs(rule.normalization_defect) <= 1e-10);
      for (int trial = 0; trial < 5; ++trial) {
        const Vec x{r.symmetric(), r.symmetric(), dim == 3 ? r.symmetric() : 0.0};
        const Vec z = random_unit(dim, r);
        const Vec a = random_unit(dim, r);
        const double c1 = k.first_moment_ratio();
        const double one = apply(rule, [](const Vec&) { return 1.0; }, x, z, k);
        CHECK(std::abs(one - 1.0) <= 1e-10);

        const ScalarFn lin = [&](const Vec& y) { return dot(a, y, dim) + 0.5; };
        CHECK(std::abs(apply(rule, lin, x, z, k) - (lin(x) + k.eps() * c1 * dot(a, z, dim))) <= 1e-8);

        // u = |y|^2 + 3 y1 y2 with Hessian H: second-order term
        // eps^2/(2(N+p)) (tr H + (p-2) z^T H z).
        const ScalarFn quad = [&](const Vec& y) { return dot(y, y, dim) + 3.0 * y[0] * y[1]; };
        const Vec grad{2 * x[0] + 3 * x[1], 2 * x[1] + 3 * x[0], 2 * x[2]};
        const double tr = 2.0 * dim;
        const double zhz = 2.0 * dot(z, z, dim) + 6.0 * z[0] * z[1];
        const double eps = k.eps();
        const double expect =
            quad(x) + eps * c1 * dot(grad, z, dim) + eps * eps * (tr + (p - 2.0) * zhz) / (2.0 * (dim + p));
        CHECK(std::abs(apply(rule, quad, x, z, k) - expect) <= 1e-8);
      }
    }
}

TEST_CASE("a rule built for one eps serves another") {
  const KernelParams k(2, 1.5, 0.1);
  const QuadratureRule rule = build_rule(k, 32, 32);
  const KernelParams k2 = k.with_eps(0.37);
  const ScalarFn lin = [](const Vec& y) { return y[0]; };
  CHECK(apply(rule, lin, Vec{}, Vec{1, 0, 0}, k2) == doctest::Approx(0.37 * k2.first_moment_ratio()).epsilon(1e-12));
}

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tow/averaging.hpp"
#include "tow/domain.hpp"
#include "tow/lattice.hpp"
#include "tow/quadrature.hpp"
#include "tow/rng.hpp"
#include "tow/search.hpp"

using namespace tow;

TEST_CASE("direction search on a linear objective") {
  const Vec a2{0.6, -0.8, 0.0};
  const Extrema e2 = search_extrema(2, [&](const Vec& z) { return dot(a2, z, 2); });
  CHECK(e2.max_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e2.min_value == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(norm(e2.argmax - a2, 2) < 1e-6);
  CHECK(norm(e2.argmin + a2, 2) < 1e-6);

  const Vec a3 = normalized(Vec{1, 2, -2}, 3);
  const Extrema e3 = search_extrema(3, [&](const Vec& z) { return dot(a3, z, 3); });
  CHECK(e3.max_value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(norm(e3.argmax - a3, 3) < 1e-4);
  CHECK(norm(e3.argmin + a3, 3) < 1e-4);
}

TEST_CASE("search returns unit vectors and counts evaluations") {
  const Extrema e = search_extrema(2, [](const Vec& z) { return z[0] * z[1]; });
  CHECK(norm(e.argmax, 2) == doctest::Approx(1.0));
  CHECK(e.max_value == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(e.min_value == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(e.evaluations >= default_coarse_count(2));
}

TEST_CASE("fibonacci sphere points are unit and spread") {
  const auto pts = fibonacci_sphere(256);
  CHECK(pts.size() == 256);
  Vec mean{};
  for (const Vec& p : pts) {
    CHECK(norm(p, 3) == doctest::Approx(1.0).epsilon(1e-12));
    mean = mean + p;
  }
  CHECK(norm(mean, 3) / 256 < 0.01);
}

TEST_CASE("continuity probe of a smooth function is small") {
  const KernelParams k(2, 1.5, 0.1);
  const QuadratureRule rule = build_rule(k, 32, 32);
  const ScalarFn u = [](const Vec& y) { return std::sin(y[0]) + y[1] * y[1]; };
  const auto pairs = probe_pairs(2, 16, 1e-3, 9);
  CHECK(pairs.size() == 16);
  for (const auto& pr : pairs) CHECK(norm(pr.z - pr.w, 2) <= 1e-3 + 1e-15);
  // |I^z u - I^w u| <= eps c1 |grad u| |z - w| + O(eps^2 |z - w|)
  const double c = continuity_probe(rule, u, Vec{0.2, 0.1, 0}, k, pairs, 1e-3);
  CHECK(c >= 0.0);
  CHECK(c < 2.0 * k.eps() * k.first_moment_ratio() * 1.1 * 1e-3);
}

TEST_CASE("lattice stencils are exact on quadratics and monotone") {
  for (int dim : {2, 3}) {
    DomainSpec d;
    d.dim = dim;
    d.radius = 1.0;
    d.eps = 0.2;
    const double dx = 0.05;
    const KernelParams k(dim, 1.5, 0.2);
    // smaller rule and bank in 3D keep the build short; exactness does not depend on them
    const QuadratureRule rule = dim == 2 ? build_rule(k, 32, 32) : build_rule(k, 16, 16);
    GridField g = GridField::cover(d, dx);
    const auto q = [dim](const Vec& y) { return dot(y, y, dim) + y[0] * y[1] - 0.3 * y[0]; };
    for (std::size_t i = 0; i < g.size(); ++i) g.value(i) = q(g.coords(i));
    StencilBank::Options opt;
    if (dim == 3) opt.bank = 512, opt.coarse = 64;
    const StencilBank bank(g, k, rule, opt);
    CHECK(bank.moment_defect() < 1e-12);
    CHECK(bank.reach() * dx <= g.collar_thickness());

    const std::size_t node = g.nearest(Vec{0.3, -0.2, dim == 3 ? 0.1 : 0.0});
    const Vec x = g.coords(node);
    const Vec grad{2 * x[0] + x[1] - 0.3, 2 * x[1] + x[0], 2 * x[2]};
    const double tr = 2.0 * dim;
    Philox r(3, 0);
    for (int t = 0; t < 8; ++t) {
      const int b = static_cast<int>(r.uniform() * bank.size());
      const Vec z = bank.direction(b);
      const double zhz = 2.0 * dot(z, z, dim) + 2.0 * z[0] * z[1];
      const double expect = q(x) + k.eps() * k.first_moment_ratio() * dot(grad, z, dim) +
                            k.eps() * k.eps() * (tr + (1.5 - 2.0) * zhz) / (2.0 * (dim + 1.5));
      CHECK(bank.apply(b, g.values().data(), node) == doctest::Approx(expect).epsilon(1e-11));
    }

    // monotone: raising values never lowers an average
    std::vector<double> up = g.values();
    for (double& v : up) v += r.uniform();
    for (int b = 0; b < bank.size(); b += 97)
      CHECK(bank.apply(b, up.data(), node) >= bank.apply(b, g.values().data(), node));

    StencilBank::Choice hi, lo;
    bank.extrema(g.values().data(), node, -1, -1, hi, lo);
    CHECK(hi.value >= lo.value);
    const int best = bank.nearest(normalized(grad, dim));
    CHECK(hi.value >= bank.apply(best, g.values().data(), node) - 1e-12);
  }
}

#include <cmath>

#include "doctest.h"
#include "tow/harness.hpp"
#include "tow/rng.hpp"

using namespace tow;

namespace {

const double kLadder[] = {0.2, 0.1, 0.05, 0.025};

Mat3 diag(double a, double b, double c) {
  Mat3 m{};
  m[0][0] = a, m[1][1] = b, m[2][2] = c;
  return m;
}

}  // namespace

TEST_CASE("fitted order of an exact power law") {
  const double r[] = {8e-3, 1e-3, 1.25e-4, 1.5625e-5};
  CHECK(fitted_order(kLadder, r) == doctest::Approx(3.0).epsilon(1e-12));
  const double zeros[] = {0, 0, 0, 0};
  CHECK(std::isinf(fitted_order(kLadder, zeros)));
}

TEST_CASE("expansion is exact on quadratics") {
  Philox rng(17, 0);
  Mat3 a = diag(1.0, -0.5, 2.0);
  a[0][1] = a[1][0] = 0.3;
  const SmoothFunction u = smooth_quadratic(a, Vec{0.2, -1.0, 0.5}, 0.7);
  for (int dim : {2, 3})
    for (double p : {1.25, 1.5, 1.75, 2.0, 3.0})
      for (int t = 0; t < 2; ++t) {
        const Vec x{rng.symmetric(), rng.symmetric(), dim == 3 ? rng.symmetric() : 0.0};
        Vec z{rng.symmetric(), rng.symmetric(), dim == 3 ? rng.symmetric() : 0.0};
        z = normalized(z, dim);
        const ExpansionReport rep = check_expansion(u, x, z, dim, p, kLadder);
        for (double r : rep.measured_remainders) CHECK(r <= 1e-8);
      }
}

TEST_CASE("expansion on linear functions has no second-order term") {
  const SmoothFunction u = smooth_linear(Vec{1.0, -2.0, 0.0});
  CHECK(directional_operator(u.hessian(Vec{}), Vec{1, 0, 0}, 2, 1.5) == 0.0);
  const ExpansionReport rep = check_expansion(u, Vec{0.3, 0.1, 0}, Vec{0, 1, 0}, 2, 1.5, kLadder);
  for (double r : rep.measured_remainders) CHECK(r <= 1e-10);
}

TEST_CASE("expansion remainder of cos(x1) decays faster than eps^2") {
  const ExpansionReport rep = check_expansion(smooth_cos_x1(), Vec{}, Vec{1, 0, 0}, 2, 1.5, kLadder);
  CHECK(rep.fitted_order > 2.5);
}

TEST_CASE("normalized limit") {
  const SmoothFunction q = smooth_quadratic(diag(1, 1, 1), Vec{}, 0.0);
  CHECK(normalized_p_laplacian(q, Vec{0.5, 0.2, 0}, 2, 1.5) == doctest::Approx(2.0 * (2 + 1.5 - 2)));
  const ExpansionReport rep = check_normalized_limit(q, Vec{0.5, 0.2, 0}, 2, 1.5, kLadder);
  for (double r : rep.measured_remainders) CHECK(r <= 1e-8);

  const ExpansionReport c = check_normalized_limit(smooth_cos_x1(), Vec{1, 0, 0}, 2, 1.5, kLadder);
  CHECK(c.measured_remainders.back() < c.measured_remainders.front());
  CHECK(c.fitted_order >= 1.0);

  try {
    check_normalized_limit(q, Vec{}, 2, 1.5, kLadder);
    FAIL("accepted a vanishing gradient");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateGradient);
  }
}

TEST_CASE("radial p-harmonic function") {
  // |x|^((p-N)/(p-1)) solves the normalized p-Laplace equation away from 0
  for (double p : {1.5, 3.0, 4.0}) {
    const SmoothFunction u = smooth_radial_power((p - 2.0) / (p - 1.0), 2);
    CHECK(std::abs(normalized_p_laplacian(u, Vec{0.7, -0.4, 0}, 2, p)) < 1e-12);
  }
  const SmoothFunction u3 = smooth_radial_power((1.5 - 3.0) / 0.5, 3);
  CHECK(std::abs(normalized_p_laplacian(u3, Vec{0.7, -0.4, 0.2}, 3, 1.5)) < 1e-10);
}

TEST_CASE("midpoint expansion and alignment") {
  const SmoothFunction q = smooth_quadratic(diag(1, 1, 1), Vec{}, 0.0);
  const ExpansionReport rep = check_midpoint_expansion(q, Vec{0.5, 0.2, 0}, 2, 1.5, kLadder);
  for (double r : rep.measured_remainders) CHECK(r <= 1e-8);
  for (double a : rep.alignment_angles) CHECK(a < 1e-4);

  const ExpansionReport lin = check_midpoint_expansion(smooth_linear(Vec{1, 1, 0}), Vec{0.1, 0, 0}, 2, 1.5, kLadder);
  for (double r : lin.measured_remainders) CHECK(r <= 1e-12);
}

TEST_CASE("holder quotient of constant and linear fields") {
  DomainSpec d;
  d.eps = 0.1;
  GridField g = GridField::cover(d, 0.05);
  g.fill(NodeClass::Interior, [](const Vec&) { return 4.0; });
  const HolderReport c = holder_quotient(g, 1.0, 0.5, 0.1);
  CHECK(c.quotient_sup == 0.0);
  CHECK(c.pair_count > 0);

  const Vec a{0.6, 0.8, 0};
  g.fill(NodeClass::Interior, [&](const Vec& x) { return dot(a, x, 2); });
  const HolderReport l = holder_quotient(g, 1.0, 1.0, 0.1);
  CHECK(l.quotient_sup <= 1.0 + 1e-12);
  CHECK(l.quotient_sup > 0.5);

  const HolderReport f = holder_quotient(g, 1.0, std::nullopt, 0.1);
  CHECK(f.fitted);
  CHECK(f.gamma > 0.0);
  CHECK(f.gamma <= 1.0);
}

TEST_CASE("convergence study on an exact case") {
  DppProblem base;
  base.params = KernelParams(2, 1.5, 0.2);
  base.domain.eps = 0.2;
  base.f = [](const Vec&) { return 0.0; };
  base.g = [](const Vec& x) { return 2.0 * x[0] + x[1]; };
  const double ladder[] = {0.2, 0.15};
  const ConvergenceTable t = convergence_study(base, ladder, base.g, 0.25);
  REQUIRE(t.rows.size() == 2);
  for (const auto& r : t.rows) {
    CHECK(r.sup_error < 1e-9);
    CHECK(r.probe_nodes > 0);
    CHECK(r.probe_nodes < r.interior_nodes);
  }
  CHECK(t.nonincreasing);
  CHECK(in_probe_region(base.domain, Vec{0.4, 0, 0}));
  CHECK_FALSE(in_probe_region(base.domain, Vec{0.6, 0, 0}));
}

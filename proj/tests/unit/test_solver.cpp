#include <cmath>

#include "doctest.h"
#include "tow/dpp_solver.hpp"

using namespace tow;

namespace {

DppProblem small_problem(double p = 1.5) {
  DppProblem prob;
  prob.domain.radius = 1.0;
  prob.domain.eps = 0.2;
  prob.params = KernelParams(2, p, 0.2);
  prob.dx = 0.05;
  prob.f = [](const Vec&) { return 0.0; };
  prob.f_label = "zero";
  prob.g = [](const Vec& x) { return x[0] - 0.5 * x[1]; };
  prob.g_label = "linear";
  return prob;
}

double sup_error(const SolveReport& rep, const ScalarFn& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < rep.solution.size(); ++i)
    if (rep.solution.node_class(i) == NodeClass::Interior)
      e = std::max(e, std::abs(rep.solution.value(i) - exact(rep.solution.coords(i))));
  return e;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("linear data are reproduced exactly") {
  const DppProblem prob = small_problem();
  const SolveReport rep = solve(prob);
  CHECK(rep.converged);
  CHECK(rep.final_residual <= rep.tol);
  CHECK(rep.tol == doctest::Approx(1e-9 * 1.2));
  CHECK(rep.monotone_ok);
  CHECK(rep.apriori_bound_ok);
  CHECK(sup_error(rep, prob.g) < 1e-9);
  CHECK(rep.residual_history.size() == static_cast<std::size_t>(rep.iterations) + 1);
}

TEST_CASE("quadratic data with the matching source are reproduced exactly") {
  for (double p : {1.25, 3.0}) {
    DppProblem prob = small_problem(p);
    const double c = -(2 + p - 2) / (2 + p);
    prob.f = [c](const Vec&) { return c; };
    prob.g = [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; };
    const SolveReport rep = solve(prob);
    CHECK(rep.converged);
    CHECK(sup_error(rep, prob.g) < 1e-9);
  }
}

TEST_CASE("constant data give a constant solution") {
  DppProblem prob = small_problem();
  prob.g = [](const Vec&) { return 2.5; };
  const SolveReport rep = solve(prob);
  CHECK(sup_error(rep, prob.g) < 1e-12);
}

TEST_CASE("initializations agree and start below the solution") {
  DppProblem prob = small_problem();
  prob.g = [](const Vec& x) { return x[0] > 0 ? 1.0 : 0.0; };
  const SolveReport a = solve(prob);
  prob.init = InitKind::GExtension;
  const SolveReport b = solve(prob);
  for (std::size_t i = 0; i < a.solution.size(); ++i)
    CHECK(std::abs(a.solution.value(i) - b.solution.value(i)) <= 10.0 * a.tol);

  const GridField u0 = initial_subsolution(prob);
  for (std::size_t i = 0; i < u0.size(); ++i)
    if (u0.node_class(i) == NodeClass::Interior) CHECK(u0.value(i) <= a.solution.value(i));
}

TEST_CASE("comparison of ordered data") {
  const DppProblem lo = small_problem();
  DppProblem hi = small_problem();
  hi.g = [](const Vec& x) { return x[0] - 0.5 * x[1] + 0.25 * x[1] * x[1]; };
  const SolveReport u = solve(lo), v = solve(hi);
  CHECK(comparison_check(lo, u, v, 1e-8));
  CHECK(kind_of([&] { comparison_check(lo, v, u, 1e-8); }) == ErrorKind::MismatchedProblems);

  DppProblem other = small_problem();
  other.f_label = "other";
  const SolveReport w = solve(other);
  CHECK(kind_of([&] { comparison_check(lo, u, w, 1e-8); }) == ErrorKind::MismatchedProblems);
}

TEST_CASE("iteration cap raises with the partial result") {
  DppProblem prob = small_problem();
  prob.max_iter = 1;
  try {
    solve(prob);
    FAIL("expected NotConverged");
  } catch (const NotConvergedError& e) {
    CHECK(e.kind() == ErrorKind::NotConverged);
    CHECK(e.partial().iterations == 1);
    CHECK_FALSE(e.partial().converged);
    CHECK(e.partial().monotone_ok);
  }
}

TEST_CASE("jacobi sweeps increase monotonically from the subsolution") {
  DppProblem prob = small_problem();
  prob.scheme = Scheme::Jacobi;
  prob.max_iter = 30;
  try {
    solve(prob);
    FAIL("expected NotConverged");
  } catch (const NotConvergedError& e) {
    const auto& h = e.partial().residual_history;
    CHECK(e.partial().monotone_ok);
    CHECK(h.back() < h.front());
  }
}

TEST_CASE("problem validation") {
  DppProblem prob = small_problem();
  prob.dx = 0.1;
  CHECK(kind_of([&] { solve(prob); }) == ErrorKind::InvalidArgument);
  prob = small_problem();
  prob.domain.eps = 0.1;
  CHECK(kind_of([&] { solve(prob); }) == ErrorKind::InvalidArgument);
  prob = small_problem();
  prob.f = nullptr;
  CHECK(kind_of([&] { solve(prob); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("continuous right-hand side on linear data") {
  const DppProblem prob = small_problem();
  const QuadratureRule rule = build_rule(prob.params, 32, 32);
  const Vec x{0.1, 0.2, 0};
  const RhsResult r = dpp_rhs(prob.g, x, prob, rule);
  const double shift = prob.params.eps() * prob.params.first_moment_ratio() * std::sqrt(1.25);
  CHECK(r.value == doctest::Approx(prob.g(x)).epsilon(1e-12));
  CHECK(r.sup_value == doctest::Approx(prob.g(x) + shift).epsilon(1e-10));
  CHECK(r.inf_value == doctest::Approx(prob.g(x) - shift).epsilon(1e-10));
  CHECK(std::abs(r.argmax[0] - 1.0 / std::sqrt(1.25)) < 1e-5);
}

TEST_CASE("a priori bound") {
  CHECK(apriori_bound(1.0, 0.0, 0.1, 1.0) == 1.0);
  // k = ceil(4 / 0.25) = 16
  CHECK(apriori_bound(1.0, 1.0, 0.5, 1.0) == doctest::Approx(1.0 + std::ldexp(1.0, 33) * 0.25));
  CHECK(std::isinf(apriori_bound(1.0, 1.0, 0.01, 1.0)));
}

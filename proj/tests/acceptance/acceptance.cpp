// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Pass criterion numbers as arguments to run a subset.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "tow/dpp_solver.hpp"
#include "tow/extremal.hpp"
#include "tow/game.hpp"
#include "tow/harness.hpp"
#include "tow/kernel.hpp"
#include "tow/quadrature.hpp"
#include "tow/rng.hpp"

using namespace tow;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const MomentKind kKinds[] = {MomentKind::Gamma,  MomentKind::FirstMomentRatio, MomentKind::AxialP,
                             MomentKind::Cross,  MomentKind::Radial,           MomentKind::ShellFraction};

DppProblem disc_problem(double p, double eps, ScalarFn g, std::string g_label, double f_value = 0.0,
                        std::string f_label = "zero") {
  DppProblem prob;
  prob.domain.radius = 1.0;
  prob.domain.eps = eps;
  prob.params = KernelParams(2, p, eps);
  prob.dx = eps / 8.0;
  prob.f = [f_value](const Vec&) { return f_value; };
  prob.f_label = std::move(f_label);
  prob.g = std::move(g);
  prob.g_label = std::move(g_label);
  return prob;
}

DppProblem quadratic_problem(double p, double eps) {
  const double k = (2.0 + p - 2.0) / (2.0 + p);
  return disc_problem(
      p, eps, [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; }, "quadratic", -k, "quadratic-compatible");
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double interior_error(const SolveReport& rep, const ScalarFn& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < rep.solution.size(); ++i)
    if (rep.solution.node_class(i) == NodeClass::Interior)
      e = std::max(e, std::abs(rep.solution.value(i) - exact(rep.solution.coords(i))));
  return e;
}

// Kernel constants and moment identities, Monte Carlo cross-check.
Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  for (int n : {2, 3}) o.require(std::abs(gamma_constant(n, 2.0) - 0.5) <= 1e-12, "gamma(N,2) = 1/2");
  double worst_identity = 0.0, worst_ratio = 0.0;
  for (int n : {2, 3})
    for (double p : {1.1, 1.5, 1.9, 2.0, 3.0, 5.0}) {
      const MomentTable t = moment_table(KernelParams(n, p, 1.0));
      const double d[] = {
          std::abs(t.axial_p_moment + (n - 1) * t.cross_moment - t.radial_moment),
          std::abs(t.axial_p_moment - (p - 1) / (n + p)),
          std::abs(t.radial_moment - (n + p - 2) / (n + p)),
          std::abs(t.shell_fraction - (0.5 - std::pow(2.0, -(n + p - 1)))),
          std::abs(t.first_moment_ratio - gamma_constant(n, p + 1) / gamma_constant(n, p)),
      };
      for (double v : d) worst_identity = std::max(worst_identity, v);
      for (MomentKind k : kKinds) {
        const McEstimate e = mc_moment_oracle(n, p, k, 1000000, 20240 + n);
        worst_ratio = std::max(worst_ratio, std::abs(e.estimate - closed_form(n, p, k)) / e.std_error);
      }
    }
  // direct high-precision integrals of the kernel over the unit ball
  const struct {
    int n;
    double p, gamma;
  } refs[] = {{2, 1.5, 1.1128357888987642}, {2, 3.0, 0.21220659078919378}, {3, 1.5, 1.2}, {3, 5.0, 0.0625}};
  for (const auto& r : refs)
    worst_identity = std::max(worst_identity, std::abs(gamma_constant(r.n, r.p) - r.gamma) / r.gamma);
  o.require(worst_identity <= 1e-12, "identities within 1e-12");
  o.require(worst_ratio <= 4.0, "MC within 4 SE");
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime under one minute");
  o.note("max identity defect " + fmt("%.2e", worst_identity) + ", max |MC - closed|/SE " + fmt("%.2f", worst_ratio) +
         " over 72 checks at 1e6 samples, " + fmt("%.1f s", secs));
  return o;
}

// Averages reproduce constants and first/second moments.
Outcome criterion2() {
  Outcome o;
  Philox rng(77, 0);
  double worst_const = 0.0, worst_poly = 0.0;
  for (int n : {2, 3})
    for (double p : {1.25, 1.5, 2.0, 3.0}) {
      const KernelParams k(n, p, 0.25);
      const QuadratureRule rule = build_rule(k, 32, 32);
      for (int t = 0; t < 10; ++t) {
        Vec x{}, z{}, a{};
        for (int d = 0; d < n; ++d) x[d] = rng.symmetric(), z[d] = rng.symmetric(), a[d] = rng.symmetric();
        z = normalized(z, n);
        worst_const = std::max(worst_const, std::abs(apply(rule, [](const Vec&) { return 1.0; }, x, z, k) - 1.0));
        const ScalarFn lin = [&](const Vec& y) { return dot(a, y, n) - 0.3; };
        worst_poly = std::max(worst_poly, std::abs(apply(rule, lin, x, z, k) -
                                                   (lin(x) + k.eps() * k.first_moment_ratio() * dot(a, z, n))));
        // u = |y|^2 + y1 y2: gradient 2x + (x2, x1), Hessian 2I + offdiag 1
        const ScalarFn quad = [&](const Vec& y) { return dot(y, y, n) + y[0] * y[1]; };
        const Vec grad{2 * x[0] + x[1], 2 * x[1] + x[0], 2 * x[2]};
        const double zhz = 2.0 + 2.0 * z[0] * z[1];
        const double expect = quad(x) + k.eps() * k.first_moment_ratio() * dot(grad, z, n) +
                              k.eps() * k.eps() * (2.0 * n + (p - 2.0) * zhz) / (2.0 * (n + p));
        worst_poly = std::max(worst_poly, std::abs(apply(rule, quad, x, z, k) - expect));
      }
    }
  o.require(worst_const <= 1e-10, "constants within 1e-10");
  o.require(worst_poly <= 1e-8, "linear/quadratic moments within 1e-8");
  o.note("constant defect " + fmt("%.2e", worst_const) + ", moment defect " + fmt("%.2e", worst_poly));
  return o;
}

// Exact discrete solutions on the unit disc.
Outcome criterion3() {
  Outcome o;
  const Vec a{1.0, 0.5, 0.0};
  const ScalarFn lin = [a](const Vec& x) { return dot(a, x, 2); };
  const DppProblem pa = disc_problem(1.5, 0.1, lin, "linear");
  const DppProblem pb = quadratic_problem(1.5, 0.1);
  for (const DppProblem* prob : {&pa, &pb}) {
    const SolveReport rep = solve(*prob);
    const double err = interior_error(rep, prob->g);
    o.require(err <= 1e-3, prob->g_label + " sup error");
    o.require(rep.final_residual <= 1e-9, prob->g_label + " residual");
    o.require(rep.monotone_ok, prob->g_label + " monotone iteration");
    o.require(rep.apriori_bound_ok, prob->g_label + " a priori bound");
    o.note(prob->g_label + ": error " + fmt("%.1e", err) + ", residual " + fmt("%.1e", rep.final_residual) + ", " +
           std::to_string(rep.iterations) + " iterations, " + fmt("%.0f s", rep.seconds));
  }
  return o;
}

// Comparison principle and independence of the starting point.
Outcome criterion4() {
  Outcome o;
  struct Pair {
    ScalarFn lo, hi;
    const char* name;
  };
  const Pair pairs[] = {
      {[](const Vec& x) { return x[0]; }, [](const Vec& x) { return x[0] + 0.3 * x[1] * x[1] + 0.05; }, "smooth"},
      {[](const Vec& x) { return sign(x[0]); }, [](const Vec& x) { return sign(x[0]) + 0.1 * std::exp(x[1]); },
       "sign"},
  };
  for (const Pair& pr : pairs) {
    const DppProblem plo = disc_problem(1.5, 0.1, pr.lo, std::string(pr.name) + "-low");
    const DppProblem phi = disc_problem(1.5, 0.1, pr.hi, std::string(pr.name) + "-high");
    const SolveReport u = solve(plo), v = solve(phi);
    double gap = INFINITY;
    for (std::size_t i = 0; i < u.solution.size(); ++i)
      if (u.solution.node_class(i) == NodeClass::Interior)
        gap = std::min(gap, v.solution.value(i) - u.solution.value(i));
    o.require(comparison_check(plo, u, v, 1e-8), std::string(pr.name) + " ordering");
    o.note(std::string(pr.name) + ": min(v - u) " + fmt("%.2e", gap));
  }
  DppProblem prob = disc_problem(1.5, 0.1, pairs[1].lo, "sign");
  const SolveReport a = solve(prob);
  prob.init = InitKind::GExtension;
  const SolveReport b = solve(prob);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.solution.size(); ++i)
    diff = std::max(diff, std::abs(a.solution.value(i) - b.solution.value(i)));
  o.require(diff <= 10.0 * a.tol, "initializations agree within 10 tol");
  o.note("subsolution vs g-extension start: " + fmt("%.1e", diff) + " (10 tol = " + fmt("%.1e", 10.0 * a.tol) + ")");
  return o;
}

// Extremal inequalities for 1 < p < 2 and their failure for p > 2.
Outcome criterion5() {
  Outcome o;
  double worst = INFINITY;
  for (double p : {1.25, 1.5, 1.9}) {
    const DppProblem problems[] = {
        quadratic_problem(p, 0.1),
        disc_problem(p, 0.1, [](const Vec& x) { return sign(x[0]); }, "sign"),
    };
    for (DppProblem prob : problems) {
      prob.init = InitKind::GExtension;
      const SolveReport rep = solve(prob);
      const auto nodes = sample_interior_nodes(rep.solution, 100, 5);
      const ExtremalReport ex = verify_extremal_inequalities(rep.solution, prob, nodes, 1e-6);
      o.require(ex.ok && nodes.size() == 100, "p = " + fmt("%g", p) + " " + prob.g_label);
      worst = std::min({worst, ex.worst_plus, ex.worst_minus});
    }
  }
  o.note("worst margin over 600 node checks " + fmt("%.2e", worst));

  // 1 < p < 2: the split density is nonnegative on a dense sample
  const Vec z{1.0, 0.0, 0.0};
  double min_low = INFINITY, min3 = INFINITY, max3 = -INFINITY, min3_default = INFINITY;
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 40; ++j) {
      const Vec h{-1.0 + i / 20.0, -1.0 + j / 20.0, 0.0};
      if (norm(h, 2) > 1.0) continue;
      for (double p : {1.25, 1.5, 1.9}) min_low = std::min(min_low, decomposition_density(p, 2, z, h));
      min3_default = std::min(min3_default, decomposition_density(3.0, 2, z, h));
      for (double beta : {0.1, 0.5, 0.9}) {
        const double d = decomposition_density(3.0, 2, z, h, beta);
        min3 = std::min(min3, d);
        max3 = std::max(max3, d);
      }
    }
  o.require(min_low >= 0.0, "nonnegative split density for 1 < p < 2");
  o.require(min3 < 0.0 && max3 > 0.0, "sign change of the split density at p = 3");
  o.require(decomposition_alpha(3.0, 2) < 0.0 && min3_default >= 0.0,
            "p = 3 default split: nonnegative density but negative uniform weight");
  bool refused = false;
  try {
    ExtremalParams::for_kernel(KernelParams(2, 3.0, 0.1));
  } catch (const Error& e) {
    refused = e.kind() == ErrorKind::ExponentOutOfRange;
  }
  o.require(refused, "p = 3 refused with ExponentOutOfRange");
  o.note("p = 3: split density range [" + fmt("%.2f", min3) + ", " + fmt("%.2f", max3) + "], alpha " +
         fmt("%.3f", decomposition_alpha(3.0, 2)) + ", refused");
  return o;
}

// Game value against the solver, and the step sampler.
Outcome criterion6() {
  Outcome o;
  GameConfig cfg;
  cfg.problem = quadratic_problem(1.5, 0.1);
  cfg.paths = 100000;
  cfg.seed = 2024;
  const SolveReport rep = solve(cfg.problem);
  const GameStats st = play(cfg, &rep);
  const Discrepancy d = value_vs_solver(cfg, st, rep);
  o.require(std::abs(d.difference) <= 4.0 * d.std_error, "|mean - u(0)| <= 4 SE");
  o.require(d.std_error <= 0.02, "SE <= 0.02");
  o.note("mean " + fmt("%.5f", d.mean_payoff) + ", u(0) " + fmt("%.5f", d.solver_value) + ", SE " +
         fmt("%.5f", d.std_error) + ", " + fmt("%.1f", st.mean_exit_steps) + " steps per path");

  double worst = 0.0;
  for (int n : {2, 3})
    for (double p : {1.25, 1.5, 3.0}) {
      const KernelParams k(n, p, 1.0);
      const MomentTable t = moment_table(k);
      Vec zz{};
      for (int dd = 0; dd < n; ++dd) zz[dd] = 1.0 + dd;
      zz = normalized(zz, n);
      Philox r(99, static_cast<std::uint64_t>(10 * n + p));
      const int m = 1000000;
      double s[4] = {}, q[4] = {};
      for (int i = 0; i < m; ++i) {
        const Vec h = sample_step(Vec{}, zz, k, r);
        const double ax = dot(h, zz, n), r2 = dot(h, h, n);
        const double v[4] = {ax, ax * ax, (r2 - ax * ax) / (n - 1), r2};
        for (int c = 0; c < 4; ++c) s[c] += v[c], q[c] += v[c] * v[c];
      }
      const double want[4] = {t.first_moment_ratio, t.axial_p_moment, t.cross_moment, t.radial_moment};
      for (int c = 0; c < 4; ++c) {
        const double mean = s[c] / m, se = std::sqrt((q[c] / m - mean * mean) / m);
        worst = std::max(worst, std::abs(mean - want[c]) / se);
      }
    }
  o.require(worst <= 4.0, "sampler moments within 4 SE");
  o.note("sampler max |mean - closed|/SE " + fmt("%.2f", worst) + " over 24 checks at 1e6 draws");
  return o;
}

// Asymptotic expansion.
Outcome criterion7() {
  Outcome o;
  const double ladder[] = {0.2, 0.1, 0.05, 0.025};
  Philox rng(7, 7);
  Mat3 a{};
  a[0][0] = 1.0, a[1][1] = -0.7, a[2][2] = 0.4, a[0][1] = a[1][0] = 0.25, a[1][2] = a[2][1] = -0.5;
  const SmoothFunction q = smooth_quadratic(a, Vec{0.3, -0.2, 0.9}, 1.0);
  double worst = 0.0;
  for (int n : {2, 3})
    for (double p : {1.25, 1.5, 1.75, 2.0, 3.0})
      for (int t = 0; t < 10; ++t) {
        Vec x{}, z{};
        for (int d = 0; d < n; ++d) x[d] = rng.symmetric(), z[d] = rng.symmetric();
        z = normalized(z, n);
        for (double r : check_expansion(q, x, z, n, p, ladder).measured_remainders) worst = std::max(worst, r);
      }
  o.require(worst <= 1e-8, "quadratic remainders within 1e-8");
  const ExpansionReport c = check_expansion(smooth_cos_x1(), Vec{}, Vec{1.0, 0.0, 0.0}, 2, 1.5, ladder);
  o.require(c.fitted_order >= 2.5, "fitted order on cos(y1)");
  o.note("quadratic max remainder " + fmt("%.1e", worst) + ", cos(y1) fitted order " + fmt("%.3f", c.fitted_order));
  return o;
}

// Convergence on the annulus and eps-uniform Holder quotient.
Outcome criterion8() {
  Outcome o;
  const double p = 1.5;
  const double k = (p - 2.0) / (p - 1.0);  // (p - N)/(p - 1) = -1 for N = 2
  const SmoothFunction exact = smooth_radial_power(k, 2);
  double worst_op = 0.0;
  for (double r : {0.5, 0.8, 1.2, 1.5})
    for (double th : {0.0, 1.0, 2.5}) {
      const Vec x{r * std::cos(th), r * std::sin(th), 0.0};
      worst_op = std::max(worst_op, std::abs(normalized_p_laplacian(exact, x, 2, p)));
    }
  o.require(k == -1.0 && worst_op <= 1e-10, "exact solution is normalized p-harmonic");

  DppProblem base;
  base.domain.shape = Shape::Annulus;
  base.domain.radius = 1.5;
  base.domain.inner_radius = 0.5;
  base.domain.eps = 0.2;
  base.params = KernelParams(2, p, 0.2);
  base.f = [](const Vec&) { return 0.0; };
  base.g = exact.value;
  base.g_label = "radial";
  base.init = InitKind::GExtension;
  const double ladder[] = {0.2, 0.1, 0.05};
  const ConvergenceTable t = convergence_study(base, ladder, exact.value, 0.125);
  o.require(t.nonincreasing, "annulus errors nonincreasing");
  std::string errs;
  for (const auto& row : t.rows) errs += (errs.empty() ? "" : " ") + fmt("%.2e", row.sup_error);
  o.note("|Delta_p^N u| <= " + fmt("%.0e", worst_op) + "; annulus errors " + errs);

  const DppProblem rough = [] {
    DppProblem pr = disc_problem(1.5, 0.2, [](const Vec& x) { return sign(x[0]); }, "sign");
    pr.init = InitKind::GExtension;
    return pr;
  }();
  const HolderLadder h = holder_ladder(rough, ladder, 1.0, std::nullopt, 0.25);
  o.require(h.bounded, "Holder quotient within factor 2 across eps");
  std::string qs;
  for (const auto& row : h.rows) qs += (qs.empty() ? "" : " ") + fmt("%.3f", row.holder.quotient_sup);
  o.note("sign(x1) fitted gamma " + fmt("%.2f", h.gamma) + ", quotients " + qs + ", spread " + fmt("%.2f", h.spread));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8};
  std::set<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.insert(std::atoi(argv[i]));
  int failures = 0;
  for (int c = 1; c <= static_cast<int>(criteria.size()); ++c) {
    if (!chosen.empty() && !chosen.count(c)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[c - 1]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("criterion %d: %s (%.0f s) %s\n", c, o.pass ? "PASS" : "FAIL", seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

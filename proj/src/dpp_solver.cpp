#include "tow/dpp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "tow/errors.hpp"
#include "tow/parallel.hpp"

namespace tow {

const char* to_string(Scheme s) { return s == Scheme::Policy ? "policy" : "jacobi"; }
const char* to_string(InitKind k) { return k == InitKind::Subsolution ? "subsolution" : "g-extension"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "policy") return Scheme::Policy;
  if (name == "jacobi") return Scheme::Jacobi;
  throw Error(ErrorKind::InvalidArgument, "unknown solver scheme '" + name + "'");
}

InitKind init_from_string(const std::string& name) {
  if (name == "subsolution") return InitKind::Subsolution;
  if (name == "g-extension") return InitKind::GExtension;
  throw Error(ErrorKind::InvalidArgument, "unknown solver init '" + name + "'");
}

void DppProblem::validate() const {
  domain.validate();
  if (domain.dim != params.dim()) throw Error(ErrorKind::InvalidArgument, "domain and kernel dimensions differ");
  if (std::abs(domain.eps - params.eps()) > 1e-14 * params.eps())
    throw Error(ErrorKind::InvalidArgument, "domain eps and kernel eps differ");
  if (!f || !g) throw Error(ErrorKind::InvalidArgument, "source f and boundary data g are required");
  if (!(spacing() > 0.0) || spacing() > 0.25 * params.eps() * (1.0 + 1e-12))
    throw Error(ErrorKind::InvalidArgument, "grid spacing must satisfy 0 < dx <= eps/4");
  if (tol < 0.0 || !std::isfinite(tol)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  if (max_iter < 1) throw Error(ErrorKind::InvalidArgument, "max_iter must be positive");
  if (threads < 1) throw Error(ErrorKind::InvalidArgument, "threads must be positive");
}

// ---------------------------------------------------------------------------
// continuous right-hand side

namespace {

RhsResult rhs_from_search(const std::function<double(const Vec&)>& objective, const Vec& x,
                          const DppProblem& problem) {
  if (!problem.domain.contains(x)) throw Error(ErrorKind::OutOfDomain, "dpp_rhs needs an interior point");
  const Extrema ext = search_extrema(problem.params.dim(), objective, problem.search);
  const double eps = problem.params.eps();
  RhsResult r;
  r.sup_value = ext.max_value;
  r.inf_value = ext.min_value;
  r.argmax = ext.argmax;
  r.argmin = ext.argmin;
  r.value = 0.5 * (ext.max_value + ext.min_value) + eps * eps * problem.f(x);
  return r;
}

}  // namespace

RhsResult dpp_rhs(const GridField& field, const Vec& x, const DppProblem& problem, const QuadratureRule& rule) {
  return rhs_from_search([&](const Vec& z) { return apply(rule, field, x, z, problem.params); }, x, problem);
}

RhsResult dpp_rhs(const GridField& field, const Vec& x, const DppProblem& problem) {
  return dpp_rhs(field, x, problem, build_rule(problem.params, problem.quad_axial, problem.quad_cross));
}

RhsResult dpp_rhs(const ScalarFn& u, const Vec& x, const DppProblem& problem, const QuadratureRule& rule) {
  return rhs_from_search([&](const Vec& z) { return apply(rule, u, x, z, problem.params); }, x, problem);
}

// ---------------------------------------------------------------------------
// discretization

Discretization::Discretization(const DppProblem& problem)
    : problem_(problem),
      grid_(GridField::cover(problem.domain, problem.spacing())),
      rule_(build_rule(problem.params, problem.quad_axial, problem.quad_cross)) {
  problem_.validate();
  StencilBank::Options opt;
  opt.moment_correction = problem.moment_correction;
  opt.bank = problem.bank;
  opt.coarse = problem.search.coarse;
  bank_ = std::make_unique<StencilBank>(grid_, problem.params, rule_, opt);
  if (bank_->reach() * grid_.dx() > grid_.collar_thickness())
    throw Error(ErrorKind::OutOfDomain, "stencils reach beyond the collar; grid does not cover Omega_eps");

  const double eps2 = problem.params.eps() * problem.params.eps();
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const NodeClass c = grid_.node_class(i);
    if (c == NodeClass::Exterior) continue;
    const Vec x = grid_.coords(i);
    radius_sup_ = std::max(radius_sup_, norm(x, grid_.dim()));
    if (c == NodeClass::Interior) {
      const double fx = problem.f(x);
      if (!std::isfinite(fx)) throw Error(ErrorKind::NonFinite, "source f is not finite at an interior node");
      f_sup_ = std::max(f_sup_, std::abs(fx));
      interior_.push_back(i);
      source_.push_back(eps2 * fx);
    } else {
      const double gx = problem.g(x);
      if (!std::isfinite(gx)) throw Error(ErrorKind::NonFinite, "boundary data g is not finite at a collar node");
      g_sup_ = std::max(g_sup_, std::abs(gx));
      grid_.value(i) = gx;
    }
  }
  if (interior_.empty()) throw Error(ErrorKind::InvalidArgument, "grid has no interior nodes");
  tol_ = problem.tol > 0.0 ? problem.tol : 1e-9 * std::max(1.0, g_sup_);
}

double Discretization::rhs(const std::vector<double>& u, std::size_t k, int incumbent_max, int incumbent_min,
                           StencilBank::Choice& hi, StencilBank::Choice& lo) const {
  bank_->extrema(u.data(), interior_[k], incumbent_max, incumbent_min, hi, lo);
  return 0.5 * (hi.value + lo.value) + source_[k];
}

double subsolution_coefficient(const Discretization& disc) {
  const double eps = disc.problem().params.eps();
  return 3.0 * (disc.f_sup() + disc.g_sup() / (eps * eps));
}

GridField initial_subsolution(const Discretization& disc) {
  GridField u = disc.grid();
  const double c = subsolution_coefficient(disc);
  const double r2 = disc.radius_sup() * disc.radius_sup();
  const auto& interior = disc.interior();
  for (std::size_t k = 0; k < interior.size(); ++k) {
    const Vec x = u.coords(interior[k]);
    u.value(interior[k]) = c * (dot(x, x, u.dim()) - r2) + disc.source()[k];
  }
  return u;
}

GridField initial_subsolution(const DppProblem& problem) { return initial_subsolution(Discretization(problem)); }

GridField g_extension(const Discretization& disc) {
  GridField u = disc.grid();
  for (std::size_t i : disc.interior()) u.value(i) = disc.problem().g(u.coords(i));
  return u;
}

double apriori_bound(double g_sup, double f_sup, double eps, double radius_sup) {
  if (f_sup == 0.0) return g_sup;
  const double k = std::ceil(4.0 * radius_sup * radius_sup / (eps * eps));
  const double log2_term = 2.0 * k + 1.0 + std::log2(eps * eps * f_sup);
  if (log2_term > 1000.0) return std::numeric_limits<double>::infinity();
  return g_sup + std::exp2(log2_term);
}

// ---------------------------------------------------------------------------
// solver

namespace {

class Solver {
 public:
  explicit Solver(const Discretization& disc)
      : disc_(disc),
        bank_(disc.bank()),
        nodes_(disc.interior()),
        n_(nodes_.size()),
        threads_(disc.problem().threads),
        sig_(n_, -1),
        tau_(n_, -1),
        out_(n_) {}

  SolveReport run() {
    const auto t0 = std::chrono::steady_clock::now();
    const DppProblem& prob = disc_.problem();
    const double tol = disc_.tol();
    report_.tol = tol;
    report_.dim = prob.params.dim();
    report_.p = prob.params.p();
    report_.eps = prob.params.eps();
    report_.f_label = prob.f_label;
    report_.g_label = prob.g_label;
    report_.scheme = prob.scheme;
    report_.init = prob.init;
    report_.moment_defect = bank_.moment_defect();
    monotone_slack_ = 1e-10 * std::max(1.0, disc_.g_sup() + prob.params.eps() * prob.params.eps() * disc_.f_sup());

    GridField start = prob.init == InitKind::Subsolution ? initial_subsolution(disc_) : g_extension(disc_);
    u_ = start.values();

    double best = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (;;) {
      const double res = sweep(u_, true);
      report_.residual_history.push_back(res);
      report_.final_residual = res;
      if (res <= tol) {
        // The fast search can stop at a local optimum that depends on the
        // iteration history; finish against the full bank so the fixed point
        // does not depend on the starting guess.
        if (exhaustive_) {
          report_.converged = true;
          break;
        }
        exhaustive_ = true;
        report_.residual_history.pop_back();
        best = std::numeric_limits<double>::infinity();
        stalled = 0;
        continue;
      }
      if (res < 0.5 * best) {
        best = res;
        stalled = 0;
      } else if (prob.scheme == Scheme::Policy && ++stalled > 25) {
        fail(t0, "policy iteration stalled at residual " + std::to_string(res));
      }
      if (report_.iterations >= prob.max_iter)
        fail(t0, "no convergence within max_iter = " + std::to_string(prob.max_iter));

      std::vector<double> next = u_;
      if (prob.scheme == Scheme::Jacobi) {
        for (std::size_t k = 0; k < n_; ++k) next[nodes_[k]] = out_[k];
      } else {
        evaluate_policy(next, tol);
      }
      double worst = 0.0;
      for (std::size_t i : nodes_) worst = std::min(worst, next[i] - u_[i]);
      report_.worst_monotone_step = std::min(report_.worst_monotone_step, worst);
      if (worst < -monotone_slack_) report_.monotone_ok = false;
      u_.swap(next);
      ++report_.iterations;
    }
    finish(t0);
    return std::move(report_);
  }

 private:
  // out_[k] = T u (both players greedy) or T_sigma u (sigma frozen); returns
  // sup |out - u| over the interior.
  double sweep(const std::vector<double>& u, bool update_sigma) {
    const std::size_t chunks = chunk_count(n_, threads_);
    std::vector<double> partial(chunks, 0.0);
    parallel_chunks(n_, threads_, [&](std::size_t c, std::size_t lo, std::size_t hi) {
      double worst = 0.0;
      StencilBank::Choice cmax, cmin;
      for (std::size_t k = lo; k < hi; ++k) {
        if (exhaustive_) {
          bank_.extrema_exhaustive(u.data(), nodes_[k], cmax, cmin);
        } else {
          bank_.extrema(u.data(), nodes_[k], sig_[k], tau_[k], cmax, cmin);
        }
        double top = cmax.value;
        if (update_sigma) {
          sig_[k] = cmax.index;
        } else {
          top = bank_.apply(sig_[k], u.data(), nodes_[k]);
        }
        tau_[k] = cmin.index;
        out_[k] = 0.5 * (top + cmin.value) + disc_.source()[k];
        worst = std::max(worst, std::abs(out_[k] - u[nodes_[k]]));
      }
      partial[c] = worst;
    });
    return *std::max_element(partial.begin(), partial.end());
  }

  // Value of the game with Player I frozen on sigma: Howard iteration on tau,
  // each step an exact linear solve. w enters as the warm start.
  void evaluate_policy(std::vector<double>& w, double tol) {
    // Linear residuals are amplified by the expected exit time, so both
    // tolerances sit well below the monotonicity slack.
    for (int inner = 0; inner < 100; ++inner) {
      linear_solve(w, 1e-4 * tol);
      const std::vector<int> previous = tau_;
      sweep(w, false);
      double gap = 0.0;
      for (std::size_t k = 0; k < n_; ++k) gap = std::max(gap, w[nodes_[k]] - out_[k]);
      if (tau_ == previous || gap <= 1e-4 * tol) return;
    }
  }

  // (I - A_sigma/2 - A_tau/2) w = eps^2 f on the interior, collar pinned.
  void matvec(const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t k = 0; k < n_; ++k) buf_[nodes_[k]] = x[k];
    parallel_chunks(n_, threads_, [&](std::size_t, std::size_t lo, std::size_t hi) {
      for (std::size_t k = lo; k < hi; ++k)
        y[k] = x[k] - 0.5 * (bank_.apply(sig_[k], buf_.data(), nodes_[k]) +
                             bank_.apply(tau_[k], buf_.data(), nodes_[k]));
    });
  }

  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  static double sup_norm(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
  }

  void linear_solve(std::vector<double>& w, double lin_tol) {
    ++report_.linear_solves;
    const std::vector<double>& g_full = disc_.grid().values();
    // Collar data enters the right-hand side; buf_ keeps zeros on the collar.
    std::vector<double> b(n_), x(n_), diag(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      b[k] = disc_.source()[k] + 0.5 * (bank_.apply(sig_[k], g_full.data(), nodes_[k]) +
                                         bank_.apply(tau_[k], g_full.data(), nodes_[k]));
      x[k] = w[nodes_[k]];
      diag[k] = 1.0 - 0.5 * (bank_.center_weight(sig_[k]) + bank_.center_weight(tau_[k]));
    }
    buf_.assign(disc_.grid().size(), 0.0);

    std::vector<double> r(n_), rhat(n_), p(n_, 0.0), v(n_, 0.0), s(n_), t(n_), ph(n_), sh(n_), ax(n_);
    for (int restart = 0; restart < 20; ++restart) {
      matvec(x, ax);
      for (std::size_t k = 0; k < n_; ++k) r[k] = b[k] - ax[k];
      if (sup_norm(r) <= lin_tol) break;
      rhat = r;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      double rho = 1.0, alpha = 1.0, omega = 1.0;
      for (int it = 0; it < 5000; ++it) {
        ++report_.linear_iterations;
        const double rho_new = dot(rhat, r);
        if (rho_new == 0.0 || omega == 0.0) break;
        const double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for (std::size_t k = 0; k < n_; ++k) {
          p[k] = r[k] + beta * (p[k] - omega * v[k]);
          ph[k] = p[k] / diag[k];
        }
        matvec(ph, v);
        const double rv = dot(rhat, v);
        if (rv == 0.0) break;
        alpha = rho / rv;
        for (std::size_t k = 0; k < n_; ++k) s[k] = r[k] - alpha * v[k];
        if (sup_norm(s) <= 0.5 * lin_tol) {
          for (std::size_t k = 0; k < n_; ++k) x[k] += alpha * ph[k];
          break;
        }
        for (std::size_t k = 0; k < n_; ++k) sh[k] = s[k] / diag[k];
        matvec(sh, t);
        const double tt = dot(t, t);
        omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
        for (std::size_t k = 0; k < n_; ++k) {
          x[k] += alpha * ph[k] + omega * sh[k];
          r[k] = s[k] - omega * t[k];
        }
        if (sup_norm(r) <= 0.5 * lin_tol) break;
      }
    }
    for (std::size_t k = 0; k < n_; ++k) w[nodes_[k]] = x[k];
  }

  [[noreturn]] void fail(std::chrono::steady_clock::time_point t0, const std::string& why) {
    finish(t0);
    throw NotConvergedError(why, std::make_shared<const SolveReport>(std::move(report_)));
  }

  void finish(std::chrono::steady_clock::time_point t0) {
    const DppProblem& prob = disc_.problem();
    GridField sol = disc_.grid();
    sol.values() = u_;
    report_.solution = std::move(sol);
    report_.argmax.assign(report_.solution.size(), Vec{});
    report_.argmin.assign(report_.solution.size(), Vec{});
    for (std::size_t k = 0; k < n_; ++k) {
      if (sig_[k] >= 0) report_.argmax[nodes_[k]] = bank_.direction(sig_[k]);
      if (tau_[k] >= 0) report_.argmin[nodes_[k]] = bank_.direction(tau_[k]);
    }
    double sup = 0.0;
    for (std::size_t i : nodes_) sup = std::max(sup, std::abs(u_[i]));
    report_.solution_sup = sup;
    report_.apriori_bound = apriori_bound(disc_.g_sup(), disc_.f_sup(), prob.params.eps(), disc_.radius_sup());
    report_.apriori_bound_ok = sup <= report_.apriori_bound + disc_.tol();
    report_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  const Discretization& disc_;
  const StencilBank& bank_;
  const std::vector<std::size_t>& nodes_;
  std::size_t n_;
  int threads_;
  std::vector<int> sig_, tau_;
  std::vector<double> out_;
  std::vector<double> u_;
  std::vector<double> buf_;
  double monotone_slack_ = 0.0;
  bool exhaustive_ = false;
  SolveReport report_;
};

}  // namespace

SolveReport solve(const Discretization& disc) { return Solver(disc).run(); }

SolveReport solve(const DppProblem& problem) {
  const Discretization disc(problem);
  return solve(disc);
}

bool comparison_check(const DppProblem& problem, const SolveReport& u, const SolveReport& v, double slack) {
  const GridField expected = GridField::cover(problem.domain, problem.spacing());
  if (!u.solution.same_lattice(expected) || !v.solution.same_lattice(expected))
    throw Error(ErrorKind::MismatchedProblems, "solutions do not live on the problem's lattice");
  const auto same_kernel = [&](const SolveReport& r) {
    return r.dim == problem.params.dim() && r.p == problem.params.p() && r.eps == problem.params.eps();
  };
  if (!same_kernel(u) || !same_kernel(v))
    throw Error(ErrorKind::MismatchedProblems, "solutions were computed with different kernel parameters");
  if (u.f_label != v.f_label) throw Error(ErrorKind::MismatchedProblems, "solutions use different sources f");
  const double s = slack >= 0.0 ? slack : std::max(u.tol, v.tol);
  bool ordered = true;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const double du = u.solution.value(i), dv = v.solution.value(i);
    switch (expected.node_class(i)) {
      case NodeClass::Collar:
        if (du > dv) throw Error(ErrorKind::MismatchedProblems, "boundary data are not ordered (g_u > g_v somewhere)");
        break;
      case NodeClass::Interior:
        if (du > dv + s) ordered = false;
        break;
      case NodeClass::Exterior: break;
    }
  }
  return ordered;
}

}  // namespace tow

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tow/averaging.hpp"
#include "tow/domain.hpp"
#include "tow/errors.hpp"
#include "tow/grid_field.hpp"
#include "tow/kernel.hpp"
#include "tow/lattice.hpp"
#include "tow/quadrature.hpp"
#include "tow/search.hpp"

namespace tow {

enum class Scheme { Policy, Jacobi };
enum class InitKind { Subsolution, GExtension };

const char* to_string(Scheme s);
const char* to_string(InitKind k);
Scheme scheme_from_string(const std::string& name);
InitKind init_from_string(const std::string& name);

/// u = (1/2)(sup_z I^z u + inf_z I^z u) + eps^2 f in Omega, u = g on the collar.
struct DppProblem {
  DomainSpec domain;
  KernelParams params{2, 2.0, 0.1};
  ScalarFn f;
  ScalarFn g;
  std::string f_label = "f";
  std::string g_label = "g";

  double dx = 0.0;                 ///< 0 selects eps / 8
  double tol = 0.0;                ///< 0 selects 1e-9 max(1, sup |g|)
  std::int64_t max_iter = 100000;  ///< outer updates (policy) or sweeps (jacobi)
  SearchConfig search;             ///< continuous search used by dpp_rhs
  int bank = 0;                    ///< lattice direction bank size, 0 = default
  int quad_axial = 32;
  int quad_cross = 32;
  bool moment_correction = true;
  Scheme scheme = Scheme::Policy;
  InitKind init = InitKind::Subsolution;
  int threads = 1;

  double spacing() const { return dx > 0.0 ? dx : params.eps() / 8.0; }
  /// Throws InvalidArgument on inconsistent settings (eps mismatch, dx > eps/4,
  /// missing f or g, nonpositive tol).
  void validate() const;
};

struct RhsResult {
  double value = 0.0;  ///< (sup + inf)/2 + eps^2 f(x)
  double sup_value = 0.0;
  double inf_value = 0.0;
  Vec argmax{};
  Vec argmin{};
};

/// Right-hand side of the DPP at x with the continuous direction search;
/// the field is sampled by multilinear interpolation.
RhsResult dpp_rhs(const GridField& field, const Vec& x, const DppProblem& problem);
RhsResult dpp_rhs(const GridField& field, const Vec& x, const DppProblem& problem, const QuadratureRule& rule);
/// Same with u given as a function (no interpolation).
RhsResult dpp_rhs(const ScalarFn& u, const Vec& x, const DppProblem& problem, const QuadratureRule& rule);

/// Lattice, quadrature rule and stencil bank of a problem, with f and g
/// sampled at the nodes.
class Discretization {
 public:
  explicit Discretization(const DppProblem& problem);

  const DppProblem& problem() const noexcept { return problem_; }
  const GridField& grid() const noexcept { return grid_; }
  const QuadratureRule& rule() const noexcept { return rule_; }
  const StencilBank& bank() const noexcept { return *bank_; }
  const std::vector<std::size_t>& interior() const noexcept { return interior_; }
  /// eps^2 f at the interior nodes, aligned with interior().
  const std::vector<double>& source() const noexcept { return source_; }
  double f_sup() const noexcept { return f_sup_; }
  double g_sup() const noexcept { return g_sup_; }
  /// sup |x| over the covered nodes.
  double radius_sup() const noexcept { return radius_sup_; }
  double tol() const noexcept { return tol_; }

  /// Lattice DPP right-hand side at interior position k.
  double rhs(const std::vector<double>& u, std::size_t k, int incumbent_max, int incumbent_min,
             StencilBank::Choice& hi, StencilBank::Choice& lo) const;

 private:
  DppProblem problem_;
  GridField grid_;
  QuadratureRule rule_;
  std::unique_ptr<StencilBank> bank_;
  std::vector<std::size_t> interior_;
  std::vector<double> source_;
  double f_sup_ = 0.0, g_sup_ = 0.0, radius_sup_ = 0.0, tol_ = 0.0;
};

struct SolveReport {
  GridField solution;
  std::int64_t iterations = 0;
  std::vector<double> residual_history;
  double final_residual = 0.0;
  double tol = 0.0;
  bool converged = false;
  bool apriori_bound_ok = false;
  bool monotone_ok = true;
  double apriori_bound = 0.0;  ///< +inf when it overflows double
  double solution_sup = 0.0;
  double worst_monotone_step = 0.0;  ///< most negative u_{k+1} - u_k seen
  std::int64_t linear_solves = 0;
  std::int64_t linear_iterations = 0;
  double moment_defect = 0.0;
  double seconds = 0.0;
  /// Optimizing directions of the final sweep at each node (zero off the interior).
  std::vector<Vec> argmax;
  std::vector<Vec> argmin;

  int dim = 2;
  double p = 2.0;
  double eps = 0.1;
  std::string f_label, g_label;
  Scheme scheme = Scheme::Policy;
  InitKind init = InitKind::Subsolution;
};

/// Failure to reach the tolerance within max_iter; carries the partial report.
class NotConvergedError : public Error {
 public:
  NotConvergedError(const std::string& what, std::shared_ptr<const SolveReport> partial)
      : Error(ErrorKind::NotConverged, what), partial_(std::move(partial)) {}
  const SolveReport& partial() const { return *partial_; }

 private:
  std::shared_ptr<const SolveReport> partial_;
};

/// u0 = C(|x|^2 - R^2) + eps^2 f in Omega and g on the collar, with
/// C = 3(sup|f| + eps^-2 sup|g|) and R = sup |x| over the covered nodes.
GridField initial_subsolution(const DppProblem& problem);
GridField initial_subsolution(const Discretization& disc);
/// Coefficient C of the subsolution.
double subsolution_coefficient(const Discretization& disc);

/// g extended to every covered node (interior values g(x)).
GridField g_extension(const Discretization& disc);

/// a priori bound sup|g| + 2^{2k+1} eps^2 sup|f|, k = ceil(4 R^2 / eps^2).
double apriori_bound(double g_sup, double f_sup, double eps, double radius_sup);

SolveReport solve(const DppProblem& problem);
SolveReport solve(const Discretization& disc);

/// True iff u <= v + slack at every interior node. Both reports must come
/// from the problem's lattice and kernel, with collar data ordered g_u <= g_v;
/// a negative slack selects the larger of the two solver tolerances.
bool comparison_check(const DppProblem& problem, const SolveReport& u, const SolveReport& v,
                      double slack = -1.0);

}  // namespace tow

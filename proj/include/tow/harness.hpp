#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tow/dpp_solver.hpp"
#include "tow/grid_field.hpp"
#include "tow/search.hpp"
#include "tow/vec.hpp"

namespace tow {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// A test function with analytic first and second derivatives.
struct SmoothFunction {
  std::string name;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat3(const Vec&)> hessian;
};

/// u = x^T A x + b.x + c (A symmetric).
SmoothFunction smooth_quadratic(const Mat3& a, const Vec& b, double c);
SmoothFunction smooth_linear(const Vec& a, double c = 0.0);
/// u = cos(x1).
SmoothFunction smooth_cos_x1();
/// u = |x|^k (smooth away from the origin).
SmoothFunction smooth_radial_power(double k, int dim);

/// Delta u + (p - 2) <D^2u z, z>.
double directional_operator(const Mat3& hess, const Vec& z, int dim, double p);
/// Normalized p-Laplacian Delta u + (p - 2) <D^2u grad, grad>/|grad|^2.
double normalized_p_laplacian(const SmoothFunction& u, const Vec& x, int dim, double p);

struct ExpansionReport {
  std::vector<double> eps_ladder;
  std::vector<double> measured_remainders;
  double fitted_order = 0.0;            ///< least-squares log-log slope over positive remainders
  std::vector<double> alignment_angles; ///< midpoint check: angle(argmax, grad u)
};

/// Least-squares slope of log(remainder) against log(eps); remainders that
/// are exactly zero are skipped, and fewer than two usable points give +inf.
double fitted_order(std::span<const double> eps, std::span<const double> remainders);

/// |I^z u(x) - u - eps c1 grad.z - eps^2/(2(N+p)) (Delta u + (p-2)<D^2u z,z>)|.
ExpansionReport check_expansion(const SmoothFunction& u, const Vec& x, const Vec& z, int dim, double p,
                                std::span<const double> eps_ladder, int axial = 32, int cross = 32);
/// |(I^{z*} + I^{-z*} - 2u)/(2 eps^2) - Delta_p^N u/(2(N+p))| with z* = grad/|grad|.
ExpansionReport check_normalized_limit(const SmoothFunction& u, const Vec& x, int dim, double p,
                                       std::span<const double> eps_ladder, int axial = 32, int cross = 32);
/// |(sup_z I^z + inf_z I^z)/2 - u - eps^2/(2(N+p)) Delta_p^N u| with the
/// continuous direction search, plus the argmax alignment with grad u.
ExpansionReport check_midpoint_expansion(const SmoothFunction& u, const Vec& x, int dim, double p,
                                         std::span<const double> eps_ladder, const SearchConfig& search = {},
                                         int axial = 32, int cross = 32);

struct HolderReport {
  double gamma = 1.0;
  double quotient_sup = 0.0;
  std::int64_t pair_count = 0;
  double radius = 1.0;
  bool fitted = false;
};

/// max |u(x) - u(y)| / (|x - y|^gamma + eps^gamma) over lattice pairs of
/// interior nodes inside B_{R/2}(center). All pairs are used up to 10^4
/// points, otherwise 10^5 random pairs (fixed seed). Without gamma the
/// exponent is chosen from {0.05, 0.10, ..., 1.00} as the one under which
/// log(omega(d)/(d^gamma + eps^gamma)) varies least across distance bins,
/// omega being the empirical modulus of continuity.
HolderReport holder_quotient(const GridField& solution, double radius, std::optional<double> gamma, double eps,
                             const Vec& center = Vec{}, std::uint64_t seed = 7);

struct ConvergenceRow {
  double eps = 0.0;
  double dx = 0.0;
  std::size_t interior_nodes = 0;
  std::size_t probe_nodes = 0;
  double sup_error = 0.0;
  std::int64_t iterations = 0;
  double final_residual = 0.0;
  double seconds = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// errors nonincreasing as eps decreases, allowing 5 dx^2 of slack per step
  bool nonincreasing = true;
};

/// Solves the template problem for each eps (dx = dx_ratio * eps) and records
/// the sup error against exact_u on the nodes whose distance to the boundary
/// is at least half of the domain half-width (B_{R/2} for a ball).
ConvergenceTable convergence_study(const DppProblem& base, std::span<const double> eps_ladder,
                                   const ScalarFn& exact_u, double dx_ratio = 0.125);

struct HolderLadderRow {
  double eps = 0.0;
  double dx = 0.0;
  HolderReport holder;
  double seconds = 0.0;
};

struct HolderLadder {
  std::vector<HolderLadderRow> rows;
  double gamma = 1.0;
  bool fitted = false;
  /// largest quotient over smallest quotient across the ladder
  double spread = 0.0;
  bool bounded = false;  ///< spread <= 2
};

/// Solves the template problem for each eps (dx = dx_ratio * eps) and
/// evaluates holder_quotient on B_{R/2}. Without gamma the exponent is
/// fitted on the smallest eps and reused for every row.
HolderLadder holder_ladder(const DppProblem& base, std::span<const double> eps_ladder, double radius,
                           std::optional<double> gamma, double dx_ratio = 0.25, std::uint64_t seed = 7);

/// Probe region used by convergence_study.
bool in_probe_region(const DomainSpec& domain, const Vec& x);

}  // namespace tow

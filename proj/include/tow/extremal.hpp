#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tow/averaging.hpp"
#include "tow/dpp_solver.hpp"
#include "tow/grid_field.hpp"
#include "tow/kernel.hpp"

namespace tow {

struct ExtremalParams {
  double alpha = 0.0;
  double beta = 1.0;
  double lambda = 1.0;
  int samples = 4096;  ///< low-discrepancy points in B_Lambda before refinement
  int quad = 32;       ///< node count per factor of the uniform-average rule

  /// alpha = 1 - beta with beta = 1/(2 gamma_{N,p}); only 1 < p <= 2 gives a
  /// valid split. p > 2 throws ExponentOutOfRange.
  static ExtremalParams for_kernel(const KernelParams& kernel);
  void validate() const;
};

/// delta u(x, eps h) = u(x + eps h) + u(x - eps h) - 2 u(x).
double second_difference(const GridField& field, const Vec& x, const Vec& h, double eps);
double second_difference(const ScalarFn& u, const Vec& x, const Vec& h, double eps);

struct PucciValue {
  double value = 0.0;    ///< L^{+/-} u(x)
  double extreme = 0.0;  ///< sup (or inf) of delta u over B_Lambda
  double mean = 0.0;     ///< ball average of delta u
  double step = 0.0;     ///< final refinement step in h, a resolution indicator
};

/// L+ u(x) = (alpha sup_{h in B_Lambda} delta u + beta avg_{B_1} delta u) / (2 eps^2).
PucciValue pucci_plus(const GridField& field, const Vec& x, const ExtremalParams& params, const KernelParams& kernel);
PucciValue pucci_plus(const ScalarFn& u, const Vec& x, const ExtremalParams& params, const KernelParams& kernel);
/// Same with the infimum.
PucciValue pucci_minus(const GridField& field, const Vec& x, const ExtremalParams& params, const KernelParams& kernel);
PucciValue pucci_minus(const ScalarFn& u, const Vec& x, const ExtremalParams& params, const KernelParams& kernel);

/// (I^z u + I^{-z} u - 2u)(x) / (2 eps^2), which lies between L- and L+.
double symmetric_quotient(const QuadratureRule& rule, const GridField& field, const Vec& x, const Vec& z,
                          const KernelParams& kernel);

struct ExtremalNode {
  Vec x{};
  double lplus = 0.0;
  double lminus = 0.0;
  double f = 0.0;
  double margin_plus = 0.0;   ///< L+ u + f, must be >= -slack
  double margin_minus = 0.0;  ///< -(L- u + f), must be >= -slack
};

struct ExtremalReport {
  ExtremalParams params;
  double slack = 1e-6;
  std::vector<ExtremalNode> nodes;
  double worst_plus = 0.0;
  double worst_minus = 0.0;
  bool ok = true;
};

/// Checks L+ u + f >= -slack and L- u + f <= slack at the given interior
/// points. Throws ExponentOutOfRange for p > 2, where the inequalities fail.
ExtremalReport verify_extremal_inequalities(const GridField& solution, const DppProblem& problem,
                                            std::span<const Vec> sample_nodes, double slack = 1e-6,
                                            int samples = 4096);

/// count distinct interior lattice points, deterministic in seed.
std::vector<Vec> sample_interior_nodes(const GridField& field, int count, std::uint64_t seed);

/// Density (|z.h|^{p-2} - 1)/(2 gamma_{N,p} - 1) of nu in the split
/// |z.h|^{p-2}/(2 gamma) = beta + alpha nu with beta = 1/(2 gamma). It is
/// nonnegative for every p != 2; for p > 2 the split fails through the
/// weight alpha (see decomposition_alpha). Throws DegenerateDecomposition at p = 2.
double decomposition_density(double p, int dim, const Vec& z, const Vec& h);
/// Density of nu in |z.h|^{p-2}/(2 gamma) = beta + (1 - beta) nu for a
/// chosen beta in (0, 1). For p > 2 the kernel vanishes on z-orthogonal h, so
/// this is negative there for every beta while positive near |z.h| = 1.
double decomposition_density(double p, int dim, const Vec& z, const Vec& h, double beta);
/// alpha = 1 - 1/(2 gamma_{N,p}): in [0, 1) for 1 < p <= 2, negative for p > 2.
double decomposition_alpha(double p, int dim);

}  // namespace tow

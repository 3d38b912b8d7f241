#include "tow/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tow/averaging.hpp"
#include "tow/errors.hpp"
#include "tow/rng.hpp"

namespace tow {

namespace {

Mat3 zero_mat() { return Mat3{{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}}; }

double quad_form(const Mat3& m, const Vec& z, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) s += m[a][b] * z[a] * z[b];
  return s;
}

void check_ladder(std::span<const double> ladder) {
  if (ladder.empty()) throw Error(ErrorKind::InvalidArgument, "eps ladder is empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps ladder entries must be positive");
    if (i > 0 && !(ladder[i] < ladder[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "eps ladder must be strictly decreasing");
  }
}

Vec unit_gradient(const SmoothFunction& u, const Vec& x, int dim) {
  const Vec g = u.gradient(x);
  const double n = norm(g, dim);
  if (n < 1e-10) throw Error(ErrorKind::DegenerateGradient, "gradient vanishes at the probe point");
  return scaled(g, 1.0 / n);
}

}  // namespace

SmoothFunction smooth_quadratic(const Mat3& a, const Vec& b, double c) {
  SmoothFunction f;
  f.name = "quadratic";
  f.value = [a, b, c](const Vec& x) {
    double s = c;
    for (int i = 0; i < 3; ++i) {
      s += b[i] * x[i];
      for (int j = 0; j < 3; ++j) s += a[i][j] * x[i] * x[j];
    }
    return s;
  };
  f.gradient = [a, b](const Vec& x) {
    Vec g = b;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g[i] += (a[i][j] + a[j][i]) * x[j];
    return g;
  };
  f.hessian = [a](const Vec&) {
    Mat3 h = zero_mat();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) h[i][j] = a[i][j] + a[j][i];
    return h;
  };
  return f;
}

SmoothFunction smooth_linear(const Vec& a, double c) {
  SmoothFunction f = smooth_quadratic(zero_mat(), a, c);
  f.name = "linear";
  return f;
}

SmoothFunction smooth_cos_x1() {
  SmoothFunction f;
  f.name = "cos_x1";
  f.value = [](const Vec& x) { return std::cos(x[0]); };
  f.gradient = [](const Vec& x) { return Vec{-std::sin(x[0]), 0.0, 0.0}; };
  f.hessian = [](const Vec& x) {
    Mat3 h = zero_mat();
    h[0][0] = -std::cos(x[0]);
    return h;
  };
  return f;
}

SmoothFunction smooth_radial_power(double k, int dim) {
  SmoothFunction f;
  f.name = "radial_power";
  f.value = [k, dim](const Vec& x) { return std::pow(norm(x, dim), k); };
  f.gradient = [k, dim](const Vec& x) { return scaled(x, k * std::pow(norm(x, dim), k - 2.0)); };
  f.hessian = [k, dim](const Vec& x) {
    const double r = norm(x, dim);
    Mat3 h = zero_mat();
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        h[i][j] = (i == j ? k * std::pow(r, k - 2.0) : 0.0) + k * (k - 2.0) * std::pow(r, k - 4.0) * x[i] * x[j];
    return h;
  };
  return f;
}

double directional_operator(const Mat3& hess, const Vec& z, int dim, double p) {
  double trace = 0.0;
  for (int i = 0; i < dim; ++i) trace += hess[i][i];
  return trace + (p - 2.0) * quad_form(hess, z, dim);
}

double normalized_p_laplacian(const SmoothFunction& u, const Vec& x, int dim, double p) {
  return directional_operator(u.hessian(x), unit_gradient(u, x, dim), dim, p);
}

double fitted_order(std::span<const double> eps, std::span<const double> remainders) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < eps.size() && i < remainders.size(); ++i) {
    if (remainders[i] > 0.0) {
      lx.push_back(std::log(eps[i]));
      ly.push_back(std::log(remainders[i]));
    }
  }
  if (lx.size() < 2) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= n, my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

ExpansionReport check_expansion(const SmoothFunction& u, const Vec& x, const Vec& z, int dim, double p,
                                std::span<const double> eps_ladder, int axial, int cross) {
  check_ladder(eps_ladder);
  const KernelParams base(dim, p, eps_ladder[0]);
  const QuadratureRule rule = build_rule(base, axial, cross);
  const double ux = u.value(x);
  const double first = dot(u.gradient(x), z, dim) * base.first_moment_ratio();
  const double second = directional_operator(u.hessian(x), z, dim, p) / (2.0 * (dim + p));
  ExpansionReport rep;
  for (double eps : eps_ladder) {
    const KernelParams kp = base.with_eps(eps);
    const double avg = apply(rule, u.value, x, z, kp);
    rep.eps_ladder.push_back(eps);
    rep.measured_remainders.push_back(std::abs(avg - (ux + eps * first + eps * eps * second)));
  }
  rep.fitted_order = fitted_order(rep.eps_ladder, rep.measured_remainders);
  return rep;
}

ExpansionReport check_normalized_limit(const SmoothFunction& u, const Vec& x, int dim, double p,
                                       std::span<const double> eps_ladder, int axial, int cross) {
  check_ladder(eps_ladder);
  const Vec zs = unit_gradient(u, x, dim);
  const KernelParams base(dim, p, eps_ladder[0]);
  const QuadratureRule rule = build_rule(base, axial, cross);
  const double ux = u.value(x);
  const double limit = directional_operator(u.hessian(x), zs, dim, p) / (2.0 * (dim + p));
  ExpansionReport rep;
  for (double eps : eps_ladder) {
    const KernelParams kp = base.with_eps(eps);
    const double q = (apply(rule, u.value, x, zs, kp) + apply(rule, u.value, x, -zs, kp) - 2.0 * ux) / (2.0 * eps * eps);
    rep.eps_ladder.push_back(eps);
    rep.measured_remainders.push_back(std::abs(q - limit));
  }
  rep.fitted_order = fitted_order(rep.eps_ladder, rep.measured_remainders);
  return rep;
}

ExpansionReport check_midpoint_expansion(const SmoothFunction& u, const Vec& x, int dim, double p,
                                         std::span<const double> eps_ladder, const SearchConfig& search, int axial,
                                         int cross) {
  check_ladder(eps_ladder);
  const Vec zs = unit_gradient(u, x, dim);
  const KernelParams base(dim, p, eps_ladder[0]);
  const QuadratureRule rule = build_rule(base, axial, cross);
  const double ux = u.value(x);
  const double lap = directional_operator(u.hessian(x), zs, dim, p) / (2.0 * (dim + p));
  ExpansionReport rep;
  for (double eps : eps_ladder) {
    const KernelParams kp = base.with_eps(eps);
    const Extrema ext = search_extrema(dim, [&](const Vec& z) { return apply(rule, u.value, x, z, kp); }, search);
    const double mid = 0.5 * (ext.max_value + ext.min_value);
    rep.eps_ladder.push_back(eps);
    rep.measured_remainders.push_back(std::abs(mid - (ux + eps * eps * lap)));
    rep.alignment_angles.push_back(std::acos(std::clamp(dot(ext.argmax, zs, dim), -1.0, 1.0)));
  }
  rep.fitted_order = fitted_order(rep.eps_ladder, rep.measured_remainders);
  return rep;
}

HolderReport holder_quotient(const GridField& solution, double radius, std::optional<double> gamma, double eps,
                             const Vec& center, std::uint64_t seed) {
  if (!(radius > 0.0) || !(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius and eps must be positive");
  if (gamma && !(*gamma > 0.0 && *gamma <= 1.0)) throw Error(ErrorKind::InvalidArgument, "gamma must lie in (0, 1]");
  const int dim = solution.dim();
  std::vector<Vec> pts;
  std::vector<double> vals;
  for (std::size_t i = 0; i < solution.size(); ++i) {
    if (solution.node_class(i) != NodeClass::Interior) continue;
    const Vec x = solution.coords(i);
    if (norm(x - center, dim) < 0.5 * radius) {
      pts.push_back(x);
      vals.push_back(solution.value(i));
    }
  }
  HolderReport rep;
  rep.radius = radius;
  const std::size_t n = pts.size();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "fewer than two lattice points inside B_{R/2}");

  const bool all_pairs = n <= 10000;
  const std::int64_t random_pairs = 100000;
  auto for_each_pair = [&](auto&& fn) {
    if (all_pairs) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) fn(i, j);
    } else {
      Philox rng(seed, 0x401d);
      for (std::int64_t k = 0; k < random_pairs; ++k) {
        const auto i = std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
        auto j = std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
        if (i == j) j = (j + 1) % n;
        fn(i, j);
      }
    }
  };
  rep.pair_count = all_pairs ? static_cast<std::int64_t>(n * (n - 1) / 2) : random_pairs;

  double g = gamma.value_or(1.0);
  if (!gamma) {
    // Empirical modulus of continuity on geometric distance bins.
    const int bins = 40;
    const double dmin = 0.5 * solution.dx(), dmax = radius;
    const double lratio = std::log(dmax / dmin);
    std::vector<double> osc(bins, -1.0), dtop(bins, 0.0);
    for_each_pair([&](std::size_t i, std::size_t j) {
      const double d = norm(pts[i] - pts[j], dim);
      const int b = std::clamp(static_cast<int>(bins * std::log(d / dmin) / lratio), 0, bins - 1);
      osc[b] = std::max(osc[b], std::abs(vals[i] - vals[j]));
      dtop[b] = std::max(dtop[b], d);
    });
    std::vector<double> ld, lw;
    double running = 0.0;
    for (int b = 0; b < bins; ++b) {
      if (osc[b] < 0.0) continue;
      running = std::max(running, osc[b]);
      if (running > 0.0) {
        ld.push_back(dtop[b]);
        lw.push_back(std::log(running));
      }
    }
    g = 1.0;
    if (ld.size() >= 2) {
      double best = std::numeric_limits<double>::infinity();
      for (int k = 1; k <= 20; ++k) {
        const double cand = 0.05 * k;
        double mean = 0.0, m2 = 0.0;
        for (std::size_t b = 0; b < ld.size(); ++b) mean += lw[b] - std::log(std::pow(ld[b], cand) + std::pow(eps, cand));
        mean /= static_cast<double>(ld.size());
        for (std::size_t b = 0; b < ld.size(); ++b) {
          const double r = lw[b] - std::log(std::pow(ld[b], cand) + std::pow(eps, cand)) - mean;
          m2 += r * r;
        }
        if (m2 < best - 1e-15) best = m2, g = cand;
      }
    }
    rep.fitted = true;
  }
  rep.gamma = g;
  const double eg = std::pow(eps, g);
  double q = 0.0;
  for_each_pair([&](std::size_t i, std::size_t j) {
    const double d = norm(pts[i] - pts[j], dim);
    q = std::max(q, std::abs(vals[i] - vals[j]) / (std::pow(d, g) + eg));
  });
  rep.quotient_sup = q;
  return rep;
}

bool in_probe_region(const DomainSpec& domain, const Vec& x) {
  return domain.contains(x) && domain.distance_to_boundary(x) >= 0.5 * domain.half_width();
}

ConvergenceTable convergence_study(const DppProblem& base, std::span<const double> eps_ladder,
                                   const ScalarFn& exact_u, double dx_ratio) {
  check_ladder(eps_ladder);
  if (!(dx_ratio > 0.0 && dx_ratio <= 0.25)) throw Error(ErrorKind::InvalidArgument, "dx ratio must lie in (0, 1/4]");
  ConvergenceTable table;
  for (double eps : eps_ladder) {
    DppProblem prob = base;
    prob.params = base.params.with_eps(eps);
    prob.domain.eps = eps;
    prob.dx = dx_ratio * eps;
    const SolveReport rep = solve(prob);
    ConvergenceRow row;
    row.eps = eps;
    row.dx = prob.dx;
    row.iterations = rep.iterations;
    row.final_residual = rep.final_residual;
    row.seconds = rep.seconds;
    for (std::size_t i = 0; i < rep.solution.size(); ++i) {
      if (rep.solution.node_class(i) != NodeClass::Interior) continue;
      ++row.interior_nodes;
      const Vec x = rep.solution.coords(i);
      if (!in_probe_region(prob.domain, x)) continue;
      ++row.probe_nodes;
      row.sup_error = std::max(row.sup_error, std::abs(rep.solution.value(i) - exact_u(x)));
    }
    if (!table.rows.empty() && row.sup_error > table.rows.back().sup_error + 5.0 * row.dx * row.dx)
      table.nonincreasing = false;
    table.rows.push_back(row);
  }
  return table;
}

HolderLadder holder_ladder(const DppProblem& base, std::span<const double> eps_ladder, double radius,
                           std::optional<double> gamma, double dx_ratio, std::uint64_t seed) {
  check_ladder(eps_ladder);
  if (!(dx_ratio > 0.0 && dx_ratio <= 0.25)) throw Error(ErrorKind::InvalidArgument, "dx ratio must lie in (0, 1/4]");
  std::vector<SolveReport> solved;
  HolderLadder out;
  for (double eps : eps_ladder) {
    DppProblem prob = base;
    prob.params = base.params.with_eps(eps);
    prob.domain.eps = eps;
    prob.dx = dx_ratio * eps;
    solved.push_back(solve(prob));
    HolderLadderRow row;
    row.eps = eps;
    row.dx = prob.dx;
    row.seconds = solved.back().seconds;
    out.rows.push_back(row);
  }
  if (gamma) {
    out.gamma = *gamma;
  } else {
    const HolderReport fit = holder_quotient(solved.back().solution, radius, std::nullopt, eps_ladder.back(),
                                             base.domain.center, seed);
    out.gamma = fit.gamma;
    out.fitted = true;
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < solved.size(); ++i) {
    out.rows[i].holder = holder_quotient(solved[i].solution, radius, out.gamma, out.rows[i].eps, base.domain.center, seed);
    out.rows[i].holder.fitted = out.fitted;
    lo = std::min(lo, out.rows[i].holder.quotient_sup);
    hi = std::max(hi, out.rows[i].holder.quotient_sup);
  }
  out.spread = lo > 0.0 ? hi / lo : (hi == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  out.bounded = out.spread <= 2.0;
  return out;
}

}  // namespace tow

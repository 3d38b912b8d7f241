#include "tow/game.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "tow/errors.hpp"
#include "tow/parallel.hpp"
#include "tow/quadrature.hpp"

namespace tow {

const char* to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Optimal: return "optimal";
    case StrategyKind::OptimalRecompute: return "optimal-recompute";
    case StrategyKind::FixedDirection: return "fixed-direction";
    case StrategyKind::Radial: return "radial";
    case StrategyKind::AdversarialRandom: return "adversarial-random";
  }
  return "unknown";
}

StrategyKind strategy_from_string(const std::string& name) {
  for (StrategyKind k : {StrategyKind::Optimal, StrategyKind::OptimalRecompute, StrategyKind::FixedDirection,
                         StrategyKind::Radial, StrategyKind::AdversarialRandom})
    if (name == to_string(k)) return k;
  throw Error(ErrorKind::InvalidArgument, "unknown strategy '" + name + "'");
}

Vec sample_step(const Vec& x, const Vec& z, const KernelParams& params, Philox& rng) {
  const int dim = params.dim();
  if (dim > 3) throw Error(ErrorKind::UnsupportedDimension, "sampling exists for N = 2 and N = 3");
  const double inv = 1.0 / (params.p() - 1.0);
  const double half_cross = 0.5 * (dim - 1);
  for (int tries = 0; tries < 10000; ++tries) {
    const double t = std::pow(rng.uniform(), inv);
    const double rest = 1.0 - t * t;
    if (rng.uniform() >= std::pow(rest, half_cross)) continue;
    const double rho = std::sqrt(rest);
    Vec local{t, 0.0, 0.0};
    if (dim == 2) {
      local[1] = rho * rng.symmetric();
    } else {
      const double r = rho * std::sqrt(rng.uniform());
      const double phi = 2.0 * std::numbers::pi * rng.uniform();
      local[1] = r * std::cos(phi);
      local[2] = r * std::sin(phi);
    }
    return axpy(params.eps(), Frame(z, dim).apply(local), x);
  }
  throw Error(ErrorKind::SamplerStall, "step sampler rejected 10^4 proposals");
}

namespace {

class Chooser {
 public:
  Chooser(const GameConfig& cfg, const SolveReport* sol) : cfg_(cfg), sol_(sol), dim_(cfg.problem.params.dim()) {
    for (const Strategy* s : {&cfg.player_one, &cfg.player_two}) {
      if (s->kind == StrategyKind::Optimal || s->kind == StrategyKind::OptimalRecompute) {
        if (!sol_) throw Error(ErrorKind::InvalidArgument, "optimal strategies need a solved problem");
        if (rule_.nodes.empty())
          rule_ = build_rule(cfg.problem.params, cfg.problem.quad_axial, cfg.problem.quad_cross);
      }
      if (s->kind == StrategyKind::FixedDirection && std::abs(norm(s->direction, dim_) - 1.0) > 1e-12)
        throw Error(ErrorKind::InvalidArgument, "fixed strategy direction must be a unit vector");
    }
  }

  Vec choose(const Strategy& s, bool maximizer, const Vec& x, Philox& rng) const {
    switch (s.kind) {
      case StrategyKind::FixedDirection: return s.direction;
      case StrategyKind::Radial: {
        const Vec rel = x - cfg_.problem.domain.center;
        const double r = norm(rel, dim_);
        if (r < 1e-300) return Vec{s.sign, 0.0, 0.0};
        return scaled(rel, s.sign / r);
      }
      case StrategyKind::AdversarialRandom: {
        for (;;) {
          Vec v{};
          for (int d = 0; d < dim_; ++d) v[d] = rng.symmetric();
          const double n = norm(v, dim_);
          if (n > 1e-3 && n <= 1.0) return scaled(v, 1.0 / n);
        }
      }
      case StrategyKind::Optimal: {
        const Vec z = stored(x, maximizer);
        if (norm(z, dim_) > 0.5) return normalized(z, dim_);
        return recompute(x, maximizer);
      }
      case StrategyKind::OptimalRecompute: return recompute(x, maximizer);
    }
    return Vec{1.0, 0.0, 0.0};
  }

 private:
  // Stored direction of the closest interior node among the lattice
  // neighbors of x; zero vector when none is interior.
  Vec stored(const Vec& x, bool maximizer) const {
    const GridField& grid = sol_->solution;
    const auto& dirs = maximizer ? sol_->argmax : sol_->argmin;
    const std::size_t center = grid.nearest(x);
    if (grid.node_class(center) == NodeClass::Interior) return dirs[center];
    const auto l = grid.lattice(center);
    double best = 1e300;
    Vec out{};
    const int reach[3] = {1, 1, dim_ == 3 ? 1 : 0};
    for (int a = -reach[0]; a <= reach[0]; ++a)
      for (int b = -reach[1]; b <= reach[1]; ++b)
        for (int c = -reach[2]; c <= reach[2]; ++c) {
          std::array<std::int64_t, 3> q{l[0] + a, l[1] + b, l[2] + c};
          bool inside = true;
          for (int d = 0; d < dim_; ++d) {
            const std::int64_t k = q[d] - grid.first_index()[d];
            if (k < 0 || k >= grid.counts()[d]) inside = false;
          }
          if (!inside) continue;
          const std::size_t idx = grid.index(q);
          if (grid.node_class(idx) != NodeClass::Interior) continue;
          const double dist = norm(grid.coords(idx) - x, dim_);
          if (dist < best) best = dist, out = dirs[idx];
        }
    return out;
  }

  Vec recompute(const Vec& x, bool maximizer) const {
    const RhsResult r = dpp_rhs(sol_->solution, x, cfg_.problem, rule_);
    return maximizer ? r.argmax : r.argmin;
  }

  const GameConfig& cfg_;
  const SolveReport* sol_;
  int dim_;
  QuadratureRule rule_;
};

PathRecord play_path(const GameConfig& cfg, const Chooser& chooser, std::int64_t path) {
  const DppProblem& prob = cfg.problem;
  const double eps2 = prob.params.eps() * prob.params.eps();
  Philox rng(cfg.seed, static_cast<std::uint64_t>(path));
  Vec x = cfg.start;
  PathRecord rec;
  rec.path = path;
  while (prob.domain.contains(x) && rec.steps < cfg.max_steps) {
    rec.payoff += eps2 * prob.f(x);
    const bool heads = rng.coin();
    const Vec z = heads ? chooser.choose(cfg.player_one, true, x, rng) : chooser.choose(cfg.player_two, false, x, rng);
    x = sample_step(x, z, prob.params, rng);
    ++rec.steps;
  }
  if (prob.domain.contains(x)) {
    rec.truncated = true;
    rec.payoff += prob.g(prob.domain.project_to_boundary(x));
  } else {
    rec.payoff += prob.g(x);
  }
  return rec;
}

}  // namespace

GameStats play(const GameConfig& cfg, const SolveReport* solution) {
  cfg.problem.validate();
  if (cfg.paths < 1) throw Error(ErrorKind::InvalidArgument, "paths must be at least 1");
  if (cfg.max_steps < 1) throw Error(ErrorKind::InvalidArgument, "max_steps must be positive");
  if (!cfg.problem.domain.contains(cfg.start)) throw Error(ErrorKind::OutOfDomain, "start point must be interior");
  const Chooser chooser(cfg, solution);

  const auto n = static_cast<std::size_t>(cfg.paths);
  std::vector<PathRecord> recs(n);
  parallel_chunks(n, cfg.threads, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) recs[i] = play_path(cfg, chooser, static_cast<std::int64_t>(i));
  });

  GameStats st;
  st.paths = cfg.paths;
  const double shift = recs[0].payoff;
  double acc = 0.0, steps = 0.0;
  for (const auto& r : recs) {
    acc += r.payoff - shift;
    steps += static_cast<double>(r.steps);
    if (r.truncated) ++st.truncated_paths;
  }
  st.mean_payoff = shift + acc / static_cast<double>(n);
  st.mean_exit_steps = steps / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& r : recs) ss += (r.payoff - st.mean_payoff) * (r.payoff - st.mean_payoff);
  st.std_error = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  if (cfg.record_paths) st.records = std::move(recs);
  return st;
}

Discrepancy value_vs_solver(const GameConfig& cfg, const GameStats& stats, const SolveReport& report) {
  const DppProblem& prob = cfg.problem;
  if (report.dim != prob.params.dim() || report.p != prob.params.p() || report.eps != prob.params.eps() ||
      report.f_label != prob.f_label || report.g_label != prob.g_label)
    throw Error(ErrorKind::MismatchedProblems, "game and solver were set up for different problems");
  Discrepancy d;
  d.mean_payoff = stats.mean_payoff;
  d.solver_value = report.solution.interpolate(cfg.start);
  d.difference = d.mean_payoff - d.solver_value;
  d.std_error = stats.std_error;
  const double gap = std::abs(d.difference);
  d.ratio = d.std_error > 0.0 ? gap / d.std_error : (gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  d.agree = gap <= 4.0 * d.std_error || gap <= 1e-12 * std::max(1.0, std::abs(d.solver_value));
  return d;
}

Discrepancy value_vs_solver(const GameConfig& cfg, const SolveReport& report) {
  return value_vs_solver(cfg, play(cfg, &report), report);
}

}  // namespace tow

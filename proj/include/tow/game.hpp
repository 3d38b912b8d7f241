#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tow/dpp_solver.hpp"
#include "tow/kernel.hpp"
#include "tow/rng.hpp"
#include "tow/vec.hpp"

namespace tow {

enum class StrategyKind {
  Optimal,           ///< direction stored by the solver at the nearest interior node
  OptimalRecompute,  ///< continuous direction search on the solved field at the current point
  FixedDirection,
  Radial,            ///< sign * x/|x| about the domain center
  AdversarialRandom, ///< uniformly random direction every round
};

const char* to_string(StrategyKind kind);
StrategyKind strategy_from_string(const std::string& name);

struct Strategy {
  StrategyKind kind = StrategyKind::Optimal;
  Vec direction{1.0, 0.0, 0.0};  ///< fixed-direction only
  double sign = 1.0;             ///< radial only: +1 outward, -1 inward
};

struct GameConfig {
  DppProblem problem;
  Vec start{};
  std::int64_t paths = 1000;
  std::int64_t max_steps = 1000000;
  std::uint64_t seed = 1;
  Strategy player_one;  ///< maximizer, moves on heads
  Strategy player_two;  ///< minimizer, moves on tails
  bool record_paths = false;
  int threads = 1;
};

struct PathRecord {
  std::int64_t path = 0;
  double payoff = 0.0;
  std::int64_t steps = 0;
  bool truncated = false;
};

struct GameStats {
  std::int64_t paths = 0;
  double mean_payoff = 0.0;
  double std_error = 0.0;
  double mean_exit_steps = 0.0;
  std::int64_t truncated_paths = 0;
  std::vector<PathRecord> records;  ///< filled when record_paths is set
};

/// x + eps h with h drawn from the density proportional to (z.h)_+^{p-2} on
/// B_1: axial t from the proposal t = U^{1/(p-1)} accepted with probability
/// (1 - t^2)^{(N-1)/2}, cross-section uniform in the ball of radius
/// sqrt(1 - t^2). More than 10^4 rejected proposals raise SamplerStall.
Vec sample_step(const Vec& x, const Vec& z, const KernelParams& params, Philox& rng);

/// Monte Carlo estimate of the game value. Each path uses the substream
/// (seed, path index); per-path payoffs are reduced in path order, so
/// results are bit-identical for a given seed and any thread count.
/// Strategies of the optimal kinds need the solver report.
GameStats play(const GameConfig& config, const SolveReport* solution = nullptr);

struct Discrepancy {
  double mean_payoff = 0.0;
  double solver_value = 0.0;
  double difference = 0.0;  ///< mean_payoff - solver_value
  double std_error = 0.0;
  double ratio = 0.0;       ///< |difference| / std_error
  bool agree = true;        ///< |difference| <= 4 std_error
};

Discrepancy value_vs_solver(const GameConfig& config, const GameStats& stats, const SolveReport& report);
Discrepancy value_vs_solver(const GameConfig& config, const SolveReport& report);

}  // namespace tow

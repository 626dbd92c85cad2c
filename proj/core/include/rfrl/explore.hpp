#pragma once

// Reward-free exploration: optimistic value iteration on the intrinsic reward
// r_h^k = u_h^k / H, for single-agent MDPs and (with joint actions) zero-sum
// Markov games.

#include <functional>
#include <vector>

#include "rfrl/approximator.hpp"
#include "rfrl/env.hpp"

namespace rfrl {

struct ExploreConfig {
  std::size_t episodes = 1;
  double beta = 1.0;
  double lambda = 1.0;
};

struct EpisodeLog {
  std::size_t episode = 0;  // 1-based
  /// Mean over h of the bonus u_h^k at the point visited at step h.
  double mean_bonus = 0.0;
  /// V_1^k(s_1) of the optimistic exploration value function.
  double initial_value = 0.0;
  double wall_ms = 0.0;
};

/// Tables of one backward pass at step h, indexed by flat point (or state for `value`).
struct StepTables {
  std::vector<double> bonus;
  std::vector<double> reward;
  std::vector<double> fitted;
  std::vector<double> q;
  std::vector<double> value;
};

struct EpisodeSnapshot {
  std::size_t episode = 0;
  std::vector<StepTables> steps;  // indexed by h
  PolicyTable policy_p1;
  PolicyTable policy_p2;
};

using ExploreObserver = std::function<void(const EpisodeSnapshot&)>;

struct ExploreResult {
  Dataset dataset;
  std::vector<EpisodeLog> log;
};

/// Single-agent exploration. Greedy ties go to the lowest action index.
ExploreResult explore(const EnvSpec& env, const ApproximatorBackend& backend, const ExploreConfig& config, Rng& rng,
                      const ExploreObserver& observer = {});

/// Joint-action exploration of a two-player game. Ties go to the lowest flat
/// index in b-major order (b outer, a inner).
ExploreResult explore_game(const EnvSpec& env, const ApproximatorBackend& backend, const ExploreConfig& config,
                           Rng& rng, const ExploreObserver& observer = {});

/// Greedy joint argmax of q over the actions of state s, b-major tie-break.
std::pair<std::size_t, std::size_t> joint_argmax(const EnvShape& shape, std::span<const double> q, std::size_t s);

}  // namespace rfrl

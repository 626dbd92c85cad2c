#pragma once

// Explore once, then plan for every reward and score the result exactly.

#include <vector>

#include "rfrl/explore.hpp"
#include "rfrl/plan.hpp"

namespace rfrl {

struct PlanConfig {
  double beta = 1.0;
  double lambda = 1.0;
};

struct RewardOutcome {
  std::size_t reward_id = 0;
  PlanResult plan;
  double suboptimality = 0.0;
};

struct GameOutcome {
  std::size_t reward_id = 0;
  GamePlanResult plan;
  double ne_gap = 0.0;
};

std::vector<RewardOutcome> explore_then_plan(const EnvSpec& env, const ApproximatorBackend& backend,
                                             const ExploreConfig& explore_config, const PlanConfig& plan_config,
                                             std::span<const RewardTable> rewards, Rng& rng);

std::vector<GameOutcome> explore_then_plan_game(const EnvSpec& env, const ApproximatorBackend& backend,
                                                const ExploreConfig& explore_config, const PlanConfig& plan_config,
                                                std::span<const RewardTable> rewards, Rng& rng,
                                                const MatrixGameOptions& options = {});

}  // namespace rfrl

#include "rfrl/pipeline.hpp"

#include "rfrl/oracle.hpp"

namespace rfrl {

std::vector<RewardOutcome> explore_then_plan(const EnvSpec& env, const ApproximatorBackend& backend,
                                             const ExploreConfig& explore_config, const PlanConfig& plan_config,
                                             std::span<const RewardTable> rewards, Rng& rng) {
  const ExploreResult exploration = explore(env, backend, explore_config, rng);
  Planner planner(env.domain(), exploration.dataset, backend, plan_config.lambda);
  std::vector<RewardOutcome> out;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    PlanResult result = planner.plan(rewards[i], plan_config.beta);
    const double gap = suboptimality(env, rewards[i], result.policy);
    out.push_back({i, std::move(result), gap});
  }
  return out;
}

std::vector<GameOutcome> explore_then_plan_game(const EnvSpec& env, const ApproximatorBackend& backend,
                                                const ExploreConfig& explore_config, const PlanConfig& plan_config,
                                                std::span<const RewardTable> rewards, Rng& rng,
                                                const MatrixGameOptions& options) {
  const ExploreResult exploration = explore_game(env, backend, explore_config, rng);
  Planner planner(env.domain(), exploration.dataset, backend, plan_config.lambda);
  std::vector<GameOutcome> out;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    GamePlanResult result = planner.plan_game(rewards[i], plan_config.beta, options);
    const double gap = ne_gap(env, rewards[i], result.pi, result.nu);
    out.push_back({i, std::move(result), gap});
  }
  return out;
}

}  // namespace rfrl

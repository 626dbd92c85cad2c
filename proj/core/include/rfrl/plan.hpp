#pragma once

// Planning from an exploration dataset for a given reward, with no further
// interaction: optimistic value iteration for a single agent and the two
// optimistic Q-functions with per-state matrix games for zero-sum games.

#include <memory>
#include <vector>

#include "rfrl/approximator.hpp"
#include "rfrl/env.hpp"
#include "rfrl/matrix_game.hpp"

namespace rfrl {

struct PlanResult {
  PolicyTable policy;
  std::vector<std::vector<double>> value;  // [h][s]
  std::vector<std::vector<double>> q;      // [h][point]
  std::vector<double> mean_bonus;          // per step, mean of u_h over all points
  double initial_value = 0.0;              // V_1(s1)
};

struct GamePlanResult {
  MixedPolicyTable pi;  // Player 1, from the games on the upper Q
  MixedPolicyTable nu;  // Player 2, from the games on the lower Q
  /// The other halves of the two equilibria (logged, not deployed).
  MixedPolicyTable upper_opponent;
  MixedPolicyTable lower_opponent;
  std::vector<std::vector<double>> upper_value, lower_value;  // [h][s]
  std::vector<std::vector<double>> upper_q, lower_q;          // [h][point]
  std::vector<std::vector<double>> upper_gap, lower_gap;      // [h][s] duality gaps
  std::vector<double> mean_bonus;
  double initial_upper = 0.0;
  double initial_lower = 0.0;
  double max_solver_gap = 0.0;
};

/// Holds one fitted learner per step over the exploration dataset, so several
/// rewards can be planned from a single Gram factorization.
class Planner {
 public:
  Planner(const Domain& domain, const Dataset& dataset, const ApproximatorBackend& backend, double lambda);

  PlanResult plan(const RewardTable& reward, double beta);
  GamePlanResult plan_game(const RewardTable& reward, double beta, const MatrixGameOptions& options = {});

  /// Realized information gain of the dataset at each step.
  std::vector<double> info_gain() const;
  const Domain& domain() const { return domain_; }

 private:
  Domain domain_;
  std::vector<std::vector<std::size_t>> next_states_;  // [h][tau]
  std::vector<std::unique_ptr<StepLearner>> learners_;
};

PlanResult plan(const Domain& domain, const Dataset& dataset, const RewardTable& reward,
                const ApproximatorBackend& backend, double beta, double lambda);

GamePlanResult plan_game(const Domain& domain, const Dataset& dataset, const RewardTable& reward,
                         const ApproximatorBackend& backend, double beta, double lambda,
                         const MatrixGameOptions& options = {});

}  // namespace rfrl

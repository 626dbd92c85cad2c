#pragma once

// Ground truth from the known model: backward-induction DP, best responses,
// suboptimality and NE gap, brute-force enumeration for tiny instances, and
// the realized information gain of a point set.

#include <cstdint>
#include <vector>

#include "rfrl/env.hpp"
#include "rfrl/kernel.hpp"

namespace rfrl {

/// value[h][s] for h = 0..H (value[H] is zero); q[h][point] for h < H.
struct ValueTables {
  std::vector<std::vector<double>> value;
  std::vector<std::vector<double>> q;

  double initial(std::size_t s) const { return value.front().at(s); }
};

struct OptimalSolution {
  ValueTables values;
  PolicyTable policy;
};

/// Single-agent optimum; ties go to the lowest action.
OptimalSolution exact_optimal(const EnvSpec& env, const RewardTable& reward);

/// Single agent, deterministic policy.
ValueTables policy_value(const EnvSpec& env, const RewardTable& reward, const PolicyTable& policy);
/// Single agent, mixed policy.
ValueTables policy_value(const EnvSpec& env, const RewardTable& reward, const MixedPolicyTable& policy);
/// Both players mixed. q holds Q_h(s, a, b) of the pair.
ValueTables policy_value(const EnvSpec& env, const RewardTable& reward, const MixedPolicyTable& p1,
                         const MixedPolicyTable& p2);

enum class Player { p1, p2 };

struct BestResponse {
  /// Point-mass policy of the responding player.
  MixedPolicyTable policy;
  /// Values of the pair (fixed, response).
  ValueTables values;
};

/// Best response to `fixed`, played by `player`: Player 2 minimizes against a
/// fixed Player 1, Player 1 maximizes against a fixed Player 2. Ties go to the lowest action.
BestResponse best_response(const EnvSpec& env, const RewardTable& reward, Player player,
                           const MixedPolicyTable& fixed);

/// V*_1(s1) - V^pi_1(s1).
double suboptimality(const EnvSpec& env, const RewardTable& reward, const PolicyTable& policy);
double suboptimality(const EnvSpec& env, const RewardTable& reward, const MixedPolicyTable& policy);

/// V^{br(nu), nu}_1(s1) - V^{pi, br(pi)}_1(s1).
double ne_gap(const EnvSpec& env, const RewardTable& reward, const MixedPolicyTable& pi, const MixedPolicyTable& nu);

/// Gamma_k = 1/2 log det(I + K_k / lambda) for k = 0..n over the prefixes of `points`.
std::vector<double> info_gain(const Kernel& kernel, double lambda, std::span<const Eigen::VectorXd> points);

inline constexpr std::uint64_t kBruteForceBudget = 1'000'000;

/// Number of deterministic policies of a player with `actions` actions; saturates
/// at UINT64_MAX.
std::uint64_t policy_count(std::size_t horizon, std::size_t states, std::size_t actions);

/// max over every deterministic single-agent policy of V_1(s1), each evaluated by
/// forward propagation of its state distribution. Throws BudgetError past `budget` policies.
double brute_force_optimal_value(const EnvSpec& env, const RewardTable& reward,
                                 std::uint64_t budget = kBruteForceBudget);

/// Optimum over every deterministic policy of `player` against `fixed`
/// (min for Player 2, max for Player 1), evaluated by forward propagation.
double brute_force_best_response_value(const EnvSpec& env, const RewardTable& reward, Player player,
                                       const MixedPolicyTable& fixed, std::uint64_t budget = kBruteForceBudget);

}  // namespace rfrl

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "rfrl/errors.hpp"
#include "rfrl/generators.hpp"
#include "rfrl/oracle.hpp"
#include "test_support.hpp"

using namespace rfrl;

namespace {

// Reward 1 in the last chain state, 0 elsewhere.
RewardTable goal_reward(const EnvShape& shape) {
  std::vector<double> r(shape.horizon * shape.points(), 0.0);
  for (std::size_t h = 0; h < shape.horizon; ++h)
    for (std::size_t a = 0; a < shape.actions_p1; ++a) r[h * shape.points() + shape.point(shape.states - 1, a)] = 1.0;
  return RewardTable(shape, r);
}

// Direct 1/2 log det(I + K / lambda) on a prefix.
double direct_gain(const Kernel& kernel, double lambda, const Points& pts, std::size_t n) {
  const Points prefix(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(n));
  const auto k = static_cast<Eigen::Index>(n);
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(k, k) + gram(kernel, prefix) / lambda;
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

TEST(ExactOptimal, ChainReachesGoal) {
  const EnvSpec env = chain_env(3, 2, 4);
  const RewardTable reward = goal_reward(env.shape());
  const auto sol = exact_optimal(env, reward);
  // Two moves to reach state 2, then two rewarded steps.
  EXPECT_DOUBLE_EQ(sol.values.initial(0), 2.0);
  EXPECT_EQ(sol.policy(0, 0), 1u);
  EXPECT_EQ(sol.policy(1, 1), 1u);
  EXPECT_DOUBLE_EQ(sol.values.value[4][0], 0.0);
  const auto constant = exact_optimal(env, test::constant_reward(env.shape(), 1.0));
  EXPECT_DOUBLE_EQ(constant.values.initial(0), 4.0);
  EXPECT_EQ(constant.policy(0, 0), 0u);  // all actions tie
}

TEST(ExactOptimal, HorizonOneIsRewardMaximum) {
  const EnvShape shape{3, 4, 1, 1};
  const EnvSpec env = random_env(shape, {}, 1);
  const RewardTable reward = random_reward(shape, 2);
  const auto sol = exact_optimal(env, reward);
  for (std::size_t s = 0; s < 3; ++s) {
    double best = -1;
    for (std::size_t a = 0; a < 4; ++a) best = std::max(best, reward(0, s, a));
    EXPECT_DOUBLE_EQ(sol.values.value[0][s], best);
  }
}

TEST(ExactOptimal, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const EnvShape shape{2 + seed % 2, 2, 1, 3};
    const EnvSpec env = random_env(shape, {}, seed);
    const RewardTable reward = random_reward(shape, seed + 100);
    EXPECT_NEAR(exact_optimal(env, reward).values.initial(0), brute_force_optimal_value(env, reward), 1e-12);
  }
}

TEST(ExactOptimal, RejectsGames) {
  const EnvShape shape{2, 2, 2, 2};
  EXPECT_THROW(exact_optimal(random_env(shape, {}, 0), RewardTable::zeros(shape)), DomainError);
}

TEST(PolicyValue, OptimalPolicyAttainsOptimum) {
  const EnvShape shape{4, 3, 1, 4};
  const EnvSpec env = random_env(shape, {}, 3);
  const RewardTable reward = random_reward(shape, 4);
  const auto sol = exact_optimal(env, reward);
  const auto v = policy_value(env, reward, sol.policy);
  for (std::size_t h = 0; h <= 4; ++h)
    for (std::size_t s = 0; s < 4; ++s) EXPECT_NEAR(v.value[h][s], sol.values.value[h][s], 1e-12);
  const auto mixed = policy_value(env, reward, MixedPolicyTable::point_mass(sol.policy));
  EXPECT_NEAR(mixed.initial(0), sol.values.initial(0), 1e-12);
  EXPECT_NEAR(suboptimality(env, reward, sol.policy), 0.0, 1e-12);
}

TEST(PolicyValue, BellmanConsistency) {
  const EnvShape shape{3, 2, 1, 3};
  const EnvSpec env = random_env(shape, {}, 5);
  const RewardTable reward = random_reward(shape, 6);
  Rng rng(1);
  const MixedPolicyTable pi = test::random_mixed(3, 3, 2, rng);
  const auto v = policy_value(env, reward, pi);
  for (std::size_t h = 0; h < 3; ++h)
    for (std::size_t s = 0; s < 3; ++s) {
      double expect = 0.0;
      for (std::size_t a = 0; a < 2; ++a) {
        double q = reward(h, s, a);
        const auto row = env.transition_row(h, s, a);
        for (std::size_t t = 0; t < 3; ++t) q += row[t] * v.value[h + 1][t];
        EXPECT_NEAR(v.q[h][shape.point(s, a)], q, 1e-12);
        expect += pi(h, s)[a] * q;
      }
      EXPECT_NEAR(v.value[h][s], expect, 1e-12);
      EXPECT_GE(v.value[h][s], 0.0);
      EXPECT_LE(v.value[h][s], static_cast<double>(3 - h));
    }
}

TEST(PolicyValue, GameEvaluationIsSymmetricUnderRelabeling) {
  // Swapping the roles of b values in policy and model leaves the value unchanged.
  const EnvShape shape{2, 2, 2, 2};
  const EnvSpec env = random_env(shape, {}, 7);
  const RewardTable reward = random_reward(shape, 8);
  std::vector<double> p(env.transition().size()), r(reward.values().size());
  for (std::size_t h = 0; h < 2; ++h)
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
          const std::size_t from = h * shape.points() + shape.point(s, a, b);
          const std::size_t to = h * shape.points() + shape.point(s, a, 1 - b);
          r[to] = reward.values()[from];
          for (std::size_t t = 0; t < 2; ++t) p[to * 2 + t] = env.transition()[from * 2 + t];
        }
  const EnvSpec swapped_env(shape, p, 0, {});
  const RewardTable swapped_reward(shape, r);
  Rng rng(2);
  const auto pi = test::random_mixed(2, 2, 2, rng);
  const auto nu = test::random_mixed(2, 2, 2, rng);
  MixedPolicyTable flipped(2, 2, 2);
  for (std::size_t h = 0; h < 2; ++h)
    for (std::size_t s = 0; s < 2; ++s) {
      const std::vector<double> probs{nu(h, s)[1], nu(h, s)[0]};
      flipped.set(h, s, probs);
    }
  EXPECT_NEAR(policy_value(env, reward, pi, nu).initial(0), policy_value(swapped_env, swapped_reward, pi, flipped).initial(0),
              1e-12);
}

TEST(PolicyValue, MonteCarloAgreesWithinThreeSigma) {
  const EnvShape shape{3, 2, 1, 3};
  const EnvSpec env = random_env(shape, {}, 9);
  const RewardTable reward = random_reward(shape, 10);
  Rng rng(3);
  const PolicyTable policy = test::random_deterministic(3, 3, 2, rng);
  const double exact = policy_value(env, reward, policy).initial(0);
  const int episodes = 1'000'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int e = 0; e < episodes; ++e) {
    const auto ep = run_episode(env, policy, rng);
    double ret = 0.0;
    for (std::size_t h = 0; h < 3; ++h) ret += reward(h, ep[h].state, ep[h].action_p1);
    sum += ret;
    sum_sq += ret * ret;
  }
  const double mean = sum / episodes;
  const double sd = std::sqrt((sum_sq / episodes - mean * mean) / episodes);
  EXPECT_LE(std::abs(mean - exact), 3 * sd + 1e-12);
}

TEST(BestResponse, AgainstPointMassIsRowOptimum) {
  const EnvShape shape{1, 3, 2, 1};
  const EnvSpec env = test::uniform_env(shape);
  const RewardTable reward(shape, {0.2, 0.9, 0.5, 0.1, 0.7, 0.7});  // rows a, columns b
  MixedPolicyTable nu(1, 1, 2);
  nu.set_point_mass(0, 0, 1);
  const auto br1 = best_response(env, reward, Player::p1, nu);
  EXPECT_DOUBLE_EQ(br1.values.initial(0), 0.9);
  EXPECT_EQ(br1.policy(0, 0)[0], 1.0);
  MixedPolicyTable pi(1, 1, 3);
  pi.set_point_mass(0, 0, 2);
  const auto br2 = best_response(env, reward, Player::p2, pi);
  EXPECT_DOUBLE_EQ(br2.values.initial(0), 0.7);
  EXPECT_EQ(br2.policy(0, 0)[0], 1.0);  // tie goes to the lowest action
}

TEST(BestResponse, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const EnvShape shape{2, 2, 2, 2};
    const EnvSpec env = random_env(shape, {}, seed + 20);
    const RewardTable reward = random_reward(shape, seed + 40);
    Rng rng(seed);
    const auto pi = test::random_mixed(2, 2, 2, rng);
    const auto nu = test::random_mixed(2, 2, 2, rng);
    EXPECT_NEAR(best_response(env, reward, Player::p2, pi).values.initial(0),
                brute_force_best_response_value(env, reward, Player::p2, pi), 1e-12);
    EXPECT_NEAR(best_response(env, reward, Player::p1, nu).values.initial(0),
                brute_force_best_response_value(env, reward, Player::p1, nu), 1e-12);
  }
}

TEST(BestResponse, SandwichesAnyPair) {
  const EnvShape shape{3, 2, 3, 3};
  const EnvSpec env = random_env(shape, {}, 11);
  const RewardTable reward = random_reward(shape, 12);
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pi = test::random_mixed(3, 3, 2, rng);
    const auto nu = test::random_mixed(3, 3, 3, rng);
    const double pair = policy_value(env, reward, pi, nu).initial(0);
    EXPECT_LE(best_response(env, reward, Player::p2, pi).values.initial(0), pair + 1e-12);
    EXPECT_GE(best_response(env, reward, Player::p1, nu).values.initial(0), pair - 1e-12);
    EXPECT_GE(ne_gap(env, reward, pi, nu), -1e-12);
  }
}

TEST(BestResponse, RejectsSingleAgent) {
  const EnvShape shape{2, 2, 1, 2};
  EXPECT_THROW(best_response(random_env(shape, {}, 0), RewardTable::zeros(shape), Player::p2,
                             MixedPolicyTable(2, 2, 2)),
               DomainError);
}

TEST(Suboptimality, KnownCases) {
  const EnvSpec env = chain_env(3, 2, 4);
  const RewardTable reward = goal_reward(env.shape());
  PolicyTable reset(4, 3, 2);  // all zeros: always reset
  EXPECT_DOUBLE_EQ(suboptimality(env, reward, reset), 2.0);
  MixedPolicyTable half(4, 3, 2);
  const double v = policy_value(env, reward, half).initial(0);
  EXPECT_NEAR(suboptimality(env, reward, half), 2.0 - v, 1e-12);
  EXPECT_GT(v, 0.0);
}

TEST(NeGap, ZeroAtSaddlePointAndPositiveOtherwise) {
  // Matching pennies in one step: the uniform pair is the equilibrium.
  const EnvShape shape{1, 2, 2, 1};
  const EnvSpec env = test::uniform_env(shape);
  const RewardTable reward(shape, {1.0, 0.0, 0.0, 1.0});
  const MixedPolicyTable uniform(1, 1, 2);
  EXPECT_NEAR(ne_gap(env, reward, uniform, uniform), 0.0, 1e-15);
  MixedPolicyTable pure(1, 1, 2);
  pure.set_point_mass(0, 0, 0);
  // br(nu = pure 0) = 1, br(pi = pure 0) = 0.
  EXPECT_DOUBLE_EQ(ne_gap(env, reward, pure, pure), 1.0);
  // pi pure, nu uniform: 0.5 - 0.
  EXPECT_DOUBLE_EQ(ne_gap(env, reward, pure, uniform), 0.5);
}

TEST(InfoGain, EmptyAndOneHotClosedForm) {
  const Kernel one_hot = Kernel::one_hot();
  EXPECT_EQ(info_gain(one_hot, 2.0, {}), std::vector<double>{0.0});
  Points pts;
  for (int i = 0; i < 25; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(25);
    e[i] = 1.0;
    pts.push_back(e);
  }
  const auto gains = info_gain(one_hot, 2.0, pts);
  ASSERT_EQ(gains.size(), 26u);
  for (std::size_t n = 0; n <= 25; ++n) EXPECT_NEAR(gains[n], 0.5 * n * std::log(1.5), 1e-12);
  // Repeating one point c times: 1/2 log(1 + c / lambda).
  const Points repeated(6, pts[0]);
  EXPECT_NEAR(info_gain(one_hot, 2.0, repeated).back(), 0.5 * std::log(4.0), 1e-12);
}

TEST(InfoGain, MatchesDirectLogDetAndIsMonotone) {
  Rng rng(5);
  const Kernel rbf = Kernel::rbf(0.7);
  Points pts;
  for (int i = 0; i < 15; ++i) pts.push_back(test::random_unit(3, rng));
  const auto gains = info_gain(rbf, 0.5, pts);
  for (std::size_t n = 0; n <= 15; ++n) {
    EXPECT_NEAR(gains[n], direct_gain(rbf, 0.5, pts, n), 1e-10);
    if (n > 0) EXPECT_GE(gains[n], gains[n - 1]);
  }
}

TEST(BruteForce, BudgetGuard) {
  EXPECT_EQ(policy_count(2, 2, 2), 16u);
  EXPECT_EQ(policy_count(20, 20, 20), std::numeric_limits<std::uint64_t>::max());
  const EnvShape shape{3, 3, 1, 3};
  const EnvSpec env = random_env(shape, {}, 1);
  EXPECT_THROW(brute_force_optimal_value(env, RewardTable::zeros(shape), 1000), BudgetError);
  EXPECT_NO_THROW(brute_force_optimal_value(env, RewardTable::zeros(shape), policy_count(3, 3, 3)));
}

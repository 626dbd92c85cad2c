#include "rfrl/oracle.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rfrl/errors.hpp"

namespace rfrl {
namespace {

void check_reward(const EnvSpec& env, const RewardTable& reward) {
  if (!(env.shape() == reward.shape())) throw PreconditionError("reward table shape differs from the environment");
}

void check_policy(const EnvShape& shape, std::size_t horizon, std::size_t states, std::size_t actions,
                  std::size_t expected_actions) {
  if (horizon != shape.horizon || states != shape.states || actions != expected_actions)
    throw PreconditionError("policy table shape differs from the environment");
}

ValueTables empty_tables(const EnvShape& shape) {
  ValueTables out;
  out.value.assign(shape.horizon + 1, std::vector<double>(shape.states, 0.0));
  out.q.assign(shape.horizon, std::vector<double>(shape.points(), 0.0));
  return out;
}

// q[h] = r_h + P_h V_{h+1}.
void fill_q(const EnvSpec& env, const RewardTable& reward, std::size_t h, ValueTables& tables) {
  const std::vector<double>& next = tables.value[h + 1];
  for (std::size_t p = 0; p < env.shape().points(); ++p) {
    const auto row = env.transition_row(h, p);
    double expected = 0.0;
    for (std::size_t s = 0; s < row.size(); ++s) expected += row[s] * next[s];
    tables.q[h][p] = reward.at(h, p) + expected;
  }
}

double pair_value(const EnvShape& shape, const std::vector<double>& q, std::size_t s, std::span<const double> x,
                  std::span<const double> y) {
  double total = 0.0;
  for (std::size_t a = 0; a < shape.actions_p1; ++a) {
    if (x[a] == 0.0) continue;
    double inner = 0.0;
    for (std::size_t b = 0; b < shape.actions_p2; ++b) inner += y[b] * q[shape.point(s, a, b)];
    total += x[a] * inner;
  }
  return total;
}

// Digits of a deterministic policy, one per (h, s), in base `actions`.
class PolicyOdometer {
 public:
  PolicyOdometer(std::size_t horizon, std::size_t states, std::size_t actions)
      : states_(states), actions_(actions), digits_(horizon * states, 0) {}

  std::size_t operator()(std::size_t h, std::size_t s) const { return digits_[h * states_ + s]; }

  bool advance() {
    for (auto& digit : digits_) {
      if (++digit < actions_) return true;
      digit = 0;
    }
    return false;
  }

 private:
  std::size_t states_, actions_;
  std::vector<std::size_t> digits_;
};

void check_budget(std::uint64_t count, std::uint64_t budget) {
  if (count > budget) {
    std::ostringstream os;
    os << "brute force needs " << count << " policies, budget is " << budget;
    throw BudgetError(os.str());
  }
}

// V_1(s1) by pushing the state distribution forward through the steps.
template <typename ProbP1, typename ProbP2>
double forward_value(const EnvSpec& env, const RewardTable& reward, ProbP1&& prob_p1, ProbP2&& prob_p2) {
  const EnvShape& shape = env.shape();
  std::vector<double> mass(shape.states, 0.0), next(shape.states, 0.0);
  mass[env.initial_state()] = 1.0;
  double total = 0.0;
  for (std::size_t h = 0; h < shape.horizon; ++h) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < shape.states; ++s) {
      if (mass[s] == 0.0) continue;
      for (std::size_t a = 0; a < shape.actions_p1; ++a) {
        const double pa = prob_p1(h, s, a);
        if (pa == 0.0) continue;
        for (std::size_t b = 0; b < shape.actions_p2; ++b) {
          const double weight = mass[s] * pa * prob_p2(h, s, b);
          if (weight == 0.0) continue;
          total += weight * reward(h, s, a, b);
          const auto row = env.transition_row(h, s, a, b);
          for (std::size_t t = 0; t < shape.states; ++t) next[t] += weight * row[t];
        }
      }
    }
    mass.swap(next);
  }
  return total;
}

}  // namespace

OptimalSolution exact_optimal(const EnvSpec& env, const RewardTable& reward) {
  check_reward(env, reward);
  const EnvShape& shape = env.shape();
  if (shape.two_player()) throw DomainError("exact_optimal needs a single-agent environment");
  OptimalSolution out{empty_tables(shape), PolicyTable(shape.horizon, shape.states, shape.actions_p1)};
  for (std::size_t h = shape.horizon; h-- > 0;) {
    fill_q(env, reward, h, out.values);
    for (std::size_t s = 0; s < shape.states; ++s) {
      std::size_t best = 0;
      for (std::size_t a = 1; a < shape.actions_p1; ++a)
        if (out.values.q[h][shape.point(s, a)] > out.values.q[h][shape.point(s, best)]) best = a;
      out.policy.set(h, s, best);
      out.values.value[h][s] = out.values.q[h][shape.point(s, best)];
    }
  }
  return out;
}

ValueTables policy_value(const EnvSpec& env, const RewardTable& reward, const PolicyTable& policy) {
  return policy_value(env, reward, MixedPolicyTable::point_mass(policy));
}

ValueTables policy_value(const EnvSpec& env, const RewardTable& reward, const MixedPolicyTable& policy) {
  if (env.shape().two_player()) throw DomainError("single-agent policy_value on a two-player environment");
  return policy_value(env, reward, policy, MixedPolicyTable(env.shape().horizon, env.shape().states, 1));
}

ValueTables policy_value(const EnvSpec& env, const RewardTable& reward, const MixedPolicyTable& p1,
                         const MixedPolicyTable& p2) {
  check_reward(env, reward);
  const EnvShape& shape = env.shape();
  check_policy(shape, p1.horizon(), p1.states(), p1.actions(), shape.actions_p1);
  check_policy(shape, p2.horizon(), p2.states(), p2.actions(), shape.actions_p2);
  ValueTables out = empty_tables(shape);
  for (std::size_t h = shape.horizon; h-- > 0;) {
    fill_q(env, reward, h, out);
    for (std::size_t s = 0; s < shape.states; ++s) out.value[h][s] = pair_value(shape, out.q[h], s, p1(h, s), p2(h, s));
  }
  return out;
}

BestResponse best_response(const EnvSpec& env, const RewardTable& reward, Player player,
                           const MixedPolicyTable& fixed) {
  check_reward(env, reward);
  const EnvShape& shape = env.shape();
  if (!shape.two_player()) throw DomainError("best_response needs a two-player environment");
  const bool minimize = player == Player::p2;
  const std::size_t fixed_actions = minimize ? shape.actions_p1 : shape.actions_p2;
  const std::size_t own_actions = minimize ? shape.actions_p2 : shape.actions_p1;
  check_policy(shape, fixed.horizon(), fixed.states(), fixed.actions(), fixed_actions);

  BestResponse out{MixedPolicyTable(shape.horizon, shape.states, own_actions), empty_tables(shape)};
  for (std::size_t h = shape.horizon; h-- > 0;) {
    fill_q(env, reward, h, out.values);
    const std::vector<double>& q = out.values.q[h];
    for (std::size_t s = 0; s < shape.states; ++s) {
      const auto mix = fixed(h, s);
      std::size_t best = 0;
      double best_value = 0.0;
      for (std::size_t own = 0; own < own_actions; ++own) {
        double value = 0.0;
        for (std::size_t other = 0; other < fixed_actions; ++other) {
          if (mix[other] == 0.0) continue;
          const std::size_t p = minimize ? shape.point(s, other, own) : shape.point(s, own, other);
          value += mix[other] * q[p];
        }
        if (own == 0 || (minimize ? value < best_value : value > best_value)) {
          best = own;
          best_value = value;
        }
      }
      out.policy.set_point_mass(h, s, best);
      out.values.value[h][s] = best_value;
    }
  }
  return out;
}

double suboptimality(const EnvSpec& env, const RewardTable& reward, const PolicyTable& policy) {
  return suboptimality(env, reward, MixedPolicyTable::point_mass(policy));
}

double suboptimality(const EnvSpec& env, const RewardTable& reward, const MixedPolicyTable& policy) {
  const std::size_t s1 = env.initial_state();
  return exact_optimal(env, reward).values.initial(s1) - policy_value(env, reward, policy).initial(s1);
}

double ne_gap(const EnvSpec& env, const RewardTable& reward, const MixedPolicyTable& pi, const MixedPolicyTable& nu) {
  const std::size_t s1 = env.initial_state();
  const double against_nu = best_response(env, reward, Player::p1, nu).values.initial(s1);
  const double against_pi = best_response(env, reward, Player::p2, pi).values.initial(s1);
  return against_nu - against_pi;
}

std::vector<double> info_gain(const Kernel& kernel, double lambda, std::span<const Eigen::VectorXd> points) {
  if (!(lambda > 0.0)) throw PreconditionError("info_gain: lambda must be positive");
  GramCholesky factor(kernel, lambda);
  factor.reserve(points.size());
  std::vector<double> trace{0.0};
  trace.reserve(points.size() + 1);
  double half_log_det = 0.0;
  const double half_log_lambda = 0.5 * std::log(lambda);
  for (const auto& z : points) {
    const Eigen::VectorXd row = factor.append(z);
    half_log_det += std::log(row[row.size() - 1]);
    trace.push_back(half_log_det - static_cast<double>(factor.size()) * half_log_lambda);
  }
  return trace;
}

std::uint64_t policy_count(std::size_t horizon, std::size_t states, std::size_t actions) {
  std::uint64_t count = 1;
  constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t i = 0; i < horizon * states; ++i) {
    if (actions != 0 && count > cap / actions) return cap;
    count *= actions;
  }
  return count;
}

double brute_force_optimal_value(const EnvSpec& env, const RewardTable& reward, std::uint64_t budget) {
  check_reward(env, reward);
  const EnvShape& shape = env.shape();
  if (shape.two_player()) throw DomainError("brute_force_optimal_value needs a single-agent environment");
  check_budget(policy_count(shape.horizon, shape.states, shape.actions_p1), budget);
  PolicyOdometer policy(shape.horizon, shape.states, shape.actions_p1);
  double best = -std::numeric_limits<double>::infinity();
  do {
    const double value = forward_value(
        env, reward, [&](std::size_t h, std::size_t s, std::size_t a) { return policy(h, s) == a ? 1.0 : 0.0; },
        [](std::size_t, std::size_t, std::size_t) { return 1.0; });
    best = std::max(best, value);
  } while (policy.advance());
  return best;
}

double brute_force_best_response_value(const EnvSpec& env, const RewardTable& reward, Player player,
                                       const MixedPolicyTable& fixed, std::uint64_t budget) {
  check_reward(env, reward);
  const EnvShape& shape = env.shape();
  if (!shape.two_player()) throw DomainError("brute_force_best_response_value needs a two-player environment");
  const bool minimize = player == Player::p2;
  const std::size_t own_actions = minimize ? shape.actions_p2 : shape.actions_p1;
  check_policy(shape, fixed.horizon(), fixed.states(), fixed.actions(),
               minimize ? shape.actions_p1 : shape.actions_p2);
  check_budget(policy_count(shape.horizon, shape.states, own_actions), budget);

  PolicyOdometer policy(shape.horizon, shape.states, own_actions);
  auto own = [&](std::size_t h, std::size_t s, std::size_t action) { return policy(h, s) == action ? 1.0 : 0.0; };
  auto other = [&](std::size_t h, std::size_t s, std::size_t action) { return fixed(h, s)[action]; };
  double best = minimize ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  do {
    const double value = minimize ? forward_value(env, reward, other, own) : forward_value(env, reward, own, other);
    best = minimize ? std::min(best, value) : std::max(best, value);
  } while (policy.advance());
  return best;
}

}  // namespace rfrl

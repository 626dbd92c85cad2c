#include "rfrl/plan.hpp"

#include <sstream>

#include "rfrl/errors.hpp"
#include "rfrl/explore.hpp"

namespace rfrl {
namespace {

std::vector<double> targets_from(const std::vector<std::size_t>& next_states, const std::vector<double>& next_value) {
  std::vector<double> targets;
  targets.reserve(next_states.size());
  for (const std::size_t s : next_states) targets.push_back(next_value[s]);
  return targets;
}

void fit_at(StepLearner& learner, std::span<const double> targets, std::size_t h) {
  try {
    learner.fit(targets);
  } catch (const NumericalError& e) {
    std::ostringstream os;
    os << "planning step " << h << ": " << e.what();
    throw NumericalError(os.str());
  }
}

}  // namespace

Planner::Planner(const Domain& domain, const Dataset& dataset, const ApproximatorBackend& backend, double lambda)
    : domain_(domain) {
  const EnvShape& shape = domain_.shape;
  if (dataset.horizon() != shape.horizon) throw PreconditionError("dataset horizon differs from the environment");
  if (dataset.episodes() == 0) throw PreconditionError("planning needs a nonempty dataset");
  if (!(lambda > 0.0)) throw PreconditionError("lambda must be positive");
  for (std::size_t h = 0; h < shape.horizon; ++h) {
    auto learner = backend.make_learner(domain_.embedding, lambda, dataset.episodes());
    std::vector<std::size_t> next;
    next.reserve(dataset.episodes());
    for (const Transition& t : dataset.step(h)) {
      learner->observe(t.point);
      next.push_back(t.next_state);
    }
    learners_.push_back(std::move(learner));
    next_states_.push_back(std::move(next));
  }
}

std::vector<double> Planner::info_gain() const {
  std::vector<double> out;
  for (const auto& learner : learners_) out.push_back(learner->info_gain());
  return out;
}

PlanResult Planner::plan(const RewardTable& reward, double beta) {
  const EnvShape& shape = domain_.shape;
  if (!(reward.shape() == shape)) throw PreconditionError("reward table shape differs from the environment");
  if (shape.two_player()) throw PreconditionError("plan: use plan_game for two-player environments");
  if (!(beta > 0.0)) throw PreconditionError("beta must be positive");
  const auto horizon = static_cast<double>(shape.horizon);

  PlanResult out{PolicyTable(shape.horizon, shape.states, shape.actions_p1),
                 std::vector<std::vector<double>>(shape.horizon, std::vector<double>(shape.states, 0.0)),
                 std::vector<std::vector<double>>(shape.horizon, std::vector<double>(shape.points(), 0.0)),
                 std::vector<double>(shape.horizon, 0.0), 0.0};
  const std::vector<double> terminal(shape.states, 0.0);
  for (std::size_t h = shape.horizon; h-- > 0;) {
    StepLearner& learner = *learners_[h];
    const std::vector<double>& next = h + 1 < shape.horizon ? out.value[h + 1] : terminal;
    fit_at(learner, targets_from(next_states_[h], next), h);
    double bonus_sum = 0.0;
    for (std::size_t p = 0; p < shape.points(); ++p) {
      const double u = learner.bonus(p, beta, horizon);
      bonus_sum += u;
      out.q[h][p] = clip(learner.predict_clipped(p, horizon) + reward.at(h, p) + u, horizon);
    }
    out.mean_bonus[h] = bonus_sum / static_cast<double>(shape.points());
    for (std::size_t s = 0; s < shape.states; ++s) {
      const std::size_t a = joint_argmax(shape, out.q[h], s).first;
      out.policy.set(h, s, a);
      out.value[h][s] = out.q[h][shape.point(s, a)];
    }
  }
  out.initial_value = out.value[0][domain_.initial_state];
  return out;
}

GamePlanResult Planner::plan_game(const RewardTable& reward, double beta, const MatrixGameOptions& options) {
  const EnvShape& shape = domain_.shape;
  if (!(reward.shape() == shape)) throw PreconditionError("reward table shape differs from the environment");
  if (!(beta > 0.0)) throw PreconditionError("beta must be positive");
  const auto horizon = static_cast<double>(shape.horizon);
  const auto table = [&](std::size_t width) {
    return std::vector<std::vector<double>>(shape.horizon, std::vector<double>(width, 0.0));
  };
  const auto mixed = [&](std::size_t actions) { return MixedPolicyTable(shape.horizon, shape.states, actions); };

  GamePlanResult out{mixed(shape.actions_p1), mixed(shape.actions_p2), mixed(shape.actions_p2),
                     mixed(shape.actions_p1), table(shape.states), table(shape.states),
                     table(shape.points()), table(shape.points()), table(shape.states),
                     table(shape.states), std::vector<double>(shape.horizon, 0.0)};
  const std::vector<double> terminal(shape.states, 0.0);
  std::vector<double> upper_bonus(shape.points());
  Eigen::MatrixXd payoff(static_cast<Eigen::Index>(shape.actions_p1), static_cast<Eigen::Index>(shape.actions_p2));

  auto solve_at = [&](std::size_t h, std::size_t s, const std::vector<double>& q) {
    for (std::size_t a = 0; a < shape.actions_p1; ++a)
      for (std::size_t b = 0; b < shape.actions_p2; ++b)
        payoff(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = q[shape.point(s, a, b)];
    try {
      return solve_matrix_game(payoff, options);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "matrix game at step " << h << ", state " << s << ": " << e.what();
      throw NumericalError(os.str());
    }
  };
  auto as_span = [](const Eigen::VectorXd& v) { return std::span<const double>(v.data(), static_cast<std::size_t>(v.size())); };

  for (std::size_t h = shape.horizon; h-- > 0;) {
    StepLearner& learner = *learners_[h];
    const bool last = h + 1 == shape.horizon;

    fit_at(learner, targets_from(next_states_[h], last ? terminal : out.upper_value[h + 1]), h);
    double bonus_sum = 0.0;
    for (std::size_t p = 0; p < shape.points(); ++p) {
      upper_bonus[p] = learner.bonus(p, beta, horizon);
      bonus_sum += upper_bonus[p];
      out.upper_q[h][p] = clip(learner.predict_clipped(p, horizon) + reward.at(h, p) + upper_bonus[p], horizon);
    }
    out.mean_bonus[h] = bonus_sum / static_cast<double>(shape.points());

    fit_at(learner, targets_from(next_states_[h], last ? terminal : out.lower_value[h + 1]), h);
    for (std::size_t p = 0; p < shape.points(); ++p) {
      const double u = learner.bonus(p, beta, horizon);
      out.lower_q[h][p] = clip(learner.predict_clipped(p, horizon) + reward.at(h, p) - u, horizon);
    }

    for (std::size_t s = 0; s < shape.states; ++s) {
      const MatrixGameSolution upper = solve_at(h, s, out.upper_q[h]);
      out.pi.set(h, s, as_span(upper.row));
      out.upper_opponent.set(h, s, as_span(upper.col));
      out.upper_value[h][s] = upper.value;
      out.upper_gap[h][s] = upper.gap;

      const MatrixGameSolution lower = solve_at(h, s, out.lower_q[h]);
      out.lower_opponent.set(h, s, as_span(lower.row));
      out.nu.set(h, s, as_span(lower.col));
      out.lower_value[h][s] = lower.value;
      out.lower_gap[h][s] = lower.gap;
      out.max_solver_gap = std::max({out.max_solver_gap, upper.gap, lower.gap});
    }
  }
  out.initial_upper = out.upper_value[0][domain_.initial_state];
  out.initial_lower = out.lower_value[0][domain_.initial_state];
  return out;
}

PlanResult plan(const Domain& domain, const Dataset& dataset, const RewardTable& reward,
                const ApproximatorBackend& backend, double beta, double lambda) {
  return Planner(domain, dataset, backend, lambda).plan(reward, beta);
}

GamePlanResult plan_game(const Domain& domain, const Dataset& dataset, const RewardTable& reward,
                         const ApproximatorBackend& backend, double beta, double lambda,
                         const MatrixGameOptions& options) {
  return Planner(domain, dataset, backend, lambda).plan_game(reward, beta, options);
}

}  // namespace rfrl

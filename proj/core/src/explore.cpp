#include "rfrl/explore.hpp"

#include <chrono>
#include <sstream>

#include "rfrl/errors.hpp"

namespace rfrl {

std::pair<std::size_t, std::size_t> joint_argmax(const EnvShape& shape, std::span<const double> q, std::size_t s) {
  std::size_t best_a = 0, best_b = 0;
  double best = q[shape.point(s, 0, 0)];
  for (std::size_t b = 0; b < shape.actions_p2; ++b)
    for (std::size_t a = 0; a < shape.actions_p1; ++a) {
      const double value = q[shape.point(s, a, b)];
      if (value > best) {
        best = value;
        best_a = a;
        best_b = b;
      }
    }
  return {best_a, best_b};
}

namespace {

ExploreResult run_exploration(const EnvSpec& env, const ApproximatorBackend& backend, const ExploreConfig& config,
                              Rng& rng, const ExploreObserver& observer) {
  if (config.episodes == 0) throw PreconditionError("exploration needs at least one episode");
  if (!(config.beta > 0.0)) throw PreconditionError("beta must be positive");
  if (!(config.lambda > 0.0)) throw PreconditionError("lambda must be positive");

  const EnvShape& shape = env.shape();
  const auto horizon = static_cast<double>(shape.horizon);
  const Domain domain = env.domain();

  std::vector<std::unique_ptr<StepLearner>> learners;
  for (std::size_t h = 0; h < shape.horizon; ++h)
    learners.push_back(backend.make_learner(domain.embedding, config.lambda, config.episodes));

  ExploreResult result{Dataset(shape.horizon), {}};
  result.log.reserve(config.episodes);
  EpisodeSnapshot snapshot{0, std::vector<StepTables>(shape.horizon), PolicyTable(shape.horizon, shape.states, shape.actions_p1),
                           PolicyTable(shape.horizon, shape.states, shape.actions_p2)};
  for (auto& tables : snapshot.steps) {
    tables.bonus.assign(shape.points(), 0.0);
    tables.reward.assign(shape.points(), 0.0);
    tables.fitted.assign(shape.points(), 0.0);
    tables.q.assign(shape.points(), 0.0);
    tables.value.assign(shape.states, 0.0);
  }
  const std::vector<double> terminal(shape.states, 0.0);
  std::vector<double> targets;

  for (std::size_t k = 1; k <= config.episodes; ++k) {
    const auto start = std::chrono::steady_clock::now();
    snapshot.episode = k;
    for (std::size_t hh = shape.horizon; hh-- > 0;) {
      StepLearner& learner = *learners[hh];
      StepTables& tables = snapshot.steps[hh];
      const std::vector<double>& next_value = hh + 1 < shape.horizon ? snapshot.steps[hh + 1].value : terminal;

      targets.clear();
      for (const Transition& t : result.dataset.step(hh)) targets.push_back(next_value[t.next_state]);
      try {
        learner.fit(targets);
      } catch (const NumericalError& e) {
        std::ostringstream os;
        os << "episode " << k << ", step " << hh << ": " << e.what();
        throw NumericalError(os.str());
      }

      for (std::size_t c = 0; c < shape.points(); ++c) {
        const double u = learner.bonus(c, config.beta, horizon);
        tables.bonus[c] = u;
        tables.reward[c] = u / horizon;
        tables.fitted[c] = learner.predict_clipped(c, horizon);
        tables.q[c] = clip(tables.fitted[c] + tables.reward[c] + u, horizon);
      }
      for (std::size_t s = 0; s < shape.states; ++s) {
        const auto [a, b] = joint_argmax(shape, tables.q, s);
        tables.value[s] = tables.q[shape.point(s, a, b)];
        snapshot.policy_p1.set(hh, s, a);
        snapshot.policy_p2.set(hh, s, b);
      }
    }

    const EpisodeRecord record = run_episode(env, snapshot.policy_p1, snapshot.policy_p2, rng);
    double bonus_sum = 0.0;
    for (std::size_t h = 0; h < shape.horizon; ++h) bonus_sum += snapshot.steps[h].bonus[record[h].point];
    if (observer) observer(snapshot);

    result.dataset.append(record);
    for (std::size_t h = 0; h < shape.horizon; ++h) {
      try {
        learners[h]->observe(record[h].point);
      } catch (const NumericalError& e) {
        std::ostringstream os;
        os << "episode " << k << ", step " << h << ": " << e.what();
        throw NumericalError(os.str());
      }
    }
    const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
    result.log.push_back({k, bonus_sum / horizon, snapshot.steps[0].value[env.initial_state()], elapsed.count()});
  }
  return result;
}

}  // namespace

ExploreResult explore(const EnvSpec& env, const ApproximatorBackend& backend, const ExploreConfig& config, Rng& rng,
                      const ExploreObserver& observer) {
  if (env.shape().two_player()) throw PreconditionError("explore: use explore_game for two-player environments");
  return run_exploration(env, backend, config, rng, observer);
}

ExploreResult explore_game(const EnvSpec& env, const ApproximatorBackend& backend, const ExploreConfig& config,
                           Rng& rng, const ExploreObserver& observer) {
  return run_exploration(env, backend, config, rng, observer);
}

}  // namespace rfrl

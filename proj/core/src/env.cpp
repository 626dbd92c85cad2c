#include "rfrl/env.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "rfrl/errors.hpp"

namespace rfrl {
namespace {

std::string range_message(const char* what, std::size_t value, std::size_t bound) {
  std::ostringstream os;
  os << what << " index " << value << " out of range [0, " << bound << ")";
  return os.str();
}

}  // namespace

std::size_t EnvShape::point(std::size_t s, std::size_t a, std::size_t b) const {
  if (s >= states) throw IndexError(range_message("state", s, states));
  if (a >= actions_p1) throw IndexError(range_message("action_p1", a, actions_p1));
  if (b >= actions_p2) throw IndexError(range_message("action_p2", b, actions_p2));
  return (s * actions_p1 + a) * actions_p2 + b;
}

void EnvShape::check_step(std::size_t h) const {
  if (h >= horizon) throw IndexError(range_message("step", h, horizon));
}

void EnvShape::check_state(std::size_t s) const {
  if (s >= states) throw IndexError(range_message("state", s, states));
}

void EnvShape::validate() const {
  if (states == 0 || actions_p1 == 0 || actions_p2 == 0)
    throw PreconditionError("environment needs at least one state and one action per player");
  if (horizon == 0) throw PreconditionError("horizon must be at least 1");
}

Eigen::VectorXd embed(const EmbeddingSpec& spec, const EnvShape& shape, std::size_t s, std::size_t a,
                      std::size_t b) {
  const std::size_t flat = shape.point(s, a, b);
  Eigen::VectorXd z;
  switch (spec.mode) {
    case EmbeddingMode::one_hot:
      z = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(shape.points()), static_cast<Eigen::Index>(flat));
      return z;
    case EmbeddingMode::random_sphere: {
      if (spec.dim == 0) throw PreconditionError("random-sphere embedding needs dim >= 1");
      Rng rng(spec.seed, flat);
      z.resize(static_cast<Eigen::Index>(spec.dim));
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
      break;
    }
    case EmbeddingMode::user_matrix:
      if (static_cast<std::size_t>(spec.user_rows.rows()) != shape.points())
        throw PreconditionError("user embedding matrix needs one row per (s, a, b)");
      z = spec.user_rows.row(static_cast<Eigen::Index>(flat)).transpose();
      break;
  }
  if (spec.normalize) {
    const double norm = z.norm();
    if (!(norm > 0.0)) throw DomainError("cannot normalize a zero embedding vector");
    z /= norm;
  }
  return z;
}

Embedding::Embedding(EmbeddingSpec spec, const EnvShape& shape) : spec_(std::move(spec)) {
  shape.validate();
  const std::size_t n = shape.points();
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t s = p / shape.joint_actions();
    const std::size_t a = (p / shape.actions_p2) % shape.actions_p1;
    const std::size_t b = p % shape.actions_p2;
    Eigen::VectorXd z = embed(spec_, shape, s, a, b);
    if (p == 0) table_.resize(z.size(), static_cast<Eigen::Index>(n));
    table_.col(static_cast<Eigen::Index>(p)) = z;
  }
  if (spec_.mode == EmbeddingMode::one_hot) spec_.dim = n;
}

bool Embedding::unit_norm(double tol) const {
  for (Eigen::Index p = 0; p < table_.cols(); ++p)
    if (std::abs(table_.col(p).norm() - 1.0) > tol) return false;
  return true;
}

EnvSpec::EnvSpec(EnvShape shape, std::vector<double> transition, std::size_t initial_state,
                 EmbeddingSpec embedding, std::uint64_t seed)
    : shape_(shape), transition_(std::move(transition)), initial_state_(initial_state), seed_(seed) {
  shape_.validate();
  shape_.check_state(initial_state_);
  const std::size_t rows = shape_.horizon * shape_.points();
  if (transition_.size() != rows * shape_.states)
    throw PreconditionError("transition tensor has the wrong number of entries");
  for (std::size_t r = 0; r < rows; ++r) {
    double total = 0.0;
    for (std::size_t s2 = 0; s2 < shape_.states; ++s2) {
      const double p = transition_[r * shape_.states + s2];
      if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("transition probabilities must be finite and nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "transition row " << r << " sums to " << total << ", expected 1";
      throw DomainError(os.str());
    }
  }
  embedding_ = std::make_shared<const Embedding>(std::move(embedding), shape_);
}

std::span<const double> EnvSpec::transition_row(std::size_t h, std::size_t s, std::size_t a,
                                                std::size_t b) const {
  return transition_row(h, shape_.point(s, a, b));
}

std::span<const double> EnvSpec::transition_row(std::size_t h, std::size_t point) const {
  shape_.check_step(h);
  if (point >= shape_.points()) throw IndexError(range_message("point", point, shape_.points()));
  return std::span<const double>(transition_).subspan((h * shape_.points() + point) * shape_.states,
                                                      shape_.states);
}

RewardTable::RewardTable(EnvShape shape, std::vector<double> values) : shape_(shape), values_(std::move(values)) {
  shape_.validate();
  if (values_.size() != shape_.horizon * shape_.points())
    throw PreconditionError("reward table has the wrong number of entries");
  for (double r : values_)
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("rewards must lie in [0, 1]");
}

RewardTable RewardTable::zeros(const EnvShape& shape) {
  return RewardTable(shape, std::vector<double>(shape.horizon * shape.points(), 0.0));
}

double RewardTable::operator()(std::size_t h, std::size_t s, std::size_t a, std::size_t b) const {
  shape_.check_step(h);
  return at(h, shape_.point(s, a, b));
}

std::span<const double> RewardTable::step(std::size_t h) const {
  shape_.check_step(h);
  return std::span<const double>(values_).subspan(h * shape_.points(), shape_.points());
}

PolicyTable::PolicyTable(std::size_t horizon, std::size_t states, std::size_t actions)
    : horizon_(horizon), states_(states), actions_(actions), actions_of_(horizon * states, 0) {
  if (actions == 0) throw PreconditionError("policy needs at least one action");
}

void PolicyTable::set(std::size_t h, std::size_t s, std::size_t action) {
  if (h >= horizon_) throw IndexError(range_message("step", h, horizon_));
  if (s >= states_) throw IndexError(range_message("state", s, states_));
  if (action >= actions_) throw IndexError(range_message("action", action, actions_));
  actions_of_[h * states_ + s] = action;
}

MixedPolicyTable::MixedPolicyTable(std::size_t horizon, std::size_t states, std::size_t actions)
    : horizon_(horizon), states_(states), actions_(actions),
      probs_(horizon * states * actions, actions > 0 ? 1.0 / static_cast<double>(actions) : 0.0) {
  if (actions == 0) throw PreconditionError("policy needs at least one action");
}

MixedPolicyTable MixedPolicyTable::point_mass(const PolicyTable& policy) {
  MixedPolicyTable mixed(policy.horizon(), policy.states(), policy.actions());
  for (std::size_t h = 0; h < policy.horizon(); ++h)
    for (std::size_t s = 0; s < policy.states(); ++s) mixed.set_point_mass(h, s, policy(h, s));
  return mixed;
}

std::span<const double> MixedPolicyTable::operator()(std::size_t h, std::size_t s) const {
  return std::span<const double>(probs_).subspan((h * states_ + s) * actions_, actions_);
}

void MixedPolicyTable::set(std::size_t h, std::size_t s, std::span<const double> probs) {
  if (h >= horizon_) throw IndexError(range_message("step", h, horizon_));
  if (s >= states_) throw IndexError(range_message("state", s, states_));
  if (probs.size() != actions_) throw PreconditionError("mixed strategy has the wrong length");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw DomainError("mixed strategy has a negative entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10) throw DomainError("mixed strategy does not sum to one");
  std::copy(probs.begin(), probs.end(), probs_.begin() + static_cast<std::ptrdiff_t>((h * states_ + s) * actions_));
}

void MixedPolicyTable::set_point_mass(std::size_t h, std::size_t s, std::size_t action) {
  if (action >= actions_) throw IndexError(range_message("action", action, actions_));
  std::vector<double> probs(actions_, 0.0);
  probs[action] = 1.0;
  set(h, s, probs);
}

Dataset::Dataset(std::size_t horizon) : steps_(horizon) {}

void Dataset::append(const EpisodeRecord& episode) {
  if (episode.size() != steps_.size()) throw PreconditionError("episode length differs from the horizon");
  for (std::size_t h = 0; h < steps_.size(); ++h) steps_[h].push_back(episode[h]);
  ++episodes_;
}

std::size_t step(const EnvSpec& env, std::size_t h, std::size_t s, std::size_t a, std::size_t b, Rng& rng) {
  return rng.categorical(env.transition_row(h, s, a, b));
}

namespace {

template <typename Choose>
EpisodeRecord rollout(const EnvSpec& env, Rng& rng, Choose&& choose) {
  const EnvShape& shape = env.shape();
  EpisodeRecord record;
  record.reserve(shape.horizon);
  std::size_t s = env.initial_state();
  for (std::size_t h = 0; h < shape.horizon; ++h) {
    const auto [a, b] = choose(h, s);
    const std::size_t point = shape.point(s, a, b);
    const std::size_t next = rng.categorical(env.transition_row(h, point));
    record.push_back({s, a, b, next, point});
    s = next;
  }
  return record;
}

void check_covers(const EnvShape& shape, std::size_t horizon, std::size_t states, std::size_t actions,
                  std::size_t expected_actions) {
  if (horizon != shape.horizon || states != shape.states || actions != expected_actions)
    throw PreconditionError("policy table does not match the environment");
}

}  // namespace

EpisodeRecord run_episode(const EnvSpec& env, const PolicyTable& policy, Rng& rng) {
  if (env.shape().two_player()) throw PreconditionError("single-agent rollout on a two-player environment");
  check_covers(env.shape(), policy.horizon(), policy.states(), policy.actions(), env.shape().actions_p1);
  return rollout(env, rng, [&](std::size_t h, std::size_t s) {
    return std::pair<std::size_t, std::size_t>{policy(h, s), 0};
  });
}

EpisodeRecord run_episode(const EnvSpec& env, const PolicyTable& p1, const PolicyTable& p2, Rng& rng) {
  check_covers(env.shape(), p1.horizon(), p1.states(), p1.actions(), env.shape().actions_p1);
  check_covers(env.shape(), p2.horizon(), p2.states(), p2.actions(), env.shape().actions_p2);
  return rollout(env, rng, [&](std::size_t h, std::size_t s) {
    return std::pair<std::size_t, std::size_t>{p1(h, s), p2(h, s)};
  });
}

EpisodeRecord run_episode(const EnvSpec& env, const MixedPolicyTable& p1, const MixedPolicyTable& p2, Rng& rng) {
  check_covers(env.shape(), p1.horizon(), p1.states(), p1.actions(), env.shape().actions_p1);
  check_covers(env.shape(), p2.horizon(), p2.states(), p2.actions(), env.shape().actions_p2);
  return rollout(env, rng, [&](std::size_t h, std::size_t s) {
    const std::size_t a = rng.categorical(p1(h, s));
    const std::size_t b = rng.categorical(p2(h, s));
    return std::pair<std::size_t, std::size_t>{a, b};
  });
}

}  // namespace rfrl

#pragma once

// Episodic tabular MDPs and two-player zero-sum Markov games with known
// dynamics, feature embeddings of (s, a[, b]) and trajectory storage.
//
// Steps are 0-based throughout: h = 0 is the first step, h = horizon - 1 the
// last. A single-agent environment is a game whose second player has exactly
// one action, so the same tables serve both settings.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rfrl/rng.hpp"

namespace rfrl {

struct EnvShape {
  std::size_t states = 0;
  std::size_t actions_p1 = 0;
  std::size_t actions_p2 = 1;
  std::size_t horizon = 0;

  std::size_t joint_actions() const { return actions_p1 * actions_p2; }
  /// Number of embedded points |S| * |A| * |B|.
  std::size_t points() const { return states * joint_actions(); }
  bool two_player() const { return actions_p2 > 1; }

  /// Flat index of (s, a, b); b varies fastest. Throws IndexError.
  std::size_t point(std::size_t s, std::size_t a, std::size_t b = 0) const;
  std::size_t state_of(std::size_t point) const { return point / joint_actions(); }

  void check_step(std::size_t h) const;
  void check_state(std::size_t s) const;
  void validate() const;

  friend bool operator==(const EnvShape&, const EnvShape&) = default;
};

enum class EmbeddingMode { one_hot, random_sphere, user_matrix };

struct EmbeddingSpec {
  EmbeddingMode mode = EmbeddingMode::one_hot;
  /// Output dimension; ignored in one-hot mode, where it is |S||A||B|.
  std::size_t dim = 0;
  bool normalize = true;
  std::uint64_t seed = 0;
  /// user-matrix mode: one row per flat point, `dim` columns.
  Eigen::MatrixXd user_rows;
};

/// Embedding of one (s, a, b). random-sphere vectors are drawn from the
/// counter-based generator keyed on (seed, flat index), so repeated queries agree.
Eigen::VectorXd embed(const EmbeddingSpec& spec, const EnvShape& shape, std::size_t s,
                      std::size_t a, std::size_t b = 0);

/// Materialized embedding of every point of an environment, one column per point.
class Embedding {
 public:
  Embedding(EmbeddingSpec spec, const EnvShape& shape);

  std::size_t dim() const { return static_cast<std::size_t>(table_.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(table_.cols()); }
  auto point(std::size_t p) const { return table_.col(static_cast<Eigen::Index>(p)); }
  const Eigen::MatrixXd& table() const { return table_; }
  const EmbeddingSpec& spec() const { return spec_; }
  /// True when every column has unit Euclidean norm within `tol`.
  bool unit_norm(double tol = 1e-9) const;

 private:
  EmbeddingSpec spec_;
  Eigen::MatrixXd table_;
};

/// The part of an environment a planner may see: sizes, embedding and start state.
struct Domain {
  EnvShape shape;
  std::shared_ptr<const Embedding> embedding;
  std::size_t initial_state = 0;
};

class EnvSpec {
 public:
  /// `transition` holds P_h(s' | s, a, b) with row index h * points + point(s, a, b).
  /// Rows must be nonnegative and sum to one within 1e-12.
  EnvSpec(EnvShape shape, std::vector<double> transition, std::size_t initial_state,
          EmbeddingSpec embedding, std::uint64_t seed = 0);

  const EnvShape& shape() const { return shape_; }
  std::size_t initial_state() const { return initial_state_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& transition() const { return transition_; }
  std::span<const double> transition_row(std::size_t h, std::size_t s, std::size_t a,
                                         std::size_t b = 0) const;
  std::span<const double> transition_row(std::size_t h, std::size_t point) const;

  const EmbeddingSpec& embedding_spec() const { return embedding_->spec(); }
  const Embedding& embedding() const { return *embedding_; }
  Domain domain() const { return {shape_, embedding_, initial_state_}; }

 private:
  EnvShape shape_;
  std::vector<double> transition_;
  std::size_t initial_state_;
  std::uint64_t seed_;
  std::shared_ptr<const Embedding> embedding_;
};

/// r_h(s, a[, b]) in [0, 1], laid out like the transition rows.
class RewardTable {
 public:
  RewardTable(EnvShape shape, std::vector<double> values);
  static RewardTable zeros(const EnvShape& shape);

  const EnvShape& shape() const { return shape_; }
  double operator()(std::size_t h, std::size_t s, std::size_t a, std::size_t b = 0) const;
  double at(std::size_t h, std::size_t point) const { return values_[h * shape_.points() + point]; }
  std::span<const double> step(std::size_t h) const;
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const RewardTable&, const RewardTable&) = default;

 private:
  EnvShape shape_;
  std::vector<double> values_;
};

/// Deterministic per-step policy h, s -> action.
class PolicyTable {
 public:
  PolicyTable(std::size_t horizon, std::size_t states, std::size_t actions);

  std::size_t operator()(std::size_t h, std::size_t s) const { return actions_of_[h * states_ + s]; }
  void set(std::size_t h, std::size_t s, std::size_t action);

  std::size_t horizon() const { return horizon_; }
  std::size_t states() const { return states_; }
  std::size_t actions() const { return actions_; }

  friend bool operator==(const PolicyTable&, const PolicyTable&) = default;

 private:
  std::size_t horizon_, states_, actions_;
  std::vector<std::size_t> actions_of_;
};

/// Per-step mixed strategy h, s -> distribution over one player's actions.
class MixedPolicyTable {
 public:
  /// Starts uniform.
  MixedPolicyTable(std::size_t horizon, std::size_t states, std::size_t actions);
  static MixedPolicyTable point_mass(const PolicyTable& policy);

  std::span<const double> operator()(std::size_t h, std::size_t s) const;
  /// Throws DomainError unless `probs` is nonnegative and sums to one within 1e-10.
  void set(std::size_t h, std::size_t s, std::span<const double> probs);
  void set_point_mass(std::size_t h, std::size_t s, std::size_t action);

  std::size_t horizon() const { return horizon_; }
  std::size_t states() const { return states_; }
  std::size_t actions() const { return actions_; }

  friend bool operator==(const MixedPolicyTable&, const MixedPolicyTable&) = default;

 private:
  std::size_t horizon_, states_, actions_;
  std::vector<double> probs_;
};

struct Transition {
  std::size_t state = 0;
  std::size_t action_p1 = 0;
  std::size_t action_p2 = 0;
  std::size_t next_state = 0;
  /// Flat embedding index of (state, action_p1, action_p2); z is the embedding column.
  std::size_t point = 0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

using EpisodeRecord = std::vector<Transition>;

/// Append-only per-step transition lists; each step holds one entry per episode.
class Dataset {
 public:
  explicit Dataset(std::size_t horizon);

  void append(const EpisodeRecord& episode);
  std::size_t episodes() const { return episodes_; }
  std::size_t horizon() const { return steps_.size(); }
  std::span<const Transition> step(std::size_t h) const { return steps_.at(h); }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<std::vector<Transition>> steps_;
  std::size_t episodes_ = 0;
};

/// Samples s' ~ P_h(. | s, a, b).
std::size_t step(const EnvSpec& env, std::size_t h, std::size_t s, std::size_t a, std::size_t b,
                 Rng& rng);
inline std::size_t step(const EnvSpec& env, std::size_t h, std::size_t s, std::size_t a, Rng& rng) {
  return step(env, h, s, a, 0, rng);
}

EpisodeRecord run_episode(const EnvSpec& env, const PolicyTable& policy, Rng& rng);
EpisodeRecord run_episode(const EnvSpec& env, const PolicyTable& p1, const PolicyTable& p2, Rng& rng);
EpisodeRecord run_episode(const EnvSpec& env, const MixedPolicyTable& p1, const MixedPolicyTable& p2,
                          Rng& rng);

}  // namespace rfrl

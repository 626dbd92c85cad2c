#pragma once

#include <cstdint>

#include "rfrl/env.hpp"

namespace rfrl {

/// Random environment: every transition row ~ Dirichlet(alpha), all drawn from `seed`.
EnvSpec random_env(const EnvShape& shape, const EmbeddingSpec& embedding, std::uint64_t seed,
                   double dirichlet_alpha = 1.0, std::size_t initial_state = 0);

/// Rewards i.i.d. uniform on [0, 1].
RewardTable random_reward(const EnvShape& shape, std::uint64_t seed);

/// Deterministic chain: action 1 moves s -> min(s + 1, states - 1), every other action
/// resets to state 0. Starts in state 0.
EnvSpec chain_env(std::size_t states, std::size_t actions, std::size_t horizon,
                  const EmbeddingSpec& embedding = {});

}  // namespace rfrl

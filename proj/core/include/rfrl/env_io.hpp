#pragma once

// JSON documents for environments and reward tables. Rewards live in their own
// documents so that one environment can be paired with any number of them.
//
// Environment:
//   {"states", "actions_p1", "actions_p2", "horizon", "initial_state",
//    "transition": [h][s][a]([b])[s'],
//    "embedding": {"mode": "one_hot"|"random_sphere"|"user_matrix", "dim", "seed",
//                  "normalize", "matrix"}, "seed"}
// Reward:
//   {"states", "actions_p1", "actions_p2", "horizon", "reward": [h][s][a]([b])}
//
// The b level is present iff actions_p2 > 1.

#include <filesystem>
#include <string>
#include <string_view>

#include "rfrl/env.hpp"

namespace rfrl {

std::string env_to_json(const EnvSpec& env);
EnvSpec env_from_json(std::string_view text);

std::string reward_to_json(const RewardTable& reward);
RewardTable reward_from_json(std::string_view text);

EnvSpec load_env(const std::filesystem::path& path);
RewardTable load_reward(const std::filesystem::path& path);
void save_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

const char* to_string(EmbeddingMode mode);
EmbeddingMode embedding_mode_from_string(std::string_view name);

}  // namespace rfrl

#pragma once

// Run configuration: one strict JSON document. Unknown keys are errors and
// every error names the line it refers to.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rfrl/approximator.hpp"
#include "rfrl/env.hpp"
#include "rfrl/matrix_game.hpp"

namespace rfrl::harness {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, std::size_t line, const std::string& message);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class Setting { single, game };

struct EnvGenerator {
  EnvShape shape;
  double alpha = 1.0;
  /// Fixed environment seed; unset means one environment per run seed.
  std::optional<std::uint64_t> seed;
  EmbeddingSpec embedding;
};

struct KernelChoice {
  KernelKind kind = KernelKind::one_hot;
  double bandwidth = 1.0;
};

struct RewardGenerator {
  std::size_t count = 1;
  std::uint64_t seed = 0;
};

struct RunConfig {
  Setting setting = Setting::single;
  /// Either a generator or a concrete environment (file and inline sources are loaded eagerly).
  std::variant<EnvGenerator, EnvSpec> env;
  std::variant<KernelChoice, NeuralBackendConfig> backend;
  std::vector<std::size_t> episodes;
  /// Unset: 2 H.
  std::optional<double> beta;
  /// Unset: 1 + 1/K.
  std::optional<double> lambda;
  std::optional<double> plan_beta;
  std::optional<double> plan_lambda;
  MatrixGameOptions tol;
  std::variant<RewardGenerator, std::vector<RewardTable>> rewards;
  std::vector<std::uint64_t> seeds;
  std::size_t workers = 1;
  std::filesystem::path output = "results";

  EnvShape shape() const;
  double explore_beta() const;
  double explore_lambda(std::size_t episodes) const;
  double planning_beta() const;
  double planning_lambda(std::size_t episodes) const;
  EnvSpec environment(std::uint64_t run_seed) const;
  std::vector<RewardTable> reward_tables() const;
  std::unique_ptr<ApproximatorBackend> make_backend() const;
};

/// Parses and validates. `source` names the document in error messages and
/// anchors relative file paths (its parent directory).
RunConfig parse_config(const std::string& text, const std::filesystem::path& source);
RunConfig load_config(const std::filesystem::path& path);

/// Self-contained JSON for the resolved configuration: environment files and
/// reward files are inlined and defaults are spelled out.
std::string resolved_json(const RunConfig& config, const std::string& version, const std::string& git);

/// "0,1,5-9" -> {0, 1, 5, 6, 7, 8, 9}.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace rfrl::harness

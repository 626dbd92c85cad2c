#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "rfrl/harness/config.hpp"

namespace rfrl::harness {

/// A job failed while computing; the message names K and the seed.
class RunFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::optional<std::filesystem::path> output;
  std::optional<std::vector<std::uint64_t>> seeds;
  /// Progress lines go here unless null.
  std::ostream* progress = nullptr;
};

struct RunSummary {
  std::filesystem::path directory;
  std::size_t jobs = 0;
  std::size_t result_rows = 0;
};

/// Runs every (K, seed) job and writes explore_log.csv, results.csv and
/// manifest.json into the output directory.
RunSummary run_experiment(RunConfig config, const RunOptions& options = {});

std::string version();
std::string git_revision();

}  // namespace rfrl::harness

#include "rfrl/harness/runner.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "rfrl/env_io.hpp"
#include "rfrl/explore.hpp"
#include "rfrl/harness/csv.hpp"
#include "rfrl/oracle.hpp"
#include "rfrl/plan.hpp"

#ifndef RFRL_VERSION
#define RFRL_VERSION "0.0.0"
#endif
#ifndef RFRL_GIT
#define RFRL_GIT "unknown"
#endif

namespace rfrl::harness {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Job {
  std::size_t index;
  std::size_t episodes;
  std::uint64_t seed;
};

CsvRow explore_header() { return {"K", "seed", "k", "mean_bonus", "V1_k", "wall_ms"}; }

CsvRow results_header(Setting setting) {
  if (setting == Setting::single)
    return {"K", "reward_id", "seed", "suboptimality", "V1", "info_gain_final", "wall_ms"};
  return {"K", "reward_id", "seed", "ne_gap", "V1", "V1_lower", "max_solver_gap", "info_gain_final", "wall_ms"};
}

std::string job_name(std::size_t index) {
  std::ostringstream os;
  os << "job-";
  os.width(6);
  os.fill('0');
  os << index;
  return os.str();
}

void run_job(const RunConfig& config, const ApproximatorBackend& backend, const std::vector<RewardTable>& rewards,
             const Job& job, const std::filesystem::path& scratch) {
  const auto start = Clock::now();
  const EnvSpec env = config.environment(job.seed);
  Rng rng(job.seed, job.episodes);
  const ExploreConfig explore_config{job.episodes, config.explore_beta(), config.explore_lambda(job.episodes)};
  const ExploreResult exploration = config.setting == Setting::single
                                        ? explore(env, backend, explore_config, rng)
                                        : explore_game(env, backend, explore_config, rng);

  const std::string k = std::to_string(job.episodes), seed = std::to_string(job.seed);
  {
    std::ofstream out(scratch / (job_name(job.index) + ".explore.csv"), std::ios::binary);
    for (const EpisodeLog& entry : exploration.log)
      write_csv_row(out, {k, seed, std::to_string(entry.episode), format_number(entry.mean_bonus),
                          format_number(entry.initial_value), format_number(entry.wall_ms)});
    if (!out) throw std::runtime_error("cannot write scratch file");
  }

  Planner planner(env.domain(), exploration.dataset, backend, config.planning_lambda(job.episodes));
  const std::vector<double> gains = planner.info_gain();
  double gain = 0.0;
  for (const double g : gains) gain += g;
  gain /= static_cast<double>(gains.size());
  const double explore_ms = elapsed_ms(start);

  std::ofstream out(scratch / (job_name(job.index) + ".results.csv"), std::ios::binary);
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    const auto plan_start = Clock::now();
    if (config.setting == Setting::single) {
      const PlanResult result = planner.plan(rewards[i], config.planning_beta());
      const double gap = suboptimality(env, rewards[i], result.policy);
      write_csv_row(out, {k, std::to_string(i), seed, format_number(gap), format_number(result.initial_value),
                          format_number(gain), format_number(explore_ms + elapsed_ms(plan_start))});
    } else {
      const GamePlanResult result = planner.plan_game(rewards[i], config.planning_beta(), config.tol);
      const double gap = ne_gap(env, rewards[i], result.pi, result.nu);
      write_csv_row(out, {k, std::to_string(i), seed, format_number(gap), format_number(result.initial_upper),
                          format_number(result.initial_lower), format_number(result.max_solver_gap),
                          format_number(gain), format_number(explore_ms + elapsed_ms(plan_start))});
    }
  }
  if (!out) throw std::runtime_error("cannot write scratch file");
}

std::size_t merge(const std::filesystem::path& target, const CsvRow& header, const std::filesystem::path& scratch,
                  std::size_t jobs, const std::string& suffix) {
  std::ofstream out(target, std::ios::binary);
  write_csv_row(out, header);
  std::size_t rows = 0;
  for (std::size_t j = 0; j < jobs; ++j) {
    std::ifstream in(scratch / (job_name(j) + suffix), std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      out << line << '\n';
      ++rows;
    }
  }
  if (!out) throw std::runtime_error("cannot write " + target.string());
  return rows;
}

}  // namespace

std::string version() { return RFRL_VERSION; }
std::string git_revision() { return RFRL_GIT; }

RunSummary run_experiment(RunConfig config, const RunOptions& options) {
  if (options.output) config.output = *options.output;
  if (options.seeds) config.seeds = *options.seeds;

  const std::filesystem::path dir = config.output;
  std::filesystem::create_directories(dir);
  save_text(dir / "manifest.json", resolved_json(config, version(), git_revision()));

  const std::filesystem::path scratch = dir / ".jobs";
  std::filesystem::remove_all(scratch);
  std::filesystem::create_directories(scratch);

  std::vector<Job> jobs;
  for (const std::size_t k : config.episodes)
    for (const std::uint64_t seed : config.seeds) jobs.push_back({jobs.size(), k, seed});

  const std::vector<RewardTable> rewards = config.reward_tables();
  const auto backend = config.make_backend();

  std::vector<std::string> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      const auto start = Clock::now();
      try {
        run_job(config, *backend, rewards, job, scratch);
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "K=" << job.episodes << ", seed=" << job.seed << ": " << e.what();
        failures[j] = os.str();
      }
      if (options.progress) {
        const std::lock_guard lock(progress_mutex);
        *options.progress << "[" << j + 1 << "/" << jobs.size() << "] K=" << job.episodes << " seed=" << job.seed
                          << (failures[j].empty() ? " done in " : " failed after ") << elapsed_ms(start) << " ms"
                          << std::endl;
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& thread : pool) thread.join();

  for (const std::string& failure : failures) {
    if (failure.empty()) continue;
    std::filesystem::remove_all(scratch);
    throw RunFailure(failure);
  }

  RunSummary summary{dir, jobs.size(), 0};
  merge(dir / "explore_log.csv", explore_header(), scratch, jobs.size(), ".explore.csv");
  summary.result_rows = merge(dir / "results.csv", results_header(config.setting), scratch, jobs.size(), ".results.csv");
  std::filesystem::remove_all(scratch);
  return summary;
}

}  // namespace rfrl::harness

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "rfrl/env_io.hpp"
#include "rfrl/harness/config.hpp"
#include "rfrl/harness/csv.hpp"
#include "rfrl/harness/report.hpp"
#include "rfrl/harness/runner.hpp"

using namespace rfrl;
using namespace rfrl::harness;
namespace fs = std::filesystem;

namespace {

const fs::path kData = RFRL_TEST_DATA;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rfrl_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<CsvRow> read_rows(const fs::path& path) {
  std::ifstream in(path);
  return read_csv(in);
}

int run_cli(const std::string& args) {
  const std::string command = std::string("\"") + RFRL_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t error_line(const std::string& text) {
  try {
    parse_config(text, "inline.json");
  } catch (const ConfigError& e) {
    return e.line();
  }
  ADD_FAILURE() << "expected a ConfigError";
  return 0;
}

std::string error_message(const std::string& text) {
  try {
    parse_config(text, "inline.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const std::string kMinimal = R"({
  "setting": "single",
  "env": {"generator": {"states": 2, "actions_p1": 2, "actions_p2": 1, "horizon": 2}},
  "backend": {"kernel": {"kind": "one_hot"}},
  "episodes": [3],
  "rewards": {"generator": {"count": 2}},
  "seeds": [0]
})";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST(Csv, QuotingAndRoundTrip) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
  std::ostringstream out;
  const std::vector<CsvRow> rows{{"K", "note"}, {"1", "a,b"}, {"2", "q\"x"}, {"3", "multi\nline"}, {"4", ""}};
  for (const auto& r : rows) write_csv_row(out, r);
  EXPECT_EQ(out.str().find('\r'), std::string::npos);
  std::istringstream in(out.str());
  EXPECT_EQ(read_csv(in), rows);
}

TEST(Csv, NumberFormat) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(1.5), "1.5");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_number(std::nan("")), "nan");
}

TEST(Config, MinimalDefaults) {
  const RunConfig config = parse_config(kMinimal, "inline.json");
  EXPECT_EQ(config.setting, Setting::single);
  EXPECT_EQ(config.explore_beta(), 4.0);
  EXPECT_EQ(config.explore_lambda(4), 1.25);
  EXPECT_EQ(config.planning_beta(), 4.0);
  EXPECT_EQ(config.workers, 1u);
  EXPECT_EQ(config.reward_tables().size(), 2u);
  // Default: one environment per run seed.
  EXPECT_NE(config.environment(0).transition(), config.environment(1).transition());
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_EQ(error_line(replace(kMinimal, "\"seeds\": [0]", "\"seeds\": [0],\n  \"colour\": 1")), 8u);
  EXPECT_NE(error_message(replace(kMinimal, "\"seeds\": [0]", "\"seeds\": [0],\n  \"colour\": 1")).find("colour"),
            std::string::npos);
  EXPECT_EQ(error_line(replace(kMinimal, "\"episodes\": [3]", "\"episodes\": [0]")), 5u);
  EXPECT_EQ(error_line(replace(kMinimal, "\"episodes\": [3]", "\"episodes\": \"many\"")), 5u);
  EXPECT_EQ(error_line(replace(kMinimal, "\"horizon\": 2", "\"horizon\": 2.5")), 3u);
  EXPECT_EQ(error_line(replace(kMinimal, "\"kind\": \"one_hot\"", "\"kind\": \"cubic\"")), 4u);
  EXPECT_EQ(error_line(replace(kMinimal, "\"actions_p2\": 1", "\"actions_p2\": 2")), 3u);
  EXPECT_EQ(error_line(replace(kMinimal, "{\"count\": 2}", "{\"count\": 2,}")), 6u);
  const std::string missing = error_message(replace(kMinimal, "  \"seeds\": [0]\n", "  \"workers\": 1\n"));
  EXPECT_NE(missing.find("missing field 'seeds'"), std::string::npos) << missing;
  EXPECT_EQ(missing.rfind("inline.json:", 0), 0u) << missing;
}

TEST(Config, FilesResolveRelativeToConfig) {
  const RunConfig config = load_config(kData / "chain_files.json");
  EXPECT_TRUE(std::holds_alternative<EnvSpec>(config.env));
  EXPECT_TRUE(std::holds_alternative<NeuralBackendConfig>(config.backend));
  EXPECT_EQ(config.reward_tables().size(), 2u);
  EXPECT_EQ(config.reward_tables()[0], load_reward(kData / "chain_reward.json"));
}

TEST(Config, SeedList) {
  EXPECT_EQ(parse_seed_list("0,1,5-7"), (std::vector<std::uint64_t>{0, 1, 5, 6, 7}));
  EXPECT_THROW(parse_seed_list(""), std::invalid_argument);
  EXPECT_THROW(parse_seed_list("3-x"), std::invalid_argument);
}

TEST(Runner, WritesOneRowPerRewardAndSeed) {
  const fs::path out = scratch("rows");
  RunConfig config = load_config(kData / "single_small.json");
  const RunSummary summary = run_experiment(config, {out, std::nullopt, nullptr});
  EXPECT_EQ(summary.jobs, 4u);
  const auto rows = read_rows(out / "results.csv");
  ASSERT_EQ(rows.size(), 1u + 2 * 3 * 2);
  EXPECT_EQ(rows[0], (CsvRow{"K", "reward_id", "seed", "suboptimality", "V1", "info_gain_final", "wall_ms"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double sub = std::stod(rows[i][3]);
    EXPECT_GE(sub, -1e-12);
    EXPECT_LE(sub, 3.0);
  }
  const auto log = read_rows(out / "explore_log.csv");
  EXPECT_EQ(log.size(), 1u + (5 + 20) * 2);
  EXPECT_FALSE(fs::exists(out / ".jobs"));
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
}

TEST(Runner, GameColumnsAndGapSign) {
  const fs::path out = scratch("game");
  const RunSummary summary = run_experiment(load_config(kData / "game_small.json"), {out, std::nullopt, nullptr});
  EXPECT_EQ(summary.result_rows, 2u * 2 * 3);
  const auto rows = read_rows(out / "results.csv");
  EXPECT_EQ(rows[0][3], "ne_gap");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(std::stod(rows[i][3]), -1e-10);
}

TEST(Runner, ManifestReproducesRun) {
  const fs::path first = scratch("manifest_a"), second = scratch("manifest_b");
  run_experiment(load_config(kData / "chain_files.json"), {first, std::nullopt, nullptr});
  // The manifest inlines every file, so it can be run from anywhere.
  const RunConfig again = load_config(first / "manifest.json");
  run_experiment(again, {second, std::nullopt, nullptr});
  auto strip = [](std::vector<CsvRow> rows) {
    for (auto& r : rows) r.pop_back();
    return rows;
  };
  EXPECT_EQ(strip(read_rows(first / "results.csv")), strip(read_rows(second / "results.csv")));
}

TEST(Runner, SeedOverride) {
  const fs::path out = scratch("seeds");
  run_experiment(load_config(kData / "single_small.json"), {out, std::vector<std::uint64_t>{9}, nullptr});
  const auto rows = read_rows(out / "results.csv");
  ASSERT_EQ(rows.size(), 1u + 2 * 3);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][2], "9");
}

TEST(Report, MeanAndSampleStd) {
  const fs::path dir = scratch("report");
  {
    std::ofstream out(dir / "results.csv");
    out << "K,reward_id,seed,suboptimality,V1,info_gain_final,wall_ms\n"
           "10,0,0,1,0,0,1\n10,1,0,3,0,0,1\n20,0,0,0.5,0,0,1\n";
  }
  const Report report = summarize(dir);
  EXPECT_EQ(report.metric, "suboptimality");
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_EQ(report.rows[0].episodes, 10u);
  EXPECT_DOUBLE_EQ(report.rows[0].mean, 2.0);
  EXPECT_DOUBLE_EQ(report.rows[0].std, std::sqrt(2.0));
  EXPECT_EQ(report.rows[1].count, 1u);
  EXPECT_EQ(report.rows[1].std, 0.0);
  write_summary_csv(report, dir / "summary.csv");
  EXPECT_EQ(read_rows(dir / "summary.csv")[0], (CsvRow{"K", "mean", "std"}));
  EXPECT_THROW(summarize(dir / "missing.csv"), std::invalid_argument);
}

TEST(Report, RecomputesFromRunOutput) {
  const fs::path out = scratch("recompute");
  run_experiment(load_config(kData / "single_small.json"), {out, std::nullopt, nullptr});
  std::map<std::string, std::vector<double>> by_k;
  const auto rows = read_rows(out / "results.csv");
  for (std::size_t i = 1; i < rows.size(); ++i) by_k[rows[i][0]].push_back(std::stod(rows[i][3]));
  const Report report = summarize(out);
  ASSERT_EQ(report.rows.size(), by_k.size());
  for (const auto& row : report.rows) {
    const auto& values = by_k.at(std::to_string(row.episodes));
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    EXPECT_NEAR(row.mean, mean, 1e-12);
  }
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  EXPECT_EQ(run_cli("validate --config \"" + (kData / "single_small.json").string() + "\""), 0);
  {
    std::ofstream bad(dir / "bad.json");
    bad << replace(kMinimal, "\"episodes\": [3]", "\"episodes\": [0]");
  }
  EXPECT_EQ(run_cli("validate --config \"" + (dir / "bad.json").string() + "\""), 2);
  EXPECT_EQ(run_cli("run --quiet --config \"" + (dir / "bad.json").string() + "\""), 2);
  EXPECT_EQ(run_cli("run --quiet --config \"" + (dir / "missing.json").string() + "\""), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("run --quiet --config \"" + (kData / "single_small.json").string() + "\" --out \"" +
                    (dir / "out").string() + "\" --seeds 3"),
            0);
  EXPECT_EQ(read_rows(dir / "out" / "results.csv").size(), 1u + 2 * 3);
  EXPECT_EQ(run_cli("report \"" + (dir / "out").string() + "\""), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "summary.csv"));
  EXPECT_EQ(run_cli("report \"" + (dir / "nowhere").string() + "\""), 2);
}

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace rfrl::harness {

struct SummaryRow {
  std::size_t episodes = 0;
  std::size_t count = 0;
  double mean = 0.0;
  /// Sample standard deviation; 0 for a single value.
  double std = 0.0;
};

struct Report {
  std::string metric;  // suboptimality or ne_gap
  std::vector<SummaryRow> rows;
};

/// Aggregates results.csv (a file or the directory holding it) per K.
Report summarize(const std::filesystem::path& results);
std::string format_table(const Report& report);
void write_summary_csv(const Report& report, const std::filesystem::path& path);

}  // namespace rfrl::harness

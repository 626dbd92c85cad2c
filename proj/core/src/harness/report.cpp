#include "rfrl/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rfrl/harness/csv.hpp"

namespace rfrl::harness {

Report summarize(const std::filesystem::path& results) {
  const std::filesystem::path file =
      std::filesystem::is_directory(results) ? results / "results.csv" : results;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + file.string());
  const std::vector<CsvRow> rows = read_csv(in);
  if (rows.empty()) throw std::invalid_argument(file.string() + " is empty");

  const CsvRow& header = rows.front();
  auto column = [&](const std::string& name) -> std::ptrdiff_t {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };
  Report report;
  std::ptrdiff_t metric = column("suboptimality");
  report.metric = "suboptimality";
  if (metric < 0) {
    metric = column("ne_gap");
    report.metric = "ne_gap";
  }
  const std::ptrdiff_t k_col = column("K");
  if (metric < 0 || k_col < 0) throw std::invalid_argument(file.string() + " has no K and metric columns");

  std::map<std::size_t, std::vector<double>> groups;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    if (row.size() != header.size())
      throw std::invalid_argument(file.string() + ": row " + std::to_string(r + 1) + " has the wrong field count");
    try {
      groups[std::stoul(row[static_cast<std::size_t>(k_col)])].push_back(std::stod(row[static_cast<std::size_t>(metric)]));
    } catch (const std::logic_error&) {
      throw std::invalid_argument(file.string() + ": row " + std::to_string(r + 1) + " is not numeric");
    }
  }
  for (const auto& [k, values] : groups) {
    SummaryRow row{k, values.size(), 0.0, 0.0};
    for (const double v : values) row.mean += v;
    row.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0.0;
      for (const double v : values) ss += (v - row.mean) * (v - row.mean);
      row.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string format_table(const Report& report) {
  std::ostringstream os;
  os << std::setw(8) << "K" << std::setw(8) << "n" << std::setw(16) << ("mean " + report.metric).substr(0, 15)
     << std::setw(14) << "std" << '\n';
  os << std::setprecision(6);
  for (const SummaryRow& row : report.rows)
    os << std::setw(8) << row.episodes << std::setw(8) << row.count << std::setw(16) << row.mean << std::setw(14)
       << row.std << '\n';
  return os.str();
}

void write_summary_csv(const Report& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  write_csv_row(out, {"K", "mean", "std"});
  for (const SummaryRow& row : report.rows)
    write_csv_row(out, {std::to_string(row.episodes), format_number(row.mean), format_number(row.std)});
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace rfrl::harness

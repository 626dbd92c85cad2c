#pragma once

// RFC 4180 CSV: comma separated, CRLF-free (LF line ends), fields quoted when
// they contain a comma, quote or line break.

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace rfrl::harness {

using CsvRow = std::vector<std::string>;

std::string csv_field(const std::string& value);
void write_csv_row(std::ostream& out, const CsvRow& row);

/// Shortest round-trip decimal form, independent of the locale.
std::string format_number(double value);

/// Parses a whole document; quoted fields may span lines.
std::vector<CsvRow> read_csv(std::istream& in);

}  // namespace rfrl::harness

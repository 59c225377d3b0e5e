#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace radcorr {

/// Rectangular numeric table with a header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Shortest decimal that parses back to the same double; independent of the
/// C locale. Throws on NaN or infinity.
std::string format_double(double v);

void write_csv(std::ostream& os, const Table& table);

/// Writes the table to `path` ("-" means standard output).
void emit_csv(const Table& table, const std::string& path);

Table parse_csv(std::istream& is);
Table read_csv(const std::string& path);

}  // namespace radcorr

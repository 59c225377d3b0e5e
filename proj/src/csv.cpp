#include "radcorr/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "radcorr/errors.hpp"

namespace radcorr {

namespace {
constexpr const char* kModule = "csv";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}
}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) fail(ErrorKind::Domain, kModule, "refusing to serialize a non-finite value");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const Table& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) os << ',';
    os << table.header[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      fail(ErrorKind::Internal, kModule, "row width does not match the header");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << format_double(row[i]);
    }
    os << '\n';
  }
}

void emit_csv(const Table& table, const std::string& path) {
  // Serialize first so a NaN leaves no partial file behind.
  std::ostringstream buffer;
  write_csv(buffer, table);
  if (path == "-") {
    std::cout << buffer.str();
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Resource, kModule, "cannot open " + path + " for writing");
  out << buffer.str();
  if (!out) fail(ErrorKind::Resource, kModule, "write to " + path + " failed");
}

Table parse_csv(std::istream& is) {
  Table t;
  std::string line;
  if (!std::getline(is, line)) fail(ErrorKind::Domain, kModule, "empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) {
      fail(ErrorKind::Domain, kModule, "line " + std::to_string(lineno) + " has the wrong width");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size()) {
        fail(ErrorKind::Domain, kModule,
             "line " + std::to_string(lineno) + ": cannot parse '" + c + "'");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Resource, kModule, "cannot open " + path);
  return parse_csv(in);
}

}  // namespace radcorr

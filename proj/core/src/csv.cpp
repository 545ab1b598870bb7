#include "qthermo/csv.hpp"

#include <cstdio>

namespace qthermo {

namespace {
std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}
}  // namespace

std::string csv_format(const CsvCell& cell) {
  if (std::holds_alternative<std::string>(cell))
    return quote_if_needed(std::get<std::string>(cell));
  char buf[40];
  if (std::holds_alternative<long long>(cell)) {
    std::snprintf(buf, sizeof buf, "%lld", std::get<long long>(cell));
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(cell));
  return buf;
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ',';
    os_ << csv_format(cells[i]);
  }
  os_ << "\r\n";
}

}  // namespace qthermo

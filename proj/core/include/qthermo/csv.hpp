// RFC-4180 CSV writing with 17-significant-digit floats, so that identical
// runs reproduce byte-identical files.

#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace qthermo {

using CsvCell = std::variant<std::string, double, long long>;

std::string csv_format(const CsvCell& cell);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void row(const std::vector<CsvCell>& cells);

 private:
  std::ostream& os_;
};

}  // namespace qthermo

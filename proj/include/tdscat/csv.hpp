#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace tdscat {

// Minimal RFC-4180-style writer: comma separated, '.' decimal point,
// numbers with 17 significant digits so a value round-trips exactly.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string> columns);

  CsvWriter& row(std::initializer_list<double> values);
  /// Row whose first fields are text (quoted when needed) followed by numbers.
  CsvWriter& row(const std::vector<std::string>& text, std::initializer_list<double> values);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

std::string format_number(double v);

}  // namespace tdscat

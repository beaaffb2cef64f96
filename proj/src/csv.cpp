#include "tdscat/csv.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace tdscat {
namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string> columns)
    : out_(out), columns_(columns.size()) {
  bool first = true;
  for (const auto& c : columns) {
    if (!first) out_ << ',';
    out_ << quote(c);
    first = false;
  }
  out_ << '\n';
}

CsvWriter& CsvWriter::row(std::initializer_list<double> values) { return row({}, values); }

CsvWriter& CsvWriter::row(const std::vector<std::string>& text, std::initializer_list<double> values) {
  if (text.size() + values.size() != columns_) throw std::logic_error("csv row width mismatch");
  bool first = true;
  for (const auto& t : text) {
    if (!first) out_ << ',';
    out_ << quote(t);
    first = false;
  }
  for (double v : values) {
    if (!first) out_ << ',';
    out_ << format_number(v);
    first = false;
  }
  out_ << '\n';
  return *this;
}

}  // namespace tdscat

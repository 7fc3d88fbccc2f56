#include "junctionflow/csv.hpp"

#include <ostream>

#include <fmt/format.h>

#include "junctionflow/errors.hpp"

namespace jf {

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

CsvWriter::CsvWriter(std::ostream& os, std::initializer_list<std::string> header)
    : os_(os), width_(header.size()) {
  bool first = true;
  for (const auto& h : header) {
    if (!first) os_ << ',';
    os_ << h;
    first = false;
  }
  os_ << '\n';
}

void CsvWriter::row(std::initializer_list<CsvCell> cells) {
  row(std::vector<CsvCell>(cells));
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (cells.size() != width_) throw InvariantError("csv: row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ',';
    os_ << cells[i].text();
  }
  os_ << '\n';
}

}  // namespace jf

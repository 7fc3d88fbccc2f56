#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace jf {

// Fixed 17-significant-digit rendering so that CSV output round-trips and is
// byte-identical across runs.
std::string format_real(double v);

// One CSV field: numbers are rendered with format_real, integers and text
// verbatim, and an empty cell for a missing value.
class CsvCell {
 public:
  CsvCell(double v) : text_(format_real(v)) {}
  CsvCell(int v) : text_(std::to_string(v)) {}
  CsvCell(long v) : text_(std::to_string(v)) {}
  CsvCell(unsigned long v) : text_(std::to_string(v)) {}
  CsvCell(bool v) : text_(v ? "true" : "false") {}
  CsvCell(const char* s) : text_(s) {}
  CsvCell(std::string s) : text_(std::move(s)) {}
  static CsvCell empty() { return CsvCell(std::string()); }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::initializer_list<std::string> header);
  void row(std::initializer_list<CsvCell> cells);
  void row(const std::vector<CsvCell>& cells);

 private:
  std::ostream& os_;
  std::size_t width_;
};

}  // namespace jf

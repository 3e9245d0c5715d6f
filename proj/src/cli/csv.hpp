// csv.hpp
// Minimal CSV emission with shortest round-trip real formatting.

#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace maxent::cli {

// Shortest decimal string that parses back to exactly `v`; "inf", "-inf",
// "nan" for non-finite values.
std::string format_real(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);

  CsvWriter& field(std::string_view text);
  CsvWriter& field(const char* text) { return field(std::string_view(text)); }
  CsvWriter& field(double v);
  CsvWriter& field(int v);
  CsvWriter& field(bool v);
  CsvWriter& blank();
  void end_row();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::vector<std::string> row_;
};

}  // namespace maxent::cli

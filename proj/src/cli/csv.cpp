// csv.cpp

#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace maxent::cli {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header)
    : out_(out), columns_(header.size()) {
  bool first = true;
  for (auto h : header) {
    if (!first) out_ << ',';
    out_ << h;
    first = false;
  }
  out_ << '\n';
}

CsvWriter& CsvWriter::field(std::string_view text) {
  row_.emplace_back(text);
  return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(format_real(v)); }

CsvWriter& CsvWriter::field(int v) { return field(std::to_string(v)); }

CsvWriter& CsvWriter::field(bool v) { return field(v ? "true" : "false"); }

CsvWriter& CsvWriter::blank() { return field(std::string_view{}); }

void CsvWriter::end_row() {
  if (row_.size() != columns_) {
    throw std::logic_error("CsvWriter: row has " + std::to_string(row_.size()) +
                           " fields, header has " + std::to_string(columns_));
  }
  for (std::size_t i = 0; i < row_.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << row_[i];
  }
  out_ << '\n';
  row_.clear();
}

}  // namespace maxent::cli

// matrix_io.cpp

#include "maxent/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace maxent {

namespace {

bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

ComplexMatrix read_matrix(std::istream& in, const std::string& source) {
  std::vector<std::vector<Complex>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const int row_no = static_cast<int>(rows.size()) + 1;
    auto fail = [&](const std::string& why) {
      return MatrixFormatError(source + ": row " + std::to_string(row_no) + " (line " +
                               std::to_string(line_no) + "): " + why);
    };
    std::istringstream tokens(line);
    std::string token;
    std::vector<Complex> row;
    while (tokens >> token) {
      const auto comma = token.find(',');
      double re = 0.0;
      double im = 0.0;
      const std::string_view view(token);
      const bool ok = comma == std::string::npos
                          ? parse_double(view, re)
                          : parse_double(view.substr(0, comma), re) &&
                                parse_double(view.substr(comma + 1), im);
      if (!ok) throw fail("cannot parse entry '" + token + "'");
      row.emplace_back(re, im);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw fail("expected " + std::to_string(rows.front().size()) + " entries, found " +
                 std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw MatrixFormatError(source + ": no matrix rows");
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = static_cast<Eigen::Index>(rows.front().size());
  ComplexMatrix m(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    for (Eigen::Index j = 0; j < n_cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

ComplexMatrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MatrixFormatError(path.string() + ": cannot open file");
  return read_matrix(in, path.string());
}

void write_matrix(std::ostream& out, const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_double(m(i, j).real()) << ',' << format_double(m(i, j).imag());
    }
    out << '\n';
  }
}

}  // namespace maxent

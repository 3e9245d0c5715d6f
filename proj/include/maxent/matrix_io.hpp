// matrix_io.hpp
// Plain-text matrix exchange: one row per line, whitespace-separated "re,im"
// entries (a bare "re" is read as a real entry). Blank lines and lines
// starting with '#' are skipped.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "maxent/linalg.hpp"

namespace maxent {

class MatrixFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// `source` names the input in diagnostics ("<source>: row 3: ...").
ComplexMatrix read_matrix(std::istream& in, const std::string& source = "<stream>");
ComplexMatrix read_matrix_file(const std::filesystem::path& path);

void write_matrix(std::ostream& out, const ComplexMatrix& m);

}  // namespace maxent

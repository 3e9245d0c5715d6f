// linalg.hpp
// Hermitian matrices and density operators on small Hilbert spaces (n <= 64).

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "maxent/functional.hpp"

namespace maxent {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr int kMaxDimension = 64;

class HermitianError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DensityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Square complex matrix with M = M^dagger (1e-12, relative to max |entry|
// once that exceeds 1). The stored entries are exactly symmetrized.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(ComplexMatrix m);

  static HermitianMatrix identity(int n);
  static HermitianMatrix diagonal(const RealVector& d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

 private:
  ComplexMatrix m_;
};

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b);
HermitianMatrix operator*(double s, const HermitianMatrix& a);

// Eigenvalues in descending order; columns of `vectors` are the matching
// orthonormal eigenvectors.
struct Eigensystem {
  RealVector values;
  ComplexMatrix vectors;
};

Eigensystem eigh(const HermitianMatrix& h);

// [start, start + size) ranges of a descending spectrum whose consecutive
// gaps are below `gap`.
std::vector<std::pair<int, int>> degenerate_groups(const RealVector& descending, double gap = 1e-9);

/// Hermitian, positive semidefinite, unit-trace matrix with its spectral
/// decomposition. Eigenvalues above -1e-10 are accepted, and anything within
/// 1e-12 of zero is clamped to exactly 0.
class DensityOperator {
 public:
  explicit DensityOperator(const HermitianMatrix& m, double tol = 1e-10);

  // From a spectral decomposition; `basis` columns must be orthonormal.
  static DensityOperator from_spectrum(const RealVector& probabilities, const ComplexMatrix& basis,
                                       double tol = 1e-10);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }
  const RealVector& spectrum() const { return spectrum_; }
  const ComplexMatrix& eigenbasis() const { return eigenbasis_; }
  double largest_eigenvalue() const { return spectrum_(0); }

  std::vector<std::pair<int, int>> degenerate_groups(double gap = 1e-9) const {
    return maxent::degenerate_groups(spectrum_, gap);
  }

  // Tr(rho O), real part.
  double expectation(const HermitianMatrix& o) const;

 private:
  DensityOperator() = default;
  ComplexMatrix matrix_;
  RealVector spectrum_;
  ComplexMatrix eigenbasis_;
};

// S_f(rho) = sum_i f(p_i).
double entropy(const DensityOperator& rho, const EntropicFunctional& fn);
double entropy(const RealVector& probabilities, const EntropicFunctional& fn);

// Removes the off-diagonal elements of rho in the orthonormal basis given by
// the columns of `basis`.
DensityOperator dephase(const DensityOperator& rho, const ComplexMatrix& basis);

// Ginibre construction G G^dagger / Tr(G G^dagger), deterministic per seed.
DensityOperator random_density(int n, std::uint64_t seed);

// Haar-ish random unitary from the QR factorization of a seeded Ginibre matrix.
ComplexMatrix random_unitary(int n, std::uint64_t seed);

bool is_density(const ComplexMatrix& m, double tol = 1e-10);

// Columns pairwise orthonormal within tol.
bool is_orthonormal(const ComplexMatrix& basis, double tol = 1e-10);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace maxent

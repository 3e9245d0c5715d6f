// linalg.cpp

#include "maxent/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <numeric>
#include <random>
#include <string>

namespace maxent {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kClampZero = 1e-12;

void check_dimension(Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (rows != cols) throw HermitianError(std::string(what) + ": matrix is not square");
  if (rows < 1 || rows > kMaxDimension) {
    throw HermitianError(std::string(what) + ": dimension " + std::to_string(rows) +
                         " outside [1, 64]");
  }
}

double hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

ComplexMatrix ginibre(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(n, n);
  // Row-major fill so the draw order is independent of Eigen's storage order.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

}  // namespace

HermitianMatrix::HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {
  check_dimension(m_.rows(), m_.cols(), "HermitianMatrix");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  const double defect = hermiticity_defect(m_);
  if (!(defect <= kHermitianTol * scale)) {
    throw HermitianError("HermitianMatrix: not Hermitian (max |M - M^dagger| = " +
                         std::to_string(defect) + ")");
  }
  m_ = 0.5 * (m_ + m_.adjoint()).eval();
}

HermitianMatrix HermitianMatrix::identity(int n) {
  return HermitianMatrix(ComplexMatrix::Identity(n, n));
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& d) {
  return HermitianMatrix(d.cast<Complex>().asDiagonal().toDenseMatrix());
}

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw HermitianError("HermitianMatrix: dimension mismatch in sum");
  return HermitianMatrix(a.matrix() + b.matrix());
}

HermitianMatrix operator*(double s, const HermitianMatrix& a) {
  return HermitianMatrix(s * a.matrix());
}

Eigensystem eigh(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigh: eigensolver failed");
  const int n = h.dim();
  Eigensystem out{RealVector(n), ComplexMatrix(n, n)};
  // Eigen returns ascending order.
  for (int i = 0; i < n; ++i) {
    out.values(i) = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

std::vector<std::pair<int, int>> degenerate_groups(const RealVector& descending, double gap) {
  std::vector<std::pair<int, int>> groups;
  const int n = static_cast<int>(descending.size());
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || descending(i - 1) - descending(i) >= gap) {
      groups.emplace_back(start, i - start);
      start = i;
    }
  }
  return groups;
}

DensityOperator::DensityOperator(const HermitianMatrix& m, double tol) {
  const Eigensystem es = eigh(m);
  if (es.values(es.values.size() - 1) < -tol) {
    throw DensityError("DensityOperator: negative eigenvalue " +
                       std::to_string(es.values(es.values.size() - 1)));
  }
  const double trace = es.values.sum();
  if (!(std::abs(trace - 1.0) <= tol)) {
    throw DensityError("DensityOperator: trace " + std::to_string(trace) + " differs from 1");
  }
  matrix_ = m.matrix();
  spectrum_ = es.values.unaryExpr([](double p) { return p < kClampZero ? 0.0 : p; });
  eigenbasis_ = es.vectors;
}

DensityOperator DensityOperator::from_spectrum(const RealVector& probabilities,
                                               const ComplexMatrix& basis, double tol) {
  check_dimension(basis.rows(), basis.cols(), "DensityOperator");
  if (probabilities.size() != basis.cols()) {
    throw DensityError("DensityOperator: spectrum and basis sizes differ");
  }
  if (!is_orthonormal(basis)) throw DensityError("DensityOperator: basis is not orthonormal");
  if (probabilities.minCoeff() < -tol) throw DensityError("DensityOperator: negative weight");
  if (!(std::abs(probabilities.sum() - 1.0) <= tol)) {
    throw DensityError("DensityOperator: weights sum to " + std::to_string(probabilities.sum()));
  }
  const int n = static_cast<int>(probabilities.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return probabilities(a) > probabilities(b); });

  DensityOperator rho;
  rho.spectrum_.resize(n);
  rho.eigenbasis_.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const double p = probabilities(order[i]);
    rho.spectrum_(i) = p < kClampZero ? 0.0 : p;
    rho.eigenbasis_.col(i) = basis.col(order[i]);
  }
  rho.matrix_ = rho.eigenbasis_ * rho.spectrum_.cast<Complex>().asDiagonal() *
                rho.eigenbasis_.adjoint();
  return rho;
}

double DensityOperator::expectation(const HermitianMatrix& o) const {
  if (o.dim() != dim()) throw DensityError("expectation: dimension mismatch");
  return (matrix_ * o.matrix()).trace().real();
}

double entropy(const RealVector& probabilities, const EntropicFunctional& fn) {
  double s = 0.0;
  for (double p : probabilities) {
    if (p >= kClampZero) s += fn.value(std::min(p, 1.0));
  }
  return s;
}

double entropy(const DensityOperator& rho, const EntropicFunctional& fn) {
  return entropy(rho.spectrum(), fn);
}

DensityOperator dephase(const DensityOperator& rho, const ComplexMatrix& basis) {
  if (basis.rows() != rho.dim() || basis.cols() != rho.dim()) {
    throw DensityError("dephase: basis dimension mismatch");
  }
  if (!is_orthonormal(basis)) throw DensityError("dephase: basis is not orthonormal");
  RealVector weights(rho.dim());
  for (int i = 0; i < rho.dim(); ++i) {
    weights(i) = (basis.col(i).adjoint() * rho.matrix() * basis.col(i))(0, 0).real();
  }
  return DensityOperator::from_spectrum(weights, basis);
}

DensityOperator random_density(int n, std::uint64_t seed) {
  if (n < 1 || n > kMaxDimension) {
    throw DensityError("random_density: dimension must lie in [1, 64]");
  }
  std::mt19937_64 rng(seed);
  const ComplexMatrix g = ginibre(n, rng);
  ComplexMatrix w = g * g.adjoint();
  w /= w.trace().real();
  return DensityOperator(HermitianMatrix(w));
}

ComplexMatrix random_unitary(int n, std::uint64_t seed) {
  if (n < 1 || n > kMaxDimension) {
    throw HermitianError("random_unitary: dimension must lie in [1, 64]");
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const ComplexMatrix g = ginibre(n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0.0) q.col(i) *= r(i, i) / mag;
  }
  return q;
}

bool is_density(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 1 || m.rows() > kMaxDimension) return false;
  if (!(hermiticity_defect(m) <= tol)) return false;
  if (!(std::abs(m.trace().real() - 1.0) <= tol)) return false;
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -tol;
}

bool is_orthonormal(const ComplexMatrix& basis, double tol) {
  const ComplexMatrix gram = basis.adjoint() * basis;
  const ComplexMatrix id = ComplexMatrix::Identity(gram.rows(), gram.cols());
  return (gram - id).cwiseAbs().maxCoeff() <= tol;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a * b - b * a).norm();
}

}  // namespace maxent

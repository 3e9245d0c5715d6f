// solver.hpp
// Maximization of S_f(rho) = Tr f(rho) subject to expectation-value
// constraints <O_a> = t_a, a = 0..m with O_0 = I, t_0 = 1.
//
// The optimum is rho = p(h) with h = sum_a lambda_a O_a, where p acts on the
// spectrum of h through p(h_i) = [f']^{-1}(h_i) (0 beyond the cutoff f'(0)).
// The multipliers minimize the convex dual
//
//   D(lambda) = Tr[f(p(h)) - p(h) h] + sum_a lambda_a t_a,
//
// whose gradient is t_a - <O_a> and whose Hessian is the curvature matrix
// A_ab = sum_ij <i|O_a|j><j|O_b|i> C_ij in the eigenbasis of h. solve() runs a
// damped Newton iteration on D.

#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxent/functional.hpp"
#include "maxent/linalg.hpp"

namespace maxent {

class ConstraintError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConstraintSet {
 public:
  // `observables[0]` must be the identity and `targets[0]` must be 1. The
  // observables must be linearly independent under the trace inner product.
  ConstraintSet(std::vector<HermitianMatrix> observables, std::vector<double> targets);

  // Prepends (I, 1) to the given observables and targets.
  static ConstraintSet normalized(int dim, std::vector<HermitianMatrix> observables,
                                  std::vector<double> targets);

  int dim() const { return observables_.front().dim(); }
  // Number of constraints including normalization (m + 1).
  int size() const { return static_cast<int>(observables_.size()); }
  const std::vector<HermitianMatrix>& observables() const { return observables_; }
  const RealVector& targets() const { return targets_; }

 private:
  std::vector<HermitianMatrix> observables_;
  RealVector targets_;
};

// Density-like operator p(h); its trace is whatever the field implies.
struct SpectralDensity {
  RealVector field_values;  // eigenvalues h_i of the field, descending
  RealVector weights;       // p_i = p(h_i)
  ComplexMatrix basis;      // eigenvectors of the field

  ComplexMatrix matrix() const;
  double trace() const { return weights.sum(); }
};

// h = sum_a lambda_a O_a.
HermitianMatrix field_from_multipliers(const RealVector& lambda, const ConstraintSet& cs);

// Throws FieldRangeError when some h_i < f'(1).
SpectralDensity density_from_field(const HermitianMatrix& h, const EntropicFunctional& fn);

struct DualValue {
  double value = 0.0;
  RealVector gradient;
};

DualValue dual_objective(const RealVector& lambda, const ConstraintSet& cs,
                         const EntropicFunctional& fn);

struct CurvatureData {
  RealMatrix A;  // (m+1) x (m+1), symmetric PSD
  RealMatrix C;  // n x n, entrywise nonnegative
};

CurvatureData curvature(const RealVector& lambda, const ConstraintSet& cs,
                        const EntropicFunctional& fn);

struct IterationRecord {
  int iteration = 0;
  double dual_value = 0.0;
  double residual_norm = 0.0;
  double step_length = 0.0;
};

struct SolverOptions {
  double tol = 1e-10;   // max |<O_a> - t_a| at convergence
  int max_iter = 200;
  double ridge = 1e-10; // relative Levenberg floor on the eigenvalues of A
  bool verbose = false;
  std::function<void(const IterationRecord&)> trace;
};

class SolverError : public std::runtime_error {
 public:
  enum class Kind { Infeasible, MaxIterations, FieldRange };

  SolverError(Kind kind, const std::string& what, double residual)
      : std::runtime_error(what), kind_(kind), residual_(residual) {}

  Kind kind() const { return kind_; }
  double residual() const { return residual_; }

 private:
  Kind kind_;
  double residual_;
};

struct MaxEntSolution {
  RealVector lambda;
  DensityOperator rho;
  HermitianMatrix field;
  double dual_value = 0.0;
  double entropy = 0.0;
  RealVector residuals;  // <O_a> - t_a
  CurvatureData curvature;
  int iterations = 0;
};

MaxEntSolution solve(const ConstraintSet& cs, const EntropicFunctional& fn,
                     const SolverOptions& opts = {});

// d^2 S_f / d<O_a> d<O_b> = -(A^{-1})_ab. A is ridged by 1e-12 when singular.
RealMatrix primal_sensitivities(const MaxEntSolution& sol);

}  // namespace maxent

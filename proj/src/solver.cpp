// solver.cpp

#include "maxent/solver.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>

namespace maxent {

namespace {

constexpr double kGramFloor = 1e-10;
constexpr double kDegenerateGap = 1e-9;
constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;
constexpr int kStallSteps = 25;
constexpr double kStallDualChange = 1e-14;
constexpr double kDivergence = 1e12;

struct FieldState {
  Eigensystem es;
  RealVector weights;
  RealVector expectations;
  double dual = 0.0;
};

FieldState evaluate(const RealVector& lambda, const ConstraintSet& cs,
                    const EntropicFunctional& fn) {
  const HermitianMatrix h = field_from_multipliers(lambda, cs);
  FieldState s;
  s.es = eigh(h);
  const int n = cs.dim();
  s.weights.resize(n);
  double dual = lambda.dot(cs.targets());
  for (int i = 0; i < n; ++i) {
    const double p = inverse_fprime(fn, s.es.values(i));
    s.weights(i) = p;
    if (p > 0.0) dual += fn.value(p) - p * s.es.values(i);
  }
  s.dual = dual;
  const ComplexMatrix rho =
      s.es.vectors * s.weights.cast<Complex>().asDiagonal() * s.es.vectors.adjoint();
  s.expectations.resize(cs.size());
  for (int a = 0; a < cs.size(); ++a) {
    s.expectations(a) = (rho * cs.observables()[a].matrix()).trace().real();
  }
  return s;
}

// dp/dh at each eigenvalue: 1/f''(p) inside the support, 0 beyond the cutoff.
RealVector weight_slopes(const RealVector& weights, const EntropicFunctional& fn) {
  RealVector dp(weights.size());
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    dp(i) = weights(i) > 0.0 ? 1.0 / fn.second_derivative(weights(i)) : 0.0;
  }
  return dp;
}

CurvatureData assemble_curvature(const FieldState& s, const ConstraintSet& cs,
                                 const EntropicFunctional& fn) {
  const int n = cs.dim();
  const int m = cs.size();
  const RealVector& h = s.es.values;
  const RealVector dp = weight_slopes(s.weights, fn);
  CurvatureData out{RealMatrix::Zero(m, m), RealMatrix::Zero(n, n)};
  for (int i = 0; i < n; ++i) {
    out.C(i, i) = -dp(i);
    for (int j = i + 1; j < n; ++j) {
      const double gap = h(i) - h(j);
      const double c = std::abs(gap) < kDegenerateGap ? -0.5 * (dp(i) + dp(j))
                                                      : (s.weights(j) - s.weights(i)) / gap;
      out.C(i, j) = c;
      out.C(j, i) = c;
    }
  }
  std::vector<ComplexMatrix> rotated;
  rotated.reserve(m);
  for (const auto& o : cs.observables()) {
    rotated.push_back(s.es.vectors.adjoint() * o.matrix() * s.es.vectors);
  }
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      const double v =
          (rotated[a].array() * rotated[b].conjugate().array() * out.C.cast<Complex>().array())
              .sum()
              .real();
      out.A(a, b) = v;
      out.A(b, a) = v;
    }
  }
  return out;
}

double max_abs(const RealVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// (A + mu I)^{-1} rhs with mu lifting the spectrum of A to at least
// ridge * max(1, max eigenvalue).
RealVector regularized_solve(const RealMatrix& a, const RealVector& rhs, double ridge) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(a);
  const RealVector& ev = es.eigenvalues();
  const double floor = ridge * std::max(1.0, ev.maxCoeff());
  const double mu = ev.minCoeff() < floor ? floor - ev.minCoeff() : 0.0;
  const RealVector shifted = (ev.array() + mu).matrix();
  return es.eigenvectors() *
         (es.eigenvectors().transpose() * rhs).cwiseQuotient(shifted);
}

}  // namespace

ConstraintSet::ConstraintSet(std::vector<HermitianMatrix> observables, std::vector<double> targets)
    : observables_(std::move(observables)) {
  if (observables_.empty()) throw ConstraintError("ConstraintSet: no observables");
  if (observables_.size() != targets.size()) {
    throw ConstraintError("ConstraintSet: " + std::to_string(observables_.size()) +
                          " observables but " + std::to_string(targets.size()) + " targets");
  }
  const int n = observables_.front().dim();
  for (const auto& o : observables_) {
    if (o.dim() != n) throw ConstraintError("ConstraintSet: observable dimensions differ");
  }
  if ((observables_.front().matrix() - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff() >
      1e-12) {
    throw ConstraintError("ConstraintSet: first observable must be the identity");
  }
  if (std::abs(targets.front() - 1.0) > 1e-12) {
    throw ConstraintError("ConstraintSet: normalization target must be 1");
  }
  for (double t : targets) {
    if (!std::isfinite(t)) throw ConstraintError("ConstraintSet: non-finite target");
  }
  const int m = static_cast<int>(observables_.size());
  RealMatrix gram(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      gram(a, b) = (observables_[a].matrix() * observables_[b].matrix()).trace().real();
    }
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(gram, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= kGramFloor) {
    throw ConstraintError("ConstraintSet: observables are linearly dependent");
  }
  targets_ = Eigen::Map<const RealVector>(targets.data(), m);
}

ConstraintSet ConstraintSet::normalized(int dim, std::vector<HermitianMatrix> observables,
                                        std::vector<double> targets) {
  observables.insert(observables.begin(), HermitianMatrix::identity(dim));
  targets.insert(targets.begin(), 1.0);
  return ConstraintSet(std::move(observables), std::move(targets));
}

ComplexMatrix SpectralDensity::matrix() const {
  return basis * weights.cast<Complex>().asDiagonal() * basis.adjoint();
}

HermitianMatrix field_from_multipliers(const RealVector& lambda, const ConstraintSet& cs) {
  if (lambda.size() != cs.size()) {
    throw ConstraintError("field_from_multipliers: expected " + std::to_string(cs.size()) +
                          " multipliers");
  }
  ComplexMatrix h = ComplexMatrix::Zero(cs.dim(), cs.dim());
  for (int a = 0; a < cs.size(); ++a) h += lambda(a) * cs.observables()[a].matrix();
  return HermitianMatrix(std::move(h));
}

SpectralDensity density_from_field(const HermitianMatrix& h, const EntropicFunctional& fn) {
  Eigensystem es = eigh(h);
  SpectralDensity out;
  out.weights.resize(h.dim());
  for (int i = 0; i < h.dim(); ++i) out.weights(i) = inverse_fprime(fn, es.values(i));
  out.field_values = std::move(es.values);
  out.basis = std::move(es.vectors);
  return out;
}

DualValue dual_objective(const RealVector& lambda, const ConstraintSet& cs,
                         const EntropicFunctional& fn) {
  const FieldState s = evaluate(lambda, cs, fn);
  return {s.dual, cs.targets() - s.expectations};
}

CurvatureData curvature(const RealVector& lambda, const ConstraintSet& cs,
                        const EntropicFunctional& fn) {
  return assemble_curvature(evaluate(lambda, cs, fn), cs, fn);
}

MaxEntSolution solve(const ConstraintSet& cs, const EntropicFunctional& fn,
                     const SolverOptions& opts) {
  const int n = cs.dim();
  RealVector lambda = RealVector::Zero(cs.size());
  lambda(0) = fn.derivative(1.0 / n);
  if (!std::isfinite(lambda(0))) {
    throw SolverError(SolverError::Kind::FieldRange, "solve: f'(1/n) is not finite", 0.0);
  }
  FieldState state = evaluate(lambda, cs, fn);
  int stalled = 0;

  for (int iter = 0;; ++iter) {
    const RealVector residual = state.expectations - cs.targets();
    const double rnorm = max_abs(residual);
    const CurvatureData curv = assemble_curvature(state, cs, fn);
    // Newton direction on D: gradient is -residual.
    const RealVector step = regularized_solve(curv.A, residual, opts.ridge);
    // When p(h) is very steep, one ulp of lambda moves <O> by more than tol;
    // stop once the Newton step is below the resolution of lambda and the
    // residual is within the matching rounding floor.
    const double lambda_ulp = std::numeric_limits<double>::epsilon() * max_abs(lambda);
    const bool at_resolution =
        max_abs(step) <= lambda_ulp &&
        rnorm <= 4.0 * lambda_ulp * curv.A.cwiseAbs().rowwise().sum().maxCoeff();
    if (rnorm <= opts.tol || at_resolution) {
      const double tol = std::max({1e-10, 10.0 * opts.tol, 2.0 * rnorm});
      return MaxEntSolution{
          lambda,
          DensityOperator::from_spectrum(state.weights, state.es.vectors, tol),
          field_from_multipliers(lambda, cs),
          state.dual,
          entropy(state.weights, fn),
          residual,
          curv,
          iter,
      };
    }
    if (iter >= opts.max_iter) {
      throw SolverError(SolverError::Kind::MaxIterations,
                        "solve: no convergence after " + std::to_string(iter) +
                            " iterations (residual " + std::to_string(rnorm) + ")",
                        rnorm);
    }

    const double slope = -residual.dot(step);

    double t = 1.0;
    bool only_field_failures = true;
    std::optional<FieldState> accepted;
    for (int k = 0; k < kMaxHalvings; ++k, t *= 0.5) {
      FieldState trial;
      try {
        trial = evaluate(lambda + t * step, cs, fn);
      } catch (const FieldRangeError&) {
        continue;
      }
      only_field_failures = false;
      const bool armijo = trial.dual <= state.dual + kArmijo * t * slope;
      // Near the optimum D changes below rounding; fall back on the residual.
      const bool flat = std::abs(trial.dual - state.dual) <= 1e-13 * (1.0 + std::abs(state.dual)) &&
                        max_abs(trial.expectations - cs.targets()) < rnorm;
      if (armijo || flat) {
        accepted = std::move(trial);
        break;
      }
    }
    if (!accepted) {
      if (only_field_failures) {
        throw SolverError(SolverError::Kind::FieldRange,
                          "solve: every trial step left the domain of [f']^{-1}", rnorm);
      }
      throw SolverError(SolverError::Kind::Infeasible,
                        "solve: line search stalled with residual " + std::to_string(rnorm) +
                            "; targets are likely not attainable",
                        rnorm);
    }

    const double change = std::abs(accepted->dual - state.dual);
    lambda += t * step;
    state = std::move(*accepted);

    if (opts.trace || opts.verbose) {
      const IterationRecord rec{iter + 1, state.dual, max_abs(state.expectations - cs.targets()), t};
      if (opts.trace) opts.trace(rec);
      if (opts.verbose) {
        std::cerr << "iter " << rec.iteration << " dual " << rec.dual_value << " residual "
                  << rec.residual_norm << " step " << rec.step_length << '\n';
      }
    }

    stalled = change < kStallDualChange ? stalled + 1 : 0;
    if (stalled >= kStallSteps) {
      throw SolverError(SolverError::Kind::Infeasible,
                        "solve: residual plateaued above tolerance; targets are likely not "
                        "attainable",
                        max_abs(state.expectations - cs.targets()));
    }
    if (max_abs(lambda) > kDivergence) {
      throw SolverError(SolverError::Kind::Infeasible,
                        "solve: multipliers diverged; targets are likely not attainable",
                        max_abs(state.expectations - cs.targets()));
    }
  }
}

RealMatrix primal_sensitivities(const MaxEntSolution& sol) {
  const RealMatrix& a = sol.curvature.A;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(a);
  RealVector ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() <= 1e-12 * scale) ev.array() += 1e-12 * scale;
  if (ev.minCoeff() <= 0.0) {
    throw std::runtime_error("primal_sensitivities: curvature matrix is singular");
  }
  return -(es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose());
}

}  // namespace maxent

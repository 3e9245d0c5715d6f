// bell.cpp

#include "maxent/bell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "maxent/root_finding.hpp"

namespace maxent {

namespace {

constexpr double kEntangledGuard = 1e-12;
constexpr double kClosureTol = 1e-12;
constexpr double kEndpointShrink = 1e-14;
constexpr double kRootTol = 0.0;  // run to adjacent doubles

double derivative_or_cutoff(const EntropicFunctional& fn, double p) {
  return p == 0.0 ? fn.derivative_at_zero().to_double() : fn.derivative(p);
}

// log(cosh(x)) without overflow or cancellation.
double log_cosh(double x) {
  const double ax = std::abs(x);
  if (ax < 1.0) {
    const double s = std::sinh(0.5 * ax);
    return std::log1p(2.0 * s * s);
  }
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
}

// p+ for 0 <= b < b_c: the zero of S'(p+) on (b, (1+b)/2).
double interior_p_plus(double b, const EntropicFunctional& fn) {
  auto slope = [&](double x) {
    const std::pair<double, double> terms[] = {{1.0, x}, {1.0, x - b}, {-2.0, 0.5 * (1.0 + b) - x}};
    return balanced_derivative_sum(fn, terms);
  };
  const double lo = b + kEndpointShrink;
  const double hi = 0.5 * (1.0 + b) - kEndpointShrink;
  if (slope(lo) <= 0.0) return b;
  if (slope(hi) >= 0.0) return 0.5 * (1.0 + b);
  return find_root_bracketed(slope, lo, hi, kRootTol).root;
}

void check_b(double b) {
  if (!(std::abs(b) <= 1.0)) {
    throw std::invalid_argument("Bell data b = " + std::to_string(b) + " outside [-1, 1]");
  }
}

}  // namespace

double BellDiagonalState::largest() const { return std::max({p_plus, p_minus, p_zero}); }

ComplexMatrix BellDiagonalState::matrix() const {
  const ComplexMatrix basis = bell_basis();
  RealVector w(4);
  w << p_zero, p_minus, p_plus, p_zero;
  return basis * w.cast<Complex>().asDiagonal() * basis.adjoint();
}

void validate(const BellDiagonalState& s) {
  if (s.p_plus < -kClosureTol || s.p_minus < -kClosureTol || s.p_zero < -kClosureTol) {
    throw std::invalid_argument("BellDiagonalState: negative weight");
  }
  const double total = 2.0 * s.p_zero + s.p_plus + s.p_minus;
  if (!(std::abs(total - 1.0) <= kClosureTol)) {
    throw std::invalid_argument("BellDiagonalState: weights sum to " + std::to_string(total));
  }
}

std::string_view to_string(BellRegime r) {
  return r == BellRegime::Interior ? "interior" : "cutoff";
}

ComplexMatrix bell_basis() {
  const double s = 1.0 / std::numbers::sqrt2;
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  // Psi+ = (ud + du)/sqrt2, Psi- = (ud - du)/sqrt2
  m(1, 0) = s;
  m(2, 0) = s;
  m(1, 1) = s;
  m(2, 1) = -s;
  // Phi+ = (uu + dd)/sqrt2, Phi- = (uu - dd)/sqrt2
  m(0, 2) = s;
  m(3, 2) = s;
  m(0, 3) = s;
  m(3, 3) = -s;
  return m;
}

Eigen::VectorXcd bell_vector(BellState s) { return bell_basis().col(static_cast<int>(s)); }

HermitianMatrix chsh_observable() { return chsh_alpha_observable(1.0); }

HermitianMatrix chsh_square() {
  const Eigen::VectorXcd phi = bell_vector(BellState::PhiPlus);
  const Eigen::VectorXcd psi = bell_vector(BellState::PsiMinus);
  return HermitianMatrix(phi * phi.adjoint() + psi * psi.adjoint());
}

HermitianMatrix chsh_alpha_observable(double alpha) {
  const Eigen::VectorXcd phi = bell_vector(BellState::PhiPlus);
  const Eigen::VectorXcd psi = bell_vector(BellState::PsiMinus);
  return HermitianMatrix(phi * phi.adjoint() - alpha * (psi * psi.adjoint()));
}

BellDiagonalState bell_weights(const ComplexMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) throw std::invalid_argument("bell_weights: need 4x4");
  const ComplexMatrix basis = bell_basis();
  auto w = [&](int i) { return (basis.col(i).adjoint() * rho * basis.col(i))(0, 0).real(); };
  return {w(2), w(1), 0.5 * (w(0) + w(3))};
}

double tsallis_critical_b(double q) {
  if (!(q > 0.0)) throw std::invalid_argument("tsallis_critical_b: q must be positive");
  if (q <= 1.0) return 1.0;
  return 1.0 / (1.0 + std::exp2(1.0 - 1.0 / (q - 1.0)));
}

double exponential_critical_b(double q) {
  if (q == 0.0) return 0.5;
  if (q > 0.0) {
    const double beta = std::cbrt(1.0 + std::sqrt(1.0 + std::exp(-q) / 27.0));
    return 1.0 / 3.0 + 2.0 / q * std::log(beta - std::exp(-q / 3.0) / (3.0 * beta));
  }
  // q < 0: e^{qb/2} is the real root of t^3 + t - 2 e^{q/2}; Cardano's
  // difference of cube roots is rationalized to avoid cancellation.
  const double s = std::exp(0.5 * q);
  const double r = std::sqrt(s * s + 1.0 / 27.0);
  const double u = std::cbrt(s + r);
  const double v = std::cbrt(r - s);
  const double log_t = std::numbers::ln2 + 0.5 * q - std::log(u * u + u * v + v * v);
  return 2.0 / q * log_t;
}

double critical_b_generic(const EntropicFunctional& fn) {
  if (fn.derivative_at_zero().is_plus_infinity()) return 1.0;
  auto onset = [&](double b) {
    const std::pair<double, double> terms[] = {{1.0, b}, {1.0, 0.0}, {-2.0, 0.5 * (1.0 - b)}};
    return balanced_derivative_sum(fn, terms);
  };
  const double hi = fn.derivative_at_one().is_finite() ? 1.0 : 1.0 - kEndpointShrink;
  return find_root_bracketed(onset, 1.0 / 3.0, hi, 1e-15).root;
}

double critical_b(const EntropicFunctional& fn) {
  if (fn.derivative_at_zero().is_plus_infinity()) return 1.0;
  if (!fn.mirrored() && fn.q()) {
    const double q = *fn.q();
    if (fn.family() == Family::Tsallis) return tsallis_critical_b(q);
    if (fn.family() == Family::Exponential && std::abs(q) >= 1e-6) return exponential_critical_b(q);
  }
  return critical_b_generic(fn);
}

double exponential_p_plus(double q, double b) {
  if (q == 0.0) return 0.25 * (1.0 + 2.0 * b);
  return 0.25 * (1.0 + 2.0 * b) - log_cosh(0.5 * b * q) / (2.0 * q);
}

BellReport solve_bell(double b, const EntropicFunctional& fn) {
  check_b(b);
  if (b < 0.0) {
    BellReport r = solve_bell(-b, fn);
    std::swap(r.state.p_plus, r.state.p_minus);
    r.b = b;
    r.lambda1 = -r.lambda1;
    return r;
  }
  BellReport r;
  r.b = b;
  r.b_c = critical_b(fn);
  if (b >= r.b_c) {
    r.regime = BellRegime::Cutoff;
    r.state = {b, 0.0, 0.5 * (1.0 - b)};
  } else {
    r.regime = BellRegime::Interior;
    const double pp = interior_p_plus(b, fn);
    r.state = {pp, pp - b, 0.5 * (1.0 + b) - pp};
  }
  const auto& s = r.state;
  r.lambda0 = derivative_or_cutoff(fn, s.p_zero);
  r.lambda1 = derivative_or_cutoff(fn, s.p_plus) - r.lambda0;
  r.entropy = fn.value(s.p_plus) + fn.value(s.p_minus) + 2.0 * fn.value(s.p_zero);
  const Separability sep = separability(s);
  r.largest_eigenvalue = s.largest();
  r.entangled = sep.entangled;
  r.concurrence = sep.concurrence;
  r.fake = sep.entangled && std::abs(b) < 0.5;
  return r;
}

BellDiagonalState min_largest_eigenvalue_state(double b) {
  if (!(b >= 0.0 && b <= 1.0)) {
    throw std::invalid_argument("min_largest_eigenvalue_state: b outside [0, 1]");
  }
  if (b <= 1.0 / 3.0) return {0.25 * (1.0 + b), 0.25 * (1.0 - 3.0 * b), 0.25 * (1.0 + b)};
  return {b, 0.0, 0.5 * (1.0 - b)};
}

BellDiagonalState solve_with_dispersion(double b, double b2) {
  if (!(std::abs(b) <= b2 + kClosureTol) || !(b2 <= 1.0 + kClosureTol)) {
    throw std::invalid_argument("solve_with_dispersion: inconsistent data (b = " +
                                std::to_string(b) + ", b2 = " + std::to_string(b2) +
                                "); need |b| <= b2 <= 1");
  }
  return {0.5 * (b2 + b), 0.5 * (b2 - b), 0.5 * (1.0 - b2)};
}

Separability separability(const BellDiagonalState& s) {
  const double pm = s.largest();
  const bool entangled = pm > 0.5 + kEntangledGuard;
  return {entangled, entangled ? 2.0 * pm - 1.0 : 0.0};
}

std::optional<std::pair<double, double>> fake_entanglement_interval(const EntropicFunctional& fn) {
  auto excess = [&](double b) { return solve_bell(b, fn).state.p_plus - 0.5; };
  if (excess(0.5) <= kEntangledGuard) return std::nullopt;
  const double lo = find_root_bracketed(excess, 0.0, 0.5, 1e-13).root;
  return std::make_pair(lo, 0.5);
}

QThresholds alpha_thresholds(double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha_thresholds: alpha must be >= 0");
  if (alpha == 0.0) {
    const double inf = std::numeric_limits<double>::infinity();
    return {inf, inf};
  }
  return {1.0 + std::log2(1.0 + 1.0 / alpha), -4.0 * std::log(alpha)};
}

double critical_b_alpha(const EntropicFunctional& fn, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("critical_b_alpha: alpha must be >= 0");
  if (fn.derivative_at_zero().is_plus_infinity() || alpha == 0.0) return 1.0;
  auto onset = [&](double b) {
    const std::pair<double, double> terms[] = {
        {1.0 + alpha, 0.5 * (1.0 - b)}, {-alpha, b}, {-1.0, 0.0}};
    return balanced_derivative_sum(fn, terms);
  };
  const double hi = fn.derivative_at_one().is_finite() ? 1.0 : 1.0 - kEndpointShrink;
  return find_root_bracketed(onset, 1.0 / 3.0, hi, 1e-15).root;
}

BellReport solve_bell_alpha(double b, double alpha, const EntropicFunctional& fn,
                            const SolverOptions& opts) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("solve_bell_alpha: alpha must be finite and >= 0");
  }
  if (!(b >= 0.0 && b <= 1.0)) {
    throw std::invalid_argument("solve_bell_alpha: b = " + std::to_string(b) +
                                " outside [0, 1]");
  }
  SolverOptions tight = opts;
  tight.tol = std::min(opts.tol, 1e-12);
  const ConstraintSet cs = ConstraintSet::normalized(4, {chsh_alpha_observable(alpha)}, {b});
  const MaxEntSolution sol = solve(cs, fn, tight);

  BellReport r;
  r.b = b;
  r.state = bell_weights(sol.rho.matrix());
  r.b_c = critical_b_alpha(fn, alpha);
  r.regime = b >= r.b_c ? BellRegime::Cutoff : BellRegime::Interior;
  r.lambda0 = sol.lambda(0);
  r.lambda1 = sol.lambda(1);
  r.entropy = sol.entropy;
  const Separability sep = separability(r.state);
  r.largest_eigenvalue = r.state.largest();
  r.entangled = sep.entangled;
  r.concurrence = sep.concurrence;
  r.fake = sep.entangled && b < 0.5;
  r.thresholds = alpha_thresholds(alpha);
  r.iterations = sol.iterations;
  return r;
}

double small_b_expansion(const EntropicFunctional& fn, double b) {
  if (!(std::abs(b) <= 0.1)) throw std::invalid_argument("small_b_expansion: need |b| <= 0.1");
  return 0.25 * (1.0 + 2.0 * b + gamma_coefficient(fn) * b * b);
}

}  // namespace maxent

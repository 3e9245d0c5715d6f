// bell.hpp
// Maximum-entropy inference for two qubits constrained by Bell-diagonal
// observables.
//
// With data b = <B> for B = |Phi+><Phi+| - |Psi-><Psi-|, the maximizer is
// diagonal in the Bell basis with weights p+ (Phi+), p- (Psi-) and p0 (each
// of Psi+ and Phi-). For b >= 0 the entropy
//
//   S(p+) = f(p+) + f(p+ - b) + 2 f((1+b)/2 - p+)
//
// is concave on [b, (1+b)/2]. Its maximum is the root of S'(p+) when b < b_c
// and sits on the left border p+ = b (p- = 0) when b >= b_c.

#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <utility>

#include "maxent/functional.hpp"
#include "maxent/linalg.hpp"
#include "maxent/solver.hpp"

namespace maxent {

struct BellDiagonalState {
  double p_plus = 0.25;   // |Phi+>
  double p_minus = 0.25;  // |Psi->
  double p_zero = 0.25;   // each of |Psi+> and |Phi->

  double largest() const;
  // 4x4 density in the product basis (uu, ud, du, dd).
  ComplexMatrix matrix() const;
};

// Throws std::invalid_argument unless weights are >= -1e-12 and
// 2 p0 + p+ + p- = 1 within 1e-12.
void validate(const BellDiagonalState& s);

enum class BellRegime { Interior, Cutoff };

std::string_view to_string(BellRegime r);

// Minimal q above which the Tsallis and exponential families avoid fake
// entanglement for the observable B_alpha.
struct QThresholds {
  double tsallis = 0.0;
  double exponential = 0.0;
};

struct BellReport {
  BellDiagonalState state;
  double b = 0.0;
  double b_c = 1.0;
  BellRegime regime = BellRegime::Interior;
  double largest_eigenvalue = 0.25;
  double concurrence = 0.0;
  bool entangled = false;
  bool fake = false;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double entropy = 0.0;
  std::optional<QThresholds> thresholds;  // set by solve_bell_alpha
  int iterations = 0;                     // generic-solver iterations, if used
};

enum class BellState { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

// Columns: Psi+, Psi-, Phi+, Phi- in the product basis (uu, ud, du, dd).
ComplexMatrix bell_basis();
Eigen::VectorXcd bell_vector(BellState s);

// B = |Phi+><Phi+| - |Psi-><Psi-|.
HermitianMatrix chsh_observable();
// B^2 = |Phi+><Phi+| + |Psi-><Psi-|.
HermitianMatrix chsh_square();
// B_alpha = |Phi+><Phi+| - alpha |Psi-><Psi-|.
HermitianMatrix chsh_alpha_observable(double alpha);

// Bell-basis weights of an arbitrary 4x4 density; p0 averages Psi+ and Phi-.
BellDiagonalState bell_weights(const ComplexMatrix& rho);

/// Critical field b_c: 1 when f'(0) is infinite, otherwise the root in
/// [1/3, 1] of f'(b) + f'(0) - 2 f'((1-b)/2). Tsallis and exponential kernels
/// use their closed forms.
double critical_b(const EntropicFunctional& fn);
// Always the bracketed root, for cross-checking the closed forms.
double critical_b_generic(const EntropicFunctional& fn);
double tsallis_critical_b(double q);
double exponential_critical_b(double q);

// Closed-form p+ for the exponential kernel below b_c, b >= 0.
double exponential_p_plus(double q, double b);

BellReport solve_bell(double b, const EntropicFunctional& fn);

BellDiagonalState min_largest_eigenvalue_state(double b);

BellDiagonalState solve_with_dispersion(double b, double b2);

struct Separability {
  bool entangled = false;
  double concurrence = 0.0;
};

// Entangled iff the largest weight exceeds 1/2 + 1e-12.
Separability separability(const BellDiagonalState& s);

// (b*, 1/2) with p+(b*) = 1/2, or nullopt when no b < 1/2 yields entanglement.
std::optional<std::pair<double, double>> fake_entanglement_interval(const EntropicFunctional& fn);

QThresholds alpha_thresholds(double alpha);

// Onset of the p- = 0 cutoff for B_alpha: root in b of
// (1 + alpha) f'((1-b)/2) - alpha f'(b) - f'(0). Equals critical_b at alpha = 1.
double critical_b_alpha(const EntropicFunctional& fn, double alpha);

/// Solves constraints {I, B_alpha} with the generic dual solver. alpha = 0 is
/// accepted as the Werner limit.
BellReport solve_bell_alpha(double b, double alpha, const EntropicFunctional& fn,
                            const SolverOptions& opts = {});

// 1/4 (1 + 2b + gamma b^2), |b| <= 0.1.
double small_b_expansion(const EntropicFunctional& fn, double b);

}  // namespace maxent

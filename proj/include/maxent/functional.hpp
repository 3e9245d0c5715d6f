// functional.hpp
// Concave trace-entropy kernels f with f(0) = f(1) = 0 and their scalar
// analytics: derivative stack, inverse of f', cutoff threshold f'(0),
// additivity class, mirror transform and the small-field gamma coefficient.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace maxent {

// A real number or one of +/- infinity. f'(0) is +inf for the Shannon and
// Tsallis q<1 kernels; the cutoff logic branches on that explicitly.
class ExtendedReal {
 public:
  enum class Kind { Finite, PlusInfinity, MinusInfinity };

  constexpr ExtendedReal(double v) : kind_(Kind::Finite), value_(v) {}  // NOLINT

  static constexpr ExtendedReal plus_infinity() { return ExtendedReal(Kind::PlusInfinity); }
  static constexpr ExtendedReal minus_infinity() { return ExtendedReal(Kind::MinusInfinity); }

  // Maps IEEE infinities onto the distinguished values. NaN is rejected.
  static ExtendedReal from_double(double v);

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_finite() const { return kind_ == Kind::Finite; }
  constexpr bool is_plus_infinity() const { return kind_ == Kind::PlusInfinity; }
  constexpr bool is_minus_infinity() const { return kind_ == Kind::MinusInfinity; }

  // Throws std::logic_error for the infinite values.
  double value() const;
  // IEEE view, for printing and comparisons.
  double to_double() const;

  ExtendedReal operator-() const;

  friend bool operator<(double x, const ExtendedReal& e) {
    return e.is_plus_infinity() || (e.is_finite() && x < e.value_);
  }
  friend bool operator>=(double x, const ExtendedReal& e) { return !(x < e); }
  friend bool operator<(const ExtendedReal& e, double x) {
    return e.is_minus_infinity() || (e.is_finite() && e.value_ < x);
  }
  friend bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

 private:
  explicit constexpr ExtendedReal(Kind k) : kind_(k), value_(0.0) {}
  Kind kind_;
  double value_;
};

std::string to_string(const ExtendedReal& e);

// Raised when a field value lies below f'(1), i.e. would need p > 1.
class FieldRangeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised when a functional fails validation (concavity, boundary values).
class FunctionalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Family { Shannon, Tsallis, Exponential, Custom };

enum class AdditivityClass { SubAdditive, SuperAdditive, Additive, Indeterminate };

std::string_view to_string(AdditivityClass c);

/// Optional split of the derivative as f'(p) = offset + sign * exp(log_magnitude(p)).
///
/// Tsallis and exponential kernels have this shape. Combinations of f'
/// values whose coefficients sum to zero cancel the offset exactly, so they
/// can be evaluated in the log domain at extreme q where p^(q-1) or e^(qp)
/// under/overflow.
struct DerivativeSplit {
  double offset = 0.0;
  double sign = 1.0;
  std::function<double(double)> log_magnitude;
};

/// Scalar maps supplied for a user-defined kernel. `inverse_derivative` may be
/// left empty, in which case it is synthesized by bisection on f'.
struct FunctionalMaps {
  std::function<double(double)> f;
  std::function<double(double)> derivative;
  std::function<double(double)> second_derivative;
  std::function<double(double)> third_derivative;
  std::function<double(double)> inverse_derivative;
  // Left unset, these are evaluated from `derivative` at 0 and 1; any
  // non-finite result is read as the corresponding infinity.
  std::optional<ExtendedReal> derivative_at_zero;
  std::optional<ExtendedReal> derivative_at_one;
};

/// Immutable concave kernel f on [0,1].
///
/// Construction validates f(0) = f(1) = 0 (1e-12) and f'' < 0 on 1000
/// interior samples; a violation throws FunctionalError. Safe to share across
/// threads.
class EntropicFunctional {
 public:
  static EntropicFunctional custom(std::string name, FunctionalMaps maps);

  const std::string& name() const { return name_; }
  Family family() const { return family_; }
  double k() const { return k_; }
  // Entropic index for the Tsallis and exponential families.
  std::optional<double> q() const { return q_; }
  bool mirrored() const { return mirrored_; }

  double value(double p) const { return maps_.f(p); }
  double derivative(double p) const { return maps_.derivative(p); }
  double second_derivative(double p) const { return maps_.second_derivative(p); }
  double third_derivative(double p) const { return maps_.third_derivative(p); }

  // f'(0+) and f'(1-).
  ExtendedReal derivative_at_zero() const { return *maps_.derivative_at_zero; }
  ExtendedReal derivative_at_one() const { return *maps_.derivative_at_one; }

  // [f']^{-1}(h) for f'(1) <= h < f'(0), without range checks.
  double raw_inverse_derivative(double h) const { return maps_.inverse_derivative(h); }

  const std::optional<DerivativeSplit>& split() const { return split_; }

  // Canonical string spec, parseable by parse_functional for builtins.
  std::string spec() const;

 private:
  friend EntropicFunctional make_shannon(double k);
  friend EntropicFunctional make_tsallis(double q, double k);
  friend EntropicFunctional make_exponential(double q, double k);
  friend EntropicFunctional mirror(const EntropicFunctional& fn);

  EntropicFunctional(std::string name, Family family, double k, std::optional<double> q,
                     FunctionalMaps maps, std::optional<DerivativeSplit> split);
  void validate() const;

  std::string name_;
  Family family_;
  double k_;
  std::optional<double> q_;
  bool mirrored_ = false;
  // Set on mirrored kernels so that mirroring twice returns the original.
  std::shared_ptr<const EntropicFunctional> mirror_source_;
  FunctionalMaps maps_;
  std::optional<DerivativeSplit> split_;
};

// f(p) = -k p ln p.
EntropicFunctional make_shannon(double k = 1.0);
// f(p) = k (p - p^q)/(q - 1), q > 0; q == 1 yields the Shannon kernel.
EntropicFunctional make_tsallis(double q, double k = 1.0);
// f(p) = (k/q) [p - (e^{qp} - 1)/(e^q - 1)]; q == 0 yields k p(1-p)/2.
EntropicFunctional make_exponential(double q, double k = 1.0);

struct BuiltinParams {
  double k = 1.0;
  double q = 2.0;
};

EntropicFunctional make_builtin(Family kind, const BuiltinParams& params);

// "shannon", "tsallis:q=<v>", "exponential:q=<v>", each with optional ",k=<v>".
EntropicFunctional parse_functional(std::string_view spec);

/// Probability p(h): [f']^{-1}(h) in the interior, exactly 0 once h >= f'(0).
/// Throws FieldRangeError for h < f'(1) (standard normalization only).
double inverse_fprime(const EntropicFunctional& fn, double h);

// Sign of (p f''(p))' on a midpoint grid of `grid_size` points in (0,1).
AdditivityClass classify_additivity(const EntropicFunctional& fn, int grid_size = 1000);

// f~(p) = f(1-p).
EntropicFunctional mirror(const EntropicFunctional& fn);

// -f'''(1/4) / (4 f''(1/4)).
double gamma_coefficient(const EntropicFunctional& fn);

/// Evaluates sum_i c_i f'(p_i) for coefficients with sum_i c_i = 0, up to a
/// positive scale factor. The sign is exact to rounding; the magnitude is only
/// meaningful relative to other calls at nearby points. A p_i of exactly zero
/// uses f'(0+), which must then be finite.
double balanced_derivative_sum(const EntropicFunctional& fn,
                               std::span<const std::pair<double, double>> terms);

}  // namespace maxent

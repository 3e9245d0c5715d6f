// functional.cpp

#include "maxent/functional.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

namespace maxent {

namespace {

constexpr int kConcavitySamples = 1000;
constexpr double kBoundaryTol = 1e-12;
// Beyond this |q| the exponential kernel switches to forms scaled by e^{-|q|}.
constexpr double kExpLargeQ = 50.0;

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw std::invalid_argument("functional spec: cannot parse " + std::string(what) + " value '" +
                                std::string(text) + "'");
  }
  return v;
}

// 1/q - 1/(e^q - 1), the exponential kernel's cutoff field at k = 1.
double exponential_cutoff(double q) {
  if (std::abs(q) < 1e-2) {
    const double q2 = q * q;
    return 0.5 - q / 12.0 + q * q2 / 720.0 - q * q2 * q2 / 30240.0;
  }
  return 1.0 / q - 1.0 / std::expm1(q);
}

}  // namespace

ExtendedReal ExtendedReal::from_double(double v) {
  if (std::isnan(v)) throw std::invalid_argument("ExtendedReal: NaN");
  if (std::isinf(v)) return v > 0 ? plus_infinity() : minus_infinity();
  return ExtendedReal(v);
}

double ExtendedReal::value() const {
  if (!is_finite()) throw std::logic_error("ExtendedReal: value() of an infinite quantity");
  return value_;
}

double ExtendedReal::to_double() const {
  switch (kind_) {
    case Kind::PlusInfinity:
      return std::numeric_limits<double>::infinity();
    case Kind::MinusInfinity:
      return -std::numeric_limits<double>::infinity();
    default:
      return value_;
  }
}

ExtendedReal ExtendedReal::operator-() const {
  switch (kind_) {
    case Kind::PlusInfinity:
      return minus_infinity();
    case Kind::MinusInfinity:
      return plus_infinity();
    default:
      return ExtendedReal(-value_);
  }
}

std::string to_string(const ExtendedReal& e) {
  if (e.is_plus_infinity()) return "+inf";
  if (e.is_minus_infinity()) return "-inf";
  return format_real(e.value());
}

std::string_view to_string(AdditivityClass c) {
  switch (c) {
    case AdditivityClass::SubAdditive:
      return "sub-additive";
    case AdditivityClass::SuperAdditive:
      return "super-additive";
    case AdditivityClass::Additive:
      return "additive";
    default:
      return "indeterminate";
  }
}

EntropicFunctional::EntropicFunctional(std::string name, Family family, double k,
                                       std::optional<double> q, FunctionalMaps maps,
                                       std::optional<DerivativeSplit> split)
    : name_(std::move(name)),
      family_(family),
      k_(k),
      q_(q),
      maps_(std::move(maps)),
      split_(std::move(split)) {
  if (!maps_.f || !maps_.derivative || !maps_.second_derivative || !maps_.third_derivative) {
    throw FunctionalError("functional '" + name_ + "': f, f', f'' and f''' are all required");
  }
  if (!maps_.derivative_at_zero) {
    const double d0 = maps_.derivative(0.0);
    maps_.derivative_at_zero = std::isfinite(d0) ? ExtendedReal(d0) : ExtendedReal::plus_infinity();
  }
  if (!maps_.derivative_at_one) {
    const double d1 = maps_.derivative(1.0);
    maps_.derivative_at_one = std::isfinite(d1) ? ExtendedReal(d1) : ExtendedReal::minus_infinity();
  }
  if (!maps_.inverse_derivative) {
    // Bisection on the strictly decreasing f' over [0,1].
    maps_.inverse_derivative = [d = maps_.derivative](double h) {
      double lo = 0.0;
      double hi = 1.0;
      while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (d(mid) > h) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    };
  }
  validate();
}

void EntropicFunctional::validate() const {
  const double tol = kBoundaryTol * std::max(1.0, k_);
  const double f0 = maps_.f(0.0);
  const double f1 = maps_.f(1.0);
  if (!(std::abs(f0) <= tol) || !(std::abs(f1) <= tol)) {
    throw FunctionalError("functional '" + name_ + "': requires f(0) = f(1) = 0, got f(0) = " +
                          format_real(f0) + ", f(1) = " + format_real(f1));
  }
  // Strict concavity. Samples may underflow to -0 for steep kernels, so at
  // least one strictly negative sample is required and none may be positive.
  bool any_negative = false;
  for (int i = 0; i < kConcavitySamples; ++i) {
    const double p = (i + 0.5) / kConcavitySamples;
    const double d2 = maps_.second_derivative(p);
    if (std::isnan(d2) || d2 > 0.0) {
      throw FunctionalError("functional '" + name_ + "': not concave, f''(" + format_real(p) +
                            ") = " + format_real(d2));
    }
    any_negative = any_negative || d2 < 0.0;
  }
  if (!any_negative) {
    throw FunctionalError("functional '" + name_ + "': f'' vanishes on every sample");
  }
  if (!(derivative_at_one() < derivative_at_zero().to_double())) {
    throw FunctionalError("functional '" + name_ + "': requires f'(1) < f'(0)");
  }
}

std::string EntropicFunctional::spec() const {
  std::string out;
  if (mirrored_) return name_;
  switch (family_) {
    case Family::Shannon:
      out = "shannon";
      break;
    case Family::Tsallis:
      out = "tsallis:q=" + format_real(*q_);
      break;
    case Family::Exponential:
      out = "exponential:q=" + format_real(*q_);
      break;
    default:
      return name_;
  }
  if (k_ != 1.0) out += ",k=" + format_real(k_);
  return out;
}

EntropicFunctional EntropicFunctional::custom(std::string name, FunctionalMaps maps) {
  return EntropicFunctional(std::move(name), Family::Custom, 1.0, std::nullopt, std::move(maps),
                            std::nullopt);
}

EntropicFunctional make_shannon(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw FunctionalError("shannon: k must be positive");
  FunctionalMaps m;
  m.f = [k](double p) { return p <= 0.0 ? 0.0 : -k * p * std::log(p); };
  m.derivative = [k](double p) { return -k * (std::log(p) + 1.0); };
  m.second_derivative = [k](double p) { return -k / p; };
  m.third_derivative = [k](double p) { return k / (p * p); };
  m.inverse_derivative = [k](double h) { return std::exp(-h / k - 1.0); };
  m.derivative_at_zero = ExtendedReal::plus_infinity();
  m.derivative_at_one = ExtendedReal(-k);
  EntropicFunctional fn("shannon", Family::Shannon, k, std::nullopt, std::move(m), std::nullopt);
  return fn;
}

EntropicFunctional make_tsallis(double q, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw FunctionalError("tsallis: k must be positive");
  if (!(q > 0.0) || !std::isfinite(q)) throw FunctionalError("tsallis: q must be positive");
  if (q == 1.0) return make_shannon(k);
  const double qm1 = q - 1.0;
  FunctionalMaps m;
  // p^{q-1} - 1 = expm1((q-1) ln p) keeps the q -> 1 limit well conditioned.
  m.f = [k, qm1](double p) {
    if (p <= 0.0) return 0.0;
    return -k * p * std::expm1(qm1 * std::log(p)) / qm1;
  };
  m.derivative = [k, q, qm1](double p) {
    return k * (-1.0 - q * std::expm1(qm1 * std::log(p)) / qm1);
  };
  m.second_derivative = [k, q](double p) { return -k * q * std::pow(p, q - 2.0); };
  m.third_derivative = [k, q](double p) { return -k * q * (q - 2.0) * std::pow(p, q - 3.0); };
  m.inverse_derivative = [k, q, qm1](double h) {
    const double y = h / k;
    return std::exp((std::log1p(-qm1 * y) - std::log1p(qm1)) / qm1);
  };
  m.derivative_at_zero = q > 1.0 ? ExtendedReal(k / qm1) : ExtendedReal::plus_infinity();
  m.derivative_at_one = ExtendedReal(-k);

  const double coeff = -k * q / qm1;
  DerivativeSplit split;
  split.offset = k / qm1;
  split.sign = coeff < 0.0 ? -1.0 : 1.0;
  split.log_magnitude = [lc = std::log(std::abs(coeff)), qm1](double p) {
    return lc + qm1 * std::log(p);
  };
  return EntropicFunctional("tsallis", Family::Tsallis, k, q, std::move(m), std::move(split));
}

EntropicFunctional make_exponential(double q, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw FunctionalError("exponential: k must be positive");
  if (!std::isfinite(q)) throw FunctionalError("exponential: q must be finite");
  FunctionalMaps m;
  if (q == 0.0) {
    m.f = [k](double p) { return 0.5 * k * p * (1.0 - p); };
    m.derivative = [k](double p) { return k * (0.5 - p); };
    m.second_derivative = [k](double) { return -k; };
    m.third_derivative = [](double) { return 0.0; };
    m.inverse_derivative = [k](double h) { return 0.5 - h / k; };
    m.derivative_at_zero = ExtendedReal(0.5 * k);
    m.derivative_at_one = ExtendedReal(-0.5 * k);
    return EntropicFunctional("exponential", Family::Exponential, k, 0.0, std::move(m),
                              std::nullopt);
  }

  const double hc = exponential_cutoff(q);
  // r(p) = e^{qp} / (e^q - 1), written so that neither factor overflows.
  auto r = [q](double p) {
    if (q > 0.0) return std::exp(q * (p - 1.0)) / -std::expm1(-q);
    return std::exp(q * p) / std::expm1(q);
  };
  const bool large = std::abs(q) > kExpLargeQ;
  if (q > kExpLargeQ) {
    m.f = [k, q](double p) {
      const double g = (std::exp(q * (p - 1.0)) - std::exp(-q)) / -std::expm1(-q);
      return k / q * (p - g);
    };
  } else {
    m.f = [k, q](double p) { return k / q * (p - std::expm1(q * p) / std::expm1(q)); };
  }
  if (large) {
    m.derivative = [k, q, r](double p) { return k * (1.0 / q - r(p)); };
  } else {
    m.derivative = [k, q, hc](double p) { return k * (hc - std::expm1(q * p) / std::expm1(q)); };
  }
  m.second_derivative = [k, q, r](double p) { return -k * q * r(p); };
  m.third_derivative = [k, q, r](double p) { return -k * q * q * r(p); };
  m.inverse_derivative = [k, q, hc](double h) {
    const double u = hc - h / k;
    if (q > kExpLargeQ) return 1.0 + std::log(u + (1.0 - u) * std::exp(-q)) / q;
    if (q < -kExpLargeQ) return std::log((1.0 - u) + u * std::exp(q)) / q;
    return std::log1p(std::expm1(q) * u) / q;
  };
  m.derivative_at_zero = ExtendedReal(k * hc);
  m.derivative_at_one = ExtendedReal(k * (hc - 1.0));

  DerivativeSplit split;
  split.offset = k / q;
  if (q > 0.0) {
    split.sign = -1.0;
    split.log_magnitude = [lc = std::log(k) - std::log(-std::expm1(-q)), q](double p) {
      return lc + q * (p - 1.0);
    };
  } else {
    split.sign = 1.0;
    split.log_magnitude = [lc = std::log(k) - std::log(-std::expm1(q)), q](double p) {
      return lc + q * p;
    };
  }
  return EntropicFunctional("exponential", Family::Exponential, k, q, std::move(m),
                            std::move(split));
}

EntropicFunctional make_builtin(Family kind, const BuiltinParams& params) {
  switch (kind) {
    case Family::Shannon:
      return make_shannon(params.k);
    case Family::Tsallis:
      return make_tsallis(params.q, params.k);
    case Family::Exponential:
      return make_exponential(params.q, params.k);
    default:
      throw std::invalid_argument("make_builtin: custom functionals have no builtin form");
  }
}

EntropicFunctional parse_functional(std::string_view spec) {
  const auto head_end = spec.find_first_of(":,");
  const std::string_view head = spec.substr(0, head_end);
  std::optional<double> q;
  double k = 1.0;
  if (head_end != std::string_view::npos) {
    std::string_view rest = spec.substr(head_end + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw std::invalid_argument("functional spec: expected key=value, got '" +
                                    std::string(item) + "'");
      }
      const std::string_view key = item.substr(0, eq);
      const std::string_view val = item.substr(eq + 1);
      if (key == "q") {
        q = parse_real(val, "q");
      } else if (key == "k") {
        k = parse_real(val, "k");
      } else {
        throw std::invalid_argument("functional spec: unknown parameter '" + std::string(key) + "'");
      }
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  if (head == "shannon") {
    if (q) throw std::invalid_argument("functional spec: shannon takes no q");
    return make_shannon(k);
  }
  if (head == "tsallis" || head == "exponential") {
    if (!q) throw std::invalid_argument("functional spec: " + std::string(head) + " requires q");
    return head == "tsallis" ? make_tsallis(*q, k) : make_exponential(*q, k);
  }
  throw std::invalid_argument("functional spec: unknown functional '" + std::string(head) + "'");
}

double inverse_fprime(const EntropicFunctional& fn, double h) {
  if (std::isnan(h)) throw FieldRangeError("inverse_fprime: NaN field");
  if (h >= fn.derivative_at_zero()) return 0.0;
  const ExtendedReal lower = fn.derivative_at_one();
  if (lower.is_finite()) {
    const double lo = lower.value();
    if (h < lo - 1e-12 * (1.0 + std::abs(lo))) {
      throw FieldRangeError("inverse_fprime: field " + format_real(h) + " below f'(1) = " +
                            format_real(lo));
    }
    if (h <= lo) return 1.0;
  }
  const double p = fn.raw_inverse_derivative(h);
  if (std::isnan(p)) throw FieldRangeError("inverse_fprime: inverse undefined at " + format_real(h));
  return std::clamp(p, 0.0, 1.0);
}

AdditivityClass classify_additivity(const EntropicFunctional& fn, int grid_size) {
  if (grid_size < 100) throw std::invalid_argument("classify_additivity: grid_size must be >= 100");
  bool all_zero = true;
  bool all_nonpos = true;
  bool all_nonneg = true;
  for (int i = 0; i < grid_size; ++i) {
    const double p = (i + 0.5) / grid_size;
    const double d2 = fn.second_derivative(p);
    const double pd3 = p * fn.third_derivative(p);
    const double g = d2 + pd3;  // (p f''(p))'
    const double tol = 1e-10 * std::max(1.0, std::abs(d2) + std::abs(pd3));
    all_zero = all_zero && std::abs(g) <= tol;
    all_nonpos = all_nonpos && g <= tol;
    all_nonneg = all_nonneg && g >= -tol;
  }
  if (all_zero) return AdditivityClass::Additive;
  if (all_nonpos) return AdditivityClass::SubAdditive;
  if (all_nonneg) return AdditivityClass::SuperAdditive;
  return AdditivityClass::Indeterminate;
}

EntropicFunctional mirror(const EntropicFunctional& fn) {
  if (fn.mirror_source_) return *fn.mirror_source_;
  FunctionalMaps m;
  m.f = [fn](double p) { return fn.value(1.0 - p); };
  m.derivative = [fn](double p) { return -fn.derivative(1.0 - p); };
  m.second_derivative = [fn](double p) { return fn.second_derivative(1.0 - p); };
  m.third_derivative = [fn](double p) { return -fn.third_derivative(1.0 - p); };
  // Only called below the mirrored cutoff -f'(1), so -h stays above f'(1).
  m.inverse_derivative = [fn](double h) { return 1.0 - inverse_fprime(fn, -h); };
  m.derivative_at_zero = -fn.derivative_at_one();
  m.derivative_at_one = -fn.derivative_at_zero();

  std::optional<DerivativeSplit> split;
  if (fn.split()) {
    DerivativeSplit s;
    s.offset = -fn.split()->offset;
    s.sign = -fn.split()->sign;
    s.log_magnitude = [lm = fn.split()->log_magnitude](double p) { return lm(1.0 - p); };
    split = std::move(s);
  }
  EntropicFunctional out("mirror(" + fn.spec() + ")", Family::Custom, fn.k(), fn.q(),
                         std::move(m), std::move(split));
  out.mirrored_ = true;
  out.mirror_source_ = std::make_shared<const EntropicFunctional>(fn);
  return out;
}

double gamma_coefficient(const EntropicFunctional& fn) {
  return -0.25 * fn.third_derivative(0.25) / fn.second_derivative(0.25);
}

double balanced_derivative_sum(const EntropicFunctional& fn,
                               std::span<const std::pair<double, double>> terms) {
  auto direct = [&] {
    double sum = 0.0;
    for (const auto& [c, p] : terms) {
      sum += c * (p == 0.0 ? fn.derivative_at_zero().value() : fn.derivative(p));
    }
    return sum;
  };
  if (!fn.split()) return direct();

  const auto& split = *fn.split();
  double psi[8];
  if (terms.size() > std::size(psi)) return direct();
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    psi[i] = split.log_magnitude(terms[i].second);
    if (std::isnan(psi[i]) || psi[i] == std::numeric_limits<double>::infinity()) return direct();
    top = std::max(top, psi[i]);
  }
  if (top == -std::numeric_limits<double>::infinity()) return 0.0;
  // sum c_i = 0, so sum c_i e^{psi_i - top} = sum c_i expm1(psi_i - top).
  double sum = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    sum += terms[i].first * std::expm1(psi[i] - top);
  }
  return split.sign * sum;
}

}  // namespace maxent

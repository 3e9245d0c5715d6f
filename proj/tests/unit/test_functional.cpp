#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "maxent/functional.hpp"

using namespace maxent;

namespace {

std::vector<EntropicFunctional> builtins() {
  return {make_shannon(),       make_tsallis(0.5),      make_tsallis(1.5),
          make_tsallis(2.0),    make_tsallis(3.0),      make_tsallis(8.0),
          make_exponential(-4), make_exponential(-2.0), make_exponential(0.5),
          make_exponential(1),  make_exponential(4.0)};
}

}  // namespace

TEST(ExtendedRealTest, OrderingWithInfinities) {
  const auto inf = ExtendedReal::plus_infinity();
  EXPECT_TRUE(1e300 < inf);
  EXPECT_FALSE(1e300 >= inf);
  EXPECT_TRUE(-inf < -1e300);
  EXPECT_TRUE(ExtendedReal::from_double(HUGE_VAL).is_plus_infinity());
  EXPECT_TRUE(ExtendedReal::from_double(-HUGE_VAL).is_minus_infinity());
  EXPECT_THROW(ExtendedReal::from_double(std::nan("")), std::invalid_argument);
  EXPECT_THROW(inf.value(), std::logic_error);
  EXPECT_EQ(ExtendedReal(2.5).value(), 2.5);
  EXPECT_TRUE(std::isinf(inf.to_double()));
}

TEST(BuiltinTest, TsallisHalf) {
  EXPECT_DOUBLE_EQ(make_tsallis(2.0).value(0.5), 0.25);
}

TEST(BuiltinTest, ShannonHasNoCutoff) {
  EXPECT_TRUE(make_shannon().derivative_at_zero().is_plus_infinity());
  EXPECT_EQ(inverse_fprime(make_shannon(), 50.0), std::exp(-51.0));
}

TEST(BuiltinTest, BoundaryValuesVanish) {
  EXPECT_NEAR(make_exponential(1.0).value(1.0), 0.0, 1e-15);
  for (const auto& fn : builtins()) {
    EXPECT_NEAR(fn.value(0.0), 0.0, 1e-12) << fn.name();
    EXPECT_NEAR(fn.value(1.0), 0.0, 1e-12) << fn.name();
  }
}

TEST(BuiltinTest, KScalesKernel) {
  const auto a = make_tsallis(3.0, 2.5);
  const auto b = make_tsallis(3.0);
  for (double p : {0.1, 0.4, 0.9}) {
    EXPECT_NEAR(a.value(p), 2.5 * b.value(p), 1e-14);
    EXPECT_NEAR(a.derivative(p), 2.5 * b.derivative(p), 1e-13);
  }
}

TEST(BuiltinTest, DerivativesMatchFiniteDifferences) {
  const double eps = 1e-5;
  for (const auto& fn : builtins()) {
    for (double p : {0.1, 0.3, 0.5, 0.8}) {
      const double d1 = (fn.value(p + eps) - fn.value(p - eps)) / (2 * eps);
      const double d2 = (fn.derivative(p + eps) - fn.derivative(p - eps)) / (2 * eps);
      const double d3 = (fn.second_derivative(p + eps) - fn.second_derivative(p - eps)) / (2 * eps);
      EXPECT_NEAR(fn.derivative(p), d1, 1e-7 * (1 + std::abs(d1))) << fn.name() << " p=" << p;
      EXPECT_NEAR(fn.second_derivative(p), d2, 1e-6 * (1 + std::abs(d2))) << fn.name();
      EXPECT_NEAR(fn.third_derivative(p), d3, 1e-5 * (1 + std::abs(d3))) << fn.name();
    }
  }
}

TEST(BuiltinTest, InvalidParametersRejected) {
  EXPECT_THROW(make_tsallis(0.0), FunctionalError);
  EXPECT_THROW(make_tsallis(-1.0), FunctionalError);
  EXPECT_THROW(make_shannon(0.0), FunctionalError);
  EXPECT_THROW(make_shannon(-1.0), FunctionalError);
  EXPECT_THROW(make_exponential(std::nan("")), FunctionalError);
}

TEST(BuiltinTest, TsallisLimitIsShannon) {
  const auto s = make_shannon();
  for (double q : {1.0 - 1e-6, 1.0 + 1e-6}) {
    const auto t = make_tsallis(q);
    for (int i = 0; i <= 100; ++i) {
      const double p = i / 100.0;
      EXPECT_NEAR(t.value(p), s.value(p), 1e-5);
    }
  }
  EXPECT_EQ(make_tsallis(1.0).family(), Family::Shannon);
}

TEST(BuiltinTest, ExponentialLimitIsQuadratic) {
  for (double q : {-1e-6, 0.0, 1e-6}) {
    const auto e = make_exponential(q);
    for (int i = 0; i <= 100; ++i) {
      const double p = i / 100.0;
      EXPECT_NEAR(e.value(p), 0.5 * p * (1 - p), 1e-5);
    }
  }
}

TEST(BuiltinTest, ExtremeIndexStaysFinite) {
  for (const auto& fn : {make_exponential(1000.0), make_exponential(-1000.0), make_tsallis(1000.0)}) {
    for (double p : {0.0, 1e-3, 0.25, 0.5, 0.999, 1.0}) {
      EXPECT_TRUE(std::isfinite(fn.value(p))) << fn.name() << " p=" << p;
      EXPECT_TRUE(std::isfinite(fn.derivative(p))) << fn.name() << " p=" << p;
    }
  }
}

TEST(CustomTest, WrongCurvatureRejected) {
  FunctionalMaps maps;
  maps.f = [](double p) { return p * p - p; };
  maps.derivative = [](double p) { return 2 * p - 1; };
  maps.second_derivative = [](double) { return 2.0; };
  maps.third_derivative = [](double) { return 0.0; };
  EXPECT_THROW(EntropicFunctional::custom("convex", maps), FunctionalError);
}

TEST(CustomTest, NonzeroBoundaryRejected) {
  FunctionalMaps maps;
  maps.f = [](double p) { return p * (1 - p) + 0.1; };
  maps.derivative = [](double p) { return 1 - 2 * p; };
  maps.second_derivative = [](double) { return -2.0; };
  maps.third_derivative = [](double) { return 0.0; };
  EXPECT_THROW(EntropicFunctional::custom("shifted", maps), FunctionalError);
}

TEST(CustomTest, SynthesizedInverse) {
  FunctionalMaps maps;
  maps.f = [](double p) { return std::sin(M_PI * p); };
  maps.derivative = [](double p) { return M_PI * std::cos(M_PI * p); };
  maps.second_derivative = [](double p) { return -M_PI * M_PI * std::sin(M_PI * p); };
  maps.third_derivative = [](double p) { return -M_PI * M_PI * M_PI * std::cos(M_PI * p); };
  const auto fn = EntropicFunctional::custom("sine", maps);
  EXPECT_EQ(fn.family(), Family::Custom);
  EXPECT_NEAR(fn.derivative_at_zero().value(), M_PI, 1e-15);
  for (double p : {0.05, 0.3, 0.5, 0.77}) {
    EXPECT_NEAR(inverse_fprime(fn, fn.derivative(p)), p, 1e-12);
  }
  EXPECT_EQ(inverse_fprime(fn, M_PI), 0.0);
}

TEST(InverseTest, SpecExamples) {
  EXPECT_DOUBLE_EQ(inverse_fprime(make_shannon(), -1.0), 1.0);
  EXPECT_EQ(inverse_fprime(make_tsallis(2.0), 1.0), 0.0);
  const auto e = make_exponential(1.0);
  EXPECT_NEAR(inverse_fprime(e, e.derivative_at_zero().value() - 1.0), 1.0, 1e-12);
}

TEST(InverseTest, BelowRangeThrows) {
  EXPECT_THROW(inverse_fprime(make_tsallis(2.0), -1.5), FieldRangeError);
  EXPECT_THROW(inverse_fprime(make_exponential(1.0), -10.0), FieldRangeError);
}

TEST(InverseTest, RoundTripAndMonotone) {
  for (const auto& fn : builtins()) {
    const double lo = fn.derivative_at_one().value();
    const ExtendedReal top = fn.derivative_at_zero();
    const double hi = top.is_finite() ? top.value() : lo + 40.0;
    double prev = 2.0;
    for (int i = 0; i < 1000; ++i) {
      const double h = lo + (hi - lo) * i / 1000.0;
      const double p = inverse_fprime(fn, h);
      EXPECT_LE(p, prev) << fn.name();
      prev = p;
      if (p > 1e-12) {
        EXPECT_NEAR(fn.derivative(p), h, 1e-10 * (1 + std::abs(h))) << fn.name() << " h=" << h;
      }
    }
  }
}

TEST(AdditivityTest, Classification) {
  EXPECT_EQ(classify_additivity(make_tsallis(2.0)), AdditivityClass::SubAdditive);
  EXPECT_EQ(classify_additivity(make_tsallis(0.5)), AdditivityClass::SuperAdditive);
  EXPECT_EQ(classify_additivity(make_shannon()), AdditivityClass::Additive);
  EXPECT_EQ(classify_additivity(make_exponential(2.0)), AdditivityClass::SubAdditive);
  // (p f'')' is proportional to 1 + q p, which changes sign inside (0,1) for q < -1.
  EXPECT_EQ(classify_additivity(make_exponential(-2.0)), AdditivityClass::Indeterminate);
  EXPECT_EQ(classify_additivity(make_exponential(-0.5)), AdditivityClass::SubAdditive);
  EXPECT_EQ(to_string(AdditivityClass::Additive), "additive");
}

TEST(MirrorTest, ExponentialMirrorFlipsIndex) {
  for (double q : {0.5, 1.0, 4.0}) {
    const auto m = mirror(make_exponential(q));
    const auto e = make_exponential(-q);
    for (int i = 0; i <= 100; ++i) {
      const double p = i / 100.0;
      EXPECT_NEAR(m.value(p), e.value(p), 1e-12);
    }
  }
}

TEST(MirrorTest, PointValues) {
  EXPECT_NEAR(mirror(make_shannon()).value(0.5), 0.5 * std::log(2.0), 1e-15);
  EXPECT_NEAR(mirror(make_tsallis(2.0)).value(0.25), 0.1875, 1e-15);
}

TEST(MirrorTest, Involution) {
  for (const auto& fn : builtins()) {
    const auto mm = mirror(mirror(fn));
    EXPECT_FALSE(mm.mirrored());
    for (int i = 0; i <= 50; ++i) {
      const double p = i / 50.0;
      EXPECT_NEAR(mm.value(p), fn.value(p), 1e-12);
    }
  }
}

TEST(MirrorTest, DerivativesFlip) {
  const auto fn = make_tsallis(3.0);
  const auto m = mirror(fn);
  EXPECT_TRUE(m.mirrored());
  EXPECT_NEAR(m.derivative(0.2), -fn.derivative(0.8), 1e-14);
  EXPECT_NEAR(m.second_derivative(0.2), fn.second_derivative(0.8), 1e-14);
  EXPECT_NEAR(inverse_fprime(m, m.derivative(0.35)), 0.35, 1e-12);
}

TEST(GammaTest, FamilyFormulas) {
  EXPECT_NEAR(gamma_coefficient(make_shannon()), 1.0, 1e-12);
  for (double q : {0.5, 2.0, 3.0, 5.0}) {
    EXPECT_NEAR(gamma_coefficient(make_tsallis(q)), 2.0 - q, 1e-12);
  }
  for (double q : {-2.0, 1.0, 4.0}) {
    EXPECT_NEAR(gamma_coefficient(make_exponential(q)), -q / 4.0, 1e-12);
  }
}

TEST(ParseTest, RoundTripSpecs) {
  EXPECT_EQ(parse_functional("shannon").family(), Family::Shannon);
  const auto t = parse_functional("tsallis:q=2.5,k=3");
  EXPECT_EQ(t.family(), Family::Tsallis);
  EXPECT_EQ(*t.q(), 2.5);
  EXPECT_EQ(t.k(), 3.0);
  const auto e = parse_functional("exponential:q=-4");
  EXPECT_EQ(*e.q(), -4.0);
  EXPECT_EQ(parse_functional(e.spec()).spec(), e.spec());
  EXPECT_EQ(parse_functional(t.spec()).spec(), t.spec());
}

TEST(ParseTest, MalformedSpecs) {
  for (const char* bad : {"", "renyi", "tsallis", "tsallis:q=", "tsallis:q=abc", "shannon:q=2",
                          "exponential:k=1", "tsallis:q=0"}) {
    EXPECT_THROW(parse_functional(bad), std::invalid_argument) << bad;
  }
}

TEST(BalancedSumTest, MatchesDirectAtModerateIndex) {
  const auto fn = make_tsallis(3.0);
  const std::pair<double, double> terms[] = {{1.0, 0.3}, {1.0, 0.1}, {-2.0, 0.3}};
  const double direct = fn.derivative(0.3) + fn.derivative(0.1) - 2 * fn.derivative(0.3);
  const double balanced = balanced_derivative_sum(fn, terms);
  EXPECT_EQ(direct > 0, balanced > 0);
}

TEST(BalancedSumTest, SignSurvivesExtremeIndex) {
  // f'(0.3) - f'(0.2) is negative for any concave kernel.
  const std::pair<double, double> terms[] = {{1.0, 0.3}, {-1.0, 0.2}};
  for (const auto& fn : {make_exponential(1000.0), make_exponential(-1000.0), make_tsallis(1000.0)}) {
    EXPECT_LT(balanced_derivative_sum(fn, terms), 0.0) << fn.name();
  }
}

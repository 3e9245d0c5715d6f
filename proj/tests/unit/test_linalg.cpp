#include <gtest/gtest.h>

#include <cmath>

#include "maxent/functional.hpp"
#include "maxent/linalg.hpp"

using namespace maxent;

namespace {

std::vector<EntropicFunctional> property_functionals() {
  return {make_shannon(),        make_tsallis(0.5),     make_tsallis(2.0),
          make_tsallis(5.0),     make_exponential(-2.0), make_exponential(1.0),
          make_exponential(4.0)};
}

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

}  // namespace

TEST(HermitianTest, RejectsNonHermitian) {
  ComplexMatrix m(2, 2);
  m << 1, Complex(0, 1), Complex(0, 1), 1;
  EXPECT_THROW(HermitianMatrix{m}, HermitianError);
  EXPECT_THROW(HermitianMatrix{ComplexMatrix(2, 3)}, HermitianError);
}

TEST(HermitianTest, Symmetrizes) {
  ComplexMatrix m(2, 2);
  m << 1, Complex(2, 1e-14), Complex(2, -3e-14), Complex(1, 1e-15);
  const HermitianMatrix h(m);
  EXPECT_EQ(h(0, 1), std::conj(h(1, 0)));
  EXPECT_EQ(h(1, 1).imag(), 0.0);
}

TEST(EighTest, Identity) {
  const auto es = eigh(HermitianMatrix::identity(4));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(es.values(i), 1.0, 1e-15);
}

TEST(EighTest, DiagonalKeepsBasis) {
  RealVector d(2);
  d << 3, 1;
  const auto es = eigh(HermitianMatrix::diagonal(d));
  EXPECT_EQ(es.values(0), 3.0);
  EXPECT_EQ(es.values(1), 1.0);
  EXPECT_NEAR(std::abs(es.vectors(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(es.vectors(1, 1)), 1.0, 1e-15);
}

TEST(EighTest, PauliX) {
  const auto es = eigh(HermitianMatrix(pauli_x()));
  EXPECT_NEAR(es.values(0), 1.0, 1e-15);
  EXPECT_NEAR(es.values(1), -1.0, 1e-15);
}

TEST(EighTest, ReconstructsRandomMatrix) {
  const ComplexMatrix g = random_density(5, 3).matrix() + random_unitary(5, 7);
  const HermitianMatrix h(0.5 * (g + g.adjoint()));
  const auto es = eigh(h);
  const ComplexMatrix back = es.vectors * es.values.cast<Complex>().asDiagonal() * es.vectors.adjoint();
  EXPECT_LT((back - h.matrix()).norm(), 1e-12);
  EXPECT_TRUE(is_orthonormal(es.vectors));
  for (int i = 1; i < 5; ++i) EXPECT_GE(es.values(i - 1), es.values(i));
}

TEST(EighTest, DegenerateGroups) {
  RealVector v(5);
  v << 0.4, 0.2, 0.2 - 1e-12, 0.1, 0.1;
  const auto g = degenerate_groups(v);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[1], std::make_pair(1, 2));
  EXPECT_EQ(g[2], std::make_pair(3, 2));
}

TEST(DensityTest, Validation) {
  EXPECT_THROW(DensityOperator(HermitianMatrix::diagonal(RealVector::Constant(2, 0.6))), DensityError);
  RealVector d(2);
  d << 1.5, -0.5;
  EXPECT_THROW(DensityOperator(HermitianMatrix::diagonal(d)), DensityError);
  EXPECT_FALSE(is_density(HermitianMatrix::diagonal(d).matrix()));
  EXPECT_FALSE(is_density(HermitianMatrix::diagonal(RealVector::Constant(2, 0.6)).matrix()));
  EXPECT_TRUE(is_density(0.25 * ComplexMatrix::Identity(4, 4)));
}

TEST(DensityTest, ClampsTinyEigenvalues) {
  RealVector d(3);
  d << 0.6, 0.4 + 1e-13, -1e-13;
  const DensityOperator rho(HermitianMatrix::diagonal(d));
  EXPECT_EQ(rho.spectrum()(2), 0.0);
}

TEST(EntropyTest, SpecExamples) {
  const DensityOperator uniform(0.25 * HermitianMatrix::identity(4));
  EXPECT_NEAR(entropy(uniform, make_tsallis(2.0)), 0.75, 1e-15);
  EXPECT_NEAR(entropy(uniform, make_shannon()), std::log(4.0), 1e-15);
  RealVector pure = RealVector::Zero(3);
  pure(1) = 1.0;
  const DensityOperator rho(HermitianMatrix::diagonal(pure));
  for (const auto& fn : property_functionals()) EXPECT_NEAR(entropy(rho, fn), 0.0, 1e-12);
}

TEST(EntropyTest, UnitaryInvariance) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto rho = random_density(4, seed);
    const ComplexMatrix u = random_unitary(4, seed + 1000);
    const DensityOperator rotated(HermitianMatrix(u * rho.matrix() * u.adjoint()));
    for (const auto& fn : property_functionals()) {
      EXPECT_NEAR(entropy(rotated, fn), entropy(rho, fn), 1e-10);
    }
  }
}

TEST(DephaseTest, FixedPointAndTrace) {
  RealVector p(3);
  p << 0.5, 0.3, 0.2;
  const ComplexMatrix u = random_unitary(3, 11);
  const auto rho = DensityOperator::from_spectrum(p, u);
  const auto same = dephase(rho, u);
  EXPECT_LT((same.matrix() - rho.matrix()).norm(), 1e-14);
  const auto other = dephase(random_density(3, 5), random_unitary(3, 6));
  EXPECT_NEAR(other.matrix().trace().real(), 1.0, 1e-14);
}

TEST(DephaseTest, NonOrthonormalBasisRejected) {
  ComplexMatrix b = ComplexMatrix::Identity(2, 2);
  b(0, 1) = 0.5;
  EXPECT_THROW(dephase(random_density(2, 1), b), std::invalid_argument);
}

TEST(DephaseTest, EntropyIncreases) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto rho = random_density(4, seed);
    const auto rho_o = dephase(rho, random_unitary(4, seed));
    for (const auto& fn : property_functionals()) {
      ASSERT_GE(entropy(rho_o, fn), entropy(rho, fn) - 1e-12) << fn.name() << " seed " << seed;
    }
  }
}

TEST(RandomDensityTest, Basics) {
  EXPECT_EQ(random_density(1, 42).matrix()(0, 0), Complex(1.0, 0.0));
  EXPECT_EQ(random_density(4, 9).matrix(), random_density(4, 9).matrix());
  EXPECT_NE(random_density(4, 9).matrix(), random_density(4, 10).matrix());
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    ASSERT_TRUE(is_density(random_density(4, seed).matrix())) << seed;
  }
  EXPECT_THROW(random_density(0, 1), std::invalid_argument);
}

TEST(RandomUnitaryTest, IsUnitary) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ComplexMatrix u = random_unitary(6, seed);
    EXPECT_LT((u.adjoint() * u - ComplexMatrix::Identity(6, 6)).norm(), 1e-13);
  }
}

TEST(ConcavityTest, EntropyOfMixtures) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto r1 = random_density(3, 2 * seed);
    const auto r2 = random_density(3, 2 * seed + 1);
    for (int k = 1; k <= 9; ++k) {
      const double t = k / 10.0;
      const DensityOperator mix(HermitianMatrix(t * r1.matrix() + (1 - t) * r2.matrix()));
      for (const auto& fn : property_functionals()) {
        ASSERT_GE(entropy(mix, fn), t * entropy(r1, fn) + (1 - t) * entropy(r2, fn) - 1e-12);
      }
    }
  }
}

TEST(AdditivityTest, ProductStates) {
  for (const auto& fn : property_functionals()) {
    const auto cls = classify_additivity(fn);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto a = random_density(2, 3 * seed);
      const auto b = random_density(2, 3 * seed + 1);
      const DensityOperator ab(HermitianMatrix(kron(a.matrix(), b.matrix())));
      const double joint = entropy(ab, fn);
      const double sum = entropy(a, fn) + entropy(b, fn);
      switch (cls) {
        case AdditivityClass::SubAdditive:
          ASSERT_LE(joint, sum + 1e-12) << fn.name();
          break;
        case AdditivityClass::SuperAdditive:
          ASSERT_GE(joint, sum - 1e-12) << fn.name();
          break;
        case AdditivityClass::Additive:
          ASSERT_NEAR(joint, sum, 1e-10) << fn.name();
          break;
        case AdditivityClass::Indeterminate:
          break;
      }
    }
  }
}

TEST(KronTest, Dimensions) {
  const ComplexMatrix k = kron(pauli_x(), ComplexMatrix::Identity(3, 3));
  EXPECT_EQ(k.rows(), 6);
  EXPECT_EQ(k(0, 3), Complex(1.0, 0.0));
  EXPECT_NEAR(commutator_norm(pauli_x(), ComplexMatrix::Identity(2, 2)), 0.0, 1e-15);
}

#include "stabkit/linalg.hpp"

#include <gtest/gtest.h>

using namespace stabkit;

namespace {

ComplexMatrix random_matrix(Eigen::Index r, Eigen::Index c, Rng &rng)
{
  ComplexMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = complex_gaussian(rng);
  return m;
}

ComplexVector ket(std::initializer_list<double> a)
{
  ComplexVector v(Eigen::Index(a.size()));
  Eigen::Index i = 0;
  for (double x : a) v(i++) = x;
  return v;
}

} // namespace

TEST(TensorProduct, IdentityAndPauliZ)
{
  EXPECT_LT(max_abs(tensor_product(identity(2), identity(2)) - identity(4)), 1e-15);
  ComplexMatrix zz = tensor_product(pauli_z(), pauli_z());
  ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
  expect.diagonal() << 1, -1, -1, 1;
  EXPECT_LT(max_abs(zz - expect), 1e-15);
}

TEST(TensorProduct, XXFixesBellVector)
{
  ComplexVector bell = ket({1, 0, 0, 1});
  EXPECT_LT((tensor_product(pauli_x(), pauli_x()) * bell - bell).norm(), 1e-15);
}

TEST(TensorProduct, EntryFormula)
{
  Rng rng(11);
  ComplexMatrix a = random_matrix(2, 3, rng), b = random_matrix(3, 2, rng);
  ComplexMatrix t = tensor_product(a, b);
  ASSERT_EQ(t.rows(), 6);
  ASSERT_EQ(t.cols(), 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 2; ++l) EXPECT_EQ(t(i * 3 + k, j * 2 + l), a(i, j) * b(k, l));
}

TEST(TensorProduct, AssociativeAndMixedProduct)
{
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    ComplexMatrix a = random_matrix(2, 2, rng), b = random_matrix(2, 2, rng), c = random_matrix(2, 2, rng), d = random_matrix(2, 2, rng);
    EXPECT_LT(max_abs(tensor_product(tensor_product(a, b), c) - tensor_product(a, tensor_product(b, c))), 1e-12);
    EXPECT_LT(max_abs(tensor_product(a, b) * tensor_product(c, d) - tensor_product(a * c, b * d)), 1e-12);
  }
}

TEST(TensorProduct, EmbedPlacesOperatorAtSite)
{
  EXPECT_LT(max_abs(embed(pauli_x(), 1, 3) - tensor_product({identity(2), pauli_x(), identity(2)})), 1e-15);
  EXPECT_THROW(embed(pauli_x(), 3, 3), std::invalid_argument);
}

TEST(StateVectorTest, RejectsWrongLength)
{
  EXPECT_THROW(StateVector(2, ComplexVector::Zero(3)), std::invalid_argument);
  EXPECT_THROW(StateVector::basis(2, 4), std::invalid_argument);
  auto v = StateVector::basis(3, 5);
  EXPECT_EQ(v[5], cplx(1.0));
  EXPECT_TRUE(v.is_normalized());
}

TEST(EigenDecompose, SimpleSpectra)
{
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  auto e = eigen_decompose(d);
  std::vector<double> vals{e.values[0].real(), e.values[1].real()};
  std::sort(vals.begin(), vals.end());
  EXPECT_NEAR(vals[0], 0.0, 1e-15);
  EXPECT_NEAR(vals[1], 1.0, 1e-15);

  auto x = eigen_decompose(pauli_x());
  EXPECT_TRUE(x.hermitian);
  for (int i = 0; i < 2; ++i) {
    double lam = x.values[std::size_t(i)].real();
    EXPECT_NEAR(std::abs(lam), 1.0, 1e-14);
    ComplexVector v = x.vectors.col(i);
    EXPECT_NEAR(std::abs(v(0)), 1 / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(std::abs(v(0) - lam * v(1)), 0.0, 1e-14);
  }
}

TEST(EigenDecompose, ProjectorProductTwoByTwo)
{
  // P_0 P_{pi/2} = diag(1,0) (I + X)/2 has eigenvalues 0 and 1/2
  ComplexMatrix p0 = 0.5 * (identity(2) + pauli_z()), p1 = 0.5 * (identity(2) + pauli_x());
  auto e = eigen_decompose(p0 * p1);
  EXPECT_FALSE(e.hermitian);
  std::vector<double> vals{e.values[0].real(), e.values[1].real()};
  std::sort(vals.begin(), vals.end());
  EXPECT_NEAR(vals[0], 0.0, 1e-12);
  EXPECT_NEAR(vals[1], 0.5, 1e-12);
}

TEST(EigenDecompose, RejectsNonSquare) { EXPECT_THROW(eigen_decompose(ComplexMatrix::Zero(2, 3)), std::invalid_argument); }

TEST(EigenDecompose, ResidualProperty)
{
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + Eigen::Index(trial % 7);
    ComplexMatrix m = random_matrix(n, n, rng);
    if (trial % 2) m = (m + m.adjoint()).eval();
    auto e = eigen_decompose(m);
    const double scale = m.norm();
    for (Eigen::Index i = 0; i < n; ++i)
      EXPECT_LT((m * e.vectors.col(i) - e.values[std::size_t(i)] * e.vectors.col(i)).norm(), 1e-8 * scale);
    if (trial % 2) {
      EXPECT_TRUE(e.hermitian);
      for (auto l : e.values) EXPECT_LT(std::abs(l.imag()), 1e-10);
      EXPECT_LT(max_abs(e.vectors.adjoint() * e.vectors - identity(n)), 1e-8);
    }
  }
}

TEST(NullSpace, TrivialCases)
{
  EXPECT_EQ(null_space(ComplexMatrix::Zero(2, 2)).cols(), 2);
  EXPECT_EQ(null_space(identity(2)).cols(), 0);
}

TEST(NullSpace, StackedPatternSystem)
{
  // [ZZ - I; A A - I] at theta = pi/3: kernel is the |00> + |11> direction
  const double t = kPi / 3;
  ComplexMatrix a(2, 2);
  a << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
  ComplexMatrix m(8, 4);
  m << tensor_product(pauli_z(), pauli_z()) - identity(4), tensor_product(a, a) - identity(4);
  ComplexMatrix k = null_space(m);
  ASSERT_EQ(k.cols(), 1);
  EXPECT_NEAR(overlap(ComplexVector(k.col(0)), ket({1, 0, 0, 1})), 1.0, 1e-12);
}

TEST(NullSpace, RankNullityProperty)
{
  Rng rng(14);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 500; ++trial) {
    const int r = dim(rng), c = dim(rng), rank = std::uniform_int_distribution<int>(0, std::min(r, c))(rng);
    ComplexMatrix m = random_matrix(r, rank, rng) * random_matrix(rank, c, rng);
    ComplexMatrix k = null_space(m);
    EXPECT_EQ(k.cols() + numerical_rank(m), c);
    if (k.cols() > 0) {
      EXPECT_LT(max_abs(k.adjoint() * k - identity(k.cols())), 1e-10);
      EXPECT_LT((m * k).norm(), 1e-9 * std::max(1.0, m.norm()));
    }
  }
}

TEST(Subspaces, IntersectionOfCoordinatePlanes)
{
  ComplexMatrix a = ComplexMatrix::Zero(3, 2), b = ComplexMatrix::Zero(3, 2);
  a(0, 0) = a(1, 1) = 1.0;
  b(1, 0) = b(2, 1) = 1.0;
  ComplexMatrix i = intersect_subspaces(a, b);
  ASSERT_EQ(i.cols(), 1);
  EXPECT_NEAR(std::abs(i(1, 0)), 1.0, 1e-12);
}

TEST(Subspaces, PlusOneEigenspaceOfZZ)
{
  ComplexMatrix e = plus_one_eigenspace(tensor_product(pauli_z(), pauli_z()));
  ASSERT_EQ(e.cols(), 2);
  for (Eigen::Index c = 0; c < 2; ++c) {
    EXPECT_NEAR(std::abs(e(1, c)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(e(2, c)), 0.0, 1e-12);
  }
}

TEST(ReducedDensity, Examples)
{
  auto zero = StateVector::basis(2, 0);
  ComplexMatrix r = reduced_density(zero, {0});
  EXPECT_NEAR(std::abs(r(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r(1, 1)), 0.0, 1e-15);

  auto bell = as_state(ket({1, 0, 0, 1})).normalized();
  EXPECT_LT(max_abs(reduced_density(bell, {0}) - 0.5 * identity(2)), 1e-15);

  // psi_{+,+,+} = |000> - |011> - |101> - |110>, qubit 1 is maximally mixed
  auto psi = as_state(ket({1, 0, 0, -1, 0, -1, -1, 0})).normalized();
  EXPECT_LT(max_abs(reduced_density(psi, {1}) - 0.5 * identity(2)), 1e-15);
}

TEST(ReducedDensity, Errors)
{
  auto v = StateVector::basis(2, 0);
  EXPECT_THROW(reduced_density(v, {}), std::invalid_argument);
  EXPECT_THROW(reduced_density(v, {2}), std::invalid_argument);
  EXPECT_THROW(reduced_density(as_state(ket({1, 1, 0, 0})), {0}), std::invalid_argument);
}

TEST(ReducedDensity, TraceOneProperty)
{
  Rng rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 5;
    auto v = random_state(n, rng);
    std::vector<int> keep;
    for (int q = 0; q < n; ++q)
      if (rng() % 2) keep.push_back(q);
    if (keep.empty()) keep.push_back(n - 1);
    ComplexMatrix r = reduced_density(v, keep);
    EXPECT_NEAR(std::abs(r.trace() - 1.0), 0.0, 1e-9);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(r);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(Schmidt, Examples)
{
  auto c = schmidt_coefficients(StateVector::basis(2, 1), {0});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0], 1.0, 1e-15);
  EXPECT_NEAR(c[1], 0.0, 1e-15);
  EXPECT_EQ(schmidt_rank(c), 1);

  auto b = schmidt_coefficients(as_state(ket({1, 0, 0, 1})).normalized(), {0});
  EXPECT_NEAR(b[0], 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(b[1], 1 / std::sqrt(2.0), 1e-15);

  // psi_{+,-,+} = |000> + |011> - |101> + |110>
  auto p = schmidt_coefficients(as_state(ket({1, 0, 0, 1, 0, -1, 1, 0})).normalized(), {0});
  EXPECT_NEAR(p[0], 1 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(p[1], 1 / std::sqrt(2.0), 1e-14);
  EXPECT_EQ(schmidt_rank(p), 2);
}

TEST(Schmidt, SquaresSumToOneAndTrivialSplitRejected)
{
  Rng rng(16);
  for (int trial = 0; trial < 100; ++trial) {
    auto v = random_state(4, rng);
    auto c = schmidt_coefficients(v, {0, 2});
    double s = 0;
    for (double x : c) s += x * x;
    EXPECT_NEAR(s, 1.0, 1e-9);
    EXPECT_TRUE(std::is_sorted(c.rbegin(), c.rend()));
  }
  auto v = StateVector::basis(2, 0);
  EXPECT_THROW(schmidt_coefficients(v, {}), std::invalid_argument);
  EXPECT_THROW(schmidt_coefficients(v, {0, 1}), std::invalid_argument);
}

TEST(Random, UnitaryAndSeedDerivation)
{
  Rng rng(17);
  for (int n = 1; n <= 8; ++n) EXPECT_TRUE(is_unitary(random_unitary(n, rng)));
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_EQ(derive_seed(5, 9), derive_seed(5, 9));
}

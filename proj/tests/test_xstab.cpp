#include "stabkit/xstab.hpp"

#include <gtest/gtest.h>

using namespace stabkit;

namespace {

std::uint64_t bits(const std::string &s) { return std::stoull(s, nullptr, 2); }

} // namespace

TEST(XsState, Amplitudes)
{
  auto v = xs_state();
  EXPECT_EQ(v[Eigen::Index(bits("000000"))], cplx(1.0));
  EXPECT_EQ(v[Eigen::Index(bits("111000"))], cplx(-1.0));
  EXPECT_EQ(v[Eigen::Index(bits("110011"))], cplx(1.0));
  EXPECT_EQ(v[Eigen::Index(bits("110101"))], cplx(0.0));
  int nonzero = 0;
  for (Eigen::Index k = 0; k < v.dim(); ++k) nonzero += std::abs(v[k]) > 0;
  EXPECT_EQ(nonzero, 8);
}

TEST(XsState, SupportIsParityCode)
{
  for (int x = 0; x < 8; ++x) {
    const std::uint64_t idx = xs_support_index(x);
    EXPECT_EQ(int(idx >> 3), x);
    const int x1 = (x >> 2) & 1, x2 = (x >> 1) & 1, x3 = x & 1;
    EXPECT_EQ(int(idx & 7), ((x1 ^ x2) << 2) | ((x2 ^ x3) << 1) | (x3 ^ x1));
  }
}

TEST(XsOperators, Structure)
{
  auto ops = xs_operators();
  ASSERT_EQ(ops.size(), 3u);
  const ComplexMatrix s3 = s_gate() * s_gate() * s_gate();
  // O_1 = X S^3 S^3 X S X
  ComplexMatrix expect = tensor_product({pauli_x(), s3, s3, pauli_x(), s_gate(), pauli_x()});
  EXPECT_LT(max_abs(ops[0] - expect), 1e-15);
  for (const auto &o : ops) {
    EXPECT_TRUE(is_unitary(o));
    EXPECT_EQ(operator_order(o), 4);
  }
}

TEST(XsOperators, FixStateAndCommuteOnlyThere)
{
  auto r = verify_xs();
  for (int i = 0; i < 3; ++i) {
    EXPECT_TRUE(r.fixed[std::size_t(i)]);
    EXPECT_LT(r.residuals[std::size_t(i)], 1e-10);
  }
  EXPECT_LT(r.max_commutator_on_state, 1e-10);
  EXPECT_FALSE(r.commute_globally);
  EXPECT_GE(r.joint_plus_one_dim, 1);
}

TEST(XsState, NotAPauliStabilizerState)
{
  auto form = pauli_stabilizer_form(xs_state());
  EXPECT_TRUE(form.uniform_modulus);
  EXPECT_TRUE(form.affine_support);
  EXPECT_EQ(form.support_size, 8);
  EXPECT_EQ(form.sign_degree, 3);
  EXPECT_FALSE(form.candidate);
  EXPECT_FALSE(verify_xs().pauli_candidate);
}

TEST(StabilizerForm, RecognizesPauliStabilizerStates)
{
  // GHZ: affine support {000, 111}, trivial sign
  auto ghz = StateVector::zero(3);
  ghz[0] = ghz[7] = 1.0;
  auto g = pauli_stabilizer_form(ghz);
  EXPECT_TRUE(g.candidate);
  EXPECT_EQ(g.support_size, 2);
  // |+>|+> with CZ: sign x1 x2 of degree 2
  auto cz = StateVector::zero(2);
  cz[0] = cz[1] = cz[2] = 1.0;
  cz[3] = -1.0;
  auto c = pauli_stabilizer_form(cz);
  EXPECT_TRUE(c.candidate);
  EXPECT_EQ(c.sign_degree, 2);
  // |0> + i|1>
  auto y = StateVector::zero(1);
  y[0] = 1.0;
  y[1] = cplx(0, 1);
  EXPECT_TRUE(pauli_stabilizer_form(y).candidate);
  // non-affine support of size 3
  auto w = StateVector::zero(2);
  w[0] = w[1] = w[2] = 1.0;
  EXPECT_FALSE(pauli_stabilizer_form(w).affine_support);
}

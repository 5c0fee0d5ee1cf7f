#pragma once

#include "linalg.hpp"

#include <array>
#include <bit>

namespace stabkit {

inline constexpr int kXsQubits = 6;

// Parity qubits 3, 4, 5 carry x1^x2, x2^x3, x3^x1.
inline constexpr std::array<std::array<int, 2>, 3> kXsParityPairs{{{0, 1}, {1, 2}, {2, 0}}};

inline std::uint64_t xs_support_index(int x)
{
  std::array<int, 6> bits{};
  for (int i = 0; i < 3; ++i) bits[std::size_t(i)] = (x >> (2 - i)) & 1;
  for (int p = 0; p < 3; ++p)
    bits[std::size_t(3 + p)] = bits[std::size_t(kXsParityPairs[std::size_t(p)][0])] ^ bits[std::size_t(kXsParityPairs[std::size_t(p)][1])];
  std::uint64_t idx = 0;
  for (int b : bits) idx = (idx << 1) | std::uint64_t(b);
  return idx;
}

// sum_x (-1)^{x1 x2 x3} |x1, x2, x3, x1^x2, x2^x3, x3^x1>, unnormalized.
inline StateVector xs_state()
{
  auto v = StateVector::zero(kXsQubits);
  for (int x = 0; x < 8; ++x) v[Eigen::Index(xs_support_index(x))] = (x == 7) ? -1.0 : 1.0;
  return v;
}

inline ComplexMatrix s_gate()
{
  ComplexMatrix s = ComplexMatrix::Zero(2, 2);
  s(0, 0) = 1.0;
  s(1, 1) = cplx(0, 1);
  return s;
}

// O_k: X on x_k, S^3 on the other two prefix qubits, X on both parity qubits containing x_k, S on the third.
inline std::vector<ComplexMatrix> xs_operators()
{
  const ComplexMatrix s = s_gate();
  const ComplexMatrix s3 = s * s * s;
  std::vector<ComplexMatrix> ops;
  for (int k = 0; k < 3; ++k) {
    std::vector<ComplexMatrix> f;
    for (int q = 0; q < 3; ++q) f.push_back(q == k ? pauli_x() : s3);
    for (const auto &pair : kXsParityPairs) f.push_back(pair[0] == k || pair[1] == k ? pauli_x() : s);
    ops.push_back(tensor_product(f));
  }
  return ops;
}

inline int operator_order(const ComplexMatrix &o, int max_order = 16, double tol = 1e-12)
{
  ComplexMatrix p = o;
  for (int k = 1; k <= max_order; ++k) {
    if (max_abs(p - identity(o.rows())) < tol) return k;
    p = p * o;
  }
  return 0;
}

struct StabilizerFormCheck {
  bool uniform_modulus = false;
  bool affine_support = false;
  bool quarter_phases = false;
  int support_size = 0;
  int sign_degree = -1; // algebraic degree of the residual sign function, -1 if not reached
  bool candidate = false;
};

// Tests for the form sum_{x in affine A} i^{l(x)} (-1)^{q(x)} |x> with l linear and q of degree <= 2.
inline StabilizerFormCheck pauli_stabilizer_form(const StateVector &v, double tol = 1e-9)
{
  StabilizerFormCheck out;
  const ComplexVector &a = v.amplitudes();
  const double amax = a.cwiseAbs().maxCoeff();
  if (amax == 0) return out;
  std::vector<std::uint64_t> supp;
  for (Eigen::Index k = 0; k < a.size(); ++k)
    if (std::abs(a(k)) > tol * amax) supp.push_back(std::uint64_t(k));
  out.support_size = int(supp.size());
  out.uniform_modulus = std::all_of(supp.begin(), supp.end(), [&](std::uint64_t k) { return std::abs(std::abs(a(Eigen::Index(k))) - amax) < tol * amax; });
  if (!out.uniform_modulus) return out;

  const std::uint64_t s0 = supp.front();
  std::vector<std::uint64_t> basis; // GF(2) basis of {s ^ s0}
  for (auto s : supp) {
    std::uint64_t r = s ^ s0;
    for (auto b : basis) r = std::min(r, r ^ b);
    if (r) {
      basis.push_back(r);
      std::sort(basis.rbegin(), basis.rend()); // distinct leading bits, largest first
    }
  }
  const int dim = int(basis.size());
  if ((std::size_t(1) << dim) != supp.size()) return out;
  out.affine_support = true;

  // phase exponents e(y) in Z_4 relative to the amplitude at s0
  const cplx ref = a(Eigen::Index(s0));
  const std::size_t cnt = std::size_t(1) << dim;
  std::vector<int> e(cnt);
  for (std::size_t y = 0; y < cnt; ++y) {
    std::uint64_t x = s0;
    for (int i = 0; i < dim; ++i)
      if ((y >> i) & 1) x ^= basis[std::size_t(i)];
    double ang = std::arg(a(Eigen::Index(x)) / ref) / (kPi / 2);
    double rnd = std::round(ang);
    if (std::abs(ang - rnd) > 1e-6) return out;
    e[y] = ((int(rnd) % 4) + 4) % 4;
  }
  out.quarter_phases = true;

  std::vector<int> f(cnt);
  for (std::size_t y = 0; y < cnt; ++y) {
    int l = 0;
    for (int i = 0; i < dim; ++i)
      if ((y >> i) & 1) l += e[std::size_t(1) << i] % 2;
    int r = ((e[y] - l) % 4 + 4) % 4;
    if (r % 2) return out;
    f[y] = r / 2;
  }
  // Moebius transform to the algebraic normal form
  for (int i = 0; i < dim; ++i)
    for (std::size_t y = 0; y < cnt; ++y)
      if ((y >> i) & 1) f[y] ^= f[y ^ (std::size_t(1) << i)];
  out.sign_degree = 0;
  for (std::size_t y = 0; y < cnt; ++y)
    if (f[y]) out.sign_degree = std::max(out.sign_degree, std::popcount(y));
  out.candidate = out.sign_degree <= 2;
  return out;
}

struct XsReport {
  std::array<bool, 3> fixed{};
  std::array<double, 3> residuals{};
  std::array<int, 3> orders{};
  int joint_plus_one_dim = 0;
  double joint_overlap = 0.0; // overlap of psi with the joint +1 space when it is one-dimensional
  double max_commutator_on_state = 0.0;
  bool commute_globally = false;
  bool pauli_candidate = false;
  int sign_degree = -1;
  double tol = 1e-10;
};

inline XsReport verify_xs(double tol = 1e-10)
{
  XsReport r;
  r.tol = tol;
  const ComplexVector psi = xs_state().amplitudes();
  const auto ops = xs_operators();
  ComplexMatrix joint;
  for (int i = 0; i < 3; ++i) {
    const auto &o = ops[std::size_t(i)];
    r.residuals[std::size_t(i)] = (o * psi - psi).norm() / psi.norm();
    r.fixed[std::size_t(i)] = r.residuals[std::size_t(i)] < tol;
    r.orders[std::size_t(i)] = operator_order(o);
    ComplexMatrix e = plus_one_eigenspace(o, 1e-9);
    joint = i == 0 ? e : intersect_subspaces(joint, e);
  }
  r.joint_plus_one_dim = int(joint.cols());
  if (r.joint_plus_one_dim == 1) r.joint_overlap = overlap(ComplexVector(joint.col(0)), psi);
  r.commute_globally = true;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      ComplexMatrix c = ops[std::size_t(i)] * ops[std::size_t(j)] - ops[std::size_t(j)] * ops[std::size_t(i)];
      r.max_commutator_on_state = std::max(r.max_commutator_on_state, (c * psi).norm() / psi.norm());
      if (max_abs(c) > 1e-12) r.commute_globally = false;
    }
  auto form = pauli_stabilizer_form(xs_state());
  r.pauli_candidate = form.candidate;
  r.sign_degree = form.sign_degree;
  return r;
}

} // namespace stabkit

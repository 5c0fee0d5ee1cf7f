#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace stabkit {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kExactTol = 1e-9;
inline constexpr double kResidualTol = 1e-8;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPi = 3.14159265358979323846;

// Amplitudes over the computational basis; qubit 0 is the most significant bit.
class StateVector {
public:
  StateVector() = default;
  StateVector(int n_qubits, ComplexVector amplitudes)
      : n_(n_qubits), amps_(std::move(amplitudes))
  {
    if (n_qubits < 0 || n_qubits > 30)
      throw std::invalid_argument("StateVector: n_qubits out of range");
    if (amps_.size() != (Eigen::Index(1) << n_qubits))
      throw std::invalid_argument("StateVector: amplitude count is not 2^n_qubits");
  }

  static StateVector zero(int n) { return {n, ComplexVector::Zero(Eigen::Index(1) << n)}; }

  static StateVector basis(int n, std::uint64_t index)
  {
    auto v = zero(n);
    if (index >= std::uint64_t(v.dim())) throw std::invalid_argument("StateVector: basis index out of range");
    v.amps_(Eigen::Index(index)) = 1.0;
    return v;
  }

  int n_qubits() const { return n_; }
  Eigen::Index dim() const { return amps_.size(); }
  const ComplexVector &amplitudes() const { return amps_; }
  ComplexVector &amplitudes() { return amps_; }
  cplx operator[](Eigen::Index i) const { return amps_(i); }
  cplx &operator[](Eigen::Index i) { return amps_(i); }

  double norm() const { return amps_.norm(); }
  bool is_normalized(double tol = kExactTol) const { return std::abs(norm() - 1.0) < tol; }

  StateVector normalized() const
  {
    double nv = norm();
    if (nv == 0.0) throw std::invalid_argument("StateVector: cannot normalize the zero vector");
    return {n_, amps_ / nv};
  }

private:
  int n_ = 0;
  ComplexVector amps_ = ComplexVector::Ones(1);
};

inline int log2_exact(Eigen::Index dim)
{
  int n = 0;
  while ((Eigen::Index(1) << n) < dim) ++n;
  if ((Eigen::Index(1) << n) != dim) throw std::invalid_argument("dimension is not a power of two");
  return n;
}

inline StateVector as_state(const ComplexVector &v) { return {log2_exact(v.size()), v}; }

// ---------------------------------------------------------------- basics

inline ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

inline ComplexMatrix pauli_x()
{
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline ComplexMatrix pauli_y()
{
  ComplexMatrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

inline ComplexMatrix pauli_z()
{
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline ComplexMatrix tensor_product(const ComplexMatrix &a, const ComplexMatrix &b)
{
  ComplexMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

inline ComplexMatrix tensor_product(const std::vector<ComplexMatrix> &factors)
{
  ComplexMatrix r = ComplexMatrix::Ones(1, 1);
  for (const auto &f : factors) r = tensor_product(r, f);
  return r;
}

inline StateVector tensor_product(const StateVector &a, const StateVector &b)
{
  return {a.n_qubits() + b.n_qubits(), tensor_product(ComplexMatrix(a.amplitudes()), ComplexMatrix(b.amplitudes()))};
}

// Single-site operator embedded at `site` of an n-site register of local dimension op.rows().
inline ComplexMatrix embed(const ComplexMatrix &op, int site, int n_sites)
{
  if (site < 0 || site >= n_sites) throw std::invalid_argument("embed: site out of range");
  std::vector<ComplexMatrix> f(std::size_t(n_sites), identity(op.rows()));
  f[std::size_t(site)] = op;
  return tensor_product(f);
}

inline double max_abs(const ComplexMatrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline bool is_square(const ComplexMatrix &m) { return m.rows() == m.cols(); }

inline bool is_hermitian(const ComplexMatrix &m, double tol = kHermitianTol)
{
  return is_square(m) && max_abs(m - m.adjoint()) < tol;
}

inline bool is_unitary(const ComplexMatrix &m, double tol = kExactTol)
{
  return is_square(m) && max_abs(m.adjoint() * m - identity(m.cols())) < tol;
}

inline bool is_involution(const ComplexMatrix &m, double tol = 1e-10)
{
  return is_square(m) && max_abs(m * m - identity(m.cols())) < tol;
}

// |<a|b>| / (|a| |b|)
inline double overlap(const ComplexVector &a, const ComplexVector &b)
{
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(a.dot(b)) / (na * nb);
}

inline double overlap(const StateVector &a, const StateVector &b) { return overlap(a.amplitudes(), b.amplitudes()); }

// ---------------------------------------------------------------- spectra

struct EigenDecomposition {
  std::vector<cplx> values;
  ComplexMatrix vectors; // column i belongs to values[i], unit norm
  bool hermitian = false;
};

inline EigenDecomposition eigen_decompose(const ComplexMatrix &m)
{
  if (!is_square(m)) throw std::invalid_argument("eigen_decompose: matrix is not square");
  EigenDecomposition out;
  if (m.rows() == 0) return out;
  if (is_hermitian(m)) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigen_decompose: Hermitian solver did not converge");
    out.hermitian = true;
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.values.emplace_back(es.eigenvalues()(i), 0.0);
    out.vectors = es.eigenvectors();
  } else {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m, true);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigen_decompose: complex solver did not converge");
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.values.push_back(es.eigenvalues()(i));
    out.vectors = es.eigenvectors();
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
      double nv = out.vectors.col(i).norm();
      if (nv > 0) out.vectors.col(i) /= nv;
    }
  }
  return out;
}

// Singular values padded with zeros up to cols, descending.
inline Eigen::VectorXd padded_singular_values(const ComplexMatrix &m)
{
  Eigen::VectorXd s = Eigen::VectorXd::Zero(m.cols());
  if (m.size() == 0) return s;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  s.head(svd.singularValues().size()) = svd.singularValues();
  return s;
}

inline int numerical_rank(const ComplexMatrix &m, double tol = kExactTol)
{
  auto s = padded_singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) >= tol * s(0)) ++r;
  return r;
}

// Orthonormal kernel basis as columns; singular values below tol * sigma_max count as zero.
inline ComplexMatrix null_space(const ComplexMatrix &m, double tol = kExactTol)
{
  if (!(tol > 0)) throw std::invalid_argument("null_space: tol must be positive");
  const Eigen::Index n = m.cols();
  if (n == 0) return ComplexMatrix(0, 0);
  if (m.rows() == 0 || max_abs(m) == 0.0) return identity(n);
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  const auto &sv = svd.singularValues();
  const double cut = tol * sv(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) >= cut) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

// Orthonormal basis of the column span of m.
inline ComplexMatrix orthonormal_span(const ComplexMatrix &m, double tol = 1e-9)
{
  if (m.cols() == 0 || max_abs(m) == 0.0) return ComplexMatrix(m.rows(), 0);
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU);
  const auto &sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) >= tol * sv(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

// Orthonormal basis of span(a) ∩ span(b); inputs must have orthonormal columns.
inline ComplexMatrix intersect_subspaces(const ComplexMatrix &a, const ComplexMatrix &b, double tol = 1e-8)
{
  if (a.cols() == 0 || b.cols() == 0) return ComplexMatrix(a.rows(), 0);
  // v = a x lies in span(b) iff (I - b b^H) a x = 0
  ComplexMatrix resid = a - b * (b.adjoint() * a);
  Eigen::JacobiSVD<ComplexMatrix> svd(resid, Eigen::ComputeFullV);
  const auto &sv = svd.singularValues();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    double s = i < sv.size() ? sv(i) : 0.0;
    if (s < tol) keep.push_back(i);
  }
  ComplexMatrix x(a.cols(), Eigen::Index(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) x.col(Eigen::Index(k)) = svd.matrixV().col(keep[k]);
  return orthonormal_span(a * x);
}

// Orthonormal basis of the eigenvalue-1 eigenspace of a diagonalizable operator.
inline ComplexMatrix plus_one_eigenspace(const ComplexMatrix &op, double tol = kExactTol)
{
  auto ed = eigen_decompose(op);
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < ed.values.size(); ++i)
    if (std::abs(ed.values[i] - 1.0) < tol) idx.push_back(Eigen::Index(i));
  ComplexMatrix vecs(op.rows(), Eigen::Index(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) vecs.col(Eigen::Index(k)) = ed.vectors.col(idx[k]);
  ComplexMatrix basis = orthonormal_span(vecs, 1e-6);
  if (basis.cols() < vecs.cols()) basis = null_space(op - identity(op.rows()), 1e-7);
  return basis;
}

// ---------------------------------------------------------------- bipartite structure

namespace detail {

inline std::vector<int> checked_subset(const std::vector<int> &subset, int n, const char *who)
{
  std::vector<int> s = subset;
  std::vector<bool> seen(std::size_t(std::max(n, 0)), false);
  for (int q : s) {
    if (q < 0 || q >= n) throw std::invalid_argument(std::string(who) + ": qubit index out of range");
    if (seen[std::size_t(q)]) throw std::invalid_argument(std::string(who) + ": repeated qubit index");
    seen[std::size_t(q)] = true;
  }
  return s;
}

// Amplitudes reshaped to a (2^|keep|) x (2^rest) matrix; row bits follow the order of `keep`.
inline ComplexMatrix split_amplitudes(const StateVector &v, const std::vector<int> &keep)
{
  const int n = v.n_qubits();
  std::vector<int> rest;
  for (int q = 0; q < n; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) rest.push_back(q);
  const int nk = int(keep.size());
  const int nr = int(rest.size());
  ComplexMatrix a = ComplexMatrix::Zero(Eigen::Index(1) << nk, Eigen::Index(1) << nr);
  for (Eigen::Index idx = 0; idx < v.dim(); ++idx) {
    Eigen::Index r = 0, c = 0;
    for (int k = 0; k < nk; ++k) r = (r << 1) | ((idx >> (n - 1 - keep[std::size_t(k)])) & 1);
    for (int k = 0; k < nr; ++k) c = (c << 1) | ((idx >> (n - 1 - rest[std::size_t(k)])) & 1);
    a(r, c) = v[idx];
  }
  return a;
}

inline void require_normalized(const StateVector &v, const char *who)
{
  if (!v.is_normalized()) throw std::invalid_argument(std::string(who) + ": state is not normalized");
}

} // namespace detail

inline ComplexMatrix reduced_density(const StateVector &v, const std::vector<int> &keep)
{
  if (keep.empty()) throw std::invalid_argument("reduced_density: empty subset");
  auto k = detail::checked_subset(keep, v.n_qubits(), "reduced_density");
  detail::require_normalized(v, "reduced_density");
  ComplexMatrix a = detail::split_amplitudes(v, k);
  return a * a.adjoint();
}

inline std::vector<double> schmidt_coefficients(const StateVector &v, const std::vector<int> &part)
{
  auto k = detail::checked_subset(part, v.n_qubits(), "schmidt_coefficients");
  if (k.empty() || int(k.size()) == v.n_qubits())
    throw std::invalid_argument("schmidt_coefficients: trivial bipartition");
  detail::require_normalized(v, "schmidt_coefficients");
  Eigen::JacobiSVD<ComplexMatrix> svd(detail::split_amplitudes(v, k));
  const auto &s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

inline int schmidt_rank(const std::vector<double> &coeffs, double tol = kResidualTol)
{
  return int(std::count_if(coeffs.begin(), coeffs.end(), [&](double c) { return c > tol; }));
}

// ---------------------------------------------------------------- randomness

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per sample index so parallel and serial runs agree.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) { return splitmix64(base ^ splitmix64(index)); }

using Rng = std::mt19937_64;

inline double uniform(Rng &rng, double lo = 0.0, double hi = 1.0)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline cplx complex_gaussian(Rng &rng)
{
  std::normal_distribution<double> g(0.0, 1.0);
  double re = g(rng);
  double im = g(rng);
  return {re, im};
}

// Haar-random unitary via QR of a complex Ginibre matrix with the R-diagonal phase fixed.
inline ComplexMatrix random_unitary(Eigen::Index dim, Rng &rng)
{
  ComplexMatrix z(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) z(i, j) = complex_gaussian(rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    cplx d = r(i, i);
    q.col(i) *= (std::abs(d) > 0 ? d / std::abs(d) : cplx(1.0));
  }
  return q;
}

inline StateVector random_state(int n, Rng &rng)
{
  ComplexVector v(Eigen::Index(1) << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = complex_gaussian(rng);
  return StateVector(n, v).normalized();
}

} // namespace stabkit

#pragma once

#include "linalg.hpp"

#include <numeric>

namespace stabkit {

inline Eigen::Index int_pow(int base, int exp)
{
  Eigen::Index r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// ---------------------------------------------------------------- permutations

// sigma[k] is the 0-based image of site k; P_sigma |i_1 ... i_N> = |i_sigma(1) ... i_sigma(N)>.
using Permutation = std::vector<int>;

inline Permutation identity_permutation(int n)
{
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline bool is_permutation(const Permutation &p)
{
  std::vector<bool> seen(p.size(), false);
  for (int v : p) {
    if (v < 0 || v >= int(p.size()) || seen[std::size_t(v)]) return false;
    seen[std::size_t(v)] = true;
  }
  return true;
}

inline ComplexMatrix permutation_matrix(const Permutation &sigma, int d)
{
  if (!is_permutation(sigma)) throw std::invalid_argument("permutation_matrix: not a permutation");
  const int n = int(sigma.size());
  const Eigen::Index dim = int_pow(d, n);
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  std::vector<int> digits(static_cast<std::size_t>(n));
  for (Eigen::Index col = 0; col < dim; ++col) {
    Eigen::Index c = col;
    for (int k = n - 1; k >= 0; --k) {
      digits[std::size_t(k)] = int(c % d);
      c /= d;
    }
    Eigen::Index row = 0;
    for (int k = 0; k < n; ++k) row = row * d + digits[std::size_t(sigma[std::size_t(k)])];
    p(row, col) = 1.0;
  }
  return p;
}

// One-line cycle notation with 1-based labels, fixed points omitted; identity is "()".
inline std::string cycle_notation(const Permutation &sigma)
{
  std::string out;
  std::vector<bool> seen(sigma.size(), false);
  for (std::size_t s = 0; s < sigma.size(); ++s) {
    if (seen[s] || sigma[s] == int(s)) {
      seen[s] = true;
      continue;
    }
    out += "(";
    std::size_t k = s;
    bool first = true;
    while (!seen[k]) {
      seen[k] = true;
      out += (first ? "" : " ") + std::to_string(k + 1);
      first = false;
      k = std::size_t(sigma[k]);
    }
    out += ")";
  }
  return out.empty() ? "()" : out;
}

// ---------------------------------------------------------------- witness and product tests

inline ComplexMatrix distinct_spectrum_witness(int d, int n)
{
  if (d < 2 || n < 1) throw std::invalid_argument("distinct_spectrum_witness: need d >= 2, N >= 1");
  if (double(n) * std::log(double(d)) > std::log(1024.0) + 1e-12)
    throw std::invalid_argument("distinct_spectrum_witness: d^N exceeds 1024");
  std::vector<ComplexMatrix> f;
  for (int k = 1; k <= n; ++k) {
    ComplexMatrix dk = ComplexMatrix::Zero(d, d);
    for (int l = 0; l < d; ++l) dk(l, l) = std::polar(1.0, double(l) * kPi / double(int_pow(d, k)));
    f.push_back(dk);
  }
  return tensor_product(f);
}

// Realignment at cut k: rows (i_A, j_A), cols (i_B, j_B). Rank one iff the operator factorizes there.
inline ComplexMatrix realign(const ComplexMatrix &w, Eigen::Index dim_a, Eigen::Index dim_b)
{
  ComplexMatrix r(dim_a * dim_a, dim_b * dim_b);
  for (Eigen::Index ia = 0; ia < dim_a; ++ia)
    for (Eigen::Index ja = 0; ja < dim_a; ++ja)
      for (Eigen::Index ib = 0; ib < dim_b; ++ib)
        for (Eigen::Index jb = 0; jb < dim_b; ++jb)
          r(ia * dim_a + ja, ib * dim_b + jb) = w(ia * dim_b + ib, ja * dim_b + jb);
  return r;
}

inline bool is_tensor_product_operator(const ComplexMatrix &w, int d, int n, double tol = kResidualTol)
{
  for (int k = 1; k < n; ++k) {
    auto s = padded_singular_values(realign(w, int_pow(d, k), int_pow(d, n - k)));
    if (s.size() > 1 && s(1) > tol * s(0)) return false;
  }
  return true;
}

// Singular values of the (site k) x (rest) reshaping of a d^n vector.
inline Eigen::VectorXd site_schmidt_values(const ComplexVector &v, int d, int n, int site)
{
  const Eigen::Index rest = int_pow(d, n - 1);
  const Eigen::Index stride = int_pow(d, n - 1 - site);
  ComplexMatrix a(d, rest);
  for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
    Eigen::Index digit = (idx / stride) % d;
    Eigen::Index high = idx / (stride * d), low = idx % stride;
    a(digit, high * stride + low) = v(idx);
  }
  return padded_singular_values(a.transpose()).head(std::min<Eigen::Index>(d, rest));
}

inline void require_unitary_dim(const ComplexMatrix &u, int d, int n, const char *who)
{
  if (d < 2 || n < 1) throw std::invalid_argument(std::string(who) + ": need d >= 2, N >= 1");
  if (u.rows() != int_pow(d, n) || u.cols() != int_pow(d, n))
    throw std::invalid_argument(std::string(who) + ": matrix dimension is not d^N");
  if (!is_unitary(u, kExactTol)) throw std::invalid_argument(std::string(who) + ": matrix is not unitary");
}

inline bool is_product_preserving(const ComplexMatrix &u, int d, int n, double tol = kResidualTol,
                                  std::uint64_t seed = 0x5eed, int n_states = 100)
{
  require_unitary_dim(u, d, n, "is_product_preserving");
  if (n == 1) return true;
  const ComplexMatrix o = distinct_spectrum_witness(d, n);
  if (!is_tensor_product_operator(u * o * u.adjoint(), d, n, tol)) return false;
  Rng rng(seed);
  for (int s = 0; s < n_states; ++s) {
    ComplexMatrix psi = ComplexMatrix::Ones(1, 1);
    for (int k = 0; k < n; ++k) {
      ComplexMatrix f(d, 1);
      for (int l = 0; l < d; ++l) f(l, 0) = complex_gaussian(rng);
      psi = tensor_product(psi, f / f.norm());
    }
    ComplexVector out = u * psi.col(0);
    for (int k = 0; k < n; ++k) {
      auto sv = site_schmidt_values(out, d, n, k);
      if (sv.size() > 1 && sv(1) > tol) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- densification

inline ComplexMatrix lemma_matrix(double t, int d)
{
  if (d < 2) throw std::invalid_argument("lemma_matrix: need d >= 2");
  double diag = 0;
  for (int s = 0; s < d; ++s) diag += std::pow(t, 2 * s);
  ComplexMatrix m(d, d);
  for (int k = 1; k <= d; ++k)
    for (int l = 1; l <= d; ++l) m(k - 1, l - 1) = -2.0 * std::pow(t, k + l - 2) + (k == l ? cplx(diag, 1.0) : cplx(0));
  return m;
}

inline double lemma_column_norm_sq(double t, int d)
{
  double s = 0;
  for (int k = 0; k < d; ++k) s += std::pow(t, 2 * k);
  return 1.0 + s * s;
}

inline ComplexMatrix lemma_unitary(double t, int d) { return lemma_matrix(t, d) / std::sqrt(lemma_column_norm_sq(t, d)); }

struct DensifyResult {
  std::vector<ComplexMatrix> u, v;
  std::vector<double> t; // t_k; the right factor uses t_k^(2d)
  ComplexMatrix V;
  double min_entry = 0.0;
};

inline std::vector<double> densify_grid(std::uint64_t seed, int site)
{
  std::vector<double> g;
  for (int i = 0; i < 8; ++i) g.push_back(0.5 + 0.2 * i);
  Rng rng(derive_seed(seed, std::uint64_t(site)));
  for (int i = 0; i < 20; ++i) g.push_back(uniform(rng, 0.3, 2.0));
  return g;
}

inline double min_block_norm(const ComplexMatrix &m, Eigen::Index block)
{
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m.rows(); i += block)
    for (Eigen::Index j = 0; j < m.cols(); j += block) best = std::min(best, m.block(i, j, block, block).norm());
  return best;
}

inline DensifyResult densify(const ComplexMatrix &u, int d, int n, std::uint64_t seed = 0xd3e5, double exhaustion = 1e-12)
{
  if (d < 2 || n < 1) throw std::invalid_argument("densify: need d >= 2, n >= 1");
  if (u.rows() != int_pow(d, n) || u.cols() != u.rows()) throw std::invalid_argument("densify: matrix dimension is not d^n");
  if (numerical_rank(u, 1e-12) < u.cols()) throw std::invalid_argument("densify: matrix is not invertible");
  DensifyResult r;
  ComplexMatrix cur = u;
  for (int k = 0; k < n; ++k) {
    const Eigen::Index left = int_pow(d, k), right = int_pow(d, n - k - 1);
    double best_score = -1, best_t = 0;
    ComplexMatrix best;
    for (double t : densify_grid(seed, k)) {
      ComplexMatrix l = tensor_product({identity(left), lemma_unitary(t, d), identity(right)});
      ComplexMatrix rr = tensor_product({identity(left), lemma_unitary(std::pow(t, 2 * d), d), identity(right)});
      ComplexMatrix cand = l * cur * rr;
      double score = min_block_norm(cand, right);
      if (score > best_score) {
        best_score = score;
        best_t = t;
        best = std::move(cand);
      }
    }
    if (best_score < exhaustion) throw std::runtime_error("densify: parameter search exhausted at site " + std::to_string(k));
    cur = std::move(best);
    r.t.push_back(best_t);
    r.u.push_back(lemma_unitary(best_t, d));
    r.v.push_back(lemma_unitary(std::pow(best_t, 2 * d), d));
  }
  r.V = cur;
  r.min_entry = cur.cwiseAbs().minCoeff();
  return r;
}

// ---------------------------------------------------------------- factorization

struct TrivialGateDecomposition {
  std::vector<ComplexMatrix> locals;
  Permutation permutation;
  cplx phase{1.0, 0.0};
  double residual = 0.0;

  ComplexMatrix reconstruct(int d) const { return phase * tensor_product(locals) * permutation_matrix(permutation, d); }
  std::string permutation_cycles() const { return cycle_notation(permutation); }
};

namespace detail {

// m ~ c (x) rest: c from ratios against the largest block at its largest entry.
inline std::pair<ComplexMatrix, ComplexMatrix> split_first_factor(const ComplexMatrix &m, int d)
{
  const Eigen::Index b = m.rows() / d;
  Eigen::Index ri = 0, rj = 0;
  double best = -1;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      double nb = m.block(i * b, j * b, b, b).norm();
      if (nb > best) {
        best = nb;
        ri = i;
        rj = j;
      }
    }
  ComplexMatrix ref = m.block(ri * b, rj * b, b, b);
  Eigen::Index er = 0, ec = 0;
  ref.cwiseAbs().maxCoeff(&er, &ec);
  ComplexMatrix c(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) c(i, j) = m(i * b + er, j * b + ec) / ref(er, ec);
  return {c, ref};
}

inline ComplexMatrix det_normalized(const ComplexMatrix &a, int d)
{
  cplx det = a.determinant();
  if (std::abs(det) < 1e-300) return a;
  return a / std::pow(det, 1.0 / double(d));
}

// Best local factorization x ~ phase (u_1 x ... x u_n) via densification and block ratios.
inline TrivialGateDecomposition factor_local(const ComplexMatrix &x, int d, int n)
{
  TrivialGateDecomposition dec;
  auto dr = densify(x, d, n);
  ComplexMatrix rest = dr.V;
  std::vector<ComplexMatrix> parts;
  for (int k = 0; k + 1 < n; ++k) {
    auto [c, r] = split_first_factor(rest, d);
    parts.push_back(c);
    rest = r;
  }
  parts.push_back(rest);
  for (int k = 0; k < n; ++k) {
    // a u b = A  =>  u = a^H A b^H
    ComplexMatrix uk = dr.u[std::size_t(k)].adjoint() * parts[std::size_t(k)] * dr.v[std::size_t(k)].adjoint();
    dec.locals.push_back(det_normalized(uk, d));
  }
  ComplexMatrix g = tensor_product(dec.locals);
  cplx ph = g.conjugate().cwiseProduct(x).sum() / double(x.rows());
  dec.phase = std::abs(ph) > 0 ? ph / std::abs(ph) : cplx(1.0);
  dec.residual = max_abs(x - dec.phase * g);
  return dec;
}

inline TrivialGateDecomposition factor_with(const ComplexMatrix &u, int d, int n, const Permutation &sigma)
{
  ComplexMatrix p = permutation_matrix(sigma, d);
  auto dec = factor_local(u * p.adjoint(), d, n);
  dec.permutation = sigma;
  return dec;
}

} // namespace detail

inline TrivialGateDecomposition factor_nonentangling(const ComplexMatrix &u, int d, int n, double tol = kResidualTol)
{
  require_unitary_dim(u, d, n, "factor_nonentangling");
  TrivialGateDecomposition best;
  best.residual = std::numeric_limits<double>::infinity();
  if (n <= 3) {
    Permutation sigma = identity_permutation(n);
    do {
      auto dec = detail::factor_with(u, d, n, sigma);
      if (dec.residual < best.residual) best = dec;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
  } else {
    // greedy transposition repair, capped at n^2 accepted swaps
    best = detail::factor_with(u, d, n, identity_permutation(n));
    for (int step = 0; step < n * n && best.residual >= tol; ++step) {
      TrivialGateDecomposition cand_best = best;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          Permutation s = best.permutation;
          std::swap(s[std::size_t(i)], s[std::size_t(j)]);
          auto dec = detail::factor_with(u, d, n, s);
          if (dec.residual < cand_best.residual) cand_best = dec;
        }
      if (cand_best.residual >= best.residual) break;
      best = cand_best;
    }
  }
  if (!(best.residual < tol))
    throw std::runtime_error("factor_nonentangling: residual " + std::to_string(best.residual) + " above tolerance");
  return best;
}

} // namespace stabkit

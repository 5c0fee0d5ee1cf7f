#pragma once

#include "binaryops.hpp"
#include "linalg.hpp"
#include "parallel.hpp"

#include <Eigen/Geometry>

#include <bit>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace stabkit {

enum class SlotKind { ZAnchor, Identity, FreeAxis };

struct PatternSlot {
  SlotKind kind = SlotKind::Identity;
  std::optional<BinaryAxis> axis; // FreeAxis only; empty means symbolic
  int sign = 1;                   // contributes to the sign of the whole row

  static PatternSlot z(int sign = 1) { return {SlotKind::ZAnchor, std::nullopt, sign}; }
  static PatternSlot identity() { return {SlotKind::Identity, std::nullopt, 1}; }
  static PatternSlot free(double theta, double phi = 0.0, int sign = 1) { return {SlotKind::FreeAxis, BinaryAxis{theta, phi}, sign}; }
  static PatternSlot symbolic() { return {SlotKind::FreeAxis, std::nullopt, 1}; }

  bool is_identity() const { return kind == SlotKind::Identity; }
  bool is_symbolic() const { return kind == SlotKind::FreeAxis && !axis; }

  char code() const { return kind == SlotKind::ZAnchor ? 'Z' : kind == SlotKind::Identity ? 'I' : 'A'; }

  ComplexMatrix matrix() const
  {
    switch (kind) {
    case SlotKind::ZAnchor: return pauli_z();
    case SlotKind::Identity: return stabkit::identity(2);
    case SlotKind::FreeAxis:
      if (!axis) throw std::invalid_argument("pattern slot: free axis has no angles");
      return binary_axis_matrix(*axis);
    }
    return stabkit::identity(2);
  }

  Eigen::Vector3d bloch() const
  {
    if (kind == SlotKind::ZAnchor) return Eigen::Vector3d::UnitZ();
    if (kind == SlotKind::FreeAxis && axis) return axis->bloch();
    throw std::invalid_argument("pattern slot: no Bloch vector");
  }
};

struct StabilizationPattern {
  int n_qubits = 0;
  std::vector<std::vector<PatternSlot>> operators;

  void validate() const
  {
    if (n_qubits < 1) throw std::invalid_argument("pattern: n_qubits must be positive");
    for (const auto &row : operators) {
      if (int(row.size()) != n_qubits) throw std::invalid_argument("pattern: row length differs from n_qubits");
      if (std::all_of(row.begin(), row.end(), [](const PatternSlot &s) { return s.is_identity(); }))
        throw std::invalid_argument("pattern: row without a non-identity slot");
      for (const auto &s : row)
        if (s.sign != 1 && s.sign != -1) throw std::invalid_argument("pattern: sign must be +1 or -1");
    }
  }

  bool symbolic() const
  {
    for (const auto &row : operators)
      for (const auto &s : row)
        if (s.is_symbolic()) return true;
    return false;
  }

  int row_sign(std::size_t r) const
  {
    int s = 1;
    for (const auto &slot : operators.at(r)) s *= slot.sign;
    return s;
  }

  bool has_identity_column() const
  {
    for (int c = 0; c < n_qubits; ++c) {
      bool all_id = true;
      for (const auto &row : operators) all_id = all_id && row[std::size_t(c)].is_identity();
      if (all_id) return true;
    }
    return false;
  }

  // Slot kinds, e.g. "ZZZ/AAI".
  std::string structure() const
  {
    std::string s;
    for (std::size_t r = 0; r < operators.size(); ++r) {
      if (r) s += "/";
      if (row_sign(r) < 0) s += "-";
      for (const auto &slot : operators[r]) s += slot.code();
    }
    return s;
  }

  std::string describe() const
  {
    std::ostringstream os;
    os.precision(6);
    for (std::size_t r = 0; r < operators.size(); ++r) {
      if (r) os << " ; ";
      if (row_sign(r) < 0) os << "-";
      for (std::size_t c = 0; c < operators[r].size(); ++c) {
        const auto &s = operators[r][c];
        if (c) os << " ";
        if (s.kind == SlotKind::FreeAxis && s.axis) os << "A(" << s.axis->theta << "," << s.axis->phi << ")";
        else os << s.code();
      }
    }
    return os.str();
  }
};

inline std::vector<ComplexMatrix> instantiate(const StabilizationPattern &p)
{
  p.validate();
  std::vector<ComplexMatrix> ops;
  for (std::size_t r = 0; r < p.operators.size(); ++r) {
    std::vector<ComplexMatrix> f;
    for (const auto &s : p.operators[r]) f.push_back(s.matrix());
    ops.push_back(double(p.row_sign(r)) * tensor_product(f));
  }
  return ops;
}

// Basis-state combination such as "000+011-101"; unnormalized.
inline StateVector ket_combination(const std::string &text)
{
  std::vector<std::pair<int, std::string>> terms;
  int sign = 1;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) terms.emplace_back(sign, cur);
    cur.clear();
  };
  for (char ch : text) {
    if (ch == '+' || ch == '-') {
      flush();
      sign = ch == '-' ? -1 : 1;
    } else if (ch == '0' || ch == '1') {
      cur += ch;
    } else if (ch != '|' && ch != '>' && ch != ' ') {
      throw std::invalid_argument("ket_combination: unexpected character");
    }
  }
  flush();
  if (terms.empty()) throw std::invalid_argument("ket_combination: no terms");
  const int n = int(terms.front().second.size());
  auto v = StateVector::zero(n);
  for (const auto &[s, bits] : terms) {
    if (int(bits.size()) != n) throw std::invalid_argument("ket_combination: inconsistent lengths");
    v[Eigen::Index(std::stoull(bits, nullptr, 2))] += double(s);
  }
  return v;
}

// ---------------------------------------------------------------- LU classes

enum class LuClass { Product, BellProduct, Ghz, Other };

inline std::string to_string(LuClass c)
{
  switch (c) {
  case LuClass::Product: return "product";
  case LuClass::BellProduct: return "bell-product";
  case LuClass::Ghz: return "ghz";
  case LuClass::Other: return "other";
  }
  return "other";
}

// Cayley hyperdeterminant form 4|d1 - 2 d2 + 4 d3|.
inline double three_tangle(const StateVector &v)
{
  if (v.n_qubits() != 3) throw std::invalid_argument("three_tangle: need 3 qubits");
  auto a = [&](int k) { return v[k]; };
  cplx d1 = a(0) * a(0) * a(7) * a(7) + a(1) * a(1) * a(6) * a(6) + a(2) * a(2) * a(5) * a(5) + a(4) * a(4) * a(3) * a(3);
  cplx d2 = a(0) * a(7) * a(3) * a(4) + a(0) * a(7) * a(5) * a(2) + a(0) * a(7) * a(6) * a(1) + a(3) * a(4) * a(5) * a(2) +
            a(3) * a(4) * a(6) * a(1) + a(5) * a(2) * a(6) * a(1);
  cplx d3 = a(0) * a(6) * a(5) * a(3) + a(7) * a(1) * a(2) * a(4);
  return 4.0 * std::abs(d1 - 2.0 * d2 + 4.0 * d3);
}

inline LuClass classify_lu_class(const StateVector &v, double tol = 1e-7)
{
  const int n = v.n_qubits();
  if (n < 1 || n > 3) throw std::invalid_argument("classify_lu_class: need 1 <= n_qubits <= 3");
  if (!v.is_normalized()) throw std::invalid_argument("classify_lu_class: state is not normalized");
  if (n == 1) return LuClass::Product;
  std::vector<double> lam_min;
  for (int q = 0; q < n; ++q) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(reduced_density(v, {q}));
    lam_min.push_back(std::max(0.0, es.eigenvalues()(0)));
  }
  const int rank2 = int(std::count_if(lam_min.begin(), lam_min.end(), [&](double l) { return l > tol; }));
  if (rank2 == 0) return LuClass::Product;
  if (rank2 == 2) {
    bool maximal = std::all_of(lam_min.begin(), lam_min.end(), [&](double l) { return l <= tol || std::abs(l - 0.5) < tol; });
    if (maximal) return LuClass::BellProduct;
    return LuClass::Other;
  }
  if (n == 3 && rank2 == 3 && std::abs(three_tangle(v) - 1.0) < tol) return LuClass::Ghz;
  return LuClass::Other;
}

// ---------------------------------------------------------------- projector and determinant methods

inline void require_involutions(const std::vector<ComplexMatrix> &ops, const char *who)
{
  if (ops.empty()) throw std::invalid_argument(std::string(who) + ": no operators");
  for (const auto &o : ops) {
    if (o.rows() != ops.front().rows() || !is_square(o)) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    if (!is_involution(o)) throw std::invalid_argument(std::string(who) + ": operator is not an involution");
  }
}

inline ComplexMatrix projector_product(const std::vector<ComplexMatrix> &ops)
{
  ComplexMatrix m = identity(ops.front().rows());
  for (const auto &o : ops) m = m * (0.5 * (identity(o.rows()) + o));
  return m;
}

// Multiplicity of eigenvalue 1 of P_1 ... P_k.
inline int joint_dimension(const std::vector<ComplexMatrix> &ops, double tol = kResidualTol)
{
  auto ed = eigen_decompose(projector_product(ops));
  return int(std::count_if(ed.values.begin(), ed.values.end(), [&](cplx l) { return std::abs(l - 1.0) < tol; }));
}

struct StabilizationOutcome {
  int subspace_dim = 0;
  ComplexMatrix basis; // orthonormal columns
  bool unique = false;
  bool minimal = false;
  std::optional<LuClass> lu_class; // set when unique and n <= 3
  std::vector<cplx> eigenvalues;
  double spectral_radius = 0.0;
  std::vector<int> proper_subset_dims;
};

inline StabilizationOutcome stabilized_subspace(const std::vector<ComplexMatrix> &ops, double tol = kResidualTol, bool check_minimal = true)
{
  require_involutions(ops, "stabilized_subspace");
  StabilizationOutcome out;
  const ComplexMatrix m = projector_product(ops);
  auto ed = eigen_decompose(m);
  out.eigenvalues = ed.values;
  for (auto l : ed.values) {
    out.spectral_radius = std::max(out.spectral_radius, std::abs(l));
    if (std::abs(l - 1.0) < tol) ++out.subspace_dim;
  }
  // eigenvalue 1 of a product of projectors is semisimple: its eigenspace is ker(M - I)
  if (out.subspace_dim > 0) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m - identity(m.rows()), Eigen::ComputeFullV);
    out.basis = svd.matrixV().rightCols(out.subspace_dim);
  } else {
    out.basis = ComplexMatrix(m.rows(), 0);
  }
  out.unique = out.subspace_dim == 1;
  const int n = log2_exact(m.rows());
  if (out.unique && n <= 3) out.lu_class = classify_lu_class(as_state(out.basis.col(0)).normalized());
  if (out.unique && check_minimal) {
    const std::size_t k = ops.size();
    out.minimal = true;
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t(1) << k); ++mask) {
      std::vector<ComplexMatrix> sub;
      for (std::size_t i = 0; i < k; ++i)
        if ((mask >> i) & 1) sub.push_back(ops[i]);
      int dsub = joint_dimension(sub, tol);
      out.proper_subset_dims.push_back(dsub);
      if (dsub < 2) out.minimal = false;
    }
  }
  return out;
}

// Independent route: intersect each operator's own +1 eigenspace.
inline int eigenspace_intersection_dim(const std::vector<ComplexMatrix> &ops, double tol = kResidualTol)
{
  require_involutions(ops, "eigenspace_intersection_dim");
  ComplexMatrix joint;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    ComplexMatrix e = plus_one_eigenspace(ops[i], 1e-6);
    joint = i == 0 ? e : intersect_subspaces(joint, e, tol);
    if (joint.cols() == 0) return 0;
  }
  return int(joint.cols());
}

struct DeterminantResult {
  ComplexMatrix M;           // km x m system in the eigenbasis of the first operator
  double det_value = 0.0;    // det(M^H M) = prod sigma_i^2
  double det_relative = 0.0; // (sigma_min / sigma_max)^2
  Eigen::VectorXd singular_values;
  ComplexMatrix kernel; // stabilized states in the computational basis, orthonormal columns
};

inline DeterminantResult determinant_method(const std::vector<ComplexMatrix> &ops, double tol = kExactTol)
{
  if (ops.size() < 2) throw std::invalid_argument("determinant_method: need at least two operators");
  require_involutions(ops, "determinant_method");
  const Eigen::Index m = ops.front().rows();
  auto ed = eigen_decompose(ops.front());
  const ComplexMatrix &q = ed.vectors;
  ComplexMatrix q_inv;
  if (ed.hermitian) q_inv = q.adjoint();
  else {
    if (numerical_rank(q, 1e-10) < m) throw std::runtime_error("determinant_method: first operator has no eigenbasis");
    q_inv = q.inverse();
  }
  DeterminantResult r;
  r.M.resize(Eigen::Index(ops.size()) * m, m);
  for (std::size_t j = 0; j < ops.size(); ++j)
    r.M.block(Eigen::Index(j) * m, 0, m, m) = q_inv * ops[j] * q - identity(m);
  r.singular_values = padded_singular_values(r.M);
  r.det_value = 1.0;
  for (Eigen::Index i = 0; i < r.singular_values.size(); ++i) r.det_value *= r.singular_values(i) * r.singular_values(i);
  const double smax = r.singular_values(0);
  const double smin = r.singular_values(r.singular_values.size() - 1);
  r.det_relative = smax > 0 ? (smin / smax) * (smin / smax) : 0.0;
  r.kernel = q * null_space(r.M, tol);
  return r;
}

// ---------------------------------------------------------------- canonical form

namespace detail {

inline double quantize(double a) { return std::round(a * 1e8) / 1e8; }

inline std::vector<std::vector<int>> permutations_of(int n)
{
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

using CanonKey = std::vector<double>;

inline CanonKey structural_key(const std::vector<std::vector<PatternSlot>> &g)
{
  CanonKey key;
  for (const auto &row : g)
    for (const auto &s : row) key.push_back(s.is_identity() ? 1.0 : 0.0);
  return key;
}

// Kinds only: first non-identity entry of each column is the Z-anchor, later ones symbolic axes.
inline std::vector<std::vector<PatternSlot>> structural_form(std::vector<std::vector<PatternSlot>> g)
{
  const std::size_t n = g.empty() ? 0 : g.front().size();
  for (std::size_t c = 0; c < n; ++c) {
    bool seen = false;
    for (auto &row : g) {
      if (row[c].is_identity()) continue;
      row[c] = seen ? PatternSlot::symbolic() : PatternSlot::z();
      seen = true;
    }
  }
  return g;
}

// Row signs placed on slots by flips[r] (bit c flips slot c); the flips of a row must have the parity of its sign.
// Per column: first vector to +Z, next non-collinear one into the XZ-plane with x > 0.
inline std::vector<std::vector<PatternSlot>> rotated_form(const std::vector<std::vector<PatternSlot>> &g,
                                                          const std::vector<std::uint32_t> &flips, CanonKey &key)
{
  const std::size_t k = g.size(), n = g.front().size();
  std::vector<std::vector<Eigen::Vector3d>> vec(k, std::vector<Eigen::Vector3d>(n, Eigen::Vector3d::Zero()));
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      if (g[r][c].is_identity()) continue;
      vec[r][c] = g[r][c].bloch();
      if ((flips[r] >> c) & 1) vec[r][c] = -vec[r][c];
    }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t r1 = k;
    for (std::size_t r = 0; r < k; ++r)
      if (!g[r][c].is_identity()) {
        r1 = r;
        break;
      }
    if (r1 == k) continue;
    Eigen::Matrix3d rot = Eigen::Quaterniond::FromTwoVectors(vec[r1][c], Eigen::Vector3d::UnitZ()).toRotationMatrix();
    for (std::size_t r = 0; r < k; ++r)
      if (!g[r][c].is_identity()) vec[r][c] = rot * vec[r][c];
    for (std::size_t r = r1 + 1; r < k; ++r) {
      if (g[r][c].is_identity()) continue;
      const auto &v = vec[r][c];
      if (std::hypot(v.x(), v.y()) < 1e-9) continue;
      Eigen::Matrix3d rz = Eigen::AngleAxisd(-std::atan2(v.y(), v.x()), Eigen::Vector3d::UnitZ()).toRotationMatrix();
      for (std::size_t rr = 0; rr < k; ++rr)
        if (!g[rr][c].is_identity()) vec[rr][c] = rz * vec[rr][c];
      break;
    }
  }
  key = structural_key(g);
  std::vector<std::vector<PatternSlot>> out(k, std::vector<PatternSlot>(n));
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      if (g[r][c].is_identity()) {
        out[r][c] = PatternSlot::identity();
        continue;
      }
      const auto &v = vec[r][c];
      if ((v - Eigen::Vector3d::UnitZ()).norm() < 1e-9) {
        out[r][c] = PatternSlot::z();
        key.insert(key.end(), {0.0, 0.0, 0.0});
        continue;
      }
      auto ax = BinaryAxis::from_bloch(v, 1e-9);
      double th = quantize(ax.theta), ph = quantize(ax.phi);
      if (ph >= 2 * kPi - 1e-8 || std::abs(std::sin(th)) < 1e-9) ph = 0.0;
      out[r][c] = PatternSlot::free(th, ph);
      key.insert(key.end(), {1.0, th, ph});
    }
  return out;
}

} // namespace detail

inline StabilizationPattern canonicalize(const StabilizationPattern &p)
{
  p.validate();
  if (p.n_qubits > 8) throw std::invalid_argument("canonicalize: too many qubits for exhaustive permutation search");
  const bool sym = p.symbolic();
  const int k = int(p.operators.size());
  StabilizationPattern best{p.n_qubits, {}};
  if (k == 0) return best;
  std::optional<detail::CanonKey> best_key;
  const auto cperms = detail::permutations_of(p.n_qubits);
  for (const auto &rp : detail::permutations_of(k))
    for (const auto &cp : cperms) {
      std::vector<std::vector<PatternSlot>> g(std::size_t(k), std::vector<PatternSlot>(std::size_t(p.n_qubits)));
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < p.n_qubits; ++c) g[std::size_t(r)][std::size_t(c)] = p.operators[std::size_t(rp[std::size_t(r)])][std::size_t(cp[std::size_t(c)])];
      detail::CanonKey key;
      std::vector<std::vector<PatternSlot>> form;
      if (sym) {
        key = detail::structural_key(g);
        form = detail::structural_form(g);
        if (!best_key || key < *best_key) {
          best_key = key;
          best.operators = form;
        }
        continue;
      }
      // every placement of each row's sign on its non-identity slots
      std::vector<std::vector<std::uint32_t>> choices(static_cast<std::size_t>(k));
      for (int r = 0; r < k; ++r) {
        std::uint32_t support = 0;
        int sign = 1;
        for (int c = 0; c < p.n_qubits; ++c) {
          const auto &s = g[std::size_t(r)][std::size_t(c)];
          sign *= s.sign;
          if (!s.is_identity()) support |= std::uint32_t(1) << c;
        }
        const int parity = sign < 0 ? 1 : 0;
        for (std::uint32_t f = support;; f = (f - 1) & support) {
          if (std::popcount(f) % 2 == parity) choices[std::size_t(r)].push_back(f);
          if (f == 0) break;
        }
      }
      std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
      std::vector<std::uint32_t> flips(static_cast<std::size_t>(k));
      while (true) {
        for (std::size_t r = 0; r < std::size_t(k); ++r) flips[r] = choices[r][idx[r]];
        form = detail::rotated_form(g, flips, key);
        if (!best_key || key < *best_key) {
          best_key = key;
          best.operators = form;
        }
        std::size_t r = 0;
        while (r < std::size_t(k) && ++idx[r] == choices[r].size()) idx[r++] = 0;
        if (r == std::size_t(k)) break;
      }
    }
  return best;
}

// Structural classes: k rows of non-empty supports up to row/column permutation.
inline std::vector<StabilizationPattern> enumerate_patterns(int n_qubits, int n_ops, bool discard_trivial = false)
{
  if (n_qubits < 1 || n_qubits > 3 || n_ops < 1 || n_ops > 3)
    throw std::invalid_argument("enumerate_patterns: need 1 <= n_qubits <= 3 and 1 <= n_ops <= 3");
  const int masks = (1 << n_qubits) - 1;
  std::map<std::string, StabilizationPattern> classes;
  std::vector<int> choice(std::size_t(n_ops), 1);
  while (true) {
    StabilizationPattern p{n_qubits, {}};
    for (int m : choice) {
      std::vector<PatternSlot> row;
      for (int c = 0; c < n_qubits; ++c) row.push_back(((m >> (n_qubits - 1 - c)) & 1) ? PatternSlot::symbolic() : PatternSlot::identity());
      p.operators.push_back(row);
    }
    auto canon = canonicalize(p);
    if (!(discard_trivial && canon.has_identity_column())) classes.emplace(canon.structure(), canon);
    // next non-decreasing sequence (multisets of supports)
    int i = n_ops - 1;
    while (i >= 0 && choice[std::size_t(i)] == masks) --i;
    if (i < 0) break;
    ++choice[std::size_t(i)];
    for (int j = i + 1; j < n_ops; ++j) choice[std::size_t(j)] = choice[std::size_t(i)];
  }
  // canonical keys rank non-identity first, so order by that key rather than by the string
  std::vector<StabilizationPattern> out;
  for (auto &[s, p] : classes) out.push_back(p);
  std::sort(out.begin(), out.end(), [](const StabilizationPattern &a, const StabilizationPattern &b) {
    return detail::structural_key(a.operators) < detail::structural_key(b.operators);
  });
  return out;
}

// ---------------------------------------------------------------- local phase alignment

struct PhaseAlignment {
  std::vector<double> local_phases; // diag(1, e^{i a_q}) per qubit
  StateVector aligned;
  double overlap = 0.0;
};

// Fits diagonal local phases so that `state` best matches `target` on the target's support.
inline PhaseAlignment align_local_phases(const StateVector &state, const StateVector &target, double tol = 1e-9)
{
  if (state.n_qubits() != target.n_qubits()) throw std::invalid_argument("align_local_phases: size mismatch");
  const int n = state.n_qubits();
  const double tmax = target.amplitudes().cwiseAbs().maxCoeff();
  const double smax = state.amplitudes().cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> rows;
  for (Eigen::Index k = 0; k < target.dim(); ++k)
    if (std::abs(target[k]) > tol * tmax && std::abs(state[k]) > tol * smax) rows.push_back(k);
  PhaseAlignment out;
  out.local_phases.assign(std::size_t(n), 0.0);
  if (!rows.empty()) {
    Eigen::MatrixXd a(Eigen::Index(rows.size()), n + 1);
    Eigen::VectorXd b(Eigen::Index(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      a(Eigen::Index(i), 0) = 1.0;
      for (int q = 0; q < n; ++q) a(Eigen::Index(i), q + 1) = double((rows[i] >> (n - 1 - q)) & 1);
      b(Eigen::Index(i)) = std::arg(target[rows[i]] / state[rows[i]]);
    }
    Eigen::VectorXd x = a.completeOrthogonalDecomposition().solve(b);
    for (int q = 0; q < n; ++q) out.local_phases[std::size_t(q)] = x(q + 1);
  }
  ComplexVector v = state.amplitudes();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    double ph = 0;
    for (int q = 0; q < n; ++q)
      if ((k >> (n - 1 - q)) & 1) ph += out.local_phases[std::size_t(q)];
    v(k) *= std::polar(1.0, ph);
  }
  out.aligned = StateVector(n, v);
  out.overlap = overlap(out.aligned, target);
  return out;
}

// {A_t A_t A_t, A_-t A_t A_-t, A_(w,pi/2) A_(w,pi/2) I}
inline StabilizationPattern case2_pattern(double theta, double omega)
{
  using S = PatternSlot;
  return {3,
          {{S::free(theta), S::free(theta), S::free(theta)},
           {S::free(-theta), S::free(theta), S::free(-theta)},
           {S::free(omega, kPi / 2), S::free(omega, kPi / 2), S::identity()}}};
}

// ---------------------------------------------------------------- tables

struct TableCheck {
  std::string row;
  std::string operators;
  std::string condition;
  std::string params;
  int expected_dim = 0;
  int dim = 0;
  std::string expected_state; // empty when no state is listed
  double overlap = -1.0;
  bool pass = false;
};

struct OrbitEntry {
  std::string params;
  int dim = 0;
};

struct TableReport {
  std::string table;
  int classes = 0;
  int expected_classes = 0; // negative when not asserted
  std::vector<TableCheck> checks;
  std::vector<OrbitEntry> orbit;
  double tol = kResidualTol;
  double overlap_tol = 1e-8;
  bool pass = false;
};

namespace detail {

inline std::string fmt_params(std::initializer_list<std::pair<const char *, double>> kv)
{
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (const auto &[k, v] : kv) {
    os << (first ? "" : ", ") << k << "=" << v;
    first = false;
  }
  return os.str();
}

inline TableCheck run_check(const std::string &row, const StabilizationPattern &p, const std::string &condition,
                            const std::string &params, int expected_dim, const std::string &state = "")
{
  TableCheck c{row, p.structure(), condition, params, expected_dim, 0, state, -1.0, false};
  c.operators = p.describe();
  auto out = stabilized_subspace(instantiate(p), kResidualTol, false);
  c.dim = out.subspace_dim;
  c.pass = c.dim == expected_dim;
  if (!state.empty() && c.dim == 1) {
    c.overlap = overlap(ComplexVector(out.basis.col(0)), ket_combination(state).amplitudes());
    c.pass = c.pass && c.overlap > 1.0 - 1e-8;
  } else if (!state.empty()) {
    c.pass = false;
  }
  return c;
}

inline std::string psi_kets(const SignVector &j)
{
  auto v = psi_state(j);
  std::string s;
  for (Eigen::Index k = 0; k < v.dim(); ++k) {
    double a = v[k].real();
    if (a == 0) continue;
    std::string bits;
    for (int q = 0; q < v.n_qubits(); ++q) bits += ((k >> (v.n_qubits() - 1 - q)) & 1) ? '1' : '0';
    s += (a > 0 ? (s.empty() ? "" : "+") : "-") + bits;
  }
  return s;
}

} // namespace detail

inline TableReport reproduce_table(const std::string &id)
{
  using S = PatternSlot;
  using detail::fmt_params;
  using detail::run_check;
  const double pi = kPi;
  TableReport rep;
  rep.table = id;
  auto &ck = rep.checks;
  if (id == "I") {
    rep.classes = int(enumerate_patterns(2, 2).size());
    rep.expected_classes = 4;
    auto r1 = [](double t, double p) { return StabilizationPattern{2, {{S::z(), S::z()}, {S::free(t), S::free(p)}}}; };
    ck.push_back(run_check("1", r1(0.9, 0.9), "theta - phi = 0", fmt_params({{"theta", 0.9}, {"phi", 0.9}}), 1, "00+11"));
    ck.push_back(run_check("1", r1(0.9, -0.9), "theta + phi = 0", fmt_params({{"theta", 0.9}, {"phi", -0.9}}), 1, "00-11"));
    ck.push_back(run_check("1", r1(0.9, 0.8), "off", fmt_params({{"theta", 0.9}, {"phi", 0.8}}), 0));
    auto r2 = [](double t) { return StabilizationPattern{2, {{S::z(), S::z()}, {S::free(t), S::identity()}}}; };
    ck.push_back(run_check("2", r2(0.0), "theta = 0", fmt_params({{"theta", 0.0}}), 1, "00"));
    ck.push_back(run_check("2", r2(pi), "theta = pi", fmt_params({{"theta", pi}}), 1, "11"));
    ck.push_back(run_check("2", r2(0.1), "off", fmt_params({{"theta", 0.1}}), 0));
    auto r3 = [](double t) { return StabilizationPattern{2, {{S::z(), S::identity()}, {S::free(t), S::identity()}}}; };
    ck.push_back(run_check("3", r3(0.0), "theta = 0", fmt_params({{"theta", 0.0}}), 2));
    ck.push_back(run_check("3", r3(0.1), "off", fmt_params({{"theta", 0.1}}), 0));
    ck.push_back(run_check("4", {2, {{S::z(), S::identity()}, {S::identity(), S::z()}}}, "none", "", 1, "00"));
  } else if (id == "II") {
    rep.classes = int(enumerate_patterns(3, 2).size());
    rep.expected_classes = 9;
    const double a = 0.8;
    auto r1 = [](double t, double p, double w) { return StabilizationPattern{3, {{S::z(), S::z(), S::z()}, {S::free(t), S::free(p), S::free(w)}}}; };
    auto p3 = [&](double t, double p, double w) { return fmt_params({{"theta", t}, {"phi", p}, {"omega", w}}); };
    ck.push_back(run_check("1", r1(0, 0, 0), "theta = phi = omega = 0", p3(0, 0, 0), 4));
    ck.push_back(run_check("1", r1(0, a, a), "theta = 0 & phi = omega", p3(0, a, a), 2));
    ck.push_back(run_check("1", r1(pi, a, pi - a), "theta = pi & phi = pi - omega", p3(pi, a, pi - a), 2));
    ck.push_back(run_check("1", r1(0.5, 0.7, -1.2), "theta + phi + omega = 0 only", p3(0.5, 0.7, -1.2), 1, detail::psi_kets({1, 1, 1})));
    ck.push_back(run_check("1", r1(0.5, 1.7, 1.2), "theta - phi + omega = 0 only", p3(0.5, 1.7, 1.2), 1, detail::psi_kets({1, -1, 1})));
    ck.push_back(run_check("1", r1(0.5, 0.7, -1.1), "off", p3(0.5, 0.7, -1.1), 0));
    // every qubit placement of the dimension-2 branch
    for (int slot = 0; slot < 3; ++slot)
      for (int branch = 0; branch < 2; ++branch) {
        double ang[3];
        ang[slot] = branch == 0 ? 0.0 : pi;
        ang[(slot + 1) % 3] = a;
        ang[(slot + 2) % 3] = branch == 0 ? a : pi - a;
        rep.orbit.push_back({p3(ang[0], ang[1], ang[2]), joint_dimension(instantiate(r1(ang[0], ang[1], ang[2])))});
      }
    auto two = [](std::vector<S> r2) { return StabilizationPattern{3, {{S::z(), S::z(), S::z()}, std::move(r2)}}; };
    auto p2 = [&](double t, double p) { return fmt_params({{"theta", t}, {"phi", p}}); };
    ck.push_back(run_check("2", two({S::free(0), S::free(0), S::identity()}), "theta = phi = 0", p2(0, 0), 4));
    ck.push_back(run_check("2", two({S::free(pi), S::free(pi), S::identity()}), "theta = phi = pi", p2(pi, pi), 4));
    ck.push_back(run_check("2", two({S::free(0.7), S::free(0.7), S::identity()}), "theta = phi", p2(0.7, 0.7), 2));
    ck.push_back(run_check("2", two({S::free(0.7), S::free(-0.7), S::identity()}), "theta = -phi", p2(0.7, -0.7), 2));
    ck.push_back(run_check("2", two({S::free(0.7), S::free(0.3), S::identity()}), "other", p2(0.7, 0.3), 0));
    auto p1 = [&](double t) { return fmt_params({{"theta", t}}); };
    ck.push_back(run_check("3", two({S::free(0), S::identity(), S::identity()}), "theta = 0", p1(0), 2));
    ck.push_back(run_check("3", two({S::free(pi), S::identity(), S::identity()}), "theta = pi", p1(pi), 2));
    ck.push_back(run_check("3", two({S::free(0.7), S::identity(), S::identity()}), "other", p1(0.7), 0));
    auto zzi = [](std::vector<S> r2) { return StabilizationPattern{3, {{S::z(), S::z(), S::identity()}, std::move(r2)}}; };
    ck.push_back(run_check("4", zzi({S::free(0), S::free(0), S::identity()}), "theta = phi = 0", p2(0, 0), 4));
    ck.push_back(run_check("4", zzi({S::free(pi), S::free(pi), S::identity()}), "theta = phi = pi", p2(pi, pi), 4));
    ck.push_back(run_check("4", zzi({S::free(0.7), S::free(0.7), S::identity()}), "theta = phi", p2(0.7, 0.7), 2));
    ck.push_back(run_check("4", zzi({S::free(0.7), S::free(-0.7), S::identity()}), "theta = -phi", p2(0.7, -0.7), 2));
    ck.push_back(run_check("4", zzi({S::free(0.7), S::free(0.3), S::identity()}), "other", p2(0.7, 0.3), 0));
    ck.push_back(run_check("5", zzi({S::free(0), S::identity(), S::z()}), "theta = 0", p1(0), 2));
    ck.push_back(run_check("5", zzi({S::free(pi), S::identity(), S::z()}), "theta = pi", p1(pi), 2));
    ck.push_back(run_check("5", zzi({S::free(0.7), S::identity(), S::z()}), "other", p1(0.7), 0));
    ck.push_back(run_check("6", zzi({S::free(0), S::identity(), S::identity()}), "theta = 0", p1(0), 2));
    ck.push_back(run_check("6", zzi({S::free(pi), S::identity(), S::identity()}), "theta = pi", p1(pi), 2));
    ck.push_back(run_check("6", zzi({S::free(0.7), S::identity(), S::identity()}), "other", p1(0.7), 0));
    ck.push_back(run_check("7", zzi({S::identity(), S::identity(), S::z()}), "none", "", 2));
    auto zii = [](std::vector<S> r2) { return StabilizationPattern{3, {{S::z(), S::identity(), S::identity()}, std::move(r2)}}; };
    ck.push_back(run_check("8", zii({S::free(0), S::identity(), S::identity()}), "theta = 0", p1(0), 4));
    ck.push_back(run_check("8", zii({S::free(0.7), S::identity(), S::identity()}), "other", p1(0.7), 0));
    ck.push_back(run_check("9", zii({S::identity(), S::z(), S::identity()}), "none", "", 2));
  } else if (id == "III") {
    rep.classes = int(enumerate_patterns(3, 3, true).size());
    rep.expected_classes = -1; // reported only
    struct Row {
      std::string label;
      std::function<StabilizationPattern(double, double, double)> make;
      std::string state;
    };
    const S zzz[3] = {S::z(), S::z(), S::z()};
    auto pat = [&](std::vector<S> r2, std::vector<S> r3) {
      return StabilizationPattern{3, {{zzz[0], zzz[1], zzz[2]}, std::move(r2), std::move(r3)}};
    };
    std::vector<Row> rows = {
        {"1", [&](double f, double w, double b) { return pat({S::z(), S::free(f), S::free(f)}, {S::z(), S::free(w, b), S::free(w, b)}); }, "101-110"},
        {"2", [&](double f, double w, double b) { return pat({S::z(), S::free(f), S::free(f)}, {S::z(), S::free(w, b), S::free(w, -b)}); }, "000+011"},
        {"3", [&](double f, double w, double b) { return pat({S::z(), S::free(f), S::free(f)}, {S::z(-1), S::free(w, b), S::free(w, pi - b)}); }, "101-110"},
        {"4", [&](double f, double w, double b) { return pat({S::z(), S::free(f), S::free(f)}, {S::z(-1), S::free(w, b), S::free(w, b - pi)}); }, "000+011"},
        {"5", [&](double f, double w, double b) { return pat({S::z(-1), S::free(f), S::free(pi - f)}, {S::z(-1), S::free(w, b), S::free(w, b)}); }, "101+110"},
        {"6", [&](double f, double w, double b) { return pat({S::z(-1), S::free(f), S::free(pi - f)}, {S::z(-1), S::free(w, b), S::free(w, -b)}); }, "000-011"},
        {"7", [&](double f, double w, double) { return pat({S::z(), S::free(f), S::free(f)}, {S::free(w), S::z(), S::free(w)}); }, "000+011+101-110"},
        {"8", [&](double f, double w, double) { return pat({S::z(), S::free(f), S::free(f)}, {S::free(w), S::z(), S::free(w, pi)}); }, "000+011-101+110"},
        {"9", [&](double f, double w, double) { return pat({S::z(), S::free(f), S::free(f)}, {S::free(w), S::z(-1), S::free(pi - w)}); }, "000+011-101+110"},
        {"10", [&](double f, double w, double) { return pat({S::z(), S::free(f), S::free(f)}, {S::free(w), S::z(-1), S::free(pi - w, pi)}); }, "000-011-101-110"},
        {"11", [&](double f, double w, double) { return pat({S::z(-1), S::free(f), S::free(pi - f)}, {S::free(w), S::z(-1), S::free(pi - w)}); }, "000-011-101-110"},
        {"12", [&](double f, double w, double) { return pat({S::z(-1), S::free(f), S::free(pi - f)}, {S::free(w), S::z(-1), S::free(pi - w, pi)}); }, "000-011+101+110"},
    };
    const double draws[2][3] = {{0.9, 1.3, 0.4}, {2.0, 0.6, 1.1}};
    for (const auto &row : rows)
      for (const auto &d : draws) {
        auto p = row.make(d[0], d[1], d[2]);
        ck.push_back(run_check(row.label, p, "phi, omega, beta not in {0, pi}",
                               fmt_params({{"phi", d[0]}, {"omega", d[1]}, {"beta", d[2]}}), 1, row.state));
      }
  } else {
    throw std::invalid_argument("reproduce_table: unknown table '" + id + "'");
  }
  rep.pass = (rep.expected_classes < 0 || rep.classes == rep.expected_classes) &&
             std::all_of(ck.begin(), ck.end(), [](const TableCheck &c) { return c.pass; });
  return rep;
}

// ---------------------------------------------------------------- conjecture scan

struct ScanInstance {
  std::uint64_t attempt = 0;
  StabilizationPattern pattern;
  StateVector state;
  LuClass lu_class = LuClass::Other;
};

struct ConjectureReport {
  int n_qubits = 0;
  long samples = 0;
  std::uint64_t seed = 0;
  double tol = kResidualTol;
  long attempts = 0;
  long unique_found = 0;
  long duplicate_rejections = 0;
  std::map<std::string, long> counts{{"product", 0}, {"bell-product", 0}, {"ghz", 0}, {"other", 0}};
  std::vector<ScanInstance> counterexamples;
  long four_op_probes = 0;
  long four_op_unique = 0;
  std::vector<ScanInstance> four_op_minimal; // flagged, not asserted
  bool pass = false;
};

namespace detail {

inline Eigen::Matrix3d random_rotation(Rng &rng)
{
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q.toRotationMatrix();
}

// Random instance in the normal-form frame, then a random rotation per qubit.
inline StabilizationPattern draw_instance(int n, int k, Rng &rng)
{
  using S = PatternSlot;
  const double pi = kPi;
  const double a = uniform(rng, 0, 2 * pi), b = uniform(rng, 0, 2 * pi);
  const std::vector<double> pool{0.0, pi / 2, pi, a, -a, pi - a, pi + a, b, pi - b, a + b, a - b};
  std::uniform_int_distribution<std::size_t> pick(0, pool.size());
  auto angle = [&]() {
    std::size_t i = pick(rng);
    return i == pool.size() ? uniform(rng, 0, 2 * pi) : pool[i];
  };
  std::uniform_int_distribution<int> mask_d(1, (1 << n) - 1);
  std::vector<bool> seen(std::size_t(n), false);
  StabilizationPattern p{n, {}};
  for (int r = 0; r < k; ++r) {
    int mask = mask_d(rng);
    std::vector<S> row;
    for (int c = 0; c < n; ++c) {
      if (!((mask >> c) & 1)) {
        row.push_back(S::identity());
        continue;
      }
      if (!seen[std::size_t(c)]) row.push_back(S::z());
      else if (r == 1) row.push_back(S::free(angle(), 0.0));
      else row.push_back(S::free(angle(), angle()));
      seen[std::size_t(c)] = true;
    }
    if (uniform(rng) < 0.25) row.front().sign = -1;
    p.operators.push_back(row);
  }
  for (int c = 0; c < n; ++c) {
    Eigen::Matrix3d rot = random_rotation(rng);
    for (auto &row : p.operators) {
      auto &s = row[std::size_t(c)];
      if (s.is_identity()) continue;
      auto ax = BinaryAxis::from_bloch(rot * s.bloch());
      s = S::free(ax.theta, ax.phi, s.sign);
    }
  }
  return p;
}

inline bool has_duplicate_rows(const std::vector<ComplexMatrix> &ops)
{
  for (std::size_t i = 0; i < ops.size(); ++i)
    for (std::size_t j = i + 1; j < ops.size(); ++j)
      if (max_abs(ops[i] - ops[j]) < 1e-9) return true;
  return false;
}

struct AttemptResult {
  bool duplicate = false;
  bool unique = false;
  bool minimal = false;
  LuClass cls = LuClass::Other;
  StabilizationPattern pattern;
  StateVector state;
};

inline AttemptResult run_attempt(int n, int k, std::uint64_t seed, bool minimality)
{
  Rng rng(seed);
  AttemptResult r;
  r.pattern = draw_instance(n, k, rng);
  auto ops = instantiate(r.pattern);
  if (has_duplicate_rows(ops)) {
    r.duplicate = true;
    return r;
  }
  auto out = stabilized_subspace(ops, kResidualTol, minimality);
  if (!out.unique) return r;
  r.unique = true;
  r.minimal = out.minimal;
  r.state = as_state(out.basis.col(0)).normalized();
  r.cls = *out.lu_class;
  return r;
}

} // namespace detail

inline ConjectureReport conjecture_scan(int n_qubits, long samples, std::uint64_t seed, unsigned threads = thread_count())
{
  if (n_qubits < 1 || n_qubits > 3) throw std::invalid_argument("conjecture_scan: need 1 <= n_qubits <= 3");
  if (samples < 0) throw std::invalid_argument("conjecture_scan: samples must be non-negative");
  ConjectureReport rep;
  rep.n_qubits = n_qubits;
  rep.samples = samples;
  rep.seed = seed;
  const long cap = 1000 * samples + 1000;
  const std::size_t batch = 512;
  while (rep.unique_found < samples && rep.attempts < cap) {
    std::vector<detail::AttemptResult> res(batch);
    const std::uint64_t base = std::uint64_t(rep.attempts);
    parallel_for(batch, [&](std::size_t i) {
      const std::uint64_t idx = base + i;
      Rng pick(derive_seed(seed, idx));
      int k = n_qubits == 1 ? 1 : 2 + int(pick() % 2);
      res[i] = detail::run_attempt(n_qubits, k, derive_seed(seed ^ 0xa5a5a5a5ULL, idx), false);
    }, threads);
    for (std::size_t i = 0; i < batch && rep.unique_found < samples; ++i) {
      ++rep.attempts;
      const auto &r = res[i];
      if (r.duplicate) {
        ++rep.duplicate_rejections;
        continue;
      }
      if (!r.unique) continue;
      ++rep.unique_found;
      rep.counts[to_string(r.cls)]++;
      if (r.cls == LuClass::Other) rep.counterexamples.push_back({base + i, r.pattern, r.state, r.cls});
    }
  }
  if (n_qubits == 3) {
    rep.four_op_probes = samples / 10;
    std::vector<detail::AttemptResult> res(std::size_t(rep.four_op_probes));
    parallel_for(res.size(), [&](std::size_t i) { res[i] = detail::run_attempt(3, 4, derive_seed(seed ^ 0x4444444444ULL, i), true); }, threads);
    for (std::size_t i = 0; i < res.size(); ++i) {
      if (!res[i].unique) continue;
      ++rep.four_op_unique;
      if (res[i].minimal) rep.four_op_minimal.push_back({i, res[i].pattern, res[i].state, res[i].cls});
    }
  }
  rep.pass = rep.unique_found == samples && rep.counts["other"] == 0;
  return rep;
}

} // namespace stabkit

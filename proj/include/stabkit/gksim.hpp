#pragma once

#include "linalg.hpp"

#include <bit>
#include <map>
#include <optional>
#include <sstream>

namespace stabkit {

// Hermitian Pauli operator (-1)^sign * P_0 x ... x P_{n-1}; (x,z) = (1,1) encodes Y.
struct PauliString {
  int n = 0;
  std::vector<std::uint64_t> x, z;
  bool sign = false;

  PauliString() = default;
  explicit PauliString(int n_qubits)
      : n(n_qubits), x(words(n_qubits), 0), z(words(n_qubits), 0) {}

  static std::size_t words(int n) { return std::size_t((n + 63) / 64); }

  static PauliString single(int n, int q, char p)
  {
    PauliString s(n);
    s.set(q, p == 'X' || p == 'Y', p == 'Z' || p == 'Y');
    return s;
  }

  static PauliString parse(const std::string &text)
  {
    std::string body = text;
    bool neg = false;
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
      neg = body[0] == '-';
      body = body.substr(1);
    }
    PauliString s(int(body.size()));
    s.sign = neg;
    for (std::size_t q = 0; q < body.size(); ++q) {
      char c = body[q];
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') throw std::invalid_argument("PauliString: bad character");
      s.set(int(q), c == 'X' || c == 'Y', c == 'Z' || c == 'Y');
    }
    return s;
  }

  bool get_x(int q) const { return (x[std::size_t(q / 64)] >> (q % 64)) & 1; }
  bool get_z(int q) const { return (z[std::size_t(q / 64)] >> (q % 64)) & 1; }

  void set(int q, bool xb, bool zb)
  {
    const std::uint64_t bit = std::uint64_t(1) << (q % 64);
    auto w = std::size_t(q / 64);
    x[w] = xb ? (x[w] | bit) : (x[w] & ~bit);
    z[w] = zb ? (z[w] | bit) : (z[w] & ~bit);
  }

  bool is_identity() const
  {
    for (std::size_t w = 0; w < x.size(); ++w)
      if (x[w] || z[w]) return false;
    return true;
  }

  bool commutes_with(const PauliString &o) const
  {
    int c = 0;
    for (std::size_t w = 0; w < x.size(); ++w) c += std::popcount((x[w] & o.z[w]) ^ (z[w] & o.x[w]));
    return c % 2 == 0;
  }

  bool operator==(const PauliString &o) const = default;

  std::string str() const
  {
    std::string s(sign ? "-" : "+");
    for (int q = 0; q < n; ++q) s += "IZXY"[int(get_x(q)) * 2 + int(get_z(q))];
    return s;
  }

  ComplexMatrix to_matrix() const
  {
    std::vector<ComplexMatrix> f;
    for (int q = 0; q < n; ++q) {
      if (get_x(q) && get_z(q)) f.push_back(pauli_y());
      else if (get_x(q)) f.push_back(pauli_x());
      else if (get_z(q)) f.push_back(pauli_z());
      else f.push_back(identity(2));
    }
    return (sign ? -1.0 : 1.0) * tensor_product(f);
  }

  // Matrix-free action on a dense state; needs n <= 62.
  ComplexVector apply(const ComplexVector &v) const
  {
    std::uint64_t xm = 0, zm = 0;
    int ny = 0;
    for (int q = 0; q < n; ++q) {
      std::uint64_t bit = std::uint64_t(1) << (n - 1 - q);
      if (get_x(q)) xm |= bit;
      if (get_z(q)) zm |= bit;
      if (get_x(q) && get_z(q)) ++ny;
    }
    static const cplx ipow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    const cplx base = ipow[ny % 4] * (sign ? -1.0 : 1.0);
    ComplexVector out(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      auto uk = std::uint64_t(k);
      double s = std::popcount(uk & zm) % 2 ? -1.0 : 1.0;
      out(Eigen::Index(uk ^ xm)) = base * s * v(k);
    }
    return out;
  }
};

// Product a*b of commuting Paulis (phase bookkeeping as in the CHP rowsum).
inline PauliString pauli_product(const PauliString &a, const PauliString &b)
{
  if (a.n != b.n) throw std::invalid_argument("pauli_product: size mismatch");
  PauliString r(a.n);
  int e = 2 * int(a.sign) + 2 * int(b.sign);
  for (std::size_t w = 0; w < a.x.size(); ++w) {
    const std::uint64_t x1 = a.x[w], z1 = a.z[w], x2 = b.x[w], z2 = b.z[w];
    const std::uint64_t y1 = x1 & z1, xo = x1 & ~z1, zo = ~x1 & z1;
    const std::uint64_t pos = (y1 & z2 & ~x2) | (xo & x2 & z2) | (zo & x2 & ~z2);
    const std::uint64_t neg = (y1 & x2 & ~z2) | (xo & z2 & ~x2) | (zo & x2 & z2);
    e += std::popcount(pos) - std::popcount(neg);
    r.x[w] = x1 ^ x2;
    r.z[w] = z1 ^ z2;
  }
  e = ((e % 4) + 4) % 4;
  if (e % 2) throw std::logic_error("pauli_product: factors anticommute");
  r.sign = e == 2;
  return r;
}

enum class GateKind { H, S, CX, CZ, M };

struct Gate {
  GateKind kind = GateKind::H;
  int a = 0;
  int b = -1;

  bool operator==(const Gate &) const = default;

  std::string str() const
  {
    static const char *names[] = {"H", "S", "CX", "CZ", "M"};
    std::string s = names[int(kind)];
    s += " " + std::to_string(a);
    if (kind == GateKind::CX || kind == GateKind::CZ) s += " " + std::to_string(b);
    return s;
  }
};

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;

  void validate() const
  {
    if (n_qubits < 1) throw std::invalid_argument("circuit: needs at least one qubit");
    for (const auto &g : gates) {
      bool two = g.kind == GateKind::CX || g.kind == GateKind::CZ;
      if (g.a < 0 || g.a >= n_qubits || (two && (g.b < 0 || g.b >= n_qubits)))
        throw std::invalid_argument("circuit: qubit index out of range in '" + g.str() + "'");
      if (two && g.a == g.b) throw std::invalid_argument("circuit: two-qubit gate with equal operands");
    }
  }

  int measurement_count() const
  {
    return int(std::count_if(gates.begin(), gates.end(), [](const Gate &g) { return g.kind == GateKind::M; }));
  }

  std::string str() const
  {
    std::string s;
    for (const auto &g : gates) s += g.str() + "\n";
    return s;
  }
};

class CircuitParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// One gate per line; '#' starts a comment. Qubit count is max index + 1 unless a "QUBITS n" line is given.
inline Circuit parse_circuit(const std::string &text)
{
  Circuit c;
  int max_index = -1;
  int declared = -1;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string &msg) { throw CircuitParseError("line " + std::to_string(lineno) + ": " + msg); };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    for (auto &ch : op) ch = char(std::toupper(static_cast<unsigned char>(ch)));
    auto read_index = [&]() {
      long long v;
      if (!(ls >> v)) fail("missing or malformed qubit index for " + op);
      if (v < 0 || v > 100000) fail("qubit index out of range");
      return int(v);
    };
    if (op == "QUBITS") {
      declared = read_index();
    } else {
      Gate g;
      if (op == "H") g.kind = GateKind::H;
      else if (op == "S") g.kind = GateKind::S;
      else if (op == "CX" || op == "CNOT") g.kind = GateKind::CX;
      else if (op == "CZ") g.kind = GateKind::CZ;
      else if (op == "M") g.kind = GateKind::M;
      else fail("unknown gate '" + op + "'");
      g.a = read_index();
      if (g.kind == GateKind::CX || g.kind == GateKind::CZ) {
        g.b = read_index();
        if (g.a == g.b) fail("two-qubit gate with equal operands");
      }
      max_index = std::max({max_index, g.a, g.b});
      c.gates.push_back(g);
    }
    std::string extra;
    if (ls >> extra) fail("trailing token '" + extra + "'");
  }
  c.n_qubits = std::max(max_index + 1, declared);
  if (declared >= 0 && max_index >= declared) throw CircuitParseError("qubit index exceeds declared QUBITS");
  if (c.n_qubits < 1) throw CircuitParseError("circuit has no qubits");
  return c;
}

inline void conjugate(PauliString &p, const Gate &g)
{
  const int a = g.a, b = g.b;
  switch (g.kind) {
  case GateKind::H: {
    bool xa = p.get_x(a), za = p.get_z(a);
    p.sign ^= xa && za;
    p.set(a, za, xa);
    break;
  }
  case GateKind::S: {
    bool xa = p.get_x(a), za = p.get_z(a);
    p.sign ^= xa && za;
    p.set(a, xa, za ^ xa);
    break;
  }
  case GateKind::CX: {
    bool xa = p.get_x(a), za = p.get_z(a), xb = p.get_x(b), zb = p.get_z(b);
    p.sign ^= xa && zb && (xb ^ za ^ true);
    p.set(b, xb ^ xa, zb);
    p.set(a, xa, za ^ zb);
    break;
  }
  case GateKind::CZ: {
    bool xa = p.get_x(a), za = p.get_z(a), xb = p.get_x(b), zb = p.get_z(b);
    p.sign ^= xa && xb && (za ^ zb);
    p.set(a, xa, za ^ xb);
    p.set(b, xb, zb ^ xa);
    break;
  }
  case GateKind::M:
    throw std::invalid_argument("conjugate: measurement is not a unitary gate");
  }
}

struct MeasureResult {
  int outcome = 0;
  bool deterministic = false;
};

// Generator-only stabilizer tableau.
class CliffordTableau {
public:
  CliffordTableau() = default;

  static CliffordTableau init(int n)
  {
    if (n < 1) throw std::invalid_argument("tableau_init: n must be at least 1");
    CliffordTableau t;
    t.n_ = n;
    for (int q = 0; q < n; ++q) t.gens_.push_back(PauliString::single(n, q, 'Z'));
    return t;
  }

  int n_qubits() const { return n_; }
  const std::vector<PauliString> &generators() const { return gens_; }

  bool operator==(const CliffordTableau &o) const { return n_ == o.n_ && gens_ == o.gens_; }

  void apply(const Gate &g)
  {
    if (g.kind == GateKind::M) throw std::invalid_argument("apply_gate: use measure() for M");
    check_index(g.a);
    if (g.kind == GateKind::CX || g.kind == GateKind::CZ) {
      check_index(g.b);
      if (g.a == g.b) throw std::invalid_argument("apply_gate: equal operands");
    }
    for (auto &p : gens_) conjugate(p, g);
  }

  template <class URBG>
  MeasureResult measure(int q, URBG &rng)
  {
    check_index(q);
    int pivot = -1;
    for (int i = 0; i < n_; ++i)
      if (gens_[std::size_t(i)].get_x(q)) {
        pivot = i;
        break;
      }
    if (pivot >= 0) {
      for (int i = pivot + 1; i < n_; ++i)
        if (gens_[std::size_t(i)].get_x(q))
          gens_[std::size_t(i)] = pauli_product(gens_[std::size_t(i)], gens_[std::size_t(pivot)]);
      int outcome = int(rng() & 1u);
      gens_[std::size_t(pivot)] = PauliString::single(n_, q, 'Z');
      gens_[std::size_t(pivot)].sign = outcome == 1;
      return {outcome, false};
    }
    auto zq = express(PauliString::single(n_, q, 'Z'));
    if (!zq) throw std::logic_error("measure: Z_q not in the stabilizer span although it commutes with it");
    return {zq->sign ? 1 : 0, true};
  }

  // Product of generators equal to +-target up to sign, if target lies in their GF(2) span.
  std::optional<PauliString> express(const PauliString &target) const
  {
    const std::size_t W = PauliString::words(n_);
    const std::size_t CW = PauliString::words(n_);
    struct Row {
      std::vector<std::uint64_t> v, c;
    };
    auto pack = [&](const PauliString &p) {
      std::vector<std::uint64_t> v(2 * W);
      std::copy(p.x.begin(), p.x.end(), v.begin());
      std::copy(p.z.begin(), p.z.end(), v.begin() + std::ptrdiff_t(W));
      return v;
    };
    std::vector<Row> rows;
    for (int i = 0; i < n_; ++i) {
      Row r{pack(gens_[std::size_t(i)]), std::vector<std::uint64_t>(CW, 0)};
      r.c[std::size_t(i / 64)] |= std::uint64_t(1) << (i % 64);
      rows.push_back(std::move(r));
    }
    auto bit = [](const std::vector<std::uint64_t> &v, int k) { return (v[std::size_t(k / 64)] >> (k % 64)) & 1; };
    auto xor_into = [](std::vector<std::uint64_t> &d, const std::vector<std::uint64_t> &s) {
      for (std::size_t w = 0; w < d.size(); ++w) d[w] ^= s[w];
    };
    std::vector<int> pivot_col;
    std::size_t rank = 0;
    for (int col = 0; col < 2 * int(W) * 64 && rank < rows.size(); ++col) {
      std::size_t sel = rank;
      while (sel < rows.size() && !bit(rows[sel].v, col)) ++sel;
      if (sel == rows.size()) continue;
      std::swap(rows[rank], rows[sel]);
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (i != rank && bit(rows[i].v, col)) {
          xor_into(rows[i].v, rows[rank].v);
          xor_into(rows[i].c, rows[rank].c);
        }
      pivot_col.push_back(col);
      ++rank;
    }
    auto t = pack(target);
    std::vector<std::uint64_t> combo(CW, 0);
    for (std::size_t r = 0; r < rank; ++r)
      if (bit(t, pivot_col[r])) {
        xor_into(t, rows[r].v);
        xor_into(combo, rows[r].c);
      }
    for (auto w : t)
      if (w) return std::nullopt;
    PauliString acc(n_);
    for (int i = 0; i < n_; ++i)
      if (bit(combo, i)) acc = pauli_product(acc, gens_[std::size_t(i)]);
    return acc;
  }

  bool generators_commute() const
  {
    for (std::size_t i = 0; i < gens_.size(); ++i)
      for (std::size_t j = i + 1; j < gens_.size(); ++j)
        if (!gens_[i].commutes_with(gens_[j])) return false;
    return true;
  }

  int binary_rank() const
  {
    std::vector<std::vector<bool>> m;
    for (const auto &p : gens_) {
      std::vector<bool> r;
      for (int q = 0; q < n_; ++q) r.push_back(p.get_x(q));
      for (int q = 0; q < n_; ++q) r.push_back(p.get_z(q));
      m.push_back(r);
    }
    int rank = 0;
    for (int col = 0; col < 2 * n_ && rank < int(m.size()); ++col) {
      int sel = rank;
      while (sel < int(m.size()) && !m[std::size_t(sel)][std::size_t(col)]) ++sel;
      if (sel == int(m.size())) continue;
      std::swap(m[std::size_t(rank)], m[std::size_t(sel)]);
      for (int i = 0; i < int(m.size()); ++i)
        if (i != rank && m[std::size_t(i)][std::size_t(col)])
          for (int k = 0; k < 2 * n_; ++k) m[std::size_t(i)][std::size_t(k)] = m[std::size_t(i)][std::size_t(k)] ^ m[std::size_t(rank)][std::size_t(k)];
      ++rank;
    }
    return rank;
  }

  bool invariants_hold() const { return int(gens_.size()) == n_ && generators_commute() && binary_rank() == n_; }

private:
  void check_index(int q) const
  {
    if (q < 0 || q >= n_) throw std::invalid_argument("tableau: qubit index out of range");
  }

  int n_ = 0;
  std::vector<PauliString> gens_;
};

inline CliffordTableau tableau_init(int n) { return CliffordTableau::init(n); }

inline CliffordTableau apply_gate(CliffordTableau t, const Gate &g)
{
  t.apply(g);
  return t;
}

// ---------------------------------------------------------------- dense reference

inline constexpr int kDenseMaxQubits = 12;

inline ComplexMatrix gate_matrix(const Gate &g, int n)
{
  const double r = 1.0 / std::sqrt(2.0);
  switch (g.kind) {
  case GateKind::H: {
    ComplexMatrix h(2, 2);
    h << r, r, r, -r;
    return embed(h, g.a, n);
  }
  case GateKind::S: {
    ComplexMatrix s(2, 2);
    s << 1, 0, 0, cplx(0, 1);
    return embed(s, g.a, n);
  }
  case GateKind::CX:
  case GateKind::CZ: {
    const Eigen::Index dim = Eigen::Index(1) << n;
    ComplexMatrix u = ComplexMatrix::Zero(dim, dim);
    const Eigen::Index ma = Eigen::Index(1) << (n - 1 - g.a), mb = Eigen::Index(1) << (n - 1 - g.b);
    for (Eigen::Index k = 0; k < dim; ++k) {
      bool ca = k & ma;
      if (g.kind == GateKind::CX) u(ca ? (k ^ mb) : k, k) = 1.0;
      else u(k, k) = (ca && (k & mb)) ? -1.0 : 1.0;
    }
    return u;
  }
  case GateKind::M:
    break;
  }
  throw std::invalid_argument("gate_matrix: measurement has no unitary");
}

inline void dense_apply(ComplexVector &v, const Gate &g, int n)
{
  const Eigen::Index dim = v.size();
  const Eigen::Index ma = Eigen::Index(1) << (n - 1 - g.a);
  switch (g.kind) {
  case GateKind::H: {
    const double r = 1.0 / std::sqrt(2.0);
    for (Eigen::Index k = 0; k < dim; ++k)
      if (!(k & ma)) {
        cplx a0 = v(k), a1 = v(k | ma);
        v(k) = r * (a0 + a1);
        v(k | ma) = r * (a0 - a1);
      }
    break;
  }
  case GateKind::S:
    for (Eigen::Index k = 0; k < dim; ++k)
      if (k & ma) v(k) *= cplx(0, 1);
    break;
  case GateKind::CX: {
    const Eigen::Index mb = Eigen::Index(1) << (n - 1 - g.b);
    for (Eigen::Index k = 0; k < dim; ++k)
      if ((k & ma) && !(k & mb)) std::swap(v(k), v(k | mb));
    break;
  }
  case GateKind::CZ: {
    const Eigen::Index mb = Eigen::Index(1) << (n - 1 - g.b);
    for (Eigen::Index k = 0; k < dim; ++k)
      if ((k & ma) && (k & mb)) v(k) = -v(k);
    break;
  }
  case GateKind::M:
    throw std::invalid_argument("dense_apply: measurement is not unitary");
  }
}

inline double probability_of_one(const ComplexVector &v, int q, int n)
{
  const Eigen::Index m = Eigen::Index(1) << (n - 1 - q);
  double p = 0;
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (k & m) p += std::norm(v(k));
  return p;
}

inline void collapse(ComplexVector &v, int q, int n, int outcome)
{
  const Eigen::Index m = Eigen::Index(1) << (n - 1 - q);
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (bool(k & m) != bool(outcome)) v(k) = 0;
  v.normalize();
}

struct DenseRun {
  StateVector state;
  std::string outcomes; // one character per M gate, in circuit order
};

inline DenseRun dense_simulate(const Circuit &c, Rng &rng)
{
  c.validate();
  if (c.n_qubits > kDenseMaxQubits) throw std::invalid_argument("dense_simulate: too many qubits");
  ComplexVector v = StateVector::zero(c.n_qubits).amplitudes();
  v(0) = 1.0;
  std::string out;
  for (const auto &g : c.gates) {
    if (g.kind == GateKind::M) {
      double p1 = probability_of_one(v, g.a, c.n_qubits);
      int o = uniform(rng) < p1 ? 1 : 0;
      collapse(v, g.a, c.n_qubits, o);
      out += char('0' + o);
    } else {
      dense_apply(v, g, c.n_qubits);
    }
  }
  return {StateVector(c.n_qubits, v), out};
}

// Exact distribution over measurement records by enumerating branches.
inline std::map<std::string, double> dense_outcome_distribution(const Circuit &c, double prune = 1e-14)
{
  c.validate();
  if (c.n_qubits > kDenseMaxQubits) throw std::invalid_argument("dense_outcome_distribution: too many qubits");
  struct Branch {
    double p;
    ComplexVector v;
    std::string rec;
  };
  ComplexVector v0 = ComplexVector::Zero(Eigen::Index(1) << c.n_qubits);
  v0(0) = 1.0;
  std::vector<Branch> br{{1.0, v0, ""}};
  for (const auto &g : c.gates) {
    if (g.kind != GateKind::M) {
      for (auto &b : br) dense_apply(b.v, g, c.n_qubits);
      continue;
    }
    std::vector<Branch> next;
    for (auto &b : br) {
      double p1 = probability_of_one(b.v, g.a, c.n_qubits);
      for (int o = 0; o < 2; ++o) {
        double po = o ? p1 : 1.0 - p1;
        if (po < prune) continue;
        ComplexVector w = b.v;
        collapse(w, g.a, c.n_qubits, o);
        next.push_back({b.p * po, std::move(w), b.rec + char('0' + o)});
      }
    }
    br = std::move(next);
  }
  std::map<std::string, double> dist;
  for (const auto &b : br) dist[b.rec] += b.p;
  return dist;
}

// ---------------------------------------------------------------- tableau runs

struct TableauRun {
  CliffordTableau tableau;
  std::string outcomes;
};

template <class URBG>
inline TableauRun run_tableau(const Circuit &c, URBG &rng, std::size_t from = 0, std::optional<CliffordTableau> start = std::nullopt)
{
  c.validate();
  TableauRun r{start ? *start : tableau_init(c.n_qubits), ""};
  for (std::size_t i = from; i < c.gates.size(); ++i) {
    const auto &g = c.gates[i];
    if (g.kind == GateKind::M) r.outcomes += char('0' + r.tableau.measure(g.a, rng).outcome);
    else r.tableau.apply(g);
  }
  return r;
}

inline std::size_t measurement_free_prefix(const Circuit &c)
{
  std::size_t i = 0;
  while (i < c.gates.size() && c.gates[i].kind != GateKind::M) ++i;
  return i;
}

// Shot histogram from the tableau: prefix simulated once, cloned per shot with derived seeds.
inline std::map<std::string, long> tableau_histogram(const Circuit &c, long shots, std::uint64_t seed)
{
  c.validate();
  const std::size_t pre = measurement_free_prefix(c);
  CliffordTableau base = tableau_init(c.n_qubits);
  for (std::size_t i = 0; i < pre; ++i) base.apply(c.gates[i]);
  std::map<std::string, long> h;
  for (long s = 0; s < shots; ++s) {
    Rng rng(derive_seed(seed, std::uint64_t(s)));
    h[run_tableau(c, rng, pre, base).outcomes]++;
  }
  return h;
}

inline std::map<std::string, long> sample_distribution(const std::map<std::string, double> &dist, long shots, std::uint64_t seed)
{
  std::vector<std::string> keys;
  std::vector<double> w;
  for (const auto &[k, p] : dist) {
    keys.push_back(k);
    w.push_back(p);
  }
  std::map<std::string, long> h;
  if (keys.empty()) return h;
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  Rng rng(seed);
  for (long s = 0; s < shots; ++s) h[keys[pick(rng)]]++;
  return h;
}

inline double total_variation(const std::map<std::string, long> &a, const std::map<std::string, long> &b, long shots, int *support = nullptr)
{
  std::map<std::string, std::pair<long, long>> u;
  for (const auto &[k, v] : a) u[k].first = v;
  for (const auto &[k, v] : b) u[k].second = v;
  double t = 0;
  for (const auto &[k, v] : u) t += std::abs(double(v.first - v.second));
  if (support) *support = int(u.size());
  return 0.5 * t / double(shots);
}

struct CompareReport {
  bool has_measurements = false;
  double residual_tol = 1e-9;
  double max_residual = 0.0;
  long shots = 0;
  int support = 0;
  double tvd = 0.0;
  double tvd_bound = 0.0;
  int impossible_outcomes = 0; // tableau records with zero dense probability
  std::map<std::string, long> tableau_hist, dense_hist;
  std::vector<std::string> generators;
  bool pass = false;
};

inline CompareReport compare_simulators(const Circuit &c, long shots, std::uint64_t seed, double residual_tol = 1e-9)
{
  c.validate();
  CompareReport rep;
  rep.residual_tol = residual_tol;
  rep.has_measurements = c.measurement_count() > 0;
  if (!rep.has_measurements) {
    Rng rng(seed);
    auto t = run_tableau(c, rng);
    auto d = dense_simulate(c, rng);
    for (const auto &g : t.tableau.generators()) {
      rep.generators.push_back(g.str());
      rep.max_residual = std::max(rep.max_residual, (g.apply(d.state.amplitudes()) - d.state.amplitudes()).norm());
    }
    rep.pass = rep.max_residual < residual_tol;
    return rep;
  }
  if (shots < 1) throw std::invalid_argument("compare_simulators: shots must be positive");
  rep.shots = shots;
  auto dist = dense_outcome_distribution(c);
  rep.tableau_hist = tableau_histogram(c, shots, derive_seed(seed, 1));
  rep.dense_hist = sample_distribution(dist, shots, derive_seed(seed, 2));
  for (const auto &[k, v] : rep.tableau_hist)
    if (dist.find(k) == dist.end()) rep.impossible_outcomes += 1;
  rep.tvd = total_variation(rep.tableau_hist, rep.dense_hist, shots, &rep.support);
  rep.tvd_bound = 3.0 * std::sqrt(double(rep.support) / double(shots));
  rep.pass = rep.impossible_outcomes == 0 && rep.tvd < rep.tvd_bound;
  return rep;
}

// Uniform draws from {H, S, CX}; optional measurements (mid-circuit and a final sweep).
inline Circuit random_clifford_circuit(int n, int n_gates, Rng &rng, int mid_measurements = 0, bool measure_all = false)
{
  if (n < 1) throw std::invalid_argument("random_clifford_circuit: n must be positive");
  Circuit c;
  c.n_qubits = n;
  std::uniform_int_distribution<int> qd(0, n - 1);
  std::uniform_int_distribution<int> kind(0, n >= 2 ? 2 : 1);
  for (int i = 0; i < n_gates; ++i) {
    int k = kind(rng);
    Gate g;
    g.a = qd(rng);
    if (k == 0) g.kind = GateKind::H;
    else if (k == 1) g.kind = GateKind::S;
    else {
      g.kind = GateKind::CX;
      do g.b = qd(rng);
      while (g.b == g.a);
    }
    c.gates.push_back(g);
  }
  for (int m = 0; m < mid_measurements && n_gates > 0; ++m) {
    std::uniform_int_distribution<int> pos(0, int(c.gates.size()));
    c.gates.insert(c.gates.begin() + pos(rng), Gate{GateKind::M, qd(rng), -1});
  }
  if (measure_all)
    for (int q = 0; q < n; ++q) c.gates.push_back({GateKind::M, q, -1});
  return c;
}

// ---------------------------------------------------------------- Clifford membership

// Returns the Pauli P with m = omega * P, omega in {+-1, +-i}, if one exists.
inline std::optional<PauliString> decompose_pauli(const ComplexMatrix &m, int n, double tol = kExactTol)
{
  const Eigen::Index dim = Eigen::Index(1) << n;
  if (m.rows() != dim || m.cols() != dim) return std::nullopt;
  // m = omega X^a Z^b has m(j ^ a, j) = omega (-1)^{b.j}
  Eigen::Index a = 0;
  m.col(0).cwiseAbs().maxCoeff(&a);
  const cplx omega = m(a, 0);
  static const cplx phases[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
  int ph = -1;
  for (int k = 0; k < 4; ++k)
    if (std::abs(omega - phases[k]) < tol) ph = k;
  if (ph < 0) return std::nullopt;
  Eigen::Index b = 0;
  for (int q = 0; q < n; ++q) {
    Eigen::Index j = Eigen::Index(1) << (n - 1 - q);
    cplx r = m(j ^ a, j) / omega;
    if (std::abs(r + 1.0) < tol) b |= j;
    else if (std::abs(r - 1.0) >= tol) return std::nullopt;
  }
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) {
      cplx expect = (i == (j ^ a)) ? omega * (std::popcount(std::uint64_t(b & j)) % 2 ? -1.0 : 1.0) : cplx(0);
      if (std::abs(m(i, j) - expect) >= tol) return std::nullopt;
    }
  // omega X^a Z^b = omega i^{-#Y} (Paulis with Y where a and b overlap)
  PauliString p(n);
  int ny = 0;
  for (int q = 0; q < n; ++q) {
    Eigen::Index bit = Eigen::Index(1) << (n - 1 - q);
    bool xq = a & bit, zq = b & bit;
    p.set(q, xq, zq);
    ny += xq && zq;
  }
  int total = ((ph - ny) % 4 + 4) % 4;
  if (total % 2) return std::nullopt; // anti-Hermitian multiple, sign bit cannot carry it
  p.sign = total == 2;
  return p;
}

inline bool clifford_membership(const ComplexMatrix &u, int n, double tol = kExactTol)
{
  if (n < 1 || u.rows() != (Eigen::Index(1) << n)) throw std::invalid_argument("clifford_membership: dimension mismatch");
  if (!is_unitary(u, tol)) throw std::invalid_argument("clifford_membership: matrix is not unitary");
  for (int q = 0; q < n; ++q)
    for (const auto &p : {pauli_x(), pauli_z()}) {
      ComplexMatrix c = u * embed(p, q, n) * u.adjoint();
      if (!decompose_pauli(c, n, tol)) {
        // allow +-i phases: an anti-Hermitian image is still in the Pauli group
        if (!decompose_pauli(cplx(0, 1) * c, n, tol)) return false;
      }
    }
  return true;
}

} // namespace stabkit

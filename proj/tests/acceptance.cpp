// Acceptance runner: one PASS/FAIL line per criterion.
#include "stabkit/stabkit.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace stabkit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(const char *f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome spectrum()
{
  Timer t;
  Rng rng(1001);
  std::uniform_int_distribution<int> nd(1, 6);
  double dev = 0, res = 0;
  for (int i = 0; i < 500; ++i) {
    std::vector<double> th(static_cast<std::size_t>(nd(rng)));
    for (auto &x : th) x = uniform(rng, 0, 2 * kPi);
    auto r = verify_theorem_spectrum(th);
    dev = std::max(dev, r.max_deviation);
    res = std::max(res, r.max_residual);
  }
  const double s = t.seconds();
  return {dev < 1e-8 && res < 1e-8 && s < 10, fmt("500 draws, max deviation %.2e, max residual %.2e, %.2fs", dev, res, s)};
}

Outcome table(const std::string &id, double limit)
{
  Timer t;
  auto r = reproduce_table(id);
  const double s = t.seconds();
  int ok = 0;
  std::string failed;
  for (const auto &c : r.checks) {
    if (c.pass) ++ok;
    else if (c.dim != c.expected_dim) failed += " " + c.row + "[" + c.condition + ": dim " + std::to_string(c.dim) + ", expected " + std::to_string(c.expected_dim) + "]";
    else failed += " " + c.row + "[" + c.condition + ": overlap " + fmt("%.3f", c.overlap) + " with " + c.expected_state + "]";
  }
  std::string d = fmt("%d classes, %d/%zu checks, %.2fs", r.classes, ok, r.checks.size(), s);
  if (!failed.empty()) d += "; failing:" + failed;
  return {r.pass && s < limit, d};
}

Outcome case2()
{
  Timer t;
  const ComplexVector target_amps = ket_combination("000+011+101+110").amplitudes();
  const StateVector target(3, target_amps);
  bool ok = true;
  double worst = 1;
  for (double th : {0.7, 1.1, 2.0, 2.9}) {
    auto ops = instantiate(case2_pattern(th, kPi / 2));
    auto out = stabilized_subspace(ops);
    if (!out.unique) {
      ok = false;
      continue;
    }
    const ComplexMatrix undo = tensor_product({ry(th).adjoint(), ry(th).adjoint(), ry(th).adjoint()});
    auto aligned = align_local_phases(StateVector(3, undo * out.basis.col(0)), target);
    worst = std::min(worst, aligned.overlap);
    auto det = determinant_method(ops);
    ok = ok && det.kernel.cols() == 1;
  }
  int off_dim = stabilized_subspace(instantiate(case2_pattern(1.1, 1.2))).subspace_dim;
  const double s = t.seconds();
  ok = ok && worst > 1 - 1e-8 && off_dim == 0 && s < 2;
  return {ok, fmt("min overlap %.12f over theta in {0.7,1.1,2.0,2.9}, omega=1.2 dim %d, %.2fs", worst, off_dim, s)};
}

Outcome conjecture()
{
  Timer t;
  auto r2 = conjecture_scan(2, 5000, 2024);
  auto r3 = conjecture_scan(3, 5000, 2025);
  const double s = t.seconds();
  auto c = [&](const char *k) { return r2.counts.at(k) + r3.counts.at(k); };
  const long found = r2.unique_found + r3.unique_found;
  const bool ok = found == 10000 && c("other") == 0 && r2.pass && r3.pass && s < 60;
  return {ok, fmt("%ld instances: product %ld, bell-product %ld, ghz %ld, other %ld, %.1fs", found, c("product"), c("bell-product"),
                  c("ghz"), c("other"), s)};
}

Outcome gottesman_knill()
{
  Rng rng(1007);
  std::uniform_int_distribution<int> nd(1, 6), gd(1, 100), md(0, 2);
  double res = 0, worst_ratio = 0;
  int bad = 0;
  for (int i = 0; i < 200; ++i) {
    const int n = nd(rng);
    auto clean = random_clifford_circuit(n, gd(rng), rng);
    auto rc = compare_simulators(clean, 0, std::uint64_t(i));
    res = std::max(res, rc.max_residual);
    if (!rc.pass) ++bad;
    auto measured = random_clifford_circuit(n, gd(rng), rng, md(rng), true);
    auto rm = compare_simulators(measured, 10000, std::uint64_t(i));
    worst_ratio = std::max(worst_ratio, rm.tvd / rm.tvd_bound);
    if (!rm.pass) ++bad;
  }
  auto big = random_clifford_circuit(64, 10000, rng);
  Timer t;
  auto tab = tableau_init(64);
  for (const auto &g : big.gates) tab.apply(g);
  const double s = t.seconds();
  const bool ok = bad == 0 && res < 1e-9 && worst_ratio <= 1 && s < 1 && tab.invariants_hold();
  return {ok, fmt("400 circuits, %d failures, max residual %.2e, max tvd/bound %.3f, n=64 x 1e4 gates %.3fs", bad, res, worst_ratio, s)};
}

Outcome lemma()
{
  Rng rng(1008);
  double orth = 0, norm_err = 0;
  for (int d = 2; d <= 4; ++d)
    for (int i = 0; i < 50; ++i) {
      const double tt = uniform(rng, 0.0, 1.5);
      ComplexMatrix m = lemma_matrix(tt, d);
      ComplexMatrix g = m.adjoint() * m;
      double s = 0;
      for (int k = 0; k < d; ++k) s += std::pow(tt, 2 * k);
      const double expect = 1 + s * s;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          if (a == b) norm_err = std::max(norm_err, std::abs(g(a, a).real() - expect) / expect);
          else orth = std::max(orth, std::abs(g(a, b)));
        }
    }
  ComplexMatrix m1 = lemma_matrix(1.0, 2);
  ComplexMatrix want(2, 2);
  want << cplx(0, 1), -2.0, -2.0, cplx(0, 1);
  const bool exact = m1 == want && m1.col(0).squaredNorm() == 5.0 && m1.col(1).squaredNorm() == 5.0;
  return {orth < 1e-10 && norm_err < 1e-10 && exact,
          fmt("150 draws, max off-diagonal %.2e, max relative norm error %.2e, d=2 t=1 exact: %s", orth, norm_err, exact ? "yes" : "no")};
}

Outcome densify_check()
{
  Rng rng(1009);
  double worst = 1;
  int failures = 0;
  for (auto [d, n] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 2}})
    for (int i = 0; i < 100; ++i) {
      try {
        auto r = densify(random_unitary(int_pow(d, n), rng), d, n, std::uint64_t(i));
        worst = std::min(worst, r.min_entry);
      } catch (const std::exception &) {
        ++failures;
      }
    }
  return {failures == 0 && worst > 1e-8, fmt("300 unitaries, %d failures, min |entry| %.3e", failures, worst)};
}

Outcome factorization()
{
  Rng rng(1010);
  int wrong_perm = 0;
  double err = 0;
  for (int i = 0; i < 100; ++i) {
    const int d = 2 + i % 2, n = 2 + (i / 2) % 2;
    Permutation sigma = identity_permutation(n);
    std::shuffle(sigma.begin(), sigma.end(), rng);
    std::vector<ComplexMatrix> f;
    for (int k = 0; k < n; ++k) f.push_back(random_unitary(d, rng));
    ComplexMatrix u = std::polar(1.0, uniform(rng, 0, 2 * kPi)) * tensor_product(f) * permutation_matrix(sigma, d);
    try {
      auto dec = factor_nonentangling(u, d, n);
      if (dec.permutation != sigma) ++wrong_perm;
      err = std::max(err, max_abs(dec.reconstruct(d) - u));
    } catch (const std::exception &) {
      ++wrong_perm;
    }
  }
  ComplexMatrix cx = ComplexMatrix::Zero(4, 4);
  cx(0, 0) = cx(1, 1) = cx(2, 3) = cx(3, 2) = 1.0;
  const bool rejected = !is_product_preserving(cx, 2, 2);
  return {wrong_perm == 0 && err < 1e-8 && rejected,
          fmt("100 planted gates, %d wrong permutations, max entry error %.2e, CNOT rejected: %s", wrong_perm, err, rejected ? "yes" : "no")};
}

Outcome xs()
{
  auto r = verify_xs();
  double res = 0;
  for (double x : r.residuals) res = std::max(res, x);
  auto v = xs_state();
  int support = 0, negatives = 0;
  bool formula = true;
  for (int x = 0; x < 8; ++x) {
    const double expect = x == 7 ? -1.0 : 1.0;
    formula = formula && v[Eigen::Index(xs_support_index(x))] == cplx(expect);
  }
  for (Eigen::Index k = 0; k < v.dim(); ++k) {
    if (v[k] != cplx(0)) ++support;
    if (v[k] == cplx(-1)) negatives += k == 0b111000 ? 1 : 100;
  }
  const bool fixed = r.fixed[0] && r.fixed[1] && r.fixed[2];
  return {fixed && res < 1e-10 && formula && support == 8 && negatives == 1,
          fmt("fixed %d/%d/%d, max residual %.2e, support %d, single -1 at |111000>: %s", r.fixed[0], r.fixed[1], r.fixed[2], res, support,
              negatives == 1 ? "yes" : "no")};
}

Outcome oracles()
{
  Rng rng(1012);
  int mismatches = 0;
  std::map<int, int> dims;
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + i % 2, k = 2 + (i / 2) % 2;
    auto ops = instantiate(detail::draw_instance(n, k, rng));
    const int a = stabilized_subspace(ops, kResidualTol, false).subspace_dim;
    const int b = int(determinant_method(ops).kernel.cols());
    const int c = eigenspace_intersection_dim(ops);
    if (a != b || b != c) ++mismatches;
    ++dims[a];
  }
  std::string hist;
  for (auto [d, c] : dims) hist += " dim" + std::to_string(d) + "=" + std::to_string(c);
  return {mismatches == 0, fmt("200 instances, %d mismatches;", mismatches) + hist};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> &criteria()
{
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> c{
      {"closed-form spectrum", spectrum},
      {"two-qubit table", [] { return table("I", 1); }},
      {"three-qubit two-operator table", [] { return table("II", 5); }},
      {"three-qubit three-operator table", [] { return table("III", 5); }},
      {"three-operator YZ-plane case", case2},
      {"entanglement class scan", conjecture},
      {"tableau simulation", gottesman_knill},
      {"lemma matrix identities", lemma},
      {"densification", densify_check},
      {"factorization round trip", factorization},
      {"XS witness", xs},
      {"dimension oracle agreement", oracles},
  };
  return c;
}

} // namespace

int main(int argc, char **argv)
{
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) only = std::stoi(argv[++i]);
    else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 2;
    }
  }
  const auto &all = criteria();
  if (only < 0 || only > int(all.size())) {
    std::cerr << "criterion out of range\n";
    return 2;
  }
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only && int(i) + 1 != only) continue;
    Outcome o;
    try {
      o = all[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << i + 1 << " (" << all[i].first << "): " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << "\n";
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}

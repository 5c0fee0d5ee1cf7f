#include "stabkit/gksim.hpp"

#include <gtest/gtest.h>

#include <chrono>

using namespace stabkit;

namespace {

std::vector<std::string> gens(const CliffordTableau &t)
{
  std::vector<std::string> s;
  for (const auto &g : t.generators()) s.push_back(g.str());
  return s;
}

Circuit circuit(const std::string &text) { return parse_circuit(text); }

} // namespace

TEST(Tableau, InitialGenerators)
{
  EXPECT_EQ(gens(tableau_init(1)), std::vector<std::string>{"+Z"});
  EXPECT_EQ(gens(tableau_init(2)), (std::vector<std::string>{"+ZI", "+IZ"}));
  EXPECT_TRUE(tableau_init(3).invariants_hold());
  EXPECT_THROW(tableau_init(0), std::invalid_argument);
}

TEST(Tableau, SingleGateConjugations)
{
  EXPECT_EQ(gens(apply_gate(tableau_init(1), {GateKind::H, 0, -1})), std::vector<std::string>{"+X"});
  auto t = apply_gate(tableau_init(1), {GateKind::H, 0, -1});
  EXPECT_EQ(gens(apply_gate(t, {GateKind::S, 0, -1})), std::vector<std::string>{"+Y"});
  PauliString xi = PauliString::parse("+XI");
  conjugate(xi, {GateKind::CX, 0, 1});
  EXPECT_EQ(xi.str(), "+XX");
  EXPECT_THROW(apply_gate(tableau_init(2), {GateKind::CX, 0, 0}), std::invalid_argument);
  EXPECT_THROW(apply_gate(tableau_init(2), {GateKind::H, 2, -1}), std::invalid_argument);
}

TEST(Tableau, ConjugationMatchesDense)
{
  const std::vector<Gate> gates{{GateKind::H, 0, -1}, {GateKind::H, 1, -1}, {GateKind::S, 0, -1}, {GateKind::S, 1, -1},
                                {GateKind::CX, 0, 1}, {GateKind::CX, 1, 0}, {GateKind::CZ, 0, 1}};
  const std::string letters = "IXYZ";
  for (const auto &g : gates) {
    const ComplexMatrix u = gate_matrix(g, 2);
    for (char a : letters)
      for (char b : letters)
        for (const char *sign : {"+", "-"}) {
          PauliString p = PauliString::parse(std::string(sign) + a + b);
          ComplexMatrix expect = u * p.to_matrix() * u.adjoint();
          conjugate(p, g);
          EXPECT_LT(max_abs(p.to_matrix() - expect), 1e-12) << g.str() << " on " << sign << a << b;
        }
  }
}

TEST(Tableau, HadamardPairsRestoreInitialState)
{
  auto c = circuit("H 0\nH 0\nH 1\nH 1\n");
  Rng rng(1);
  EXPECT_EQ(run_tableau(c, rng).tableau, tableau_init(2));
}

TEST(Tableau, InvariantsUnderRandomOperations)
{
  Rng rng(41);
  for (int run = 0; run < 20; ++run) {
    const int n = 2 + run % 7;
    auto t = tableau_init(n);
    std::uniform_int_distribution<int> qd(0, n - 1), kind(0, 4);
    for (int step = 0; step < 5000; ++step) {
      int k = kind(rng), a = qd(rng), b = qd(rng);
      if ((k == 2 || k == 3) && a == b) continue;
      if (k == 4) t.measure(a, rng);
      else t.apply({GateKind(k), a, b});
    }
    EXPECT_TRUE(t.invariants_hold()) << "n=" << n;
  }
}

TEST(PauliAlgebra, ProductAndApplyMatchMatrices)
{
  Rng rng(42);
  const std::string letters = "IXYZ";
  std::uniform_int_distribution<int> ld(0, 3);
  int checked = 0;
  while (checked < 200) {
    std::string a = "+", b = "+";
    for (int q = 0; q < 3; ++q) {
      a += letters[std::size_t(ld(rng))];
      b += letters[std::size_t(ld(rng))];
    }
    auto pa = PauliString::parse(a), pb = PauliString::parse(b);
    ComplexVector v = random_state(3, rng).amplitudes();
    EXPECT_LT((pa.apply(v) - pa.to_matrix() * v).norm(), 1e-12);
    if (!pa.commutes_with(pb)) {
      EXPECT_THROW(pauli_product(pa, pb), std::logic_error);
      continue;
    }
    EXPECT_LT(max_abs(pauli_product(pa, pb).to_matrix() - pa.to_matrix() * pb.to_matrix()), 1e-12) << a << " " << b;
    ++checked;
  }
  EXPECT_THROW(PauliString::parse("+XQ"), std::invalid_argument);
}

TEST(Measurement, DeterministicAndRandomBranches)
{
  Rng rng(43);
  auto t = tableau_init(1);
  auto r = t.measure(0, rng);
  EXPECT_TRUE(r.deterministic);
  EXPECT_EQ(r.outcome, 0);

  int ones = 0;
  const int shots = 10000;
  for (int s = 0; s < shots; ++s) {
    auto h = apply_gate(tableau_init(1), {GateKind::H, 0, -1});
    auto m = h.measure(0, rng);
    EXPECT_FALSE(m.deterministic);
    ones += m.outcome;
    // the post-measurement state is fixed by (-1)^outcome Z
    EXPECT_EQ(h.generators()[0].str(), m.outcome ? "-Z" : "+Z");
  }
  // chi-square with one degree of freedom, 99.9% quantile 10.83
  const double e = shots / 2.0;
  const double chi2 = (ones - e) * (ones - e) / e + (shots - ones - e) * (shots - ones - e) / e;
  EXPECT_LT(chi2, 10.83);
}

TEST(Measurement, BellOutcomesAlwaysEqual)
{
  auto h = tableau_histogram(circuit("H 0\nCX 0 1\nM 0\nM 1\n"), 2000, 9);
  for (const auto &[k, v] : h) EXPECT_TRUE(k == "00" || k == "11") << k;
  EXPECT_EQ(h.size(), 2u);
}

TEST(Measurement, DeterministicOutcomesMatchDenseProbabilities)
{
  Rng rng(44);
  int deterministic = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 4;
    auto c = random_clifford_circuit(n, 30, rng);
    Rng r1(derive_seed(44, std::uint64_t(trial)));
    auto t = run_tableau(c, r1).tableau;
    ComplexVector v = StateVector::basis(n, 0).amplitudes();
    for (const auto &g : c.gates) dense_apply(v, g, n);
    for (int q = 0; q < n; ++q) {
      auto copy = t;
      auto m = copy.measure(q, r1);
      const double p1 = probability_of_one(v, q, n);
      if (m.deterministic) {
        ++deterministic;
        EXPECT_NEAR(p1, double(m.outcome), 1e-12);
      } else {
        EXPECT_NEAR(p1, 0.5, 1e-12);
      }
    }
  }
  EXPECT_GT(deterministic, 50);
}

TEST(Dense, BasicStates)
{
  Rng rng(45);
  auto empty = dense_simulate(Circuit{1, {}}, rng);
  EXPECT_LT((empty.state.amplitudes() - StateVector::basis(1, 0).amplitudes()).norm(), 1e-15);
  auto bell = dense_simulate(circuit("H 0\nCX 0 1\n"), rng);
  ComplexVector expect = ComplexVector::Zero(4);
  expect(0) = expect(3) = 1 / std::sqrt(2.0);
  EXPECT_LT((bell.state.amplitudes() - expect).norm(), 1e-15);
  auto big = random_clifford_circuit(5, 50, rng);
  EXPECT_NEAR(dense_simulate(big, rng).state.norm(), 1.0, 1e-10);
  EXPECT_THROW(dense_simulate(Circuit{13, {}}, rng), std::invalid_argument);
}

TEST(Dense, OutcomeDistributionSumsToOne)
{
  Rng rng(46);
  for (int trial = 0; trial < 30; ++trial) {
    auto c = random_clifford_circuit(3, 20, rng, 2, true);
    double s = 0;
    for (const auto &[k, p] : dense_outcome_distribution(c)) {
      EXPECT_EQ(int(k.size()), c.measurement_count());
      s += p;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Compare, GhzGeneratorsFixDenseState)
{
  auto r = compare_simulators(circuit("H 0\nCX 0 1\nCX 1 2\n"), 0, 3);
  EXPECT_FALSE(r.has_measurements);
  EXPECT_EQ(r.generators.size(), 3u);
  EXPECT_LT(r.max_residual, 1e-9);
  EXPECT_TRUE(r.pass);
}

TEST(Compare, RandomCircuitsWithAndWithoutMeasurements)
{
  Rng rng(47);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 6;
    auto clean = random_clifford_circuit(n, 60, rng);
    EXPECT_TRUE(compare_simulators(clean, 0, std::uint64_t(trial)).pass);
    auto measured = random_clifford_circuit(n, 60, rng, 1, true);
    auto r = compare_simulators(measured, 4000, std::uint64_t(trial));
    EXPECT_TRUE(r.pass) << measured.str() << " tvd=" << r.tvd << " bound=" << r.tvd_bound;
    EXPECT_EQ(r.impossible_outcomes, 0);
  }
}

TEST(Compare, HistogramIsSeedDeterministic)
{
  auto c = circuit("H 0\nH 1\nCX 0 2\nM 0\nM 1\nM 2\n");
  EXPECT_EQ(tableau_histogram(c, 500, 7), tableau_histogram(c, 500, 7));
}

TEST(Parser, FormatAndErrors)
{
  auto c = parse_circuit("# header\nQUBITS 4\nH 0   # trailing\nS 1\nCX 0 1\nCNOT 1 2\nCZ 2 3\nM 3\n\n");
  EXPECT_EQ(c.n_qubits, 4);
  ASSERT_EQ(c.gates.size(), 6u);
  EXPECT_EQ(c.gates[3], (Gate{GateKind::CX, 1, 2}));
  EXPECT_EQ(parse_circuit("H 2\n").n_qubits, 3);
  EXPECT_THROW(parse_circuit("H 0\nT 1\n"), CircuitParseError);
  EXPECT_THROW(parse_circuit("CX 0\n"), CircuitParseError);
  EXPECT_THROW(parse_circuit("CX 1 1\n"), CircuitParseError);
  EXPECT_THROW(parse_circuit("H -1\n"), CircuitParseError);
  EXPECT_THROW(parse_circuit("QUBITS 2\nH 5\n"), CircuitParseError);
  try {
    parse_circuit("H 0\n\nFOO 1\n");
    FAIL();
  } catch (const CircuitParseError &e) {
    EXPECT_EQ(std::string(e.what()).rfind("line 3", 0), 0u);
  }
}

TEST(Membership, GeneratorsAndT)
{
  ComplexMatrix h = (pauli_x() + pauli_z()) / std::sqrt(2.0);
  EXPECT_TRUE(clifford_membership(h, 1));
  EXPECT_TRUE(clifford_membership(gate_matrix({GateKind::CX, 0, 1}, 2), 2));
  EXPECT_TRUE(clifford_membership(gate_matrix({GateKind::S, 0, -1}, 1), 1));
  ComplexMatrix t = ComplexMatrix::Identity(2, 2);
  t(1, 1) = std::polar(1.0, kPi / 4);
  EXPECT_FALSE(clifford_membership(t, 1));
  EXPECT_THROW(clifford_membership(2.0 * identity(2), 1), std::invalid_argument);
  EXPECT_THROW(clifford_membership(identity(4), 1), std::invalid_argument);
}

TEST(Membership, RandomCliffordCircuitsAreMembers)
{
  Rng rng(48);
  for (int trial = 0; trial < 20; ++trial) {
    auto c = random_clifford_circuit(3, 25, rng);
    ComplexMatrix u = identity(8);
    for (const auto &g : c.gates) u = gate_matrix(g, 3) * u;
    EXPECT_TRUE(clifford_membership(u, 3));
  }
}

TEST(Scaling, LargeTableauIsFast)
{
  Rng rng(49);
  auto c = random_clifford_circuit(64, 10000, rng);
  auto t0 = std::chrono::steady_clock::now();
  auto t = tableau_init(64);
  for (const auto &g : c.gates) t.apply(g);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 1.0);
  EXPECT_TRUE(t.invariants_hold());
}

#include "stabkit/stabkit.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace stabkit;

namespace {

struct Global {
  std::uint64_t seed = 1;
  std::string format; // empty: command default
  std::optional<double> tol;
};

// Input problems (unreadable files, malformed text, dimension mismatch) exit with 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string load(const std::string &path)
{
  try {
    return read_text_file(path);
  } catch (const std::exception &e) {
    throw InputError(e.what());
  }
}

ComplexMatrix load_matrix(const std::string &path)
{
  const std::string text = load(path);
  try {
    return matrix_from_json(parse_json(text));
  } catch (const std::exception &e) {
    throw InputError(path + ": " + e.what());
  }
}

Circuit load_circuit(const std::string &path)
{
  const std::string text = load(path);
  try {
    return parse_circuit(text);
  } catch (const std::exception &e) {
    throw InputError(path + ": " + e.what());
  }
}

void flatten(const Json &j, const std::string &prefix, std::ostream &os)
{
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os);
  } else {
    os << prefix << ": " << j.dump() << "\n";
  }
}

int emit(const Global &g, Json report, const std::string &command, bool pass, const std::string &text = {})
{
  Json out;
  out["command"] = command;
  out["seed"] = g.seed;
  for (auto it = report.begin(); it != report.end(); ++it) out[it.key()] = it.value();
  out["pass"] = pass;
  if (g.format == "text") {
    if (!text.empty()) std::cout << text;
    else flatten(out, "", std::cout);
  } else {
    std::cout << out.dump(2) << "\n";
  }
  return pass ? 0 : 1;
}

int cmd_verify_spectrum(const Global &g, int n, int trials)
{
  if (n < 1 || n > 10) throw InputError("verify-spectrum: --n must be in 1..10");
  if (trials < 1) throw InputError("verify-spectrum: --trials must be positive");
  const double tol = g.tol.value_or(kResidualTol);
  Json runs = Json::array();
  double worst_dev = 0, worst_res = 0;
  bool pass = true;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(g.seed, std::uint64_t(t)));
    std::vector<double> th(static_cast<std::size_t>(n));
    for (auto &x : th) x = uniform(rng, 0, 2 * kPi);
    auto r = verify_theorem_spectrum(th, tol);
    worst_dev = std::max(worst_dev, r.max_deviation);
    worst_res = std::max(worst_res, r.max_residual);
    pass = pass && r.pass;
    runs.push_back(Json{{"thetas", r.thetas}, {"max_deviation", r.max_deviation}, {"max_residual", r.max_residual}, {"pass", r.pass}});
  }
  Json rep{{"n", n}, {"trials", trials}, {"tol", tol}, {"max_deviation", worst_dev}, {"max_residual", worst_res}, {"runs", runs}};
  return emit(g, rep, "verify-spectrum", pass);
}

int cmd_search(const Global &g, int n, int k, bool discard_trivial)
{
  std::vector<StabilizationPattern> classes;
  try {
    classes = enumerate_patterns(n, k, discard_trivial);
  } catch (const std::invalid_argument &e) {
    throw InputError(e.what());
  }
  Json list = Json::array();
  std::ostringstream text;
  text << "qubits=" << n << " ops=" << k << " classes=" << classes.size() << "\n";
  for (const auto &p : classes) {
    list.push_back({{"structure", p.structure()}, {"pattern", pattern_to_json(p)}});
    text << p.structure() << "\n";
  }
  Json rep{{"qubits", n}, {"ops", k}, {"discard_trivial", discard_trivial}, {"classes", classes.size()}, {"patterns", list}};
  return emit(g, rep, "search", true, text.str());
}

int cmd_table(const Global &g, const std::string &id)
{
  if (id != "I" && id != "II" && id != "III") throw InputError("table: expected I, II or III");
  auto r = reproduce_table(id);
  return emit(g, to_json(r), "table", r.pass, format_table_text(r));
}

int cmd_conjecture(const Global &g, int n, long samples)
{
  if (n < 1 || n > 3) throw InputError("conjecture-scan: --qubits must be in 1..3");
  if (samples < 0) throw InputError("conjecture-scan: --samples must be non-negative");
  auto r = conjecture_scan(n, samples, g.seed);
  std::ostringstream text;
  text << "qubits=" << n << " samples=" << samples << " attempts=" << r.attempts << "\n";
  for (const auto &[k, v] : r.counts) text << std::left << std::setw(14) << k << v << "\n";
  if (n == 3) text << "four-operator probes=" << r.four_op_probes << " unique=" << r.four_op_unique << " minimal=" << r.four_op_minimal.size() << "\n";
  return emit(g, to_json(r), "conjecture-scan", r.pass, text.str());
}

int cmd_gk_sim(Global g, const std::string &file, long shots)
{
  auto c = load_circuit(file);
  if (shots < 1) throw InputError("gk-sim: --shots must be positive");
  if (g.format.empty()) g.format = "text";
  Json rep;
  std::ostringstream text;
  if (c.measurement_count() == 0) {
    Rng rng(g.seed);
    auto t = run_tableau(c, rng);
    Json gens = Json::array();
    for (const auto &p : t.tableau.generators()) {
      gens.push_back(p.str());
      text << p.str() << "\n";
    }
    rep["generators"] = gens;
  } else {
    auto h = tableau_histogram(c, shots, g.seed);
    rep["shots"] = shots;
    rep["histogram"] = h;
    for (const auto &[k, v] : h) text << k << " " << v << "\n";
  }
  return emit(g, rep, "gk-sim", true, text.str());
}

int cmd_gk_compare(const Global &g, const std::string &file, long shots)
{
  auto c = load_circuit(file);
  if (c.n_qubits > kDenseMaxQubits) throw InputError("gk-compare: dense reference limited to " + std::to_string(kDenseMaxQubits) + " qubits");
  if (shots < 1) throw InputError("gk-compare: --shots must be positive");
  auto r = compare_simulators(c, shots, g.seed, g.tol.value_or(1e-9));
  return emit(g, to_json(r), "gk-compare", r.pass);
}

int cmd_factorize(const Global &g, const std::string &file, int d, int n)
{
  auto u = load_matrix(file);
  if (d < 2 || n < 1) throw InputError("factorize: need --d >= 2 and --n >= 1");
  if (u.rows() != int_pow(d, n) || u.cols() != u.rows())
    throw InputError(file + ": dimension mismatch (expected " + std::to_string(int_pow(d, n)) + "x" + std::to_string(int_pow(d, n)) + ")");
  if (!is_unitary(u, 1e-8)) throw InputError(file + ": matrix is not unitary");
  const double tol = g.tol.value_or(kResidualTol);
  Json rep{{"d", d}, {"n", n}, {"tol", tol}};
  const bool preserving = is_product_preserving(u, d, n, tol, derive_seed(g.seed, 0));
  rep["product_preserving"] = preserving;
  if (!preserving) return emit(g, rep, "factorize", false);
  try {
    auto dec = factor_nonentangling(u, d, n, tol);
    Json dj = to_json(dec);
    for (auto it = dj.begin(); it != dj.end(); ++it) rep[it.key()] = it.value();
    std::ostringstream text;
    text << "permutation " << dec.permutation_cycles() << "\nphase " << dec.phase.real() << " " << dec.phase.imag() << "\nresidual " << dec.residual << "\n";
    for (std::size_t k = 0; k < dec.locals.size(); ++k) text << "local " << k << "\n" << dec.locals[k] << "\n";
    return emit(g, rep, "factorize", true, text.str());
  } catch (const std::runtime_error &e) {
    rep["error"] = e.what();
    return emit(g, rep, "factorize", false);
  }
}

int cmd_densify(const Global &g, const std::string &file, int d)
{
  auto u = load_matrix(file);
  if (d < 2) throw InputError("densify: --d must be at least 2");
  int n = 0;
  Eigen::Index dim = 1;
  while (dim < u.rows()) {
    dim *= d;
    ++n;
  }
  if (dim != u.rows() || u.cols() != u.rows() || n < 1)
    throw InputError(file + ": dimension mismatch (not a square matrix of size " + std::to_string(d) + "^n)");
  const double floor = g.tol.value_or(1e-8);
  try {
    auto r = densify(u, d, n, derive_seed(g.seed, 0));
    Json rep = to_json(r);
    rep["d"] = d;
    rep["n"] = n;
    rep["tol"] = floor;
    return emit(g, rep, "densify", r.min_entry > floor);
  } catch (const std::invalid_argument &e) {
    throw InputError(file + ": " + e.what());
  } catch (const std::runtime_error &e) {
    return emit(g, Json{{"d", d}, {"n", n}, {"error", e.what()}}, "densify", false);
  }
}

int cmd_xs(const Global &g)
{
  auto r = verify_xs(g.tol.value_or(1e-10));
  const bool pass = r.fixed[0] && r.fixed[1] && r.fixed[2] && !r.pauli_candidate;
  return emit(g, to_json(r), "xs-verify", pass);
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"stabkit: stabilizer-formalism verification toolkit"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "seed for all random draws")->capture_default_str();
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "text"}));
  double tol_value = 0;
  auto *tol_opt = app.add_option("--tol", tol_value, "override the command's main tolerance");

  int n = 3, trials = 10, k = 2, d = 2;
  long samples = 1000, shots = 1000;
  bool discard_trivial = false;
  std::string table_id, file;

  auto *vs = app.add_subcommand("verify-spectrum", "closed-form vs numeric spectrum of P_0 P_theta");
  vs->add_option("--n", n, "qubits")->capture_default_str();
  vs->add_option("--trials", trials, "random angle draws")->capture_default_str();

  auto *se = app.add_subcommand("search", "enumerate structural stabilization patterns");
  se->add_option("--qubits", n)->required();
  se->add_option("--ops", k)->required();
  se->add_flag("--discard-trivial", discard_trivial, "drop classes with an all-identity column");

  auto *tb = app.add_subcommand("table", "reproduce a stabilization table");
  tb->add_option("id", table_id, "I, II or III")->required();

  auto *cs = app.add_subcommand("conjecture-scan", "classify random uniquely stabilized states");
  cs->add_option("--qubits", n)->required();
  cs->add_option("--samples", samples)->capture_default_str();

  auto *gs = app.add_subcommand("gk-sim", "tableau simulation of a Clifford circuit");
  gs->add_option("--circuit", file)->required();
  gs->add_option("--shots", shots)->capture_default_str();

  auto *gc = app.add_subcommand("gk-compare", "tableau vs dense simulation");
  gc->add_option("--circuit", file)->required();
  gc->add_option("--shots", shots)->capture_default_str();

  auto *fa = app.add_subcommand("factorize", "factor a non-entangling gate into locals and a permutation");
  fa->add_option("--matrix", file)->required();
  fa->add_option("--d", d)->required();
  fa->add_option("--n", n)->required();

  auto *de = app.add_subcommand("densify", "make every entry of a unitary nonzero by local conjugation");
  de->add_option("--matrix", file)->required();
  de->add_option("--d", d)->capture_default_str();

  auto *xs = app.add_subcommand("xs-verify", "check the six-qubit XS witness");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }
  if (*tol_opt) g.tol = tol_value;

  try {
    if (*vs) return cmd_verify_spectrum(g, n, trials);
    if (*se) return cmd_search(g, n, k, discard_trivial);
    if (*tb) return cmd_table(g, table_id);
    if (*cs) return cmd_conjecture(g, n, samples);
    if (*gs) return cmd_gk_sim(g, file, shots);
    if (*gc) return cmd_gk_compare(g, file, shots);
    if (*fa) return cmd_factorize(g, file, d, n);
    if (*de) return cmd_densify(g, file, d);
    if (*xs) return cmd_xs(g);
  } catch (const InputError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

#pragma once

#include "binaryops.hpp"
#include "factorizer.hpp"
#include "gksim.hpp"
#include "linalg.hpp"
#include "patterns.hpp"
#include "xstab.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace stabkit {

using Json = nlohmann::ordered_json;

inline std::string read_text_file(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline Json parse_json(const std::string &text)
{
  try {
    return Json::parse(text);
  } catch (const Json::parse_error &e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------- matrices and states

inline Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

inline Json matrix_to_json(const ComplexMatrix &m)
{
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  Json e = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) e.push_back(to_json(m(r, c)));
  j["entries"] = std::move(e);
  return j;
}

inline ComplexMatrix matrix_from_json(const Json &j)
{
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
    throw std::invalid_argument("matrix JSON: expected object with rows, cols, entries");
  if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer() || !j["entries"].is_array())
    throw std::invalid_argument("matrix JSON: rows/cols must be integers and entries an array");
  const long rows = j["rows"].get<long>(), cols = j["cols"].get<long>();
  if (rows < 0 || cols < 0) throw std::invalid_argument("matrix JSON: negative dimension");
  const auto &e = j["entries"];
  if (long(e.size()) != rows * cols)
    throw std::invalid_argument("matrix JSON: dimension mismatch (" + std::to_string(e.size()) + " entries for " +
                                std::to_string(rows) + "x" + std::to_string(cols) + ")");
  ComplexMatrix m(rows, cols);
  for (long i = 0; i < rows * cols; ++i) {
    const auto &z = e[std::size_t(i)];
    cplx v;
    if (z.is_number()) v = z.get<double>();
    else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) v = {z[0].get<double>(), z[1].get<double>()};
    else throw std::invalid_argument("matrix JSON: entry " + std::to_string(i) + " is not [re, im]");
    m(i / cols, i % cols) = v;
  }
  return m;
}

inline Json state_to_json(const StateVector &v) { return matrix_to_json(v.amplitudes()); }

inline StateVector state_from_json(const Json &j)
{
  ComplexMatrix m = matrix_from_json(j);
  if (m.cols() != 1) throw std::invalid_argument("state JSON: dimension mismatch (cols must be 1)");
  return as_state(m.col(0));
}

// ---------------------------------------------------------------- patterns

inline Json pattern_to_json(const StabilizationPattern &p)
{
  Json j;
  j["n_qubits"] = p.n_qubits;
  Json ops = Json::array();
  for (const auto &row : p.operators) {
    Json r = Json::array();
    for (const auto &s : row) {
      Json slot;
      slot["kind"] = std::string(1, s.code());
      if (s.kind == SlotKind::FreeAxis && s.axis) {
        slot["theta"] = s.axis->theta;
        slot["phi"] = s.axis->phi;
      }
      slot["sign"] = s.sign;
      r.push_back(std::move(slot));
    }
    ops.push_back(std::move(r));
  }
  j["operators"] = std::move(ops);
  return j;
}

inline StabilizationPattern pattern_from_json(const Json &j)
{
  if (!j.is_object() || !j.contains("n_qubits") || !j.contains("operators") || !j["operators"].is_array())
    throw std::invalid_argument("pattern JSON: expected object with n_qubits and operators");
  StabilizationPattern p;
  p.n_qubits = j["n_qubits"].get<int>();
  for (const auto &row : j["operators"]) {
    if (!row.is_array()) throw std::invalid_argument("pattern JSON: operator row must be an array");
    std::vector<PatternSlot> r;
    for (const auto &slot : row) {
      const std::string kind = slot.value("kind", "");
      const int sign = slot.value("sign", 1);
      if (kind == "Z") r.push_back(PatternSlot::z(sign));
      else if (kind == "I") r.push_back(PatternSlot::identity());
      else if (kind == "A") {
        if (slot.contains("theta")) r.push_back(PatternSlot::free(slot["theta"].get<double>(), slot.value("phi", 0.0), sign));
        else r.push_back({SlotKind::FreeAxis, std::nullopt, sign});
      } else throw std::invalid_argument("pattern JSON: unknown slot kind '" + kind + "'");
    }
    p.operators.push_back(std::move(r));
  }
  p.validate();
  return p;
}

// ---------------------------------------------------------------- reports

inline Json to_json(const SpectrumReport &r)
{
  Json j;
  j["thetas"] = r.thetas;
  j["predicted"] = r.predicted;
  Json num = Json::array();
  for (auto z : r.numeric) num.push_back(to_json(z));
  j["numeric"] = std::move(num);
  j["max_deviation"] = r.max_deviation;
  j["max_residual"] = r.max_residual;
  j["tol"] = r.tol;
  j["pass"] = r.pass;
  return j;
}

inline Json to_json(const TableReport &r)
{
  Json j;
  j["table"] = r.table;
  j["classes"] = r.classes;
  if (r.expected_classes >= 0) j["expected_classes"] = r.expected_classes;
  j["tol"] = r.tol;
  j["overlap_tol"] = r.overlap_tol;
  Json rows = Json::array();
  for (const auto &c : r.checks) {
    Json x;
    x["row"] = c.row;
    x["operators"] = c.operators;
    x["condition"] = c.condition;
    x["params"] = c.params;
    x["expected_dim"] = c.expected_dim;
    x["dim"] = c.dim;
    if (!c.expected_state.empty()) {
      x["expected_state"] = c.expected_state;
      x["overlap"] = c.overlap;
    }
    x["pass"] = c.pass;
    rows.push_back(std::move(x));
  }
  j["checks"] = std::move(rows);
  if (!r.orbit.empty()) {
    Json o = Json::array();
    for (const auto &e : r.orbit) o.push_back({{"params", e.params}, {"dim", e.dim}});
    j["orbit"] = std::move(o);
  }
  j["pass"] = r.pass;
  return j;
}

inline std::string format_table_text(const TableReport &r)
{
  std::ostringstream os;
  os << "Table " << r.table << "  classes=" << r.classes;
  if (r.expected_classes >= 0) os << " (expected " << r.expected_classes << ")";
  os << "\n";
  std::size_t wop = 9, wpar = 6, wcond = 9;
  for (const auto &c : r.checks) {
    wop = std::max(wop, c.operators.size());
    wpar = std::max(wpar, c.params.size());
    wcond = std::max(wcond, c.condition.size());
  }
  os << std::left << std::setw(4) << "row" << "  " << std::setw(int(wop)) << "operators" << "  " << std::setw(int(wcond)) << "condition"
     << "  " << std::setw(int(wpar)) << "params" << "  exp  dim  state                  overlap      result\n";
  for (const auto &c : r.checks) {
    os << std::left << std::setw(4) << c.row << "  " << std::setw(int(wop)) << c.operators << "  " << std::setw(int(wcond)) << c.condition
       << "  " << std::setw(int(wpar)) << c.params << "  " << std::setw(3) << c.expected_dim << "  " << std::setw(3) << c.dim << "  "
       << std::setw(21) << (c.expected_state.empty() ? "-" : c.expected_state) << "  ";
    if (c.overlap >= 0) os << std::setw(11) << std::setprecision(9) << std::fixed << c.overlap << std::defaultfloat;
    else os << std::setw(11) << "-";
    os << "  " << (c.pass ? "pass" : "FAIL") << "\n";
  }
  for (const auto &e : r.orbit) os << "orbit  " << e.params << "  dim=" << e.dim << "\n";
  os << (r.pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

inline Json to_json(const ConjectureReport &r)
{
  Json j;
  j["n_qubits"] = r.n_qubits;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["tol"] = r.tol;
  j["attempts"] = r.attempts;
  j["unique_found"] = r.unique_found;
  j["duplicate_rejections"] = r.duplicate_rejections;
  Json counts;
  for (const char *k : {"product", "bell-product", "ghz", "other"}) counts[k] = r.counts.at(k);
  j["counts"] = std::move(counts);
  Json ce = Json::array();
  for (const auto &c : r.counterexamples) ce.push_back({{"attempt", c.attempt}, {"pattern", pattern_to_json(c.pattern)}, {"state", state_to_json(c.state)}});
  j["counterexamples"] = std::move(ce);
  j["four_op_probes"] = r.four_op_probes;
  j["four_op_unique"] = r.four_op_unique;
  Json fm = Json::array();
  for (const auto &c : r.four_op_minimal)
    fm.push_back({{"probe", c.attempt}, {"class", to_string(c.lu_class)}, {"pattern", pattern_to_json(c.pattern)}});
  j["four_op_minimal"] = std::move(fm);
  j["pass"] = r.pass;
  return j;
}

inline Json to_json(const CompareReport &r)
{
  Json j;
  j["has_measurements"] = r.has_measurements;
  j["residual_tol"] = r.residual_tol;
  if (!r.has_measurements) {
    j["generators"] = r.generators;
    j["max_residual"] = r.max_residual;
  } else {
    j["shots"] = r.shots;
    j["support"] = r.support;
    j["tvd"] = r.tvd;
    j["tvd_bound"] = r.tvd_bound;
    j["impossible_outcomes"] = r.impossible_outcomes;
    j["tableau_histogram"] = r.tableau_hist;
    j["dense_histogram"] = r.dense_hist;
  }
  j["pass"] = r.pass;
  return j;
}

inline Json to_json(const TrivialGateDecomposition &dec)
{
  Json j;
  Json locals = Json::array();
  for (const auto &l : dec.locals) locals.push_back(matrix_to_json(l));
  j["locals"] = std::move(locals);
  j["permutation"] = dec.permutation_cycles();
  j["phase"] = to_json(dec.phase);
  j["residual"] = dec.residual;
  return j;
}

inline Json to_json(const DensifyResult &r)
{
  Json j;
  j["t"] = r.t;
  j["min_entry"] = r.min_entry;
  j["V"] = matrix_to_json(r.V);
  return j;
}

inline Json to_json(const XsReport &r)
{
  Json j;
  j["fixed"] = r.fixed;
  j["residuals"] = r.residuals;
  j["orders"] = r.orders;
  j["joint_plus_one_dim"] = r.joint_plus_one_dim;
  j["joint_overlap"] = r.joint_overlap;
  j["max_commutator_on_state"] = r.max_commutator_on_state;
  j["commute_globally"] = r.commute_globally;
  j["pauli_candidate"] = r.pauli_candidate;
  j["sign_degree"] = r.sign_degree;
  j["tol"] = r.tol;
  return j;
}

} // namespace stabkit

#pragma once

#include "linalg.hpp"

#include <Eigen/Geometry>

namespace stabkit {

// Point on the Bloch sphere labelling A = cos(theta) Z + sin(theta)(cos(phi) X + sin(phi) Y).
struct BinaryAxis {
  double theta = 0.0;
  double phi = 0.0;

  static double wrap(double a)
  {
    double r = std::fmod(a, 2 * kPi);
    if (r < 0) r += 2 * kPi;
    if (r >= 2 * kPi) r -= 2 * kPi;
    return r;
  }

  BinaryAxis normalized() const { return {wrap(theta), wrap(phi)}; }

  Eigen::Vector3d bloch() const
  {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
  }

  // theta in [0, pi], phi in [0, 2pi); phi is 0 at the poles
  static BinaryAxis from_bloch(const Eigen::Vector3d &v, double pole_tol = 1e-12)
  {
    Eigen::Vector3d u = v.normalized();
    double th = std::acos(std::clamp(u.z(), -1.0, 1.0));
    double rho = std::hypot(u.x(), u.y());
    double ph = rho < pole_tol ? 0.0 : wrap(std::atan2(u.y(), u.x()));
    return {th, ph};
  }
};

using SignVector = std::vector<int>;

inline ComplexMatrix binary_axis_matrix(double theta, double phi = 0.0)
{
  const double c = std::cos(theta), s = std::sin(theta);
  ComplexMatrix m(2, 2);
  m << c, s * std::polar(1.0, -phi), s * std::polar(1.0, phi), -c;
  return m;
}

inline ComplexMatrix binary_axis_matrix(const BinaryAxis &a) { return binary_axis_matrix(a.theta, a.phi); }

// exp(-i alpha Y / 2); conjugating Z by it gives A_{alpha, 0}.
inline ComplexMatrix ry(double alpha)
{
  ComplexMatrix m(2, 2);
  m << std::cos(alpha / 2), -std::sin(alpha / 2), std::sin(alpha / 2), std::cos(alpha / 2);
  return m;
}

inline ComplexMatrix plus_one_projector(const ComplexMatrix &o, double tol = 1e-10)
{
  if (!is_involution(o, tol)) throw std::invalid_argument("plus_one_projector: operator is not an involution");
  return 0.5 * (identity(o.rows()) + o);
}

// P_{theta_1..theta_n} = (I + A_theta_1 x ... x A_theta_n) / 2 with XZ-plane axes.
inline ComplexMatrix xz_product_projector(const std::vector<double> &thetas)
{
  std::vector<ComplexMatrix> f;
  for (double t : thetas) f.push_back(binary_axis_matrix(t, 0.0));
  return plus_one_projector(tensor_product(f));
}

inline void require_signs(const SignVector &j, const char *who)
{
  if (j.empty()) throw std::invalid_argument(std::string(who) + ": empty sign vector");
  for (int s : j)
    if (s != 1 && s != -1) throw std::invalid_argument(std::string(who) + ": signs must be +1 or -1");
}

// Amplitude of |k> is Re[prod (i j_l)^{k_l}]: zero for odd weight, else (-1)^{|k|/2} prod_{k_l=1} j_l.
inline StateVector psi_state(const SignVector &j)
{
  require_signs(j, "psi_state");
  const int n = int(j.size());
  auto v = StateVector::zero(n);
  for (Eigen::Index k = 0; k < v.dim(); ++k) {
    int weight = 0, sign = 1;
    for (int l = 0; l < n; ++l)
      if ((k >> (n - 1 - l)) & 1) {
        ++weight;
        sign *= j[std::size_t(l)];
      }
    if (weight % 2 == 0) v[k] = double(weight / 2 % 2 == 0 ? sign : -sign);
  }
  return v;
}

inline StateVector normalize_psi(const StateVector &v) { return {v.n_qubits(), v.amplitudes() / std::sqrt(std::ldexp(1.0, v.n_qubits() - 1))}; }

// All sign vectors with the first entry fixed to +1, in lexicographic order (+1 before -1).
inline std::vector<SignVector> sign_vectors(int n)
{
  if (n < 1) throw std::invalid_argument("sign_vectors: n must be positive");
  std::vector<SignVector> out;
  for (std::uint64_t m = 0; m < (std::uint64_t(1) << (n - 1)); ++m) {
    SignVector j(std::size_t(n), 1);
    for (int l = 1; l < n; ++l)
      if ((m >> (n - 1 - l)) & 1) j[std::size_t(l)] = -1;
    out.push_back(j);
  }
  return out;
}

inline double sign_dot(const SignVector &j, const std::vector<double> &thetas)
{
  double s = 0;
  for (std::size_t l = 0; l < j.size(); ++l) s += j[l] * thetas[l];
  return s;
}

// Closed form for the spectrum of P_{0..0} P_{theta}, sorted descending.
inline std::vector<double> theorem_spectrum(const std::vector<double> &thetas)
{
  const int n = int(thetas.size());
  if (n < 1) throw std::invalid_argument("theorem_spectrum: need at least one angle");
  std::vector<double> out(std::size_t(1) << (n - 1), 0.0);
  for (const auto &j : sign_vectors(n)) out.push_back(0.5 * (1.0 + std::cos(sign_dot(j, thetas))));
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

struct SpectrumReport {
  std::vector<double> thetas;
  std::vector<double> predicted;
  std::vector<cplx> numeric;
  double max_deviation = 0.0;
  std::vector<double> eigvec_residuals; // one per sign vector, relative
  double max_residual = 0.0;
  double tol = kResidualTol;
  bool pass = false;
};

inline SpectrumReport verify_theorem_spectrum(const std::vector<double> &thetas, double tol = kResidualTol)
{
  const int n = int(thetas.size());
  if (n < 1 || n > 10) throw std::invalid_argument("verify_theorem_spectrum: need 1 <= n <= 10");
  SpectrumReport rep;
  rep.thetas = thetas;
  rep.tol = tol;
  rep.predicted = theorem_spectrum(thetas);

  const ComplexMatrix m = xz_product_projector(std::vector<double>(std::size_t(n), 0.0)) * xz_product_projector(thetas);
  auto ed = eigen_decompose(m);
  rep.numeric = ed.values;
  std::sort(rep.numeric.begin(), rep.numeric.end(), [](cplx a, cplx b) { return a.real() > b.real(); });
  for (std::size_t i = 0; i < rep.predicted.size(); ++i)
    rep.max_deviation = std::max(rep.max_deviation, std::abs(rep.numeric[i] - rep.predicted[i]));

  for (const auto &j : sign_vectors(n)) {
    const ComplexVector psi = psi_state(j).amplitudes();
    const double lambda = 0.5 * (1.0 + std::cos(sign_dot(j, thetas)));
    const double r = (m * psi - lambda * psi).norm() / psi.norm();
    rep.eigvec_residuals.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);
  }
  rep.pass = rep.max_deviation < tol && rep.max_residual < tol;
  return rep;
}

// O_k = X (qubit 1) x ... x (-j_k X) (qubit k) x ... with Z on every other qubit, k = 2..n.
inline std::vector<ComplexMatrix> xz_stabilizer_family(const SignVector &j)
{
  require_signs(j, "xz_stabilizer_family");
  const int n = int(j.size());
  if (n < 2) throw std::invalid_argument("xz_stabilizer_family: need n >= 2");
  std::vector<ComplexMatrix> ops;
  for (int k = 1; k < n; ++k) {
    std::vector<ComplexMatrix> f(std::size_t(n), pauli_z());
    f[0] = pauli_x();
    f[std::size_t(k)] = -double(j[std::size_t(k)]) * pauli_x();
    ops.push_back(tensor_product(f));
  }
  return ops;
}

} // namespace stabkit

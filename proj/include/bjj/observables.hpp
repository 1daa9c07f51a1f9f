#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bjj/dynamics.hpp"
#include "bjj/hilbert.hpp"
#include "bjj/noise.hpp"

namespace bjj {

/// Ramsey visibility (2/N) tr(rho J_x).
template <typename Real>
Real visibility(const DensityMatrix<Real>& rho) {
  const int atoms = rho.basis().atoms();
  return 2 * expectation(rho, spin_x<Real>(atoms)) / atoms;
}

/// e^{-a^2(t)/2} cos(lambda_bar t) cos^{N-1}(chi t)
template <typename Real>
Real visibility_noisy_closed_form(const QuenchSpec<Real>& spec, const NoiseModel<Real>& model, Real t) {
  return std::exp(-variance_a2(model, t) / 2) * std::cos(model.lambda_bar() * t) *
         visibility_closed_form(spec, t);
}

/// (1/2) sum |eig(a - b)|
template <typename Real>
Real trace_distance(const DensityMatrix<Real>& a, const DensityMatrix<Real>& b) {
  detail::require_same_basis(a.basis(), b.basis(), "trace_distance");
  const CMatrix<Real> diff = a.elements() - b.elements();
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(diff, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum() / 2;
}

/// Frobenius norm of the off-diagonal (inter-component) part.
template <typename Derived>
auto offdiag_weight(const Eigen::MatrixBase<Derived>& rho_od) {
  return rho_od.norm();
}

/// Jacobi theta_3(z, nome) = 1 + 2 sum_{k>=1} nome^{k^2} cos(2 k z).
template <typename Real>
Real theta3(Real z, Real nome) {
  if (!(nome >= 0 && nome < 1)) throw DomainError("theta3: nome must lie in [0, 1)");
  if (nome == 0) return 1;
  const Real log_nome = std::log(nome);
  Real sum = 1;
  for (int k = 1;; ++k) {
    const Real term = std::exp(log_nome * k * k);
    if (term < Real(1e-15)) break;
    sum += 2 * term * std::cos(2 * k * z);
  }
  return sum;
}

/// Large-N approximation of the Husimi function of the Fock mixture:
/// ((1 + sin th)/2)^{N + 1/2} / sqrt(pi N sin th).
template <typename Real>
Real q_infinity_approx(int atoms, Real theta) {
  constexpr Real pi = std::numbers::pi_v<Real>;
  const Real s = std::sin(theta);
  if (!(theta > 0 && theta < pi) || !(s > 0)) throw DomainError("q_infinity_approx: theta must lie in (0, pi)");
  return std::exp((atoms + Real(0.5)) * std::log((1 + s) / 2)) / std::sqrt(pi * atoms * s);
}

/// Exact Husimi function of the steady state at polar angle theta (phi independent).
template <typename Real>
Real q_infinity_exact(int atoms, Real theta) {
  return husimi(steady_state<Real>(atoms), theta, Real(0));
}

/// Approximate Husimi function of the dephased diagonal part of the q = 2 cat:
///   Q_inf(theta) theta3(-phi - pi lambda_bar / (2 chi), e^{-2 a2^2})
/// with theta3(z, nome) = 1 + 2 sum nome^{k^2} cos(2 k z). `a2` is the noise
/// amplitude a(t_2), not its square. Valid for N >> 1 and a2 >> N^{-1/4}.
template <typename Real>
Real husimi_q2_approx(int atoms, Real a2, Real lambda_bar, Real chi, Real theta, Real phi) {
  constexpr Real pi = std::numbers::pi_v<Real>;
  const Real z = -phi - pi * lambda_bar / (2 * chi);
  return q_infinity_approx(atoms, theta) * theta3(z, std::exp(-2 * a2 * a2));
}

/// Human-readable notes when (N, a2) sits outside the approximation's regime.
inline std::vector<std::string> husimi_q2_approx_warnings(int atoms, double a2) {
  std::vector<std::string> notes;
  if (atoms < 20) notes.push_back("husimi_q2_approx: N < 20, large-N approximation is rough");
  if (a2 < 2 * std::pow(static_cast<double>(atoms), -0.25))
    notes.push_back("husimi_q2_approx: a2 is not >> N^{-1/4}, binomial overlap not negligible");
  return notes;
}

template <typename Real = double>
struct HusimiScan {
  std::vector<Real> theta;
  std::vector<Real> phi;
  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> values;  ///< rows theta, cols phi
};

template <typename Real>
HusimiScan<Real> husimi_scan(const DensityMatrix<Real>& rho, std::span<const Real> theta,
                             std::span<const Real> phi) {
  HusimiScan<Real> scan{{theta.begin(), theta.end()}, {phi.begin(), phi.end()},
                        Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>(theta.size(), phi.size())};
  for (std::size_t i = 0; i < theta.size(); ++i)
    for (std::size_t j = 0; j < phi.size(); ++j)
      scan.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = husimi(rho, theta[i], phi[j]);
  return scan;
}

template <typename Real = double>
struct FisherResult {
  Real value;               ///< F_Q along `direction`
  Vector3<Real> direction;  ///< generator axis (optimal when none was requested)
  Matrix3<Real> form;       ///< F_Q(n) = n^T form n
};

/// Quantum Fisher information for rotations generated by n.J.
///
/// With rho = sum p_i |i><i|, the quadratic form is
///   form_ab = 2 sum_{p_i + p_j > 1e-12} (p_i - p_j)^2 / (p_i + p_j) Re[<i|J_a|j><j|J_b|i>].
/// Without a direction, the largest eigenpair of the form gives the optimum.
template <typename Real>
FisherResult<Real> fisher_information(const DensityMatrix<Real>& rho,
                                      std::optional<Vector3<Real>> direction = std::nullopt) {
  const int atoms = rho.basis().atoms();
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(rho.elements());
  const auto& p = solver.eigenvalues();
  const auto& v = solver.eigenvectors();
  const auto d = p.size();

  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> weight(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) {
      const Real s = p(i) + p(j);
      weight(i, j) = s > Real(1e-12) ? (p(i) - p(j)) * (p(i) - p(j)) / s : Real(0);
    }

  const CMatrix<Real> jx = v.adjoint() * spin_x<Real>(atoms).elements() * v;
  const CMatrix<Real> jy = v.adjoint() * spin_y<Real>(atoms).elements() * v;
  const CMatrix<Real> jz = v.adjoint() * spin_z<Real>(atoms).elements() * v;
  const std::array<const CMatrix<Real>*, 3> gens{&jx, &jy, &jz};

  Matrix3<Real> form;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      // <j|J_b|i> = conj(<i|J_b|j>)
      const Real s = 2 * (weight.array() * (gens[a]->array() * gens[b]->array().conjugate()).real()).sum();
      form(a, b) = s;
      form(b, a) = s;
    }

  if (direction) {
    if (std::abs(direction->norm() - Real(1)) > Real(1e-12))
      throw DomainError("fisher_information: direction must be a unit vector");
    return {direction->dot(form * *direction), *direction, form};
  }
  Eigen::SelfAdjointEigenSolver<Matrix3<Real>> es(form);
  Vector3<Real> best = es.eigenvectors().col(2);
  Eigen::Index lead;
  best.cwiseAbs().maxCoeff(&lead);
  if (best(lead) < 0) best = -best;
  return {es.eigenvalues()(2), best, form};
}

template <typename Real>
FisherResult<Real> fisher_information(const DensityMatrix<Real>& rho, const Vector3<Real>& direction) {
  return fisher_information(rho, std::optional<Vector3<Real>>(direction));
}

/// Delta theta / Delta theta_SN = sqrt(N / F_Q), in dB (10 log10).
template <typename Real>
Real sensitivity_gain_db(int atoms, Real fisher) {
  return 10 * std::log10(std::sqrt(static_cast<Real>(atoms) / fisher));
}

}  // namespace bjj

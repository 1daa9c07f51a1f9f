#pragma once

// Noiseless quench dynamics under H = chi J_z^2 - lambda_bar J_z.
//
// The Hamiltonian is diagonal in the Fock basis, so evolution is a phase
// e^{-i (chi n^2 - lambda_bar n) t} per amplitude. At t_q = T/(2q), T = 2 pi/chi,
// the phase state |alpha = 1> has become a superposition of q phase states.

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "bjj/hilbert.hpp"

namespace bjj {

template <typename Real = double>
struct QuenchSpec {
  int atoms;
  Real chi;         ///< interaction, rad/s
  Real lambda_bar;  ///< deterministic detuning, rad/s

  QuenchSpec(int atoms_, Real chi_, Real lambda_bar_ = 0)
      : atoms(atoms_), chi(chi_), lambda_bar(lambda_bar_) {
    if (atoms < 1) throw DomainError("QuenchSpec: atom number must be >= 1");
    if (!(chi > 0)) throw DomainError("QuenchSpec: chi must be > 0");
  }

  Real revival_time() const { return 2 * std::numbers::pi_v<Real> / chi; }

  friend bool operator==(const QuenchSpec&, const QuenchSpec&) = default;
};

template <typename Real = double>
class CatSpec {
 public:
  CatSpec(QuenchSpec<Real> quench, int components) : quench_(quench), components_(components) {
    if (components < 2 || components % 2 != 0) {
      std::ostringstream msg;
      msg << "CatSpec: q = " << components << " unsupported (only even q >= 2)";
      throw UnsupportedConfiguration(msg.str());
    }
    if (quench.atoms % 2 != 0) {
      std::ostringstream msg;
      msg << "CatSpec: N = " << quench.atoms << " unsupported (only even N)";
      throw UnsupportedConfiguration(msg.str());
    }
  }

  const QuenchSpec<Real>& quench() const { return quench_; }
  int atoms() const { return quench_.atoms; }
  int components() const { return components_; }

  /// t_q = T / (2q)
  Real formation_time() const { return quench_.revival_time() / (2 * components_); }

  /// c_k = e^{i pi k (k + N) / q}
  std::complex<Real> coefficient(int k) const {
    const Real pi = std::numbers::pi_v<Real>;
    return std::polar(Real(1), pi * Real(k) * Real(k + atoms()) / Real(components_));
  }

 private:
  QuenchSpec<Real> quench_;
  int components_;
};

template <typename Real>
PureState<Real> evolve_noiseless(const PureState<Real>& state, const QuenchSpec<Real>& spec, Real t) {
  detail::require_same_basis(state.basis(), FockBasis(spec.atoms), "evolve_noiseless");
  if (t < 0) throw DomainError("evolve_noiseless: t must be >= 0");
  const auto& basis = state.basis();
  CVector<Real> a = state.amplitudes();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Real n = basis.template imbalance<Real>(i);
    a(i) *= std::polar(Real(1), -(spec.chi * n * n - spec.lambda_bar * n) * t);
  }
  return PureState<Real>(basis, std::move(a));
}

/// nu0(t) = cos^{N-1}(chi t)
template <typename Real>
Real visibility_closed_form(const QuenchSpec<Real>& spec, Real t) {
  return std::pow(std::cos(spec.chi * t), spec.atoms - 1);
}

/// Explicit q-component superposition u0 sum_k c_k |pi/2, 2 pi k/q - lambda_bar t_q>.
///
/// |u0|^2 = 1/q; its phase is chosen so the overlap with the directly evolved
/// phase state is real and positive.
template <typename Real>
PureState<Real> cat_state(const CatSpec<Real>& cat) {
  constexpr Real pi = std::numbers::pi_v<Real>;
  const int q = cat.components();
  const int atoms = cat.atoms();
  const Real tq = cat.formation_time();
  const Real drift = cat.quench().lambda_bar * tq;

  CVector<Real> sum = CVector<Real>::Zero(atoms + 1);
  for (int k = 0; k < q; ++k) {
    const auto phase_state = make_coherent<Real>(atoms, pi / 2, 2 * pi * k / q - drift);
    sum += cat.coefficient(k) * phase_state.amplitudes();
  }
  sum /= std::sqrt(static_cast<Real>(q));

  const auto direct =
      evolve_noiseless(make_coherent<Real>(atoms, pi / 2, 0), cat.quench(), tq).amplitudes();
  const std::complex<Real> ov = sum.dot(direct);
  if (std::abs(ov) > 0) sum *= ov / std::abs(ov);
  return PureState<Real>(FockBasis(atoms), std::move(sum));
}

/// Term rho_{kk'} of the cat's density matrix in the Fock basis:
///   (1/q) 2^-N binom^{1/2} binom'^{1/2} e^{-2 i pi (k n - k' n')/q} e^{i pi (k^2 - k'^2)/q}
/// times the drift factor e^{i lambda_bar t_q (n - n')} (unity for lambda_bar = 0).
template <typename Real>
CMatrix<Real> cat_density_terms(const CatSpec<Real>& cat, int k, int k_prime) {
  const int q = cat.components();
  if (k < 0 || k >= q || k_prime < 0 || k_prime >= q) {
    std::ostringstream msg;
    msg << "cat_density_terms: component indices (" << k << ", " << k_prime << ") outside [0, " << q
        << ")";
    throw DomainError(msg.str());
  }
  constexpr Real pi = std::numbers::pi_v<Real>;
  const FockBasis basis(cat.atoms());
  const auto amp = binomial_distribution<Real>(cat.atoms()).cwiseSqrt().eval();
  const Real drift = cat.quench().lambda_bar * cat.formation_time();
  const Real global = pi * Real(k * k - k_prime * k_prime) / q;
  const auto d = basis.dimension();
  CMatrix<Real> m(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const Real np = basis.template imbalance<Real>(j);
    for (Eigen::Index i = 0; i < d; ++i) {
      const Real n = basis.template imbalance<Real>(i);
      const Real phase = -2 * pi * (k * n - k_prime * np) / q + global + drift * (n - np);
      m(i, j) = std::polar(amp(i) * amp(j) / q, phase);
    }
  }
  return m;
}

template <typename Real>
struct CatParts {
  CMatrix<Real> diagonal;      ///< entries with n' = n (mod q)
  CMatrix<Real> off_diagonal;  ///< the complement
};

/// Splits a Fock-basis matrix by the residue of n - n' modulo q.
///
/// Every entry goes to exactly one part, so diagonal + off_diagonal reproduces
/// the input bit for bit.
template <typename Derived>
auto decompose(const Eigen::MatrixBase<Derived>& rho, int q) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  if (q < 1) throw DomainError("decompose: q must be >= 1");
  const auto d = rho.rows();
  CatParts<Real> parts{CMatrix<Real>::Zero(d, rho.cols()), CMatrix<Real>::Zero(d, rho.cols())};
  for (Eigen::Index j = 0; j < rho.cols(); ++j)
    for (Eigen::Index i = 0; i < d; ++i) {
      if ((i - j) % q == 0)
        parts.diagonal(i, j) = rho(i, j);
      else
        parts.off_diagonal(i, j) = rho(i, j);
    }
  return parts;
}

template <typename Real>
CatParts<Real> decompose(const DensityMatrix<Real>& rho, int q) {
  return decompose(rho.elements(), q);
}

}  // namespace bjj

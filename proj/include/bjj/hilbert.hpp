#pragma once

// Fock-basis state space of N bosons in two modes (the spin-N/2 representation).
//
// Basis index i = n + N/2 runs over 0..N, where n is the eigenvalue of the
// number-imbalance operator J_z. Everything is stored dense: for N up to a few
// thousand an (N+1)x(N+1) complex matrix is small.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>

#include "bjj/errors.hpp"

namespace bjj {

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using Vector3 = Eigen::Matrix<Real, 3, 1>;
template <typename Real>
using Matrix3 = Eigen::Matrix<Real, 3, 3>;

class FockBasis {
 public:
  explicit FockBasis(int atoms) : atoms_(atoms) {
    if (atoms < 1) throw DomainError("FockBasis: atom number must be >= 1");
  }

  int atoms() const { return atoms_; }
  Eigen::Index dimension() const { return atoms_ + 1; }

  /// J_z eigenvalue n of basis index i.
  template <typename Real = double>
  Real imbalance(Eigen::Index i) const {
    return static_cast<Real>(i) - static_cast<Real>(atoms_) / 2;
  }

  /// Basis index of the Fock state with J_z eigenvalue n; n + N/2 must be an integer in [0, N].
  Eigen::Index index(double n) const {
    const double shifted = n + 0.5 * atoms_;
    const double rounded = std::round(shifted);
    if (std::abs(shifted - rounded) > 1e-9 || rounded < 0 || rounded > atoms_) {
      std::ostringstream msg;
      msg << "FockBasis: n = " << n << " is not an imbalance eigenvalue for N = " << atoms_;
      throw DomainError(msg.str());
    }
    return static_cast<Eigen::Index>(rounded);
  }

  friend bool operator==(const FockBasis&, const FockBasis&) = default;

 private:
  int atoms_;
};

namespace detail {

inline void require_same_basis(const FockBasis& a, const FockBasis& b, const char* where) {
  if (a != b) {
    std::ostringstream msg;
    msg << where << ": basis mismatch (N = " << a.atoms() << " vs N = " << b.atoms() << ")";
    throw DomainError(msg.str());
  }
}

template <typename Real>
Real log_binomial(int n, int k) {
  return std::lgamma(Real(n + 1)) - std::lgamma(Real(k + 1)) - std::lgamma(Real(n - k + 1));
}

}  // namespace detail

/// Binomial imbalance distribution P(n) = 2^-N binom(N, n+N/2), indexed by basis index.
template <typename Real = double>
Eigen::Matrix<Real, Eigen::Dynamic, 1> binomial_distribution(int atoms) {
  const FockBasis basis(atoms);
  Eigen::Matrix<Real, Eigen::Dynamic, 1> p(basis.dimension());
  const Real log_half = std::log(Real(0.5));
  for (Eigen::Index i = 0; i < p.size(); ++i)
    p(i) = std::exp(detail::log_binomial<Real>(atoms, static_cast<int>(i)) + atoms * log_half);
  return p;
}

template <typename Real = double>
class PureState {
 public:
  using Amplitudes = CVector<Real>;

  PureState(FockBasis basis, Amplitudes amplitudes)
      : basis_(basis), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != basis_.dimension())
      throw DomainError("PureState: amplitude vector length differs from N+1");
  }

  const FockBasis& basis() const { return basis_; }
  const Amplitudes& amplitudes() const { return amplitudes_; }
  std::complex<Real> operator[](Eigen::Index i) const { return amplitudes_(i); }
  Real norm() const { return amplitudes_.norm(); }

 private:
  FockBasis basis_;
  Amplitudes amplitudes_;
};

/// Density matrix on a Fock basis.
///
/// Construction through from_pure() or checked() guarantees the invariants.
/// unchecked() is for results of maps that preserve them by construction
/// (the dephasing channel, phase averages); validate() re-checks on demand and
/// costs one Hermitian eigendecomposition.
template <typename Real = double>
class DensityMatrix {
 public:
  using Matrix = CMatrix<Real>;

  static DensityMatrix from_pure(const PureState<Real>& psi) {
    const auto& a = psi.amplitudes();
    return DensityMatrix(psi.basis(), a * a.adjoint());
  }

  static DensityMatrix checked(FockBasis basis, Matrix elements) {
    DensityMatrix rho(basis, std::move(elements));
    rho.validate();
    return rho;
  }

  static DensityMatrix unchecked(FockBasis basis, Matrix elements) {
    return DensityMatrix(basis, std::move(elements));
  }

  /// Identity / (N+1).
  static DensityMatrix maximally_mixed(int atoms) {
    const FockBasis basis(atoms);
    const auto d = basis.dimension();
    return DensityMatrix(basis, Matrix::Identity(d, d) / static_cast<Real>(d));
  }

  const FockBasis& basis() const { return basis_; }
  const Matrix& elements() const { return elements_; }
  std::complex<Real> operator()(Eigen::Index i, Eigen::Index j) const { return elements_(i, j); }

  /// Throws NumericalError unless Hermitian (1e-12), unit trace (1e-12) and min eigenvalue >= -1e-10.
  void validate() const {
    const Real herm = (elements_ - elements_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > Real(1e-12)) throw NumericalError("DensityMatrix: not Hermitian");
    const std::complex<Real> tr = elements_.trace();
    if (std::abs(tr - std::complex<Real>(1)) > Real(1e-12))
      throw NumericalError("DensityMatrix: trace differs from one");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(elements_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < Real(-1e-10))
      throw NumericalError("DensityMatrix: negative eigenvalue");
  }

 private:
  DensityMatrix(FockBasis basis, Matrix elements) : basis_(basis), elements_(std::move(elements)) {
    if (elements_.rows() != basis_.dimension() || elements_.cols() != basis_.dimension())
      throw DomainError("DensityMatrix: matrix shape differs from (N+1)x(N+1)");
  }

  FockBasis basis_;
  Matrix elements_;
};

/// n_x J_x + n_y J_y + n_z J_z on a Fock basis.
template <typename Real = double>
class SpinOperator {
 public:
  using Matrix = CMatrix<Real>;

  SpinOperator(FockBasis basis, Vector3<Real> axis, Matrix elements)
      : basis_(basis), axis_(axis), elements_(std::move(elements)) {}

  const FockBasis& basis() const { return basis_; }
  const Vector3<Real>& axis() const { return axis_; }
  const Matrix& elements() const { return elements_; }

 private:
  FockBasis basis_;
  Vector3<Real> axis_;
  Matrix elements_;
};

template <typename Real = double>
PureState<Real> make_fock(int atoms, double n) {
  const FockBasis basis(atoms);
  CVector<Real> a = CVector<Real>::Zero(basis.dimension());
  a(basis.index(n)) = 1;
  return PureState<Real>(basis, std::move(a));
}

/// SU(2) coherent state |theta, phi> with alpha = tan(theta/2) e^{-i phi}.
///
/// Amplitudes are evaluated in log space so binomials of large N do not overflow.
/// The mean spin points along N/2 (sin th cos ph, sin th sin ph, -cos th).
template <typename Real = double>
PureState<Real> make_coherent(int atoms, Real theta, Real phi) {
  constexpr Real pi = std::numbers::pi_v<Real>;
  if (!(theta >= 0 && theta <= pi)) throw DomainError("make_coherent: theta must lie in [0, pi]");
  const FockBasis basis(atoms);
  const auto d = basis.dimension();
  CVector<Real> a(d);
  // theta = 0 and theta = pi are the two poles; tan(theta/2) is 0 or singular there.
  if (theta == 0 || theta == pi) {
    a.setZero();
    a(theta == 0 ? 0 : d - 1) = std::polar(Real(1), theta == 0 ? Real(0) : -atoms * phi);
    return PureState<Real>(basis, std::move(a));
  }
  // |alpha|^k / (1+|alpha|^2)^{N/2} = cos(theta/2)^{N-k} sin(theta/2)^k
  const Real log_cos = std::log(std::cos(theta / 2));
  const Real log_sin = std::log(std::sin(theta / 2));
  for (Eigen::Index k = 0; k < d; ++k) {
    const int ki = static_cast<int>(k);
    const Real log_mag =
        Real(0.5) * detail::log_binomial<Real>(atoms, ki) + (atoms - ki) * log_cos + ki * log_sin;
    a(k) = std::polar(std::exp(log_mag), -static_cast<Real>(ki) * phi);
  }
  return PureState<Real>(basis, std::move(a));
}

template <typename Real>
std::complex<Real> overlap(const PureState<Real>& a, const PureState<Real>& b) {
  detail::require_same_basis(a.basis(), b.basis(), "overlap");
  return a.amplitudes().dot(b.amplitudes());  // conjugates the first argument
}

/// |<a|b>|^2
template <typename Real>
Real fidelity(const PureState<Real>& a, const PureState<Real>& b) {
  return std::norm(overlap(a, b));
}

template <typename Real = double>
SpinOperator<Real> spin_operator(int atoms, const Vector3<Real>& direction) {
  if (std::abs(direction.norm() - Real(1)) > Real(1e-12))
    throw DomainError("spin_operator: direction must be a unit vector");
  const FockBasis basis(atoms);
  const auto d = basis.dimension();
  using C = std::complex<Real>;
  CMatrix<Real> m = CMatrix<Real>::Zero(d, d);
  const Real half = static_cast<Real>(atoms) / 2;
  for (Eigen::Index i = 0; i < d; ++i) m(i, i) = direction.z() * basis.imbalance<Real>(i);
  // J_+ |n> = sqrt((N/2 - n)(N/2 + n + 1)) |n+1>, J_x = (J_+ + J_-)/2, J_y = (J_+ - J_-)/(2i)
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    const Real n = basis.imbalance<Real>(i);
    const Real ladder = std::sqrt((half - n) * (half + n + 1)) / 2;
    const C raise = ladder * C(direction.x(), -direction.y());
    m(i + 1, i) = raise;
    m(i, i + 1) = std::conj(raise);
  }
  return SpinOperator<Real>(basis, direction, std::move(m));
}

template <typename Real = double>
SpinOperator<Real> spin_x(int atoms) {
  return spin_operator<Real>(atoms, Vector3<Real>::UnitX());
}
template <typename Real = double>
SpinOperator<Real> spin_y(int atoms) {
  return spin_operator<Real>(atoms, Vector3<Real>::UnitY());
}
template <typename Real = double>
SpinOperator<Real> spin_z(int atoms) {
  return spin_operator<Real>(atoms, Vector3<Real>::UnitZ());
}

/// tr(rho op) for a Hermitian operator; the imaginary residue is checked, then dropped.
template <typename Real>
Real expectation(const DensityMatrix<Real>& rho, const SpinOperator<Real>& op) {
  detail::require_same_basis(rho.basis(), op.basis(), "expectation");
  const std::complex<Real> value = rho.elements().cwiseProduct(op.elements().transpose()).sum();
  if (std::abs(value.imag()) > Real(1e-10) * std::max(Real(1), std::abs(value.real())))
    throw NumericalError("expectation: imaginary part above tolerance; operator or state not Hermitian");
  return value.real();
}

template <typename Real>
Real expectation(const PureState<Real>& psi, const SpinOperator<Real>& op) {
  detail::require_same_basis(psi.basis(), op.basis(), "expectation");
  const std::complex<Real> value = psi.amplitudes().dot(op.elements() * psi.amplitudes());
  if (std::abs(value.imag()) > Real(1e-10) * std::max(Real(1), std::abs(value.real())))
    throw NumericalError("expectation: imaginary part above tolerance");
  return value.real();
}

/// Husimi function <theta,phi| rho |theta,phi>.
template <typename Real>
Real husimi(const DensityMatrix<Real>& rho, Real theta, Real phi) {
  const auto c = make_coherent<Real>(rho.basis().atoms(), theta, phi);
  return c.amplitudes().dot(rho.elements() * c.amplitudes()).real();
}

template <typename Real>
Real husimi(const PureState<Real>& psi, Real theta, Real phi) {
  return fidelity(make_coherent<Real>(psi.basis().atoms(), theta, phi), psi);
}

}  // namespace bjj

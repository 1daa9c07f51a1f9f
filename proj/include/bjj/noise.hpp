#pragma once

// Classical phase noise lambda(t) coupled to J_z.
//
// For one realization the state is rotated about z by phi(t) = -int_0^t lambda,
// so averaging over realizations multiplies the Fock-basis entry (n, n') of the
// noiseless density matrix by the characteristic function
//   f(m, t) = E[e^{i m phi(t)}],  m = n' - n.
// For Gaussian noise f(m, t) = e^{-a^2(t) m^2 / 2} e^{-i lambda_bar t m}, with
//   a^2(t) = 2 int_0^t dtau int_0^tau du h(u).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bjj/dynamics.hpp"
#include "bjj/hilbert.hpp"
#include "bjj/quadrature.hpp"

namespace bjj {

enum class NoiseKind {
  gaussian_ou,           ///< h(tau) = h0 e^{-|tau|/Tc}
  gaussian_white,        ///< h(tau) = 2 D delta(tau)
  gaussian_quasistatic,  ///< h(tau) = h0, i.e. the Tc -> infinity limit; a^2 = h0 t^2
  gaussian_custom,       ///< user-supplied h(tau)
};

inline std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::gaussian_ou: return "gaussian-ou";
    case NoiseKind::gaussian_white: return "gaussian-white";
    case NoiseKind::gaussian_quasistatic: return "gaussian-quasistatic";
    case NoiseKind::gaussian_custom: return "gaussian-custom";
  }
  return "unknown";
}

inline NoiseKind noise_kind_from_string(const std::string& name) {
  for (auto k : {NoiseKind::gaussian_ou, NoiseKind::gaussian_white, NoiseKind::gaussian_quasistatic,
                 NoiseKind::gaussian_custom})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown noise kind '" + name + "'");
}

/// Stationary Gaussian detuning noise.
template <typename Real = double>
class NoiseModel {
 public:
  using Correlation = std::function<Real(Real)>;
  /// Extra factor multiplying f(m, t) for m >= 0, e.g. exp(sum_p b_p(t) m^p) from
  /// higher cumulants of a non-Gaussian process. Negative m use the conjugate.
  using KernelCorrection = std::function<std::complex<Real>(int, Real)>;

  static NoiseModel ornstein_uhlenbeck(Real lambda_bar, Real h0, Real correlation_time) {
    if (!(h0 >= 0)) throw DomainError("NoiseModel: h0 must be >= 0");
    if (!(correlation_time > 0)) throw DomainError("NoiseModel: Tc must be > 0");
    NoiseModel m(NoiseKind::gaussian_ou, lambda_bar);
    m.h0_ = h0;
    m.tc_ = correlation_time;
    return m;
  }

  static NoiseModel white(Real lambda_bar, Real diffusion) {
    if (!(diffusion >= 0)) throw DomainError("NoiseModel: D must be >= 0");
    NoiseModel m(NoiseKind::gaussian_white, lambda_bar);
    m.diffusion_ = diffusion;
    return m;
  }

  static NoiseModel quasistatic(Real lambda_bar, Real h0) {
    if (!(h0 >= 0)) throw DomainError("NoiseModel: h0 must be >= 0");
    NoiseModel m(NoiseKind::gaussian_quasistatic, lambda_bar);
    m.h0_ = h0;
    return m;
  }

  static NoiseModel custom(Real lambda_bar, Correlation h) {
    if (!h) throw DomainError("NoiseModel: custom correlation function is empty");
    if (!(h(0) >= 0)) throw DomainError("NoiseModel: h(0) must be >= 0");
    NoiseModel m(NoiseKind::gaussian_custom, lambda_bar);
    m.h0_ = h(0);
    m.correlation_ = std::move(h);
    return m;
  }

  NoiseModel with_kernel_correction(KernelCorrection correction) const {
    NoiseModel m = *this;
    m.correction_ = std::move(correction);
    return m;
  }

  NoiseKind kind() const { return kind_; }
  Real lambda_bar() const { return lambda_bar_; }
  Real h0() const { return h0_; }
  Real correlation_time() const { return tc_; }
  Real diffusion() const { return diffusion_; }
  const KernelCorrection& kernel_correction() const { return correction_; }

  /// h(tau). The white-noise delta is reported as +inf at tau = 0 and 0 elsewhere.
  Real correlation(Real tau) const {
    switch (kind_) {
      case NoiseKind::gaussian_ou: return h0_ * std::exp(-std::abs(tau) / tc_);
      case NoiseKind::gaussian_white:
        return tau == 0 ? std::numeric_limits<Real>::infinity() : Real(0);
      case NoiseKind::gaussian_quasistatic: return h0_;
      case NoiseKind::gaussian_custom: return correlation_(tau);
    }
    return 0;
  }

  /// int_0^inf h, the rate entering the Markov regime a^2 ~ 2 (int h) t. Infinite for quasistatic.
  Real correlation_integral() const {
    switch (kind_) {
      case NoiseKind::gaussian_ou: return h0_ * tc_;
      case NoiseKind::gaussian_white: return diffusion_;
      case NoiseKind::gaussian_quasistatic:
        return h0_ == 0 ? Real(0) : std::numeric_limits<Real>::infinity();
      case NoiseKind::gaussian_custom: break;
    }
    throw DomainError("correlation_integral: not available for custom correlation functions");
  }

 private:
  NoiseModel(NoiseKind kind, Real lambda_bar) : kind_(kind), lambda_bar_(lambda_bar) {}

  NoiseKind kind_;
  Real lambda_bar_;
  Real h0_ = 0;
  Real tc_ = 0;
  Real diffusion_ = 0;
  Correlation correlation_;
  KernelCorrection correction_;
};

/// Accumulated phase variance a^2(t).
template <typename Real>
Real variance_a2(const NoiseModel<Real>& model, Real t) {
  if (!(t >= 0)) throw DomainError("variance_a2: t must be >= 0");
  switch (model.kind()) {
    case NoiseKind::gaussian_ou: {
      // 2 h0 Tc [t - Tc (1 - e^{-t/Tc})] = 2 h0 Tc^2 g(x), g(x) = x - 1 + e^{-x}
      const Real tc = model.correlation_time();
      const Real x = t / tc;
      const Real g = x < Real(1e-3) ? x * x * (Real(0.5) - x * (Real(1) / 6 - x * (Real(1) / 24 - x / 120)))
                                    : x + std::expm1(-x);
      return 2 * model.h0() * tc * tc * g;
    }
    case NoiseKind::gaussian_white: return 2 * model.diffusion() * t;
    case NoiseKind::gaussian_quasistatic: return model.h0() * t * t;
    case NoiseKind::gaussian_custom: {
      if (t == 0) return 0;
      // Swapping the order of the double integral leaves 2 int_0^t (t - u) h(u) du.
      const auto integrand = [&](Real u) { return 2 * (t - u) * model.correlation(u); };
      const Real scale = model.h0() * t * t;
      return detail::integrate<Real>(integrand, Real(0), t, Real(1e-8), Real(1e-15) * std::abs(scale))
          .value;
    }
  }
  return 0;
}

/// a(t_q) in the Markov regime, sqrt(2 (int_0^inf h) t_q) with t_q = pi / (q chi).
template <typename Real>
Real markov_amplitude(const NoiseModel<Real>& model, Real chi, int q) {
  return std::sqrt(2 * model.correlation_integral() * std::numbers::pi_v<Real> / (q * chi));
}

/// Amplitude reached at t_{q_target} under the same Markov noise that gives a_q at t_q.
template <typename Real>
Real markov_matched_amplitude(Real a_q, int q, int q_target) {
  return a_q * std::sqrt(static_cast<Real>(q) / static_cast<Real>(q_target));
}

/// Checks h(0) >= 0, h(tau) = h(-tau) and a^2 nondecreasing on a grid over [0, t_max].
template <typename Real>
void validate(const NoiseModel<Real>& model, Real t_max, int samples = 64) {
  if (model.kind() == NoiseKind::gaussian_white) return;
  if (!(model.correlation(0) >= 0)) throw DomainError("NoiseModel: h(0) < 0");
  Real previous = 0;
  for (int i = 1; i <= samples; ++i) {
    const Real tau = t_max * i / samples;
    const Real hp = model.correlation(tau), hm = model.correlation(-tau);
    if (std::abs(hp - hm) > Real(1e-12) * std::max(Real(1), std::abs(hp)))
      throw DomainError("NoiseModel: h is not even in tau");
    const Real a2 = variance_a2(model, tau);
    if (a2 < previous * (1 - Real(1e-12)))
      throw DomainError("NoiseModel: a^2(t) decreases; h is not a valid correlation function");
    previous = a2;
  }
}

namespace detail {

template <typename Real>
std::complex<Real> kernel_at(const NoiseModel<Real>& model, Real a2, int m, Real t) {
  const Real mm = static_cast<Real>(m);
  std::complex<Real> f = std::polar(std::exp(-a2 * mm * mm / 2), -model.lambda_bar() * t * mm);
  if (model.kernel_correction()) f *= model.kernel_correction()(m, t);
  return f;
}

}  // namespace detail

/// f(m, t) = e^{-a^2 m^2 / 2} e^{-i lambda_bar t m}, times the optional correction.
template <typename Real>
std::complex<Real> dephasing_kernel(const NoiseModel<Real>& model, int m, Real t) {
  if (m < 0) return std::conj(dephasing_kernel(model, -m, t));
  return detail::kernel_at(model, variance_a2(model, t), m, t);
}

/// K(i, j) = f(j - i, t) on an (N+1)x(N+1) basis; K(j, i) is the exact conjugate of K(i, j).
template <typename Real>
CMatrix<Real> kernel_matrix(const NoiseModel<Real>& model, int atoms, Real t) {
  const Eigen::Index d = atoms + 1;
  std::vector<std::complex<Real>> f(d);
  const Real a2 = variance_a2(model, t);
  for (Eigen::Index m = 0; m < d; ++m) f[m] = detail::kernel_at(model, a2, static_cast<int>(m), t);
  CMatrix<Real> k(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) k(i, j) = j >= i ? f[j - i] : std::conj(f[i - j]);
  return k;
}

/// Real centred Gaussian kernel e^{-a2 (n - n')^2 / 2}.
template <typename Real>
CMatrix<Real> gaussian_kernel_matrix(int atoms, Real a2) {
  if (!(a2 >= 0)) throw DomainError("gaussian_kernel_matrix: a^2 must be >= 0");
  const Eigen::Index d = atoms + 1;
  CMatrix<Real> k(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) {
      const Real m = static_cast<Real>(i - j);
      k(i, j) = std::exp(-a2 * m * m / 2);
    }
  return k;
}

/// Multiplies entry (n, n') by f(n' - n, t). Use on the chi-only noiseless matrix:
/// the lambda_bar drift is part of f.
template <typename Derived, typename Real>
CMatrix<Real> apply_dephasing(const Eigen::MatrixBase<Derived>& rho, const NoiseModel<Real>& model,
                              Real t) {
  if (rho.rows() != rho.cols()) throw DomainError("apply_dephasing: matrix is not square");
  return rho.cwiseProduct(kernel_matrix(model, static_cast<int>(rho.rows()) - 1, t));
}

template <typename Real>
DensityMatrix<Real> apply_dephasing(const DensityMatrix<Real>& rho, const NoiseModel<Real>& model,
                                    Real t) {
  return DensityMatrix<Real>::unchecked(rho.basis(), apply_dephasing(rho.elements(), model, t));
}

/// Centred Gaussian dephasing by a phase variance a2 (no drift).
template <typename Derived>
auto apply_dephasing(const Eigen::MatrixBase<Derived>& rho,
                     typename Eigen::NumTraits<typename Derived::Scalar>::Real a2) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if (rho.rows() != rho.cols()) throw DomainError("apply_dephasing: matrix is not square");
  return CMatrix<Real>(rho.cwiseProduct(gaussian_kernel_matrix<Real>(static_cast<int>(rho.rows()) - 1, a2)));
}

template <typename Real>
DensityMatrix<Real> apply_dephasing(const DensityMatrix<Real>& rho, Real a2) {
  return DensityMatrix<Real>::unchecked(rho.basis(), apply_dephasing(rho.elements(), a2));
}

/// Noise-averaged state at t starting from `initial`: the deterministic detuning
/// goes into the unitary, the fluctuations into a centred Gaussian kernel.
template <typename Real>
DensityMatrix<Real> noisy_density_matrix(const PureState<Real>& initial, const QuenchSpec<Real>& quench,
                                         const NoiseModel<Real>& model, Real t) {
  if (quench.lambda_bar != model.lambda_bar())
    throw DomainError("noisy_density_matrix: QuenchSpec and NoiseModel disagree on lambda_bar");
  const auto rho0 = DensityMatrix<Real>::from_pure(evolve_noiseless(initial, quench, t));
  return apply_dephasing(rho0, variance_a2(model, t));
}

/// Long-time limit: diag(P(n)) with the binomial imbalance distribution of |alpha = 1>.
template <typename Real = double>
DensityMatrix<Real> steady_state(int atoms) {
  const FockBasis basis(atoms);
  const CMatrix<Real> d = binomial_distribution<Real>(atoms).template cast<std::complex<Real>>().asDiagonal();
  return DensityMatrix<Real>::unchecked(basis, d);
}

/// Sampled accumulated phases phi(t_k) = -int_0^{t_k} lambda on the grid t_k = k dt.
template <typename Real = double>
struct TrajectoryEnsemble {
  using Phases = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Real dt;
  Real t_max;
  std::uint64_t seed;
  Phases phases;  ///< trajectories x (steps + 1), column 0 is zero

  Eigen::Index trajectories() const { return phases.rows(); }
  Eigen::Index steps() const { return phases.cols() - 1; }
  Real time(Eigen::Index k) const { return dt * static_cast<Real>(k); }

  /// Grid index of t; throws DomainError if t is not on the grid.
  Eigen::Index step_of(Real t) const {
    const Real x = t / dt;
    const Real k = std::round(x);
    if (!(t >= 0) || std::abs(x - k) > Real(1e-9) * std::max(Real(1), k) || k > steps()) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "TrajectoryEnsemble: t = " << t << " is not on the grid k*dt, dt = " << dt
          << ", k <= " << steps();
      throw DomainError(msg.str());
    }
    return static_cast<Eigen::Index>(k);
  }

  /// (1/M) sum_traj e^{i m phi(t_k)} for m = 0..max_m.
  std::vector<std::complex<Real>> characteristic(Eigen::Index k, int max_m) const {
    std::vector<std::complex<Real>> g(max_m + 1, std::complex<Real>(0));
    for (Eigen::Index r = 0; r < trajectories(); ++r) {
      const Real phi = phases(r, k);
      for (int m = 0; m <= max_m; ++m) g[m] += std::polar(Real(1), m * phi);
    }
    for (auto& v : g) v /= static_cast<Real>(trajectories());
    return g;
  }
};

namespace detail {

inline constexpr Eigen::Index kTrajectoriesPerStream = 512;

/// Engine for stream s of a run seeded with `seed`; independent of thread count.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace detail

/// Samples M trajectories of phi(t) on [0, t_max] with step dt.
///
/// OU noise uses the exact AR(1) recursion
///   lambda_{k+1} = lambda_bar + (lambda_k - lambda_bar) e^{-dt/Tc} + sqrt(h0 (1 - e^{-2 dt/Tc})) xi
/// started from the stationary law, with trapezoid accumulation of phi, and requires
/// dt <= Tc/20. White noise draws exact increments N(-lambda_bar dt, 2 D dt).
/// Quasistatic noise draws one lambda per trajectory.
///
/// Trajectories are split into fixed streams of 512, each with its own engine, so
/// the ensemble is identical for any `threads`.
template <typename Real>
TrajectoryEnsemble<Real> sample_trajectories(const NoiseModel<Real>& model, Real t_max, Real dt,
                                             Eigen::Index trajectories, std::uint64_t seed,
                                             unsigned threads = 0) {
  if (!(dt > 0) || !(t_max >= 0)) throw ConfigError("sample_trajectories: need dt > 0 and t_max >= 0");
  if (trajectories < 1) throw ConfigError("sample_trajectories: need at least one trajectory");
  if (model.kind() == NoiseKind::gaussian_custom)
    throw ConfigError("sample_trajectories: no sampler for custom correlation functions");
  if (model.kind() == NoiseKind::gaussian_ou && dt > model.correlation_time() / 20 * (1 + Real(1e-12))) {
    std::ostringstream msg;
    msg << "sample_trajectories: dt = " << dt << " too coarse for Tc = " << model.correlation_time()
        << " (need dt <= Tc/20)";
    throw ConfigError(msg.str());
  }
  const auto steps = static_cast<Eigen::Index>(std::ceil(t_max / dt - Real(1e-9)));

  TrajectoryEnsemble<Real> ens{dt, t_max, seed,
                               TrajectoryEnsemble<Real>::Phases::Zero(trajectories, steps + 1)};

  const Real lambda_bar = model.lambda_bar();
  const auto fill_stream = [&](Eigen::Index stream) {
    auto engine = detail::stream_engine(seed, static_cast<std::uint64_t>(stream));
    std::normal_distribution<Real> normal(0, 1);
    const Eigen::Index first = stream * detail::kTrajectoriesPerStream;
    const Eigen::Index last = std::min(trajectories, first + detail::kTrajectoriesPerStream);
    for (Eigen::Index r = first; r < last; ++r) {
      auto row = ens.phases.row(r);
      switch (model.kind()) {
        case NoiseKind::gaussian_ou: {
          const Real sigma = std::sqrt(model.h0());
          const Real decay = std::exp(-dt / model.correlation_time());
          const Real kick = sigma * std::sqrt(-std::expm1(-2 * dt / model.correlation_time()));
          Real lambda = lambda_bar + sigma * normal(engine);
          for (Eigen::Index k = 0; k < steps; ++k) {
            const Real next = lambda_bar + (lambda - lambda_bar) * decay + kick * normal(engine);
            row(k + 1) = row(k) - dt * (lambda + next) / 2;
            lambda = next;
          }
          break;
        }
        case NoiseKind::gaussian_white: {
          const Real sd = std::sqrt(2 * model.diffusion() * dt);
          for (Eigen::Index k = 0; k < steps; ++k) row(k + 1) = row(k) - lambda_bar * dt + sd * normal(engine);
          break;
        }
        case NoiseKind::gaussian_quasistatic: {
          const Real lambda = lambda_bar + std::sqrt(model.h0()) * normal(engine);
          for (Eigen::Index k = 0; k < steps; ++k) row(k + 1) = -lambda * dt * static_cast<Real>(k + 1);
          break;
        }
        case NoiseKind::gaussian_custom: break;
      }
    }
  };

  const Eigen::Index streams =
      (trajectories + detail::kTrajectoriesPerStream - 1) / detail::kTrajectoriesPerStream;
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<Eigen::Index>(workers, streams));
  if (workers <= 1) {
    for (Eigen::Index s = 0; s < streams; ++s) fill_stream(s);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (Eigen::Index s = w; s < streams; s += workers) fill_stream(s);
      });
  }
  return ens;
}

/// Monte-Carlo average of e^{-i phi J_z} rho0(t) e^{i phi J_z} over the ensemble at time t.
///
/// rho0(t) is the chi-only evolution of `initial`; the ensemble phases carry the
/// -lambda_bar t drift. Evaluated through the empirical characteristic function,
/// so entry (n, n') is rho0_{nn'} (1/M) sum e^{i (n' - n) phi}.
template <typename Real>
DensityMatrix<Real> mc_density_matrix(const PureState<Real>& initial, const QuenchSpec<Real>& spec,
                                      const TrajectoryEnsemble<Real>& ensemble, Real t) {
  const Eigen::Index k = ensemble.step_of(t);
  const QuenchSpec<Real> chi_only(spec.atoms, spec.chi, 0);
  auto rho = DensityMatrix<Real>::from_pure(evolve_noiseless(initial, chi_only, ensemble.time(k)))
                 .elements();
  const auto g = ensemble.characteristic(k, spec.atoms);
  for (Eigen::Index j = 0; j < rho.cols(); ++j)
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
      if (i == j) continue;
      rho(i, j) *= j > i ? g[j - i] : std::conj(g[i - j]);
    }
  return DensityMatrix<Real>::unchecked(initial.basis(), std::move(rho));
}

}  // namespace bjj

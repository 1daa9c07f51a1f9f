#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bjj/dynamics.hpp"
#include "bjj/observables.hpp"
#include "oracles.hpp"

using namespace bjj;
using std::numbers::pi;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("QuenchSpec preconditions") {
  CHECK_THROWS_AS(QuenchSpec<>(0, 1.0), DomainError);
  CHECK_THROWS_AS(QuenchSpec<>(4, 0.0), DomainError);
  CHECK_THROWS_AS(QuenchSpec<>(4, -1.0), DomainError);
  CHECK(QuenchSpec<>(4, 2.0).revival_time() == doctest::Approx(pi));
}

TEST_CASE("evolve_noiseless") {
  const auto psi = make_coherent(12, 1.1, 0.4);
  const QuenchSpec<> spec(12, 0.7, 0.3);

  SUBCASE("t = 0 is the identity") {
    CHECK(evolve_noiseless(psi, spec, 0.0).amplitudes() == psi.amplitudes());
  }
  SUBCASE("revival at T for even N and no detuning") {
    const QuenchSpec<> s(12, 0.7);
    CHECK(max_abs(evolve_noiseless(psi, s, s.revival_time()).amplitudes() - psi.amplitudes()) < 1e-12);
  }
  SUBCASE("norm and Fock populations are conserved") {
    for (double t : {0.3, 2.0, 17.5}) {
      const auto out = evolve_noiseless(psi, spec, t);
      CHECK(std::abs(out.norm() - 1) < 1e-13);
      CHECK((out.amplitudes().cwiseAbs() - psi.amplitudes().cwiseAbs()).cwiseAbs().maxCoeff() < 1e-15);
      CHECK(std::abs(expectation(out, spin_z(12)) - expectation(psi, spin_z(12))) < 1e-12);
    }
  }
  SUBCASE("agrees with the matrix exponential of H") {
    // independent path: diagonal H built from the oracle spin matrix
    const auto s = oracle::spin_matrices(12);
    const Eigen::MatrixXcd H = spec.chi * s.z * s.z - spec.lambda_bar * s.z;
    const double t = 1.37;
    Eigen::VectorXcd expected(13);
    for (int i = 0; i <= 12; ++i) expected(i) = std::exp(std::complex<double>(0, -t) * H(i, i)) * psi[i];
    CHECK(max_abs(evolve_noiseless(psi, spec, t).amplitudes() - expected) < 1e-13);
  }
  CHECK_THROWS_AS(evolve_noiseless(psi, spec, -1.0), DomainError);
  CHECK_THROWS_AS(evolve_noiseless(make_coherent(10, 1.0, 0.0), spec, 1.0), DomainError);
}

TEST_CASE("visibility_closed_form examples") {
  CHECK(visibility_closed_form(QuenchSpec<>(10, 1.3), 0.0) == 1);
  CHECK(std::abs(visibility_closed_form(QuenchSpec<>(3, 1.0), pi / 3) - 0.25) < 1e-15);
  CHECK(std::abs(visibility_closed_form(QuenchSpec<>(10, 2.0), pi / 4)) < 1e-15);
}

TEST_CASE("machine visibility equals cos^{N-1}(chi t) at random times") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int N : {2, 3, 10, 57, 200, 400}) {
    const QuenchSpec<> spec(N, 0.2 + u(rng));
    const auto psi0 = make_coherent(N, pi / 2, 0.0);
    for (int k = 0; k < 50; ++k) {
      const double t = u(rng) * spec.revival_time();
      const double nu = 2 * expectation(evolve_noiseless(psi0, spec, t), spin_x(N)) / N;
      CHECK(std::abs(nu - visibility_closed_form(spec, t)) < 1e-10);
    }
  }
}

TEST_CASE("CatSpec rejects unsupported q and N") {
  const QuenchSpec<> even(10, 1.0), odd(9, 1.0);
  CHECK_THROWS_AS(CatSpec<>(even, 3), UnsupportedConfiguration);
  CHECK_THROWS_AS(CatSpec<>(even, 0), UnsupportedConfiguration);
  CHECK_THROWS_AS(CatSpec<>(odd, 2), UnsupportedConfiguration);
  CHECK(CatSpec<>(even, 4).formation_time() == doctest::Approx(pi / 4));
}

TEST_CASE("cat_state matches direct evolution") {
  for (auto [N, q] : {std::pair{10, 2}, std::pair{8, 4}, std::pair{24, 8}}) {
    for (double lambda_bar : {0.0, 0.37}) {
      const CatSpec<> cat(QuenchSpec<>(N, 1.3, lambda_bar), q);
      const auto direct = evolve_noiseless(make_coherent(N, pi / 2, 0.0), cat.quench(), cat.formation_time());
      const auto explicit_cat = cat_state(cat);
      CHECK(fidelity(direct, explicit_cat) > 1 - 1e-12);
      // global phase fixed to match
      CHECK(max_abs(direct.amplitudes() - explicit_cat.amplitudes()) < 1e-12);
    }
  }
}

TEST_CASE("q = 2 cat keeps the binomial populations") {
  const CatSpec<> cat(QuenchSpec<>(10, 1.0), 2);
  const auto p = cat_state(cat).amplitudes().cwiseAbs2().eval();
  for (int k = 0; k <= 10; ++k) CHECK(std::abs(p(k) - oracle::binomial(10, k) / 1024.0) < 1e-14);
}

TEST_CASE("cat_density_terms") {
  SUBCASE("reconstruction q = 2, N = 6 and q = 4, N = 12 with drift") {
    for (auto [N, q, lb] : {std::tuple{6, 2, 0.0}, std::tuple{12, 4, 0.8}}) {
      const CatSpec<> cat(QuenchSpec<>(N, 0.9, lb), q);
      Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(N + 1, N + 1);
      for (int k = 0; k < q; ++k)
        for (int kp = 0; kp < q; ++kp) sum += cat_density_terms(cat, k, kp);
      const auto psi = cat_state(cat).amplitudes();
      CHECK(max_abs(sum - psi * psi.adjoint()) < 1e-12);
    }
  }
  SUBCASE("diagonal terms carry trace 1/q") {
    const CatSpec<> cat(QuenchSpec<>(16, 1.0), 4);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(cat_density_terms(cat, k, k).trace() - 0.25) < 1e-14);
  }
  SUBCASE("cross terms: trace (1/q) c_k c*_k' <phi_k'|phi_k>") {
    const int N = 8, q = 4;
    const CatSpec<> cat(QuenchSpec<>(N, 1.0), q);
    for (auto [k, kp] : {std::pair{0, 1}, std::pair{1, 3}, std::pair{2, 0}}) {
      // per the Fock expansion, term (k, k') = (1/q) c_k c*_k' |phi_k><phi_k'| with phi_k = 2 pi k / q
      const Eigen::VectorXcd a = oracle::phase_state(N, 2 * pi * k / q);
      const Eigen::VectorXcd b = oracle::phase_state(N, 2 * pi * kp / q);
      const std::complex<double> expected = cat.coefficient(k) * std::conj(cat.coefficient(kp)) * b.dot(a) / double(q);
      CHECK(std::abs(cat_density_terms(cat, k, kp).trace() - expected) < 1e-14);
    }
    // exponentially small in N
    const CatSpec<> big(QuenchSpec<>(40, 1.0), 2);
    CHECK(std::abs(cat_density_terms(big, 0, 1).trace()) < 1e-10);
  }
  const CatSpec<> cat(QuenchSpec<>(6, 1.0), 2);
  CHECK_THROWS_AS(cat_density_terms(cat, 2, 0), DomainError);
  CHECK_THROWS_AS(cat_density_terms(cat, 0, -1), DomainError);
}

TEST_CASE("decompose") {
  const int N = 10;
  const CatSpec<> cat(QuenchSpec<>(N, 1.0), 2);
  const auto rho = DensityMatrix<>::from_pure(cat_state(cat));
  const auto parts = decompose(rho, 2);

  CHECK((parts.diagonal + parts.off_diagonal) == rho.elements());
  CHECK(parts.off_diagonal.diagonal().isZero(0));
  CHECK(std::abs(parts.off_diagonal.trace()) == 0);
  CHECK(parts.diagonal.diagonal() == rho.elements().diagonal());
  for (int i = 0; i < N; ++i) {
    CHECK(std::abs(parts.off_diagonal(i, i + 1)) > 0);
    CHECK(std::abs(parts.off_diagonal(i + 1, i)) > 0);
  }

  // rho_d equals the initial phase state entries on n = n' mod q; rho_od carries e^{i pi (n'^2 - n^2)/q}
  const auto psi0 = oracle::phase_state(N, 0.0);
  const Eigen::MatrixXcd rho_initial = psi0 * psi0.adjoint();
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j) {
      const double n = i - N / 2.0, np = j - N / 2.0;
      if ((i - j) % 2 == 0) {
        CHECK(std::abs(parts.diagonal(i, j) - rho_initial(i, j)) < 1e-14);
      } else {
        const auto expected = rho_initial(i, j) * std::polar(1.0, pi * (np * np - n * n) / 2);
        CHECK(std::abs(parts.off_diagonal(i, j) - expected) < 1e-14);
      }
    }

  CHECK(offdiag_weight(parts.off_diagonal) > 0.1);
  CHECK_THROWS_AS(decompose(rho, 0), DomainError);
}

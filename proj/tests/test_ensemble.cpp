#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qnd/spin.hpp"
#include "qnd/state.hpp"

using namespace qnd;
using Catch::Approx;

namespace {
TwoEnsembleState random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  VecC a(dim_of(n));
  for (int i = 0; i < a.size(); ++i) a(i) = cplx(g(rng), g(rng));
  return TwoEnsembleState(n, a).normalized();
}
}  // namespace

TEST_CASE("fock states") {
  auto s = fock_state(2, 0, 0);
  CHECK(s.amps()(0) == cplx(1.0));
  CHECK(s.norm_sq() == Approx(1.0));

  auto t = fock_state(2, 2, 1);
  CHECK(t.amps()(5) == cplx(1.0));  // 1*3 + 2

  CHECK(std::abs(inner_product(fock_state(3, 1, 0), fock_state(3, 0, 1))) == 0.0);
  CHECK_THROWS_AS(fock_state(2, 3, 0), std::domain_error);

  // orthonormality, exhaustive for N <= 6
  for (int n : {1, 3, 6}) {
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b)
        for (int c = 0; c <= n; ++c)
          for (int d = 0; d <= n; ++d) {
            const cplx ip = inner_product(fock_state(n, a, b), fock_state(n, c, d));
            CHECK(std::abs(ip - ((a == c && b == d) ? 1.0 : 0.0)) < 1e-15);
          }
  }
}

TEST_CASE("spin coherent pair") {
  // fully polarized: only k = N survives
  auto s = spin_coherent_pair(3, 0.0, 0.0);
  CHECK(std::abs(inner_product(s, fock_state(3, 3, 3)) - 1.0) < 1e-12);

  // x-polarized N=2: amplitudes sqrt(C(2,k1) C(2,k2))/4
  auto x = spin_coherent_pair(2, M_PI / 2, 0.0);
  for (int k1 = 0; k1 <= 2; ++k1)
    for (int k2 = 0; k2 <= 2; ++k2) {
      const double want =
          std::sqrt(double(k1 == 1 ? 2 : 1) * double(k2 == 1 ? 2 : 1)) / 4.0;
      CHECK(std::abs(x.amp(k1, k2) - want) < 1e-14);
    }

  for (auto [n, th, ph] : {std::tuple{5, 0.7, 1.3}, {9, 2.1, -0.4}, {14, 1.0, 0.0}})
    CHECK(spin_coherent_pair(n, th, ph).norm_sq() == Approx(1.0).margin(1e-12));
}

TEST_CASE("spin matrices") {
  CHECK(spin_matrix(1, SpinAxis::Z)(0, 0) == cplx(-1.0));
  CHECK(spin_matrix(1, SpinAxis::Z)(1, 1) == cplx(+1.0));

  // [S^j, S^k] = 2i eps_{jkl} S^l, N <= 10
  for (int n = 1; n <= 10; ++n) {
    const MatC sx = spin_matrix(n, SpinAxis::X), sy = spin_matrix(n, SpinAxis::Y),
               sz = spin_matrix(n, SpinAxis::Z);
    CHECK((sx * sy - sy * sx - cplx(0, 2) * sz).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((sy * sz - sz * sy - cplx(0, 2) * sx).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((sz * sx - sx * sz - cplx(0, 2) * sy).cwiseAbs().maxCoeff() < 1e-12);
  }

  // ladder action: S^x |k=1> = sqrt(2)(|0> + |2>) for N=2
  const MatC sx = spin_matrix(2, SpinAxis::X);
  CHECK(std::abs(sx(0, 1) - std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(sx(2, 1) - std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(sx(1, 1)) == 0.0);
}

TEST_CASE("rotation matrices") {
  CHECK((rotation_matrix(4, 0.0, 0.0) - MatC::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-14);

  // N=2 golden fixture: the pi/2 single-ensemble factor
  const double s2 = std::sqrt(2.0);
  Mat want(3, 3);
  want << 1, -s2, 1, s2, 0, -s2, 1, s2, 1;
  want /= 2.0;
  CHECK((rotation_matrix(2, M_PI / 2, 0.0).real() - want).cwiseAbs().maxCoeff() < 1e-13);
  // two-mode entries of the 9x9 block matrix: (0,0) = 1/4, (0,1) = -sqrt(2)/4
  const Mat u = rotation_matrix(2, M_PI / 2, 0.0).real();
  CHECK(u(0, 0) * u(0, 0) == Approx(0.25));
  CHECK(u(0, 0) * u(0, 1) == Approx(-s2 / 4));

  // unitarity at random angles
  const MatC r = rotation_matrix(5, 1.234, -0.777);
  CHECK((r.adjoint() * r - MatC::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);

  // composition about the shared axis
  const MatC a = rotation_matrix(4, 0.9, 0.0), b = rotation_matrix(4, 0.6, 0.0);
  CHECK((a * b - rotation_matrix(4, 1.5, 0.0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-mode rotation") {
  std::mt19937_64 rng(42);
  auto s = random_state(4, rng);
  auto fwd = apply_two_mode_rotation(s, 1.1, 0.4);
  CHECK(fwd.norm_sq() == Approx(1.0).margin(1e-12));
  auto back = apply_two_mode_rotation(fwd, 1.1, 0.4, RotationDirection::Inverse);
  CHECK((back.amps() - s.amps()).cwiseAbs().maxCoeff() < 1e-12);

  // mode-wise application equals the dense kron matrix, N <= 4
  for (int n : {2, 3, 4}) {
    auto t = random_state(n, rng);
    const MatC u = rotation_matrix(n, 0.8, 1.7);
    const int d = n + 1;
    MatC dense(dim_of(n), dim_of(n));
    for (int a2 = 0; a2 < d; ++a2)
      for (int a1 = 0; a1 < d; ++a1)
        for (int b2 = 0; b2 < d; ++b2)
          for (int b1 = 0; b1 < d; ++b1)
            dense(a2 * d + a1, b2 * d + b1) = u(a2, b2) * u(a1, b1);
    const VecC got = apply_two_mode_rotation(t, 0.8, 1.7).amps();
    CHECK((got - dense * t.amps()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("epr state") {
  auto e1 = epr_state(1);
  CHECK(std::abs(e1.amp(0, 0) - 1 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(e1.amp(1, 1) - 1 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(e1.amp(0, 1)) == 0.0);

  // basis invariance: rotating by pi/2 leaves the amplitudes unchanged
  for (int n : {2, 5}) {
    auto e = epr_state(n);
    auto r = apply_two_mode_rotation(e, M_PI / 2, 0.0);
    CHECK((r.amps() - e.amps()).cwiseAbs().maxCoeff() < 1e-12);
  }

  CHECK(entanglement_entropy(epr_state(5)) == Approx(std::log2(6.0)).margin(1e-12));
}

TEST_CASE("partial trace") {
  const MatC r1 = partial_trace_first(fock_state(2, 1, 2));
  CHECK(std::abs(r1(1, 1) - 1.0) < 1e-14);
  CHECK(r1.cwiseAbs().sum() == Approx(1.0).margin(1e-14));

  const MatC re = partial_trace_first(epr_state(3));
  CHECK((re - MatC::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() < 1e-14);

  // product state -> rank-1 projector onto the coherent vector
  const MatC rc = partial_trace_first(spin_coherent_pair(2, M_PI / 2, 0.0));
  Eigen::SelfAdjointEigenSolver<MatC> es(rc);
  CHECK(es.eigenvalues()(2) == Approx(1.0).margin(1e-12));
  CHECK(es.eigenvalues()(1) == Approx(0.0).margin(1e-12));

  // density-matrix overload agrees with the pure-state path
  std::mt19937_64 rng(7);
  auto s = random_state(3, rng);
  const MatC rho = s.amps() * s.amps().adjoint();
  CHECK((partial_trace_first(3, rho) - partial_trace_first(s)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("entropy and fidelity") {
  CHECK(entanglement_entropy(fock_state(4, 2, 3)) == Approx(0.0).margin(1e-12));
  CHECK(entanglement_entropy(epr_state(5)) / std::log2(6.0) == Approx(1.0).margin(1e-12));

  // NOON state has exactly one bit
  const int n = 5;
  VecC a = VecC::Zero(dim_of(n));
  a(flat_index(n, n, 0)) = 1 / std::sqrt(2.0);
  a(flat_index(n, 0, n)) = 1 / std::sqrt(2.0);
  CHECK(entanglement_entropy({n, a}) == Approx(1.0).margin(1e-12));

  // entropy bounds on random states
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const int nn = 1 + int(rng() % 6);
    const double e = entanglement_entropy(random_state(nn, rng));
    CHECK(e >= 0.0);
    CHECK(e <= std::log2(double(nn + 1)) + 1e-12);
  }

  CHECK(fidelity_to(epr_state(4), epr_state(4)) == Approx(1.0).margin(1e-13));
  // overlap of the x-polarized pair with EPR: 1/(N+1)
  for (int nn : {2, 5, 9})
    CHECK(fidelity_to(spin_coherent_pair(nn, M_PI / 2, 0.0), epr_state(nn)) ==
          Approx(1.0 / (nn + 1)).margin(1e-12));
  CHECK(fidelity_to(fock_state(3, 0, 1), epr_state(3)) == Approx(0.0).margin(1e-15));

  // unnormalized input is normalized internally
  auto s = spin_coherent_pair(4, M_PI / 2, 0.0);
  TwoEnsembleState scaled(4, s.amps() * 3.0);
  CHECK(fidelity_to(scaled, epr_state(4)) == Approx(1.0 / 5).margin(1e-12));

  VecC zero = VecC::Zero(dim_of(2));
  CHECK_THROWS_AS(fidelity_to(TwoEnsembleState(2, zero), epr_state(2)), std::domain_error);
  CHECK_THROWS_AS(entanglement_entropy(TwoEnsembleState(2, zero)), std::domain_error);
}

TEST_CASE("state invariants") {
  std::mt19937_64 rng(11);
  auto s = random_state(3, rng);
  // cached norm matches recomputation
  CHECK(s.norm_sq() == Approx(s.amps().squaredNorm()).epsilon(1e-12));
  CHECK(s.is_normalized());
  CHECK_THROWS_AS(TwoEnsembleState(3, VecC::Zero(5)), std::domain_error);
}

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "diec/quantum.hpp"
#include "test_support.hpp"

using namespace diec;
using namespace diec::quantum;
using test_support::max_abs;

namespace {

Matrix bell_projector(int k) {
  const Eigen::Vector4cd& v = bell_vectors()[static_cast<std::size_t>(k)];
  return v * v.adjoint();
}

Matrix4 as4(const Matrix& m) { return Matrix4(m); }

}  // namespace

TEST_SUITE("quantum") {

TEST_CASE("density validation") {
  CHECK_NOTHROW(validate_density(Matrix::Identity(4, 4) / 4.0));
  CHECK_THROWS_AS(validate_density(Matrix::Identity(4, 4) / 2.0), ValidationError);
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(validate_density(neg), ValidationError);
  Matrix nonherm = Matrix::Identity(2, 2) / 2.0;
  nonherm(0, 1) = 0.3;
  CHECK_THROWS_AS(validate_density(nonherm), ValidationError);
  CHECK_THROWS_AS(TwoQubitState::from_matrix(Matrix::Identity(2, 2) / 2.0), ValidationError);
}

TEST_CASE("partial trace of a product state") {
  RandomStream rng(11);
  const Matrix a = random_density(2, rng);
  const Matrix b = random_density(3, rng);
  const Matrix ab = kron(a, b);
  const std::array<int, 2> dims{2, 3};
  const std::array<int, 1> keep_a{0}, keep_b{1};
  CHECK(max_abs(partial_trace(ab, dims, keep_a) - a) < 1e-14);
  CHECK(max_abs(partial_trace(ab, dims, keep_b) - b) < 1e-14);

  const TwoQubitState phi(as4(bell_projector(0)));
  CHECK(max_abs(Matrix(partial_trace(phi, Side::A)) - Matrix::Identity(2, 2) / 2.0) < 1e-15);
  CHECK(max_abs(Matrix(partial_trace(phi, Side::B)) - Matrix::Identity(2, 2) / 2.0) < 1e-15);

  const std::array<int, 2> bad{2, 2};
  CHECK_THROWS_AS(partial_trace(ab, bad, keep_a), ValidationError);
}

TEST_CASE("partial trace of three subsystems keeps the requested order") {
  RandomStream rng(12);
  const Matrix a = random_density(2, rng), b = random_density(2, rng), c = random_density(4, rng);
  const Matrix abc = kron(kron(a, b), c);
  const std::array<int, 3> dims{2, 2, 4};
  const std::array<int, 2> keep{2, 0};
  CHECK(max_abs(partial_trace(abc, dims, keep) - kron(c, a)) < 1e-14);
}

TEST_CASE("entropies") {
  const double p[] = {0.5, 0.5};
  CHECK(shannon_entropy(p) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(von_neumann_entropy(bell_projector(3)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(von_neumann_entropy(Matrix::Identity(4, 4) / 4.0) == doctest::Approx(2.0).epsilon(1e-14));
  // Werner(0.5) spectrum (5/8, 1/8, 1/8, 1/8).
  CHECK(std::abs(von_neumann_entropy(Matrix(werner_state(0.5).matrix())) - 1.5487949406953985) < 1e-12);

  CHECK(conditional_entropy(TwoQubitState(as4(bell_projector(0)))) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(conditional_entropy(TwoQubitState(Matrix4::Identity() / 4.0)) == doctest::Approx(1.0).epsilon(1e-14));

  RandomStream rng(13);
  for (int k = 0; k < 50; ++k) {
    const double h = conditional_entropy(TwoQubitState(as4(random_density(4, rng))));
    CHECK(h >= -1.0 - 1e-12);
    CHECK(h <= 1.0 + 1e-12);
  }
}

TEST_CASE("fidelity") {
  RandomStream rng(14);
  const Matrix rho = random_density(4, rng);
  const Matrix sigma = random_density(4, rng);
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(fidelity(rho, sigma) - fidelity(sigma, rho)) < 1e-10);
  CHECK(fidelity(bell_projector(0), bell_projector(1)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fidelity(bell_projector(0), Matrix::Identity(4, 4) / 4.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_THROWS_AS(fidelity(rho, Matrix::Identity(2, 2) / 2.0), ValidationError);
}

TEST_CASE("Bell basis is orthonormal and ordered") {
  const Matrix4& b = bell_basis();
  CHECK(max_abs(Matrix(b.adjoint() * b) - Matrix::Identity(4, 4)) < 1e-15);
  // Phi- has amplitudes +1, -1 on |00>, |11>; Psi- on |01>, |10>.
  CHECK(bell_vectors()[1](3).real() < 0.0);
  CHECK(bell_vectors()[3](1).real() * bell_vectors()[3](2).real() < 0.0);
}

TEST_CASE("twirl fixes Bell states and the maximally mixed state") {
  for (int k = 0; k < 4; ++k) {
    const TwoQubitState s(as4(bell_projector(k)));
    CHECK(max_abs(Matrix(twirl(s).matrix() - s.matrix())) < 1e-14);
  }
  const TwoQubitState mixed(Matrix4::Identity() / 4.0);
  CHECK(max_abs(Matrix(twirl(mixed).matrix() - mixed.matrix())) < 1e-14);
}

TEST_CASE("twirl of |00> splits evenly between Phi+ and Phi-") {
  Matrix4 m = Matrix4::Zero();
  m(0, 0) = 1.0;
  const TwoQubitState zero(m);
  CHECK_THROWS_AS(bell_spectrum(zero), NotBellDiagonalError);
  try {
    (void)bell_spectrum(zero);
  } catch (const NotBellDiagonalError& e) {
    CHECK(e.max_off_diagonal() == doctest::Approx(0.5).epsilon(1e-12));
  }
  const auto s = bell_spectrum(twirl(zero)).values();
  CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(s[2]) < 1e-15);
  CHECK(std::abs(s[3]) < 1e-15);
}

TEST_CASE("twirl is idempotent and preserves the Bell diagonal") {
  RandomStream rng(15);
  for (int k = 0; k < 100; ++k) {
    const TwoQubitState rho(as4(random_density(4, rng)));
    const TwoQubitState t = twirl(rho);
    CHECK(bell_off_diagonal(t) < 1e-12);
    CHECK(max_abs(Matrix(twirl(t).matrix() - t.matrix())) < 1e-12);
    const Matrix4 before = in_bell_basis(rho);
    const Matrix4 after = in_bell_basis(t);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(before(i, i) - after(i, i)) < 1e-12);
  }
}

TEST_CASE("twirl property suite") {
  const TwirlSuiteReport r = twirl_property_suite(2024, 100);
  CHECK(r.states == 100);
  CHECK(r.passed);
  CHECK(r.max_off_diagonal < 1e-12);
  CHECK(r.max_fixed_point_defect < 1e-14);
  CHECK(r.max_decoupling_defect < 1e-9);
  CHECK(r.max_block_off_diagonal < 1e-12);
  CHECK_THROWS_AS(twirl_property_suite(1, 0), ValidationError);
}

TEST_CASE("Bell-diagonal spectra") {
  const auto w = bell_spectrum(werner_state(0.2)).values();
  CHECK(w[0] == doctest::Approx(0.85).epsilon(1e-14));
  for (int k = 1; k < 4; ++k) CHECK(w[k] == doctest::Approx(0.05).epsilon(1e-14));
  const auto psi = bell_spectrum(TwoQubitState(as4(bell_projector(3)))).values();
  CHECK(psi[3] == doctest::Approx(1.0).epsilon(1e-15));

  const auto spec = BellDiagonalSpectrum::from_values({0.1, 0.2, 0.3, 0.4});
  const auto back = bell_spectrum(bell_diagonal_state(spec)).values();
  for (int k = 0; k < 4; ++k) CHECK(back[k] == doctest::Approx(spec.values()[k]).epsilon(1e-14));

  CHECK_THROWS_AS(BellDiagonalSpectrum::from_values({0.5, 0.5, 0.5, -0.5}), ValidationError);
  CHECK_THROWS_AS(BellDiagonalSpectrum::from_values({0.3, 0.3, 0.3, 0.3}), ValidationError);
  CHECK_THROWS_AS(werner_state(1.5), ValidationError);
}

TEST_CASE("observable validation") {
  CHECK_NOTHROW(Observable(Matrix(pauli_x())));
  CHECK_THROWS_AS(Observable(Matrix::Identity(3, 3)), ValidationError);
  CHECK_THROWS_AS(Observable(Matrix(2.0 * Matrix::Identity(2, 2))), ValidationError);
  CHECK_THROWS_AS(Observable(Matrix::Identity(18, 18)), ValidationError);
  Matrix nonherm = Matrix::Zero(2, 2);
  nonherm(0, 1) = 1.0;
  nonherm(1, 0) = -1.0;
  CHECK_THROWS_AS(Observable{nonherm}, ValidationError);

  const Observable z{Matrix(pauli_z())};
  CHECK(max_abs(z.projector(0) + z.projector(1) - Matrix::Identity(2, 2)) < 1e-15);
  CHECK(max_abs(z.projector(0) - z.projector(1) - z.matrix()) < 1e-15);
}

TEST_CASE("Jordan blocks of qubit observables") {
  const auto zx = jordan_blocks(Observable(Matrix(pauli_z())), Observable(Matrix(pauli_x())));
  REQUIRE(zx.size() == 1);
  CHECK(zx[0].angle == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));

  const auto zz = jordan_blocks(Observable(Matrix(pauli_z())), Observable(Matrix(pauli_z())));
  REQUIRE(zz.size() == 1);
  CHECK(std::abs(zz[0].angle) < 1e-12);

  CHECK_THROWS_AS(jordan_blocks(Observable(Matrix(pauli_z())), Observable(Matrix::Identity(4, 4))),
                  ValidationError);
}

TEST_CASE("Jordan decomposition recovers hidden angles") {
  RandomStream rng(16);
  const std::vector<std::vector<double>> cases{
      {0.3, 1.2}, {0.7, 0.7, 2.5}, {0.0, 1.0}, {std::numbers::pi, 0.4, 0.9, 1.6}};
  for (const auto& angles : cases) {
    const auto pair = test_support::reflections_with_angles(angles, rng);
    const Observable a0(pair.obs0), a1(pair.obs1);
    const auto blocks = jordan_blocks(a0, a1);
    REQUIRE(blocks.size() == angles.size());

    std::vector<double> got;
    Matrix completeness = Matrix::Zero(a0.dim(), a0.dim());
    Matrix rebuilt0 = Matrix::Zero(a0.dim(), a0.dim());
    Matrix rebuilt1 = Matrix::Zero(a0.dim(), a0.dim());
    for (const auto& b : blocks) {
      got.push_back(b.angle);
      const Matrix iso = b.isometry();
      completeness += iso * iso.adjoint();
      rebuilt0 += iso * b.obs0 * iso.adjoint();
      rebuilt1 += iso * b.obs1 * iso.adjoint();
      CHECK(std::abs((b.obs0 * b.obs1).trace().real() / 2.0 - std::cos(b.angle)) < 1e-8);
    }
    std::vector<double> want = angles;
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    for (std::size_t k = 0; k < want.size(); ++k) CHECK(std::abs(got[k] - want[k]) < 1e-8);
    CHECK(max_abs(completeness - Matrix::Identity(a0.dim(), a0.dim())) < 1e-10);
    CHECK(max_abs(rebuilt0 - a0.matrix()) < 1e-8);
    CHECK(max_abs(rebuilt1 - a1.matrix()) < 1e-8);
  }
}

TEST_CASE("Jordan decomposition of commuting observables with unequal multiplicities") {
  // obs0 = diag(1, 1, 1, -1), obs1 = diag(1, 1, -1, -1): blocks at angle 0 and pi plus leftovers.
  Matrix a = Matrix::Identity(4, 4);
  a(3, 3) = -1.0;
  Matrix b = Matrix::Identity(4, 4);
  b(2, 2) = -1.0;
  b(3, 3) = -1.0;
  const Observable a0(a), a1(b);
  const auto blocks = jordan_blocks(a0, a1);
  REQUIRE(blocks.size() == 2);
  Matrix completeness = Matrix::Zero(4, 4), rebuilt0 = Matrix::Zero(4, 4), rebuilt1 = Matrix::Zero(4, 4);
  for (const auto& bl : blocks) {
    const Matrix iso = bl.isometry();
    completeness += iso * iso.adjoint();
    rebuilt0 += iso * bl.obs0 * iso.adjoint();
    rebuilt1 += iso * bl.obs1 * iso.adjoint();
  }
  CHECK(max_abs(completeness - Matrix::Identity(4, 4)) < 1e-12);
  CHECK(max_abs(rebuilt0 - a) < 1e-12);
  CHECK(max_abs(rebuilt1 - b) < 1e-12);
}

TEST_CASE("random density matrices are valid and reproducible") {
  RandomStream r1(77), r2(77);
  const Matrix a = random_density(6, r1);
  const Matrix b = random_density(6, r2);
  CHECK(max_abs(a - b) == 0.0);
  CHECK_NOTHROW(validate_density(a));
  CHECK_THROWS_AS(random_density(0, r1), ValidationError);
}

}  // TEST_SUITE

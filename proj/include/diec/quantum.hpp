#pragma once

// Finite-dimensional quantum math used throughout the library: density
// matrices, binary observables, the Bell basis, the Pauli twirl, Jordan-block
// decomposition of observable pairs, entropies and fidelity.
//
// Entropies are in bits. Composite systems use the Kronecker ordering
// |a>|b> -> index a * dim_b + b, i.e. the first subsystem is most significant.

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "diec/errors.hpp"
#include "diec/rng.hpp"

namespace diec::quantum {

using Matrix = Eigen::MatrixXcd;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;
using Vector = Eigen::VectorXcd;

inline constexpr double kStateTolerance = 1e-10;
inline constexpr double kEigenvalueFloor = 1e-12;
/// Largest local dimension accepted for observables and device states.
inline constexpr int kMaxLocalDimension = 16;

enum class Side { A, B };

const Matrix2& pauli_x();
const Matrix2& pauli_y();
const Matrix2& pauli_z();

Matrix kron(const Matrix& lhs, const Matrix& rhs);

/// Largest entrywise |M - M^dagger|.
double hermiticity_defect(const Matrix& m);

/// Throws ValidationError unless `rho` is Hermitian, unit trace and PSD within `tol`.
void validate_density(const Matrix& rho, double tol = kStateTolerance);

/// Eigenvalues of a validated density matrix, ascending, clamped into [0, 1].
Eigen::VectorXd density_eigenvalues(const Matrix& rho);

/// Two-qubit density matrix. Construction validates the density invariants.
class TwoQubitState {
 public:
  explicit TwoQubitState(const Matrix4& m);
  /// Accepts a dynamic matrix; throws unless it is 4x4 and a valid state.
  static TwoQubitState from_matrix(const Matrix& m);

  const Matrix4& matrix() const noexcept { return m_; }

 private:
  Matrix4 m_;
};

/// Eigenvalues in the Bell basis, ordered (Phi+, Phi-, Psi+, Psi-).
struct BellDiagonalSpectrum {
  double phi_plus = 0.0;
  double phi_minus = 0.0;
  double psi_plus = 0.0;
  double psi_minus = 0.0;

  std::array<double, 4> values() const noexcept {
    return {phi_plus, phi_minus, psi_plus, psi_minus};
  }
  /// Validates non-negativity and normalization (1e-12).
  static BellDiagonalSpectrum from_values(const std::array<double, 4>& v);
};

/// Hermitian matrix squaring to the identity: a +-1 valued measurement.
class Observable {
 public:
  explicit Observable(const Matrix& m);
  const Matrix& matrix() const noexcept { return m_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }

  /// Projector onto outcome `bit` (0 <-> eigenvalue +1, 1 <-> eigenvalue -1).
  Matrix projector(int bit) const;

 private:
  Matrix m_;
};

/// One 2-dimensional block shared by a pair of binary observables.
///
/// In the basis (first, second) the restricted observables are `obs0` and
/// `obs1`. Regular blocks have obs0 = sigma_z and obs1 = cos(angle) sigma_z +
/// sin(angle) sigma_x. Blocks made of leftover common eigenvectors (only
/// possible at angle 0 or pi) may instead carry obs0 = +-I, obs1 = cos(angle) obs0.
struct JordanBlock {
  double angle = 0.0;
  Vector first;
  Vector second;
  Matrix2 obs0;
  Matrix2 obs1;

  /// d x 2 isometry with columns (first, second).
  Matrix isometry() const;
};

/// Simultaneous 2x2 block decomposition of two reflections of equal even dimension.
std::vector<JordanBlock> jordan_blocks(const Observable& obs0, const Observable& obs1);

/// Partial trace of a multipartite state; `keep` lists the subsystems retained, in order.
Matrix partial_trace(const Matrix& rho, std::span<const int> dims, std::span<const int> keep);
Matrix2 partial_trace(const TwoQubitState& state, Side keep);

double shannon_entropy(std::span<const double> probabilities);
double von_neumann_entropy(const Matrix& rho);

/// H(target | rest) = H(all) - H(all but target), for a state on subsystems `dims`.
double conditional_entropy(const Matrix& rho, std::span<const int> dims, int target);
/// H(A|B) of a two-qubit state.
double conditional_entropy(const TwoQubitState& state);

/// Uhlmann fidelity ||sqrt(rho) sqrt(sigma)||_1^2.
double fidelity(const Matrix& rho, const Matrix& sigma);

/// Bell vectors in the order (Phi+, Phi-, Psi+, Psi-).
const std::array<Eigen::Vector4cd, 4>& bell_vectors();
/// Unitary whose columns are the Bell vectors.
const Matrix4& bell_basis();

/// rho expressed in the Bell basis, B^dagger rho B.
Matrix4 in_bell_basis(const TwoQubitState& state);
/// Largest off-diagonal magnitude in the Bell basis.
double bell_off_diagonal(const TwoQubitState& state);

/// Average of (U x U) rho (U x U)^dagger over U in {I, X, Y, Z}.
TwoQubitState twirl(const TwoQubitState& state);

/// Error raised by bell_spectrum on a state that is not Bell-diagonal.
class NotBellDiagonalError : public ValidationError {
 public:
  NotBellDiagonalError(double max_off_diagonal);
  double max_off_diagonal() const noexcept { return max_off_diagonal_; }

 private:
  double max_off_diagonal_;
};

BellDiagonalSpectrum bell_spectrum(const TwoQubitState& state, double tol = kStateTolerance);
TwoQubitState bell_diagonal_state(const BellDiagonalSpectrum& spectrum);

/// (1 - xi)|Phi+><Phi+| + xi I/4.
TwoQubitState werner_state(double xi);

Matrix pure_state(const Vector& psi);

/// Ginibre-distributed random density matrix of dimension `dim` (full rank a.s.).
Matrix random_density(int dim, RandomStream& rng);

/// Outcome of the twirl property suite (see twirl_property_suite).
struct TwirlSuiteReport {
  int states = 0;
  /// Largest Bell-basis off-diagonal magnitude of a twirled random state.
  double max_off_diagonal = 0.0;
  /// Largest change of a Bell-basis diagonal entry under the twirl.
  double max_diagonal_change = 0.0;
  /// Largest entrywise |twirl(twirl(rho)) - twirl(rho)|.
  double max_idempotence_defect = 0.0;
  /// Largest entrywise change of the four Bell states and I/4.
  double max_fixed_point_defect = 0.0;
  /// |H(A|B K) - sum_k p_k H(A|B)_k| over random classical side information K.
  double max_decoupling_defect = 0.0;
  /// Largest Bell-basis off-diagonal entry of a side-information block.
  double max_block_off_diagonal = 0.0;
  bool passed = false;
};

/// Twirls `states` seeded random two-qubit states and checks Bell-diagonality
/// (1e-12), diagonal preservation (1e-12), idempotence (1e-12), the Bell and
/// maximally mixed fixed points (1e-14) and, for 4-valued classical side
/// information, block Bell-diagonality and additivity of H(A|B K) (1e-9).
TwirlSuiteReport twirl_property_suite(std::uint64_t seed, int states);

}  // namespace diec::quantum

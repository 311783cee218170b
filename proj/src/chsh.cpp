#include "diec/chsh.hpp"

#include <cmath>

namespace diec::chsh {

using quantum::Matrix;
using quantum::Observable;

Strategy::Strategy(Matrix state, std::array<Observable, 2> alice, std::array<Observable, 2> bob)
    : state_(std::move(state)), alice_(std::move(alice)), bob_(std::move(bob)) {
  if (alice_[0].dim() != alice_[1].dim() || bob_[0].dim() != bob_[1].dim())
    throw ValidationError("strategy: a party's two observables act on different dimensions");
  const auto d = static_cast<Eigen::Index>(alice_[0].dim()) * bob_[0].dim();
  if (state_.rows() != d || state_.cols() != d)
    throw ValidationError("strategy: state dimension does not match the observables");
  quantum::validate_density(state_);
}

Strategy Strategy::with_state(Matrix state) const { return Strategy(std::move(state), alice_, bob_); }

double omega_from_beta(double beta) { return 0.5 + beta / 8.0; }
double beta_from_omega(double omega) { return 8.0 * omega - 4.0; }

bool is_quantum_realizable(double beta) { return std::abs(beta) <= kMaxQuantumViolation + 1e-12; }

OutcomeTable outcome_table(const Strategy& s) {
  OutcomeTable table{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const Matrix proj = quantum::kron(s.alice(x).projector(a), s.bob(y).projector(b));
          const double p = (proj * s.state()).trace().real();
          table[2 * x + y][2 * a + b] = std::max(p, 0.0);
        }
  return table;
}

double correlator(const Strategy& s, int x, int y) {
  const Matrix op = quantum::kron(s.alice(x).matrix(), s.bob(y).matrix());
  return (op * s.state()).trace().real();
}

double chsh_value(const Strategy& s) {
  return correlator(s, 0, 0) + correlator(s, 0, 1) + correlator(s, 1, 0) - correlator(s, 1, 1);
}

GameScore winning_probability(const Strategy& s) {
  const OutcomeTable t = outcome_table(s);
  double omega = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if ((a ^ b) == (x & y)) omega += 0.25 * t[2 * x + y][2 * a + b];
  return {omega, beta_from_omega(omega)};
}

namespace {

Observable qubit_observable(const Eigen::Vector3d& n) {
  const Eigen::Vector3d u = n.normalized();
  return Observable(Matrix(u(0) * quantum::pauli_x() + u(1) * quantum::pauli_y() +
                           u(2) * quantum::pauli_z()));
}

}  // namespace

Strategy optimal_strategy() {
  const Eigen::Vector4cd& phi = quantum::bell_vectors()[0];
  const double r = std::numbers::sqrt2 / 2.0;
  return Strategy(Matrix(phi * phi.adjoint()),
                  {Observable(Matrix(quantum::pauli_z())), Observable(Matrix(quantum::pauli_x()))},
                  {Observable(Matrix(r * (quantum::pauli_z() + quantum::pauli_x()))),
                   Observable(Matrix(r * (quantum::pauli_z() - quantum::pauli_x())))});
}

Strategy deterministic_strategy(std::array<int, 2> answers_a, std::array<int, 2> answers_b) {
  auto fixed = [](int bit) {
    if (bit != 0 && bit != 1) throw ValidationError("deterministic answers must be bits");
    return Observable(Matrix((bit == 0 ? 1.0 : -1.0) * Eigen::Matrix2cd::Identity()));
  };
  Matrix zero = Matrix::Zero(4, 4);
  zero(0, 0) = 1.0;
  return Strategy(std::move(zero), {fixed(answers_a[0]), fixed(answers_a[1])},
                  {fixed(answers_b[0]), fixed(answers_b[1])});
}

Eigen::Matrix3d correlation_matrix(const quantum::TwoQubitState& state) {
  const std::array<const quantum::Matrix2*, 3> p{&quantum::pauli_x(), &quantum::pauli_y(),
                                                 &quantum::pauli_z()};
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      t(i, j) = (quantum::kron(*p[i], *p[j]) * Matrix(state.matrix())).trace().real();
  return t;
}

double max_chsh_value(const quantum::TwoQubitState& state) {
  const Eigen::Matrix3d t = correlation_matrix(state);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.transpose() * t);
  const auto& mu = es.eigenvalues();  // ascending
  return 2.0 * std::sqrt(std::max(mu(2) + mu(1), 0.0));
}

Strategy best_strategy_for(const quantum::TwoQubitState& state) {
  const Eigen::Matrix3d t = correlation_matrix(state);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.transpose() * t);
  const Eigen::Vector3d c1 = es.eigenvectors().col(2);
  const Eigen::Vector3d c2 = es.eigenvectors().col(1);
  const double s1 = std::sqrt(std::max(es.eigenvalues()(2), 0.0));
  const double s2 = std::sqrt(std::max(es.eigenvalues()(1), 0.0));
  const double theta = std::atan2(s2, s1);

  // Bob: b0 +- b1 along c1, c2; Alice aligns with T c1 and T c2.
  const Eigen::Vector3d b0 = std::cos(theta) * c1 + std::sin(theta) * c2;
  const Eigen::Vector3d b1 = std::cos(theta) * c1 - std::sin(theta) * c2;
  auto direction = [](const Eigen::Vector3d& v, const Eigen::Vector3d& fallback) {
    return v.norm() > 1e-14 ? Eigen::Vector3d(v) : fallback;
  };
  const Eigen::Vector3d a0 = direction(t * c1, Eigen::Vector3d::UnitZ());
  Eigen::Vector3d a1 = direction(t * c2, Eigen::Vector3d::UnitX());
  if (std::abs(a1.normalized().dot(a0.normalized())) > 1.0 - 1e-12) a1 = a0.unitOrthogonal();

  return Strategy(Matrix(state.matrix()), {qubit_observable(a0), qubit_observable(a1)},
                  {qubit_observable(b0), qubit_observable(b1)});
}

}  // namespace diec::chsh

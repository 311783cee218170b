#pragma once

// CHSH game semantics. Inputs x, y are uniform bits; outcome bit 0 corresponds
// to the +1 eigenvalue of the measured observable; the game is won when
// a XOR b == x AND y. Everything here is exact (Born-rule traces).

#include <array>
#include <numbers>

#include "diec/quantum.hpp"

namespace diec::chsh {

/// (2 + sqrt 2) / 4, the quantum optimum of the winning probability.
inline constexpr double kMaxQuantumWinProbability = (2.0 + std::numbers::sqrt2) / 4.0;
inline constexpr double kMaxQuantumViolation = 2.0 * std::numbers::sqrt2;
inline constexpr double kClassicalWinProbability = 0.75;

/// A source state together with both parties' observables for inputs 0 and 1.
class Strategy {
 public:
  Strategy(quantum::Matrix state, std::array<quantum::Observable, 2> alice,
           std::array<quantum::Observable, 2> bob);

  const quantum::Matrix& state() const noexcept { return state_; }
  const quantum::Observable& alice(int x) const { return alice_.at(x); }
  const quantum::Observable& bob(int y) const { return bob_.at(y); }
  int dim_a() const noexcept { return alice_[0].dim(); }
  int dim_b() const noexcept { return bob_[0].dim(); }

  /// Same observables, different state.
  Strategy with_state(quantum::Matrix state) const;

 private:
  quantum::Matrix state_;
  std::array<quantum::Observable, 2> alice_;
  std::array<quantum::Observable, 2> bob_;
};

struct GameScore {
  double omega = 0.0;
  double beta = 0.0;
};

/// P(a, b | x, y) stored at [2x + y][2a + b].
using OutcomeTable = std::array<std::array<double, 4>, 4>;

double omega_from_beta(double beta);
double beta_from_omega(double omega);
/// True when beta lies in [-2 sqrt 2, 2 sqrt 2] (up to 1e-12).
bool is_quantum_realizable(double beta);

OutcomeTable outcome_table(const Strategy& strategy);
/// <A_x B_y>.
double correlator(const Strategy& strategy, int x, int y);
/// E00 + E01 + E10 - E11.
double chsh_value(const Strategy& strategy);
GameScore winning_probability(const Strategy& strategy);

/// |Phi+> with Alice sigma_z / sigma_x and Bob (sigma_z +- sigma_x)/sqrt 2.
Strategy optimal_strategy();
/// Local deterministic strategy answering a = answers_a[x], b = answers_b[y].
Strategy deterministic_strategy(std::array<int, 2> answers_a, std::array<int, 2> answers_b);

/// T_ij = Tr(rho sigma_i x sigma_j).
Eigen::Matrix3d correlation_matrix(const quantum::TwoQubitState& state);
/// Largest CHSH value reachable with projective qubit measurements on `state`.
double max_chsh_value(const quantum::TwoQubitState& state);
/// Observables reaching max_chsh_value on `state`.
Strategy best_strategy_for(const quantum::TwoQubitState& state);

}  // namespace diec::chsh

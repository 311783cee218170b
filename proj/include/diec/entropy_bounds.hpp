#pragma once

// Single-round bound on the conditional von Neumann entropy of Bell-diagonal
// two-qubit states with a given CHSH violation, plus a brute-force optimizer
// over the eigenvalue constraint set that serves as an independent check.

#include <span>

#include "diec/quantum.hpp"

namespace diec::entropy {

/// h(x) = -x log x - (1-x) log(1-x), in bits.
double binary_entropy(double x);

/// Argument of h in the bound, 1/2 - (2 omega - 1)/sqrt 2.
double bound_argument(double omega);

/// g(omega) = 2 h(1/2 - (2 omega - 1)/sqrt 2) - 1. Throws DomainError when the
/// argument of h leaves [0, 1] (omega outside [~0.1464, (2+sqrt 2)/4]).
double max_conditional_entropy(double omega);

/// dg/domega = -2 sqrt 2 log2((1 - x)/x), x = bound_argument(omega).
double max_conditional_entropy_slope(double omega);

/// 2 h(1/2 - beta/(4 sqrt 2)); the maximal H(AB) over Bell-diagonal states reaching beta.
double max_total_entropy(double beta);

/// Maximizing spectrum (c-^2, c- c+, c+^2, c- c+) with c+- = 1/2 +- beta/(4 sqrt 2).
quantum::BellDiagonalSpectrum optimal_spectrum(double beta);

struct EntropyBoundResult {
  double beta = 0.0;
  double omega = 0.0;
  double max_total_entropy = 0.0;
  double conditional_bound = 0.0;
  quantum::BellDiagonalSpectrum optimal_spectrum;
};

/// Requires beta in [2, 2 sqrt 2].
EntropyBoundResult bell_diagonal_entropy_bound(double beta);

struct BruteForceResult {
  quantum::BellDiagonalSpectrum spectrum;
  double entropy = 0.0;
  /// Best entropy found when the violation is carried by the second or third
  /// pairing of eigenvalues (coarse grid); must not exceed `entropy`.
  double other_branch_entropy = 0.0;
  std::size_t feasible_points = 0;
};

/// Grid search plus coordinate-descent refinement over (lambda_Phi-, lambda_Psi-)
/// with the first pairing carrying the violation. beta in [2, 2 sqrt 2],
/// grid_step in (0, 0.05]. The returned spectrum is relabelled with the
/// Phi+ <-> Psi+ exchange so that lambda_Psi+ >= lambda_Phi+.
BruteForceResult brute_force_max_entropy(double beta, double grid_step);

/// CHSH value of a Bell-diagonal state (max over the three eigenvalue pairings).
double bell_diagonal_violation(const quantum::BellDiagonalSpectrum& spectrum);

struct WeightedViolation {
  double weight = 0.0;
  double beta = 0.0;
};

/// S_H(sum_k w_k beta_k) - 1 for a mixture of Bell-diagonal components. Checks
/// concavity (sum_k w_k (S_H(beta_k) - 1) <= result) and throws
/// VerificationError if it fails by more than 1e-12.
double convex_mixture_bound(std::span<const WeightedViolation> components);

}  // namespace diec::entropy

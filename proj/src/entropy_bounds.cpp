#include "diec/entropy_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "diec/chsh.hpp"

namespace diec::entropy {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

void require_violation(double beta) {
  if (!(beta >= 2.0 && beta <= chsh::kMaxQuantumViolation + 1e-12)) {
    std::ostringstream os;
    os << "CHSH violation " << beta << " outside [2, 2 sqrt 2]";
    throw ValidationError(os.str());
  }
}

double xlog2x(double p) { return p > quantum::kEigenvalueFloor ? p * std::log2(p) : 0.0; }

double spectrum_entropy(const std::array<double, 4>& l) {
  return -(xlog2x(l[0]) + xlog2x(l[1]) + xlog2x(l[2]) + xlog2x(l[3]));
}

// Pairings of eigenvalue slots (Phi+, Phi-, Psi+, Psi-) = (0, 1, 2, 3). In
// branch k, `solved` are the two slots fixed by the violation constraint and
// `free` the two grid coordinates.
struct Branch {
  std::array<int, 2> solved;
  std::array<int, 2> free;
};
constexpr std::array<Branch, 3> kBranches{{
    {{0, 2}, {1, 3}},  // (Phi+ - Psi+)^2 + (Phi- - Psi-)^2
    {{0, 3}, {1, 2}},  // (Phi+ - Psi-)^2 + (Phi- - Psi+)^2
    {{0, 1}, {2, 3}},  // (Phi+ - Phi-)^2 + (Psi+ - Psi-)^2
}};

// Spectrum for free coordinates (p, q) in a branch, or nullopt if infeasible.
std::optional<std::array<double, 4>> branch_point(const Branch& br, double beta, double p, double q,
                                                  bool band) {
  if (p < 0.0 || q < 0.0) return std::nullopt;
  const double diff = p - q;
  if (band && std::abs(diff) > beta / 4.0 + 1e-15) return std::nullopt;
  const double disc = beta * beta / 8.0 - diff * diff;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  const double hi = 0.5 * (1.0 - p - q + s);
  const double lo = 0.5 * (1.0 - p - q - s);
  if (lo < -1e-15) return std::nullopt;
  std::array<double, 4> l{};
  l[br.solved[0]] = hi;
  l[br.solved[1]] = std::max(lo, 0.0);
  l[br.free[0]] = p;
  l[br.free[1]] = q;
  return l;
}

}  // namespace

double binary_entropy(double x) {
  if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) {
    std::ostringstream os;
    os << "binary entropy argument " << x << " outside [0, 1]";
    throw ValidationError(os.str());
  }
  x = std::clamp(x, 0.0, 1.0);
  return -(xlog2x(x) + xlog2x(1.0 - x));
}

double bound_argument(double omega) { return 0.5 - (2.0 * omega - 1.0) / kSqrt2; }

double max_conditional_entropy(double omega) {
  const double x = bound_argument(omega);
  if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) {
    std::ostringstream os;
    os << "winning probability " << omega
       << " outside the domain of the entropy bound; use the piecewise tradeoff function";
    throw DomainError(os.str());
  }
  return 2.0 * binary_entropy(x) - 1.0;
}

double max_conditional_entropy_slope(double omega) {
  const double x = bound_argument(omega);
  if (!(x > 0.0 && x < 1.0)) throw DomainError("entropy bound slope is unbounded at this winning probability");
  return -2.0 * kSqrt2 * std::log2((1.0 - x) / x);
}

double max_total_entropy(double beta) { return 2.0 * binary_entropy(0.5 - beta / (4.0 * kSqrt2)); }

quantum::BellDiagonalSpectrum optimal_spectrum(double beta) {
  const double c = beta / (4.0 * kSqrt2);
  const double minus = 0.5 - c;
  const double plus = 0.5 + c;
  return quantum::BellDiagonalSpectrum::from_values({minus * minus, minus * plus, plus * plus, minus * plus});
}

EntropyBoundResult bell_diagonal_entropy_bound(double beta) {
  require_violation(beta);
  beta = std::min(beta, chsh::kMaxQuantumViolation);
  EntropyBoundResult r;
  r.beta = beta;
  r.omega = chsh::omega_from_beta(beta);
  r.max_total_entropy = max_total_entropy(beta);
  r.conditional_bound = r.max_total_entropy - 1.0;
  r.optimal_spectrum = optimal_spectrum(beta);
  return r;
}

double bell_diagonal_violation(const quantum::BellDiagonalSpectrum& spectrum) {
  const auto l = spectrum.values();
  double best = 0.0;
  for (const auto& br : kBranches) {
    const double d1 = l[br.solved[0]] - l[br.solved[1]];
    const double d2 = l[br.free[0]] - l[br.free[1]];
    best = std::max(best, std::sqrt(d1 * d1 + d2 * d2));
  }
  return 2.0 * kSqrt2 * best;
}

BruteForceResult brute_force_max_entropy(double beta, double grid_step) {
  require_violation(beta);
  beta = std::min(beta, chsh::kMaxQuantumViolation);
  if (!(grid_step > 0.0 && grid_step <= 0.05)) throw ValidationError("grid step must lie in (0, 0.05]");

  const auto& main = kBranches[0];
  const auto steps = static_cast<long>(std::floor(1.0 / grid_step + 1e-9));

  BruteForceResult out;
  double best = -1.0;
  double best_p = 0.0;
  double best_q = 0.0;
  // Row-major scan; strict improvement keeps the lexicographically smallest
  // (lambda_Phi-, lambda_Psi-) on ties.
  for (long i = 0; i <= steps; ++i) {
    const double p = static_cast<double>(i) * grid_step;
    for (long j = 0; j <= steps; ++j) {
      const double q = static_cast<double>(j) * grid_step;
      const auto l = branch_point(main, beta, p, q, true);
      if (!l) continue;
      ++out.feasible_points;
      const double h = spectrum_entropy(*l);
      if (h > best) {
        best = h;
        best_p = p;
        best_q = q;
      }
    }
  }
  if (out.feasible_points == 0) throw VerificationError("brute-force entropy search: empty feasible region");

  // Coordinate descent with step halving.
  auto value = [&](double p, double q) {
    const auto l = branch_point(main, beta, p, q, true);
    return l ? spectrum_entropy(*l) : -1.0;
  };
  for (double h = grid_step; h >= 1e-8; h *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      const std::array<std::pair<double, double>, 4> moves{
          {{best_p - h, best_q}, {best_p + h, best_q}, {best_p, best_q - h}, {best_p, best_q + h}}};
      for (const auto& [p, q] : moves) {
        const double v = value(p, q);
        if (v > best + 1e-15) {
          best = v;
          best_p = p;
          best_q = q;
          moved = true;
        }
      }
    }
  }

  auto l = *branch_point(main, beta, best_p, best_q, true);
  std::swap(l[0], l[2]);  // Phi+ <-> Psi+, both objective and violation are invariant
  out.spectrum = quantum::BellDiagonalSpectrum::from_values(l);
  out.entropy = best;

  // Coarse spot-check of the remaining two pairings, without the symmetry band.
  const double coarse = std::max(grid_step, 0.01);
  const auto coarse_steps = static_cast<long>(std::floor(1.0 / coarse + 1e-9));
  double other = 0.0;
  for (std::size_t b = 1; b < kBranches.size(); ++b)
    for (long i = 0; i <= coarse_steps; ++i)
      for (long j = 0; j <= coarse_steps; ++j) {
        const auto pt = branch_point(kBranches[b], beta, i * coarse, j * coarse, false);
        if (!pt) continue;
        const auto spec = quantum::BellDiagonalSpectrum::from_values(*pt);
        if (bell_diagonal_violation(spec) > beta + 1e-9) continue;  // a different pairing binds
        other = std::max(other, spectrum_entropy(*pt));
      }
  out.other_branch_entropy = other;
  return out;
}

double convex_mixture_bound(std::span<const WeightedViolation> components) {
  if (components.empty()) throw ValidationError("convex mixture needs at least one component");
  double total = 0.0;
  double mean_beta = 0.0;
  double mixed = 0.0;
  for (const auto& c : components) {
    if (!(c.weight >= 0.0)) throw ValidationError("mixture weights must be non-negative");
    require_violation(c.beta);
    total += c.weight;
    mean_beta += c.weight * c.beta;
    mixed += c.weight * (max_total_entropy(std::min(c.beta, chsh::kMaxQuantumViolation)) - 1.0);
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("mixture weights must sum to 1");
  const double result = max_total_entropy(std::min(mean_beta, chsh::kMaxQuantumViolation)) - 1.0;
  if (mixed > result + 1e-12) throw VerificationError("concavity of the entropy bound violated");
  return result;
}

}  // namespace diec::entropy

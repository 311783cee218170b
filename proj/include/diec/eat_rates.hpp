#pragma once

// Certified distillation rates from CHSH statistics via entropy accumulation:
// the tradeoff function f, its tangent extension f_max, the finite-size
// correction, eta_opt, log L and the completeness bound, plus the parameter
// optimizers used to produce rate curves.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace diec::eat {

/// Round count, test probability, expected winning probability, confidence width.
struct ProtocolParams {
  std::uint64_t n = 0;
  double gamma = 1.0;
  double omega_exp = 0.0;
  double delta_est = 0.0;

  /// Observed-winning threshold ω_exp·γ − δ_est (per round).
  double threshold() const noexcept { return omega_exp * gamma - delta_est; }

  /// Preconditions for rate certification: n >= 1, gamma in (0, 1],
  /// omega_exp in [0.75, (2+sqrt 2)/4], delta_est in (0, 1), threshold > 0.
  void validate_for_certification() const;
  /// Looser preconditions for simulation: gamma in [0, 1], omega_exp in
  /// [0, 1], delta_est in [0, 1).
  void validate_for_simulation() const;
};

struct ErrorBudget {
  double eps_dist = 1e-5;
  double eps_snd = 1e-5;
  double eps_cmp = 1e-2;
  double eps_smo = 0.0;

  /// All in [0, 1]; eps_smo < sqrt(eps_dist); eps_smo * eps_snd > 0.
  void validate() const;
};

/// Frequencies of W = 0, W = 1 and W = ⊥.
struct FrequencyDistribution {
  double p0 = 0.0;
  double p1 = 0.0;
  double p_bot = 1.0;

  /// The protocol-induced distribution (γ − p1, p1, 1 − γ).
  static FrequencyDistribution from_winning(double p1, double gamma);
  void validate(double gamma) const;
};

/// How the gradient term in the second-order coefficient is evaluated.
/// as_printed: |g'(ω_t)| / γ. eat_strict: ceil(|a(ω_t)|), a the slope of f.
enum class GradientMode { as_printed, eat_strict };

const char* to_string(GradientMode mode) noexcept;
/// Accepts "as-printed" and "eat-strict"; throws ValidationError otherwise.
GradientMode parse_gradient_mode(const std::string& name);

struct RateCertificate {
  double eta_opt = 0.0;
  FrequencyDistribution minimizer_pt;
  /// ω_t = p_t(1)/γ at the minimizer.
  double pt_omega = 0.0;
  /// v / sqrt(n) is the finite-size term added to f_max.
  double second_order_v = 0.0;
  double log_l = 0.0;
  double rate_raw = 0.0;
  /// max(rate_raw, 0).
  double rate = 0.0;
  ProtocolParams params;
  ErrorBudget budget;
  GradientMode mode = GradientMode::eat_strict;
  /// Empty unless the optimizer found no positive rate.
  std::string diagnostic;
};

/// f(p) = (1 − γ) g(p1/γ) for p1/γ <= (2+sqrt 2)/4, else γ − 1. For
/// p1/γ < 1/2 the bound saturates at (1 − γ).
double tradeoff_f(const FrequencyDistribution& p, double gamma);
double tradeoff_f(double p1, double gamma);

/// Slope a = df/dp1 at p_t(1) = ω_t γ, i.e. ((1 − γ)/γ) g'(ω_t).
double tradeoff_slope(double omega_t, double gamma);

/// f for p1 <= p_t(1), tangent line at p_t above. ω_t = p_t(1)/γ must lie in
/// (3/4, (2+sqrt 2)/4).
double tradeoff_fmax(const FrequencyDistribution& p, const FrequencyDistribution& p_t, double gamma);
double tradeoff_fmax(double p1, double omega_t, double gamma);

/// Second-order coefficient v = 2 (log 5 + G) sqrt(1 − 2 log(eps_smo eps_snd)).
double second_order_coefficient(double omega_t, double gamma, const ErrorBudget& budget,
                                 GradientMode mode);

/// η = f_max(p1_observed, p_t) + v / sqrt(n).
double eta(double p1_observed, const FrequencyDistribution& p_t, const ErrorBudget& budget,
           const ProtocolParams& params, GradientMode mode = GradientMode::eat_strict);

struct EtaOptResult {
  double value = 0.0;
  FrequencyDistribution minimizer;
  double omega_t = 0.0;
  double second_order_v = 0.0;
};

/// Minimum of η over ω_t in (3/4, (2+sqrt 2)/4) at p1 = ω_exp γ − δ_est:
/// 200-point scan then golden-section search to width 1e-9.
EtaOptResult eta_opt(const ProtocolParams& params, const ErrorBudget& budget,
                     GradientMode mode = GradientMode::eat_strict);

/// log L = −n η_opt − 4 log(1/(sqrt eps_dist − eps_smo)); rate = log L / n.
RateCertificate certified_log_l(const ProtocolParams& params, const ErrorBudget& budget,
                                GradientMode mode = GradientMode::eat_strict);

/// exp(−2 n δ²), the Hoeffding bound on the honest abort probability.
double completeness_bound(std::uint64_t n, double delta_est);
/// sqrt(ln(1/eps_cmp) / (2n)), the inverse of completeness_bound.
double delta_for_completeness(std::uint64_t n, double eps_cmp);

/// IID limit of the rate, −g(ω), for ω in [1/2, (2+sqrt 2)/4].
double asymptotic_rate(double omega);

struct ErrorTargets {
  double eps_dist = 1e-5;
  double eps_snd = 1e-5;
  double eps_cmp = 1e-2;
};

/// Per-point optimization: δ_est from eps_cmp, then rate maximized over γ and
/// eps_smo by nested scan + golden-section searches.
RateCertificate optimize_parameters(std::uint64_t n, double omega_exp, const ErrorTargets& targets,
                                    GradientMode mode = GradientMode::eat_strict);

/// One (γ, eps_smo) pair shared by every ω_exp of a curve, chosen to maximize
/// the mean raw rate over `omegas`. Certificates are returned in input order.
std::vector<RateCertificate> optimize_curve_parameters(std::uint64_t n, std::span<const double> omegas,
                                                       const ErrorTargets& targets,
                                                       GradientMode mode = GradientMode::eat_strict);

}  // namespace diec::eat

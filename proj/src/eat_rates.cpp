#include "diec/eat_rates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "diec/chsh.hpp"
#include "diec/entropy_bounds.hpp"
#include "diec/errors.hpp"
#include "internal/search.hpp"

namespace diec::eat {

namespace {

constexpr double kW = chsh::kMaxQuantumWinProbability;
constexpr double kEndpointShrink = 1e-9;
constexpr double kSumTolerance = 1e-12;

[[noreturn]] void fail(const std::string& what) { throw ValidationError(what); }

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

void check_omega_t(double omega_t) {
  if (!(omega_t > 0.75 && omega_t < kW)) {
    std::ostringstream os;
    os << "p_t(1)/gamma = " << omega_t << " must lie strictly inside (3/4, (2+sqrt 2)/4)";
    fail(os.str());
  }
}

// η as a function of ω_t for fixed observed p1.
double eta_at(double p1, double omega_t, double gamma, double sqrt_n, const ErrorBudget& budget,
              GradientMode mode) {
  return tradeoff_fmax(p1, omega_t, gamma) +
         second_order_coefficient(omega_t, gamma, budget, mode) / sqrt_n;
}

// eps_smo = t sqrt(eps_dist) with t = 1 / (1 + 10^-q).
double eps_smo_from(double q, double eps_dist) {
  return std::sqrt(eps_dist) / (1.0 + std::pow(10.0, -q));
}

constexpr double kQLow = -6.0;
constexpr double kQHigh = 9.0;
constexpr std::size_t kScan = 61;
constexpr double kSearchTol = 1e-6;

ErrorBudget budget_for(const ErrorTargets& t, double eps_smo) {
  return ErrorBudget{t.eps_dist, t.eps_snd, t.eps_cmp, eps_smo};
}

void validate_targets(const ErrorTargets& t) {
  if (!(t.eps_dist > 0.0 && t.eps_dist <= 1.0)) fail("eps_dist must lie in (0, 1]");
  if (!(t.eps_snd > 0.0 && t.eps_snd <= 1.0)) fail("eps_snd must lie in (0, 1]");
  if (!(t.eps_cmp > 0.0 && t.eps_cmp < 1.0)) fail("eps_cmp must lie in (0, 1)");
}

void validate_omega_exp(double omega) {
  if (!(omega >= 0.75 - 1e-12 && omega <= kW + 1e-12)) {
    std::ostringstream os;
    os << "omega_exp = " << omega << " outside [0.75, (2+sqrt 2)/4]";
    fail(os.str());
  }
}

// Smallest admissible log10(gamma) so that omega gamma - delta > 0.
double log_gamma_floor(double delta, double omega_min) {
  return std::max(-6.0, std::log10(delta / omega_min)) + kEndpointShrink;
}

template <class Rate>
std::pair<double, double> maximize_gamma_eps(double log_gamma_lo, Rate&& rate) {
  // Returns (gamma, q) maximizing rate(gamma, q).
  auto best_q = [&](double gamma) {
    return detail::scan_golden_minimize([&](double q) { return -rate(gamma, q); }, kQLow, kQHigh,
                                        kScan, kSearchTol);
  };
  const auto outer = detail::scan_golden_minimize(
      [&](double lg) { return best_q(std::pow(10.0, lg)).value; }, log_gamma_lo, 0.0, kScan,
      kSearchTol);
  const double gamma = std::pow(10.0, outer.x);
  return {gamma, best_q(gamma).x};
}

}  // namespace

void ProtocolParams::validate_for_certification() const {
  if (n < 1) fail("n must be at least 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma must lie in (0, 1]");
  validate_omega_exp(omega_exp);
  if (!(delta_est > 0.0 && delta_est < 1.0)) fail("delta_est must lie in (0, 1)");
  if (!(threshold() > 0.0)) fail("omega_exp * gamma - delta_est must be positive");
}

void ProtocolParams::validate_for_simulation() const {
  if (n < 1) fail("n must be at least 1");
  if (!in_unit(gamma)) fail("gamma must lie in [0, 1]");
  if (!in_unit(omega_exp)) fail("omega_exp must lie in [0, 1]");
  if (!(delta_est >= 0.0 && delta_est < 1.0)) fail("delta_est must lie in [0, 1)");
}

void ErrorBudget::validate() const {
  if (!in_unit(eps_dist)) fail("eps_dist must lie in [0, 1]");
  if (!in_unit(eps_snd)) fail("eps_snd must lie in [0, 1]");
  if (!in_unit(eps_cmp)) fail("eps_cmp must lie in [0, 1]");
  if (!(eps_smo >= 0.0 && eps_smo < std::sqrt(eps_dist)))
    fail("eps_smo must lie in [0, sqrt(eps_dist))");
  if (!(eps_smo * eps_snd > 0.0)) fail("eps_smo * eps_snd must be positive");
}

FrequencyDistribution FrequencyDistribution::from_winning(double p1, double gamma) {
  return {gamma - p1, p1, 1.0 - gamma};
}

void FrequencyDistribution::validate(double gamma) const {
  if (p0 < -kSumTolerance || p1 < -kSumTolerance || p_bot < -kSumTolerance)
    fail("frequencies must be non-negative");
  if (std::abs(p0 + p1 + p_bot - 1.0) > kSumTolerance) fail("frequencies must sum to 1");
  if (std::abs(p0 + p1 - gamma) > kSumTolerance) fail("p0 + p1 must equal gamma");
}

const char* to_string(GradientMode mode) noexcept {
  return mode == GradientMode::as_printed ? "as-printed" : "eat-strict";
}

GradientMode parse_gradient_mode(const std::string& name) {
  if (name == "as-printed") return GradientMode::as_printed;
  if (name == "eat-strict") return GradientMode::eat_strict;
  fail("unknown gradient mode '" + name + "' (expected as-printed or eat-strict)");
}

double tradeoff_f(double p1, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma must lie in (0, 1]");
  const double omega = p1 / gamma;
  if (omega > kW) return gamma - 1.0;
  if (omega <= 0.5) return 1.0 - gamma;
  return (1.0 - gamma) * entropy::max_conditional_entropy(omega);
}

double tradeoff_f(const FrequencyDistribution& p, double gamma) {
  p.validate(gamma);
  return tradeoff_f(p.p1, gamma);
}

double tradeoff_slope(double omega_t, double gamma) {
  check_omega_t(omega_t);
  return (1.0 - gamma) / gamma * entropy::max_conditional_entropy_slope(omega_t);
}

double tradeoff_fmax(double p1, double omega_t, double gamma) {
  check_omega_t(omega_t);
  const double pt = omega_t * gamma;
  if (p1 <= pt) return tradeoff_f(p1, gamma);
  const double f_t = (1.0 - gamma) * entropy::max_conditional_entropy(omega_t);
  return f_t + tradeoff_slope(omega_t, gamma) * (p1 - pt);
}

double tradeoff_fmax(const FrequencyDistribution& p, const FrequencyDistribution& p_t, double gamma) {
  p.validate(gamma);
  p_t.validate(gamma);
  return tradeoff_fmax(p.p1, p_t.p1 / gamma, gamma);
}

double second_order_coefficient(double omega_t, double gamma, const ErrorBudget& budget,
                                GradientMode mode) {
  if (!(budget.eps_smo * budget.eps_snd > 0.0)) fail("eps_smo * eps_snd must be positive");
  const double grad = mode == GradientMode::as_printed
                          ? std::abs(entropy::max_conditional_entropy_slope(omega_t)) / gamma
                          : std::ceil(std::abs(tradeoff_slope(omega_t, gamma)));
  return 2.0 * (std::log2(5.0) + grad) * std::sqrt(1.0 - 2.0 * std::log2(budget.eps_smo * budget.eps_snd));
}

double eta(double p1_observed, const FrequencyDistribution& p_t, const ErrorBudget& budget,
           const ProtocolParams& params, GradientMode mode) {
  p_t.validate(params.gamma);
  if (params.n < 1) fail("n must be at least 1");
  return eta_at(p1_observed, p_t.p1 / params.gamma, params.gamma,
                std::sqrt(static_cast<double>(params.n)), budget, mode);
}

EtaOptResult eta_opt(const ProtocolParams& params, const ErrorBudget& budget, GradientMode mode) {
  params.validate_for_certification();
  budget.validate();
  const double p1 = params.threshold();
  const double sqrt_n = std::sqrt(static_cast<double>(params.n));
  auto objective = [&](double w) { return eta_at(p1, w, params.gamma, sqrt_n, budget, mode); };
  const auto best = detail::scan_golden_minimize(objective, 0.75 + kEndpointShrink, kW - kEndpointShrink,
                                                 200, 1e-9);
  EtaOptResult r;
  r.value = best.value;
  r.omega_t = best.x;
  r.minimizer = FrequencyDistribution::from_winning(best.x * params.gamma, params.gamma);
  r.second_order_v = second_order_coefficient(best.x, params.gamma, budget, mode);
  return r;
}

RateCertificate certified_log_l(const ProtocolParams& params, const ErrorBudget& budget, GradientMode mode) {
  const auto opt = eta_opt(params, budget, mode);
  RateCertificate c;
  c.eta_opt = opt.value;
  c.minimizer_pt = opt.minimizer;
  c.pt_omega = opt.omega_t;
  c.second_order_v = opt.second_order_v;
  const double n = static_cast<double>(params.n);
  c.log_l = -n * opt.value - 4.0 * std::log2(1.0 / (std::sqrt(budget.eps_dist) - budget.eps_smo));
  c.rate_raw = c.log_l / n;
  c.rate = std::max(c.rate_raw, 0.0);
  c.params = params;
  c.budget = budget;
  c.mode = mode;
  return c;
}

double completeness_bound(std::uint64_t n, double delta_est) {
  if (n < 1) fail("n must be at least 1");
  if (!(delta_est >= 0.0 && delta_est < 1.0)) fail("delta_est must lie in [0, 1)");
  return std::exp(-2.0 * static_cast<double>(n) * delta_est * delta_est);
}

double delta_for_completeness(std::uint64_t n, double eps_cmp) {
  if (n < 1) fail("n must be at least 1");
  if (!(eps_cmp > 0.0 && eps_cmp < 1.0)) fail("eps_cmp must lie in (0, 1)");
  return std::sqrt(std::log(1.0 / eps_cmp) / (2.0 * static_cast<double>(n)));
}

double asymptotic_rate(double omega) {
  if (!(omega >= 0.5 && omega <= kW + 1e-12)) fail("asymptotic rate needs omega in [1/2, (2+sqrt 2)/4]");
  return -entropy::max_conditional_entropy(std::min(omega, kW));
}

RateCertificate optimize_parameters(std::uint64_t n, double omega_exp, const ErrorTargets& targets,
                                    GradientMode mode) {
  validate_targets(targets);
  validate_omega_exp(omega_exp);
  omega_exp = std::min(omega_exp, kW);
  const double delta = delta_for_completeness(n, targets.eps_cmp);
  const double lo = log_gamma_floor(delta, omega_exp);
  if (lo >= 0.0) {
    RateCertificate c;
    c.params = {n, 1.0, omega_exp, delta};
    c.mode = mode;
    c.rate_raw = 0.0;
    c.diagnostic = "no admissible test probability: delta_est >= omega_exp";
    return c;
  }
  auto rate = [&](double gamma, double q) {
    const ProtocolParams p{n, gamma, omega_exp, delta};
    return certified_log_l(p, budget_for(targets, eps_smo_from(q, targets.eps_dist)), mode).rate_raw;
  };
  const auto [gamma, q] = maximize_gamma_eps(lo, rate);
  auto cert = certified_log_l({n, gamma, omega_exp, delta},
                              budget_for(targets, eps_smo_from(q, targets.eps_dist)), mode);
  if (cert.rate_raw <= 0.0) cert.diagnostic = "no positive rate for any test probability and smoothing";
  return cert;
}

std::vector<RateCertificate> optimize_curve_parameters(std::uint64_t n, std::span<const double> omegas,
                                                       const ErrorTargets& targets, GradientMode mode) {
  validate_targets(targets);
  if (omegas.empty()) fail("curve needs at least one omega_exp");
  std::vector<double> ws(omegas.begin(), omegas.end());
  for (auto& w : ws) {
    validate_omega_exp(w);
    w = std::min(w, kW);
  }
  const double delta = delta_for_completeness(n, targets.eps_cmp);
  const double lo = log_gamma_floor(delta, *std::min_element(ws.begin(), ws.end()));
  std::vector<RateCertificate> out;
  if (lo >= 0.0) {
    for (double w : ws) out.push_back(optimize_parameters(n, w, targets, mode));
    return out;
  }
  auto mean_rate = [&](double gamma, double q) {
    const auto budget = budget_for(targets, eps_smo_from(q, targets.eps_dist));
    double sum = 0.0;
    for (double w : ws) sum += certified_log_l({n, gamma, w, delta}, budget, mode).rate_raw;
    return sum / static_cast<double>(ws.size());
  };
  const auto [gamma, q] = maximize_gamma_eps(lo, mean_rate);
  const auto budget = budget_for(targets, eps_smo_from(q, targets.eps_dist));
  for (double w : ws) {
    auto cert = certified_log_l({n, gamma, w, delta}, budget, mode);
    if (cert.rate_raw <= 0.0) cert.diagnostic = "no positive rate at the curve's shared parameters";
    out.push_back(std::move(cert));
  }
  return out;
}

}  // namespace diec::eat

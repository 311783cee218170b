#include <cmath>
#include <vector>

#include "doctest.h"

#include "diec/chsh.hpp"
#include "diec/entropy_bounds.hpp"
#include "diec/eat_rates.hpp"
#include "figure_data.hpp"

using namespace diec;
using namespace diec::eat;

namespace {

constexpr double kW = chsh::kMaxQuantumWinProbability;

ErrorBudget unit_budget() { return ErrorBudget{1e-5, 1.0, 1e-2, 1.0 / 1024.0}; }

}  // namespace

TEST_SUITE("eat") {

TEST_CASE("parameter validation") {
  CHECK_NOTHROW((ProtocolParams{1000, 0.5, 0.8, 0.01}.validate_for_certification()));
  CHECK_THROWS_AS((ProtocolParams{0, 0.5, 0.8, 0.01}.validate_for_certification()), ValidationError);
  CHECK_THROWS_AS((ProtocolParams{1000, 0.0, 0.8, 0.01}.validate_for_certification()), ValidationError);
  CHECK_THROWS_AS((ProtocolParams{1000, 0.5, 0.7, 0.01}.validate_for_certification()), ValidationError);
  CHECK_THROWS_AS((ProtocolParams{1000, 0.5, 0.86, 0.01}.validate_for_certification()), ValidationError);
  CHECK_THROWS_AS((ProtocolParams{1000, 0.01, 0.8, 0.01}.validate_for_certification()), ValidationError);
  CHECK_NOTHROW((ProtocolParams{1000, 0.0, 0.8, 0.0}.validate_for_simulation()));

  CHECK_NOTHROW((ErrorBudget{1e-5, 1e-5, 1e-2, 1e-3}.validate()));
  CHECK_THROWS_AS((ErrorBudget{1e-5, 1e-5, 1e-2, 0.0}.validate()), ValidationError);
  CHECK_THROWS_AS((ErrorBudget{1e-5, 0.0, 1e-2, 1e-3}.validate()), ValidationError);
  CHECK_THROWS_AS((ErrorBudget{1e-5, 1e-5, 1e-2, 0.01}.validate()), ValidationError);
  CHECK_THROWS_AS((ErrorBudget{1.5, 1e-5, 1e-2, 1e-3}.validate()), ValidationError);

  CHECK_THROWS_AS((FrequencyDistribution{0.02, 0.04, 0.95}.validate(0.05)), ValidationError);
  CHECK_THROWS_AS((FrequencyDistribution{0.01, 0.04, 0.9}.validate(0.05)), ValidationError);
  CHECK(parse_gradient_mode("as-printed") == GradientMode::as_printed);
  CHECK(parse_gradient_mode("eat-strict") == GradientMode::eat_strict);
  CHECK_THROWS_AS(parse_gradient_mode("strict"), ValidationError);
}

TEST_CASE("tradeoff function values") {
  CHECK(std::abs(tradeoff_f(FrequencyDistribution{0.01, 0.04, 0.95}, 0.05) - (-0.21475071897289239)) < 1e-12);
  CHECK(std::abs(tradeoff_f(0.045, 0.05) - (-0.95)) < 1e-15);
  CHECK(std::abs(tradeoff_f(kW, 1.0)) < 1e-15);
  CHECK(std::abs(tradeoff_f(0.9, 1.0)) < 1e-15);
  CHECK(std::abs(tradeoff_f(0.01, 0.05) - 0.95) < 1e-15);
  CHECK_THROWS_AS(tradeoff_f(FrequencyDistribution{0.02, 0.04, 0.95}, 0.05), ValidationError);
  CHECK_THROWS_AS(tradeoff_f(0.5, 0.0), ValidationError);
}

TEST_CASE("tradeoff function is continuous across its branches") {
  for (double gamma : {0.01, 0.1, 0.5}) {
    CHECK(std::abs(tradeoff_f(kW * gamma * (1 - 1e-12), gamma) - tradeoff_f(kW * gamma * (1 + 1e-12), gamma)) < 1e-4);
    CHECK(std::abs(tradeoff_f(0.5 * gamma * (1 + 1e-12), gamma) - tradeoff_f(0.5 * gamma * (1 - 1e-12), gamma)) < 1e-9);
  }
}

TEST_CASE("tradeoff function is concave on the quantum region") {
  for (double gamma : {0.01, 0.1, 0.5, 1.0}) {
    const double h = 1e-4 * gamma;
    const int steps = static_cast<int>(std::floor(kW * gamma / h));
    for (int k = 1; k < steps; ++k) {
      const double p = k * h;
      const double second = tradeoff_f(p + h, gamma) - 2.0 * tradeoff_f(p, gamma) + tradeoff_f(p - h, gamma);
      CHECK(second <= 1e-9);
    }
  }
}

TEST_CASE("tangent extension dominates f") {
  for (double gamma : {0.01, 0.1, 0.5, 1.0}) {
    for (double omega_t : {0.76, 0.8, 0.84}) {
      const double pt = omega_t * gamma;
      const double h = 1e-4 * gamma;
      const int steps = static_cast<int>(std::floor(kW * gamma / h));
      for (int k = 0; k <= steps; ++k) {
        const double p = k * h;
        const double fm = tradeoff_fmax(p, omega_t, gamma);
        const double f = tradeoff_f(p, gamma);
        CHECK(fm >= f - 1e-12);
        if (p <= pt) CHECK(fm == f);
      }
    }
  }
}

TEST_CASE("tangent extension example") {
  CHECK(std::abs(tradeoff_slope(0.8, 0.05) - (-193.96179488694380)) < 1e-9);
  CHECK(std::abs(tradeoff_fmax(0.85 * 0.05, 0.8, 0.05) - (-0.69965520619025189)) < 1e-12);
  const FrequencyDistribution p = FrequencyDistribution::from_winning(0.85 * 0.05, 0.05);
  const FrequencyDistribution pt = FrequencyDistribution::from_winning(0.8 * 0.05, 0.05);
  CHECK(std::abs(tradeoff_fmax(p, pt, 0.05) - (-0.69965520619025189)) < 1e-12);
  CHECK_THROWS_AS(tradeoff_fmax(0.04, 0.75, 0.05), ValidationError);
  CHECK_THROWS_AS(tradeoff_fmax(0.04, kW, 0.05), ValidationError);
}

TEST_CASE("analytic slope matches finite differences") {
  for (double gamma : {0.001, 0.01, 0.05, 0.2, 0.9}) {
    for (int k = 0; k < 10; ++k) {
      const double omega_t = 0.755 + (0.85 - 0.755) * k / 9.0;
      const double pt = omega_t * gamma;
      const double h = 1e-7 * gamma;
      const double fd = (tradeoff_f(pt + h, gamma) - tradeoff_f(pt - h, gamma)) / (2.0 * h);
      const double a = tradeoff_slope(omega_t, gamma);
      CHECK(std::abs(fd - a) < 1e-6 * std::abs(a));
    }
  }
}

TEST_CASE("second-order coefficient") {
  const ErrorBudget ok = unit_budget();
  const double stretch = std::sqrt(1.0 - 2.0 * std::log2(ok.eps_smo * ok.eps_snd));
  CHECK(std::abs(second_order_coefficient(0.8, 0.05, ok, GradientMode::as_printed) / stretch -
                 412.98447700439324) < 1e-9);
  CHECK(std::abs(second_order_coefficient(0.8, 0.05, ok, GradientMode::eat_strict) / stretch -
                 392.64385618977472) < 1e-9);
  CHECK_THROWS_AS(second_order_coefficient(0.8, 0.05, ErrorBudget{1e-5, 0.0, 1e-2, 1e-3}, GradientMode::eat_strict),
                  ValidationError);
}

TEST_CASE("eta approaches f_max for large n") {
  const FrequencyDistribution pt = FrequencyDistribution::from_winning(0.8 * 0.05, 0.05);
  const ErrorBudget b{1e-5, 1e-5, 1e-2, 1e-3};
  const double fmax = tradeoff_fmax(0.85 * 0.05, 0.8, 0.05);
  double prev = 1e300;
  for (std::uint64_t n : {std::uint64_t{1000000}, std::uint64_t{1000000000000}, ~std::uint64_t{0}}) {
    const double e = eta(0.85 * 0.05, pt, b, ProtocolParams{n, 0.05, 0.85, 0.0});
    CHECK(e > fmax);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev - fmax < 1e-6);
}

TEST_CASE("eta_opt extremes") {
  const ErrorBudget b{1e-5, 1e-5, 1e-2, 1e-3};
  const EtaOptResult weak = eta_opt({1000000, 0.5, 0.7501, 0.0001}, b);
  CHECK(weak.value > 0.0);
  CHECK(weak.omega_t > 0.75);
  CHECK(weak.omega_t < kW);

  const EtaOptResult strong = eta_opt({1000000000000000000ULL, 1e-3, kW, 1e-12}, b);
  CHECK(std::abs(strong.value + 1.0) < 0.01);
}

TEST_CASE("log L and rate") {
  const ProtocolParams p{10000000000ULL, 0.01, 0.8447, 1e-6};
  const ErrorBudget b{1e-5, 1e-5, 1e-2, 1e-3};
  const RateCertificate c = certified_log_l(p, b);
  const double expected = -static_cast<double>(p.n) * c.eta_opt - 4.0 * std::log2(1.0 / (std::sqrt(1e-5) - 1e-3));
  CHECK(std::abs(c.log_l - expected) < 1e-9 * std::abs(expected));
  CHECK(c.rate_raw == doctest::Approx(c.log_l / static_cast<double>(p.n)).epsilon(1e-15));
  CHECK(c.rate == std::max(c.rate_raw, 0.0));
  CHECK(c.pt_omega > 0.75);
  CHECK_THROWS_AS(certified_log_l(p, ErrorBudget{1e-5, 1e-5, 1e-2, 0.004}), ValidationError);
}

TEST_CASE("completeness bound") {
  CHECK(std::abs(completeness_bound(1000000, std::sqrt(2.5e-6)) - 0.0067379469990854671) < 1e-15);
  CHECK(completeness_bound(1000, 0.0) == 1.0);
  CHECK(std::abs(delta_for_completeness(1000000, 0.01) - 0.0015174271293851464) < 1e-15);
  for (std::uint64_t n : {1000ULL, 100000ULL, 10000000000ULL})
    CHECK(completeness_bound(n, delta_for_completeness(n, 0.01)) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK_THROWS_AS(delta_for_completeness(1000, 0.0), ValidationError);
}

TEST_CASE("optimized rates at reference points") {
  struct Ref {
    std::uint64_t n;
    double omega;
    double rate;
  };
  const Ref refs[] = {{1000000ULL, 0.83, 0.081},
                      {10000000ULL, 0.8032, 0.0611116},
                      {100000000ULL, 0.8447, 0.54066632},
                      {10000000000ULL, 0.8447, 0.713722},
                      {1000000000000ULL, 0.853, 0.931351}};
  for (const Ref& r : refs) {
    const RateCertificate c = optimize_parameters(r.n, r.omega, {});
    CHECK(std::abs(c.rate - r.rate) < 0.01);
    CHECK(c.diagnostic.empty());
    CHECK(c.params.threshold() > 0.0);
  }
}

TEST_CASE("no positive rate near the classical bound") {
  for (std::uint64_t n : {1000000ULL, 100000000ULL, 10000000000ULL, 1000000000000ULL}) {
    const RateCertificate c = optimize_parameters(n, 0.76, {});
    CHECK(c.rate == 0.0);
    CHECK(c.rate_raw <= 0.0);
    CHECK_FALSE(c.diagnostic.empty());
  }
}

TEST_CASE("rates increase with n and omega") {
  const std::uint64_t ns[] = {1000000ULL, 10000000ULL, 100000000ULL, 10000000000ULL, 1000000000000ULL};
  const double omegas[] = {0.80, 0.82, 0.84, 0.853};
  double table[5][4];
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) table[i][j] = optimize_parameters(ns[i], omegas[j], {}).rate;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i > 0) CHECK(table[i][j] >= table[i - 1][j] - 1e-4);
      if (j > 0) CHECK(table[i][j] >= table[i][j - 1] - 1e-4);
    }
}

TEST_CASE("finite rates approach the IID limit") {
  CHECK(std::abs(optimize_parameters(100000000000000ULL, 0.80, {}).rate - asymptotic_rate(0.80)) < 0.005);
  for (double omega : {0.82, 0.84})
    CHECK(std::abs(optimize_parameters(10000000000000000ULL, omega, {}).rate - asymptotic_rate(omega)) < 0.005);
}

TEST_CASE("asymptotic rate") {
  CHECK(std::abs(asymptotic_rate(0.8) - 0.22605338839251831) < 1e-12);
  CHECK(std::abs(asymptotic_rate(kW) - 1.0) < 1e-12);
  CHECK_THROWS_AS(asymptotic_rate(0.4), ValidationError);
  for (const auto& [omega, y] : figure_data::kAsymptotic) CHECK(std::abs(asymptotic_rate(omega) - y) < 1e-3);
}

TEST_CASE("curve optimizer shares parameters") {
  const std::vector<double> omegas{0.80, 0.82, 0.84};
  const auto certs = optimize_curve_parameters(100000000ULL, omegas, {});
  REQUIRE(certs.size() == 3);
  for (std::size_t k = 0; k < certs.size(); ++k) {
    CHECK(certs[k].params.gamma == certs[0].params.gamma);
    CHECK(certs[k].budget.eps_smo == certs[0].budget.eps_smo);
    CHECK(certs[k].params.omega_exp == omegas[k]);
  }
  CHECK(certs[0].rate <= certs[2].rate);
}

TEST_CASE("optimizer is deterministic") {
  const RateCertificate a = optimize_parameters(100000000ULL, 0.83, {});
  const RateCertificate b = optimize_parameters(100000000ULL, 0.83, {});
  CHECK(a.rate_raw == b.rate_raw);
  CHECK(a.params.gamma == b.params.gamma);
  CHECK(a.budget.eps_smo == b.budget.eps_smo);
}

}  // TEST_SUITE

#include "diec/diec.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "diec/chsh.hpp"
#include "diec/eat_rates.hpp"
#include "diec/entropy_bounds.hpp"
#include "diec/errors.hpp"
#include "diec/protocol_sim.hpp"

struct diec_device_model {
  std::shared_ptr<diec::sim::DeviceModel> impl;
};

struct diec_transcript {
  diec::sim::Transcript impl;
};

namespace {

thread_local std::string g_last_error;

diec_status fail(diec_status status, const char* message) {
  g_last_error = message;
  return status;
}

template <class F>
diec_status guarded(F&& body) {
  try {
    body();
    return DIEC_OK;
  } catch (const diec::ValidationError& e) {
    return fail(DIEC_ERR_VALIDATION, e.what());
  } catch (const diec::DomainError& e) {
    return fail(DIEC_ERR_DOMAIN, e.what());
  } catch (const diec::VerificationError& e) {
    return fail(DIEC_ERR_VERIFICATION, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DIEC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DIEC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DIEC_ERR_INTERNAL, "unknown error");
  }
}

#define DIEC_REQUIRE(ptr) \
  if ((ptr) == nullptr) return fail(DIEC_ERR_NULL_ARGUMENT, #ptr " must not be NULL")

diec::eat::GradientMode to_mode(diec_gradient_mode m) {
  switch (m) {
    case DIEC_GRADIENT_EAT_STRICT:
      return diec::eat::GradientMode::eat_strict;
    case DIEC_GRADIENT_AS_PRINTED:
      return diec::eat::GradientMode::as_printed;
  }
  throw diec::ValidationError("unknown gradient mode");
}

diec::sim::ProtocolMode to_mode(diec_protocol_mode m) {
  switch (m) {
    case DIEC_PROTOCOL_STANDARD:
      return diec::sim::ProtocolMode::standard;
    case DIEC_PROTOCOL_MODIFIED:
      return diec::sim::ProtocolMode::modified;
    case DIEC_PROTOCOL_MODIFIED_EARLY_PROJECTION:
      return diec::sim::ProtocolMode::modified_early_projection;
  }
  throw diec::ValidationError("unknown protocol mode");
}

diec_protocol_mode from_mode(diec::sim::ProtocolMode m) {
  switch (m) {
    case diec::sim::ProtocolMode::standard:
      return DIEC_PROTOCOL_STANDARD;
    case diec::sim::ProtocolMode::modified:
      return DIEC_PROTOCOL_MODIFIED;
    case diec::sim::ProtocolMode::modified_early_projection:
      return DIEC_PROTOCOL_MODIFIED_EARLY_PROJECTION;
  }
  return DIEC_PROTOCOL_STANDARD;
}

diec::eat::ProtocolParams to_params(const diec_protocol_params& p) {
  return {p.n, p.gamma, p.omega_exp, p.delta_est};
}

diec_protocol_params from_params(const diec::eat::ProtocolParams& p) {
  return {p.n, p.gamma, p.omega_exp, p.delta_est};
}

void fill_spectrum(const diec::quantum::BellDiagonalSpectrum& s, double out[4]) {
  const auto v = s.values();
  for (int i = 0; i < 4; ++i) out[i] = v[i];
}

void fill_certificate(const diec::eat::RateCertificate& c, diec_rate_certificate* out) {
  *out = diec_rate_certificate{};
  out->eta_opt = c.eta_opt;
  out->pt_p0 = c.minimizer_pt.p0;
  out->pt_p1 = c.minimizer_pt.p1;
  out->pt_p_bot = c.minimizer_pt.p_bot;
  out->pt_omega = c.pt_omega;
  out->second_order_v = c.second_order_v;
  out->log_l = c.log_l;
  out->rate_raw = c.rate_raw;
  out->rate = c.rate;
  out->params = from_params(c.params);
  out->budget = {c.budget.eps_dist, c.budget.eps_snd, c.budget.eps_cmp, c.budget.eps_smo};
  out->mode = c.mode == diec::eat::GradientMode::as_printed ? DIEC_GRADIENT_AS_PRINTED : DIEC_GRADIENT_EAT_STRICT;
  std::strncpy(out->diagnostic, c.diagnostic.c_str(), DIEC_DIAGNOSTIC_SIZE - 1);
}

void fill_abort(const diec::sim::AbortEstimate& e, diec_abort_estimate* out) {
  *out = {e.trials, e.aborted, e.estimate, e.interval.lo, e.interval.hi, e.win_rate};
}

}  // namespace

extern "C" {

const char* diec_last_error(void) { return g_last_error.c_str(); }

const char* diec_status_name(diec_status status) {
  switch (status) {
    case DIEC_OK:
      return "ok";
    case DIEC_ERR_VALIDATION:
      return "validation error";
    case DIEC_ERR_DOMAIN:
      return "domain error";
    case DIEC_ERR_VERIFICATION:
      return "verification failure";
    case DIEC_ERR_NULL_ARGUMENT:
      return "null argument";
    case DIEC_ERR_IO:
      return "i/o error";
    case DIEC_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* diec_version(void) { return "1.0.0"; }

diec_status diec_certify(const diec_protocol_params* params, const diec_error_budget* budget,
                         diec_gradient_mode mode, diec_rate_certificate* out) {
  DIEC_REQUIRE(params);
  DIEC_REQUIRE(budget);
  DIEC_REQUIRE(out);
  return guarded([&] {
    const diec::eat::ErrorBudget b{budget->eps_dist, budget->eps_snd, budget->eps_cmp, budget->eps_smo};
    fill_certificate(diec::eat::certified_log_l(to_params(*params), b, to_mode(mode)), out);
  });
}

diec_status diec_optimize(uint64_t n, double omega_exp, double eps_dist, double eps_snd, double eps_cmp,
                          diec_gradient_mode mode, diec_rate_certificate* out) {
  DIEC_REQUIRE(out);
  return guarded([&] {
    fill_certificate(diec::eat::optimize_parameters(n, omega_exp, {eps_dist, eps_snd, eps_cmp}, to_mode(mode)), out);
  });
}

diec_status diec_optimize_curve(uint64_t n, const double* omegas, size_t count, double eps_dist, double eps_snd,
                                double eps_cmp, diec_gradient_mode mode, diec_rate_certificate* out) {
  DIEC_REQUIRE(omegas);
  DIEC_REQUIRE(out);
  return guarded([&] {
    const auto certs = diec::eat::optimize_curve_parameters(n, std::span<const double>(omegas, count),
                                                            {eps_dist, eps_snd, eps_cmp}, to_mode(mode));
    for (size_t i = 0; i < certs.size(); ++i) fill_certificate(certs[i], &out[i]);
  });
}

diec_status diec_asymptotic_rate(double omega, double* out) {
  DIEC_REQUIRE(out);
  return guarded([&] { *out = diec::eat::asymptotic_rate(omega); });
}

diec_status diec_conditional_entropy_bound(double omega, double* out) {
  DIEC_REQUIRE(out);
  return guarded([&] { *out = diec::entropy::max_conditional_entropy(omega); });
}

diec_status diec_completeness_bound(uint64_t n, double delta_est, double* out) {
  DIEC_REQUIRE(out);
  return guarded([&] { *out = diec::eat::completeness_bound(n, delta_est); });
}

diec_status diec_delta_for_completeness(uint64_t n, double eps_cmp, double* out) {
  DIEC_REQUIRE(out);
  return guarded([&] { *out = diec::eat::delta_for_completeness(n, eps_cmp); });
}

diec_status diec_bell_diagonal_entropy_bound(double beta, diec_entropy_bound* out) {
  DIEC_REQUIRE(out);
  return guarded([&] {
    const auto r = diec::entropy::bell_diagonal_entropy_bound(beta);
    out->beta = r.beta;
    out->omega = r.omega;
    out->max_total_entropy = r.max_total_entropy;
    out->conditional_bound = r.conditional_bound;
    fill_spectrum(r.optimal_spectrum, out->spectrum);
  });
}

diec_status diec_brute_force_max_entropy(double beta, double grid_step, diec_brute_force_result* out) {
  DIEC_REQUIRE(out);
  return guarded([&] {
    const auto r = diec::entropy::brute_force_max_entropy(beta, grid_step);
    fill_spectrum(r.spectrum, out->spectrum);
    out->entropy = r.entropy;
    out->other_branch_entropy = r.other_branch_entropy;
    out->feasible_points = r.feasible_points;
  });
}

diec_status diec_verify_twirl_suite(uint64_t seed, int states, diec_twirl_report* out) {
  DIEC_REQUIRE(out);
  return guarded([&] {
    const auto r = diec::quantum::twirl_property_suite(seed, states);
    *out = {r.states,
            r.max_off_diagonal,
            r.max_diagonal_change,
            r.max_idempotence_defect,
            r.max_fixed_point_defect,
            r.max_decoupling_defect,
            r.max_block_off_diagonal,
            r.passed ? 1 : 0};
  });
}

size_t diec_model_name_count(void) { return diec::sim::model_names().size(); }

const char* diec_model_name(size_t index) {
  const auto& names = diec::sim::model_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

diec_status diec_device_model_create(const char* name, const diec_model_options* options,
                                     diec_device_model** out) {
  DIEC_REQUIRE(name);
  DIEC_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    diec::sim::ModelOptions opts;
    if (options != nullptr) opts = {options->xi, options->omega, options->slope};
    auto model = diec::sim::make_device_model(name, opts);
    *out = new diec_device_model{std::move(model)};
  });
}

void diec_device_model_destroy(diec_device_model* model) { delete model; }

uint64_t diec_trial_seed(uint64_t seed, uint64_t trial) {
  return diec::derive_seed(seed, trial, static_cast<std::uint64_t>(diec::StreamTag::trial));
}

diec_status diec_run_protocol(const diec_device_model* model, const diec_protocol_params* params,
                              diec_protocol_mode mode, uint64_t seed, diec_transcript** out) {
  DIEC_REQUIRE(model);
  DIEC_REQUIRE(params);
  DIEC_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto tr = diec::sim::run_protocol(*model->impl, to_params(*params), to_mode(mode), seed);
    *out = new diec_transcript{std::move(tr)};
  });
}

diec_status diec_transcript_info_get(const diec_transcript* transcript, diec_transcript_info* out) {
  DIEC_REQUIRE(transcript);
  DIEC_REQUIRE(out);
  const auto& t = transcript->impl;
  *out = {static_cast<uint64_t>(t.rounds.size()), t.win_count, t.test_count, t.aborted ? 1 : 0, t.seed,
          from_mode(t.mode)};
  return DIEC_OK;
}

diec_status diec_transcript_round(const diec_transcript* transcript, uint64_t index, diec_round* out) {
  DIEC_REQUIRE(transcript);
  DIEC_REQUIRE(out);
  const auto& rounds = transcript->impl.rounds;
  if (index >= rounds.size()) return fail(DIEC_ERR_VALIDATION, "round index out of range");
  return guarded([&] {
    const auto& r = rounds[index];
    *out = diec_round{};
    out->t = r.t;
    out->x = r.x;
    out->y = r.y;
    out->a = r.a;
    out->b = r.b;
    out->w = r.w;
    out->c = r.c;
    out->d = r.d;
    if (r.kept_state) {
      out->has_kept_state = 1;
      fill_spectrum(diec::quantum::bell_spectrum(*r.kept_state), out->kept_spectrum);
    }
  });
}

diec_status diec_transcript_write(const diec_transcript* transcript, const char* path) {
  DIEC_REQUIRE(transcript);
  DIEC_REQUIRE(path);
  std::ofstream file(path, std::ios::binary);
  if (!file) return fail(DIEC_ERR_IO, (std::string("cannot open ") + path).c_str());
  const diec_status status = guarded([&] { diec::sim::write_transcript(file, transcript->impl); });
  if (status != DIEC_OK) return status;
  file.flush();
  if (!file) return fail(DIEC_ERR_IO, (std::string("write failed: ") + path).c_str());
  return DIEC_OK;
}

void diec_transcript_destroy(diec_transcript* transcript) { delete transcript; }

diec_status diec_estimate_abort(const diec_device_model* model, const diec_protocol_params* params,
                                uint64_t trials, uint64_t seed, diec_protocol_mode mode,
                                diec_abort_estimate* out) {
  DIEC_REQUIRE(model);
  DIEC_REQUIRE(params);
  DIEC_REQUIRE(out);
  return guarded([&] {
    fill_abort(diec::sim::estimate_abort_probability(*model->impl, to_params(*params), trials, seed, to_mode(mode)),
               out);
  });
}

diec_status diec_check_statistics_equivalence(const diec_device_model* model, const diec_protocol_params* params,
                                              uint64_t trials, uint64_t seed, diec_equivalence_report* out) {
  DIEC_REQUIRE(model);
  DIEC_REQUIRE(params);
  DIEC_REQUIRE(out);
  return guarded([&] {
    const auto r = diec::sim::check_statistics_equivalence(*model->impl, to_params(*params), trials, seed);
    *out = diec_equivalence_report{};
    out->trials = r.trials;
    out->rounds_per_mode = r.rounds_per_mode;
    out->classical_columns_identical = r.classical_columns_identical ? 1 : 0;
    out->max_abs_z = r.max_abs_z;
    fill_abort(r.abort_standard, &out->abort_standard);
    fill_abort(r.abort_modified, &out->abort_modified);
    out->abort_intervals_overlap = r.abort_intervals_overlap ? 1 : 0;
    out->passed = r.passed ? 1 : 0;
  });
}

diec_status diec_check_kept_state_structure(const diec_transcript* transcript, diec_kept_state_report* out) {
  DIEC_REQUIRE(transcript);
  DIEC_REQUIRE(out);
  return guarded([&] {
    const auto r = diec::sim::check_kept_state_structure(transcript->impl);
    *out = diec_kept_state_report{};
    out->kept_rounds = r.kept_rounds;
    out->max_off_diagonal = r.max_off_diagonal;
    out->block_pairs = r.block_pairs.size();
    for (const auto& p : r.block_pairs) out->max_spectrum_spread = std::max(out->max_spectrum_spread, p.spectrum_spread);
    out->chi_square = r.chi_square;
    out->degrees_of_freedom = r.degrees_of_freedom;
    out->p_value = r.p_value;
    out->passed = r.passed ? 1 : 0;
  });
}

}  // extern "C"

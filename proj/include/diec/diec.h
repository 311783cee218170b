#ifndef DIEC_DIEC_H
#define DIEC_DIEC_H

/* C interface to the certification library. Every function returns a
 * diec_status; on failure diec_last_error() describes the problem (the message
 * is thread-local and valid until the next failing call on that thread). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DIEC_API __declspec(dllexport)
#else
#define DIEC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  DIEC_OK = 0,
  DIEC_ERR_VALIDATION = 1,
  DIEC_ERR_DOMAIN = 2,
  DIEC_ERR_VERIFICATION = 3,
  DIEC_ERR_NULL_ARGUMENT = 4,
  DIEC_ERR_IO = 5,
  DIEC_ERR_INTERNAL = 6
} diec_status;

typedef enum { DIEC_GRADIENT_EAT_STRICT = 0, DIEC_GRADIENT_AS_PRINTED = 1 } diec_gradient_mode;

typedef enum {
  DIEC_PROTOCOL_STANDARD = 0,
  DIEC_PROTOCOL_MODIFIED = 1,
  DIEC_PROTOCOL_MODIFIED_EARLY_PROJECTION = 2
} diec_protocol_mode;

DIEC_API const char* diec_last_error(void);
DIEC_API const char* diec_status_name(diec_status status);
DIEC_API const char* diec_version(void);

typedef struct {
  uint64_t n;
  double gamma;
  double omega_exp;
  double delta_est;
} diec_protocol_params;

typedef struct {
  double eps_dist;
  double eps_snd;
  double eps_cmp;
  double eps_smo;
} diec_error_budget;

#define DIEC_DIAGNOSTIC_SIZE 128

typedef struct {
  double eta_opt;
  double pt_p0;
  double pt_p1;
  double pt_p_bot;
  double pt_omega;
  double second_order_v;
  double log_l;
  double rate_raw;
  double rate;
  diec_protocol_params params;
  diec_error_budget budget;
  diec_gradient_mode mode;
  char diagnostic[DIEC_DIAGNOSTIC_SIZE];
} diec_rate_certificate;

/* Rate certificate at fixed parameters. */
DIEC_API diec_status diec_certify(const diec_protocol_params* params, const diec_error_budget* budget,
                                  diec_gradient_mode mode, diec_rate_certificate* out);
/* Rate maximized over gamma and eps_smo; delta_est from eps_cmp. */
DIEC_API diec_status diec_optimize(uint64_t n, double omega_exp, double eps_dist, double eps_snd,
                                   double eps_cmp, diec_gradient_mode mode, diec_rate_certificate* out);
/* One shared (gamma, eps_smo) for all `count` omegas; `out` holds `count` entries. */
DIEC_API diec_status diec_optimize_curve(uint64_t n, const double* omegas, size_t count, double eps_dist,
                                         double eps_snd, double eps_cmp, diec_gradient_mode mode,
                                         diec_rate_certificate* out);
DIEC_API diec_status diec_asymptotic_rate(double omega, double* out);
/* g(omega), the single-round conditional-entropy bound. */
DIEC_API diec_status diec_conditional_entropy_bound(double omega, double* out);
DIEC_API diec_status diec_completeness_bound(uint64_t n, double delta_est, double* out);
DIEC_API diec_status diec_delta_for_completeness(uint64_t n, double eps_cmp, double* out);

/* Spectra are ordered (Phi+, Phi-, Psi+, Psi-). */
typedef struct {
  double beta;
  double omega;
  double max_total_entropy;
  double conditional_bound;
  double spectrum[4];
} diec_entropy_bound;

DIEC_API diec_status diec_bell_diagonal_entropy_bound(double beta, diec_entropy_bound* out);

typedef struct {
  double spectrum[4];
  double entropy;
  double other_branch_entropy;
  uint64_t feasible_points;
} diec_brute_force_result;

DIEC_API diec_status diec_brute_force_max_entropy(double beta, double grid_step, diec_brute_force_result* out);

typedef struct {
  int states;
  double max_off_diagonal;
  double max_diagonal_change;
  double max_idempotence_defect;
  double max_fixed_point_defect;
  double max_decoupling_defect;
  double max_block_off_diagonal;
  int passed;
} diec_twirl_report;

DIEC_API diec_status diec_verify_twirl_suite(uint64_t seed, int states, diec_twirl_report* out);

/* Device models. */
typedef struct diec_device_model diec_device_model;

typedef struct {
  double xi;    /* werner, noisy-drift: noise at round 0 */
  double omega; /* threshold: winning probability */
  double slope; /* noisy-drift: noise increase per round */
} diec_model_options;

DIEC_API size_t diec_model_name_count(void);
DIEC_API const char* diec_model_name(size_t index);
/* `options` may be NULL. */
DIEC_API diec_status diec_device_model_create(const char* name, const diec_model_options* options,
                                              diec_device_model** out);
DIEC_API void diec_device_model_destroy(diec_device_model* model);

/* Transcripts. Missing values (⊥) are -1. */
typedef struct diec_transcript diec_transcript;

typedef struct {
  int t, x, y, a, b, w, c, d;
  int has_kept_state;
  double kept_spectrum[4];
} diec_round;

typedef struct {
  uint64_t rounds;
  uint64_t win_count;
  uint64_t test_count;
  int aborted;
  uint64_t seed;
  diec_protocol_mode mode;
} diec_transcript_info;

/* Seed used for trial `trial` by diec_estimate_abort. */
DIEC_API uint64_t diec_trial_seed(uint64_t seed, uint64_t trial);

DIEC_API diec_status diec_run_protocol(const diec_device_model* model, const diec_protocol_params* params,
                                       diec_protocol_mode mode, uint64_t seed, diec_transcript** out);
DIEC_API diec_status diec_transcript_info_get(const diec_transcript* transcript, diec_transcript_info* out);
DIEC_API diec_status diec_transcript_round(const diec_transcript* transcript, uint64_t index, diec_round* out);
DIEC_API diec_status diec_transcript_write(const diec_transcript* transcript, const char* path);
DIEC_API void diec_transcript_destroy(diec_transcript* transcript);

typedef struct {
  uint64_t trials;
  uint64_t aborted;
  double estimate;
  double interval_lo;
  double interval_hi;
  double win_rate;
} diec_abort_estimate;

DIEC_API diec_status diec_estimate_abort(const diec_device_model* model, const diec_protocol_params* params,
                                         uint64_t trials, uint64_t seed, diec_protocol_mode mode,
                                         diec_abort_estimate* out);

typedef struct {
  uint64_t trials;
  uint64_t rounds_per_mode;
  int classical_columns_identical;
  double max_abs_z;
  diec_abort_estimate abort_standard;
  diec_abort_estimate abort_modified;
  int abort_intervals_overlap;
  int passed;
} diec_equivalence_report;

DIEC_API diec_status diec_check_statistics_equivalence(const diec_device_model* model,
                                                       const diec_protocol_params* params, uint64_t trials,
                                                       uint64_t seed, diec_equivalence_report* out);

typedef struct {
  uint64_t kept_rounds;
  double max_off_diagonal;
  size_t block_pairs;
  double max_spectrum_spread;
  double chi_square;
  int degrees_of_freedom;
  double p_value;
  int passed;
} diec_kept_state_report;

DIEC_API diec_status diec_check_kept_state_structure(const diec_transcript* transcript,
                                                     diec_kept_state_report* out);

#ifdef __cplusplus
}
#endif

#endif /* DIEC_DIEC_H */

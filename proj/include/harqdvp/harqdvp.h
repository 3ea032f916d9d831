/*
 * harqdvp C interface.
 *
 * Every fallible call returns an hd_status; HD_OK is zero. On failure a
 * thread-local message is available from hd_last_error(). Objects are
 * opaque handles released with their *_destroy function; destroy functions
 * accept NULL.
 */
#ifndef HARQDVP_H_
#define HARQDVP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HARQDVP_BUILDING_LIBRARY)
#    define HD_API __declspec(dllexport)
#  else
#    define HD_API __declspec(dllimport)
#  endif
#else
#  define HD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hd_status {
  HD_OK = 0,
  HD_ERR_INVALID_ARGUMENT = 1,
  HD_ERR_INFEASIBLE = 2,
  HD_ERR_UNSTABLE = 3,
  HD_ERR_NO_CONVERGENCE = 4,
  HD_ERR_CONFIG = 5,
  HD_ERR_IO = 6,
  HD_ERR_INTERNAL = 7
} hd_status;

typedef enum hd_scheme { HD_SCHEME_ARQ = 0, HD_SCHEME_HARQ_IR = 1 } hd_scheme;
typedef enum hd_arrival { HD_ARRIVAL_BERNOULLI = 0, HD_ARRIVAL_DETERMINISTIC = 1 } hd_arrival;

/* Sentinel for "no limit" in max_attempts / q_max. */
#define HD_UNLIMITED UINT32_MAX

HD_API const char* hd_version(void);
HD_API const char* hd_last_error(void);
HD_API const char* hd_status_string(hd_status status);

/* ---- physical layer ---------------------------------------------------- */

typedef struct hd_mcs {
  uint32_t index;
  uint32_t modulation_order;
  uint32_t coding_rate_x1024;
  double spectral_efficiency;
} hd_mcs;

HD_API size_t hd_mcs_table_size(void);
HD_API hd_status hd_mcs_table_entry(size_t index, hd_mcs* out);
/* Replaces the active table with the CSV at `path` (process-wide). */
HD_API hd_status hd_mcs_table_load(const char* path);
HD_API hd_status hd_select_mcs(uint32_t packet_bits, uint32_t n_rb, hd_mcs* out);
HD_API hd_status hd_nrb_range(uint32_t packet_bits, uint32_t* min_nrb, uint32_t* max_nrb);
/* Channel uses per transmission; literal_re selects 12 * N_RB instead of 180 * N_RB. */
HD_API double hd_blocklength(uint32_t n_rb, int literal_re);
HD_API double hd_slot_duration_ms(uint32_t nu);

/* ---- error model ------------------------------------------------------- */

typedef struct hd_channel {
  double gamma_linear;
  double mu_h2;
  double dispersion;
} hd_channel;

typedef struct hd_per_estimate {
  double value;
  double std_error;
  uint64_t samples;
  uint64_t seed;
} hd_per_estimate;

HD_API double hd_q_function(double x);
HD_API hd_status hd_per_arq(const hd_channel* channel, double eta, double blocklength,
                            uint64_t samples, uint64_t seed, unsigned jobs,
                            hd_per_estimate* out);
/* Writes max_attempts entries to out (nonincreasing). */
HD_API hd_status hd_per_harq(const hd_channel* channel, double eta, double blocklength,
                             uint32_t max_attempts, uint64_t samples, uint64_t seed,
                             unsigned jobs, hd_per_estimate* out);

/* ---- ARQ analytics ----------------------------------------------------- */

typedef struct hd_arq_params {
  double f;
  double p;
  uint32_t zeta;
  uint32_t delta;
  double slot_ms;
} hd_arq_params;

HD_API hd_status hd_arq_stability_ratio(const hd_arq_params* params, double* out);
HD_API hd_status hd_arq_kd(const hd_arq_params* params, double d_ms, int64_t* out);
HD_API hd_status hd_arq_dvp(const hd_arq_params* params, double d_ms, double* out);
HD_API hd_status hd_arq_wait_ccdf_bound(const hd_arq_params* params, uint64_t j, double* out);
HD_API hd_status hd_arq_queue_ccdf(const hd_arq_params* params, uint64_t q, double* out);
HD_API hd_status hd_bar_dvp(const hd_arq_params* params, double d_ms, double* out);

/* ---- HARQ-IR analytics ------------------------------------------------- */

typedef struct hd_harq hd_harq;

typedef struct hd_harq_params {
  double f;
  const double* p_vec; /* max_attempts entries, nonincreasing */
  uint32_t max_attempts;
  uint32_t q_max;
  uint32_t zeta;
  uint32_t delta;
  double slot_ms;
} hd_harq_params;

/* Builds the chain and solves it; the handle is immutable afterwards and
 * may be queried from several threads. */
HD_API hd_status hd_harq_create(const hd_harq_params* params, hd_harq** out);
HD_API void hd_harq_destroy(hd_harq* harq);
HD_API hd_status hd_harq_dvp(const hd_harq* harq, double d_ms, double* out);
HD_API hd_status hd_harq_service_dvp(const hd_harq* harq, double d_ms, double* out);
HD_API hd_status hd_harq_kd(const hd_harq* harq, double d_ms, int64_t* out);
HD_API hd_status hd_harq_overflow_probability(const hd_harq* harq, double* out);
/* Queue marginal pi_0..pi_Qmax; `len` must be q_max + 1. */
HD_API hd_status hd_harq_queue_distribution(const hd_harq* harq, double* out, size_t len);
/* Wait pmf over k = 0..M*Q_max; `len` must be M * q_max + 1. */
HD_API hd_status hd_harq_wait_pmf(const hd_harq* harq, double* out, size_t len);

/* ---- simulator --------------------------------------------------------- */

typedef struct hd_sim hd_sim;

typedef struct hd_sim_config {
  hd_scheme scheme;
  hd_arrival arrival;
  double f;
  uint64_t cycle_slots;
  double p;
  const double* p_vec;
  uint32_t p_len;
  uint32_t zeta;
  uint32_t delta;
  uint32_t max_attempts; /* ARQ only; HD_UNLIMITED for persistent */
  uint32_t q_max;        /* HD_UNLIMITED for no limit */
  uint64_t slots;
  uint64_t warmup_slots;
  uint64_t seed;
  int if_mode;
  double slot_ms;
  int keep_records;
} hd_sim_config;

typedef struct hd_proportion {
  double value;
  double ci_lo;
  double ci_hi;
  double std_error;
  uint64_t count;
  uint64_t trials;
} hd_proportion;

typedef struct hd_sim_counts {
  uint64_t arrivals;
  uint64_t delivered;
  uint64_t discarded;
  uint64_t dropped;
  uint64_t in_flight;
  uint64_t measured_arrivals;
  uint64_t measured_finalized;
  uint64_t measured_slots;
} hd_sim_counts;

/* Fills the defaults (HARQ-IR, f = 1/3, zeta = 1, delta = 2, 1e7 slots). */
HD_API void hd_sim_config_default(hd_sim_config* config);
HD_API hd_status hd_sim_run(const hd_sim_config* config, hd_sim** out);
HD_API void hd_sim_destroy(hd_sim* sim);
HD_API hd_status hd_sim_counts_get(const hd_sim* sim, hd_sim_counts* out);
HD_API hd_status hd_sim_dvp(const hd_sim* sim, double d_ms, hd_proportion* out);
HD_API hd_status hd_sim_wait_ccdf(const hd_sim* sim, uint64_t j, hd_proportion* out);
HD_API hd_status hd_sim_queue_ccdf(const hd_sim* sim, uint64_t q, hd_proportion* out);
HD_API hd_status hd_sim_throughput(const hd_sim* sim, double d_ms, uint32_t packet_bits,
                                   double* out_bps);
/* Requires keep_records. */
HD_API hd_status hd_sim_write_trace(const hd_sim* sim, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* HARQDVP_H_ */

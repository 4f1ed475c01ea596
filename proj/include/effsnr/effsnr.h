/* SPDX-License-Identifier: Apache-2.0 */
#ifndef EFFSNR_H
#define EFFSNR_H

#include <stddef.h>
#include <stdint.h>

#if defined(EFFSNR_BUILDING_LIBRARY)
#define EFFSNR_API __attribute__((visibility("default")))
#else
#define EFFSNR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum effsnr_status {
    EFFSNR_OK = 0,
    EFFSNR_E_ARGUMENT = 1, /* invalid input or handle */
    EFFSNR_E_PARSE = 2,    /* malformed trace, table or sample file */
    EFFSNR_E_CONFIG = 3,   /* config space inconsistent with a threshold table */
    EFFSNR_E_RUNTIME = 4,  /* I/O and other failures */
} effsnr_status;

/* Message of the last failure on the calling thread; never NULL. */
EFFSNR_API const char* effsnr_last_error(void);
EFFSNR_API const char* effsnr_version(void);

typedef struct effsnr_trace effsnr_trace;
typedef struct effsnr_thresholds effsnr_thresholds;
typedef struct effsnr_space effsnr_space;
typedef struct effsnr_calibration effsnr_calibration;
typedef struct effsnr_sim_result effsnr_sim_result;
typedef struct effsnr_curve effsnr_curve;

/* ---- traces ---- */

typedef struct effsnr_gen_spec {
    uint64_t seed;
    int n_tx;
    int n_rx;
    int n_sub;
    int n_taps;
    double delay_spread_samples;
    double mean_snr_db;
    double doppler_coeff;
    size_t n_records;
    int64_t interval_us;
} effsnr_gen_spec;

typedef struct effsnr_trace_info {
    int n_rx;
    int n_tx;
    int n_sub;
    size_t n_records;
    int64_t interval_us;
} effsnr_trace_info;

EFFSNR_API void effsnr_gen_spec_default(effsnr_gen_spec* spec);
EFFSNR_API effsnr_status effsnr_trace_generate(const effsnr_gen_spec* spec, effsnr_trace** out);
EFFSNR_API effsnr_status effsnr_trace_read(const char* path, effsnr_trace** out);
/* encoding: "f32" or "q8"; path "-" writes to stdout */
EFFSNR_API effsnr_status effsnr_trace_write(const effsnr_trace* trace, const char* path, const char* encoding);
EFFSNR_API void effsnr_trace_free(effsnr_trace* trace);
EFFSNR_API effsnr_status effsnr_trace_info_get(const effsnr_trace* trace, effsnr_trace_info* out);
EFFSNR_API effsnr_status effsnr_trace_timestamp(const effsnr_trace* trace, size_t record, int64_t* out);
EFFSNR_API effsnr_status effsnr_trace_packet_snr(const effsnr_trace* trace, size_t record, double* out_db);

/* ---- threshold tables ---- */

EFFSNR_API effsnr_status effsnr_thresholds_read(const char* path, effsnr_thresholds** out);
/* path "-" writes to stdout */
EFFSNR_API effsnr_status effsnr_thresholds_write(const effsnr_thresholds* table, const char* path);
EFFSNR_API void effsnr_thresholds_free(effsnr_thresholds* table);
/* "packet-snr" or "effective-snr" */
EFFSNR_API const char* effsnr_thresholds_metric(const effsnr_thresholds* table);

/* ---- configuration spaces ---- */

/* mcs_set: siso, mimo2, mimo3 or all; adc_bits <= 0 disables the ADC correction */
EFFSNR_API effsnr_status effsnr_space_create(const char* mcs_set, int n_rx, int n_tx, int adc_bits,
                                             effsnr_space** out);
EFFSNR_API void effsnr_space_free(effsnr_space* space);
EFFSNR_API size_t effsnr_space_size(const effsnr_space* space);
EFFSNR_API effsnr_status effsnr_space_mcs(const effsnr_space* space, size_t index, int* mcs, double* rate_mbps);
/* Writes a NUL-terminated label, truncated to buf_len. */
EFFSNR_API effsnr_status effsnr_space_label(const effsnr_space* space, size_t index, char* buf, size_t buf_len);

/* ---- prediction ---- */

typedef struct effsnr_prediction {
    int mcs;
    double metric_db;
    int works;
    double rate_mbps;
} effsnr_prediction;

/* out holds effsnr_space_size(space) entries; *best is -1 when nothing works. */
EFFSNR_API effsnr_status effsnr_predict(const effsnr_trace* trace, size_t record, const effsnr_space* space,
                                        const effsnr_thresholds* table, effsnr_prediction* out, ptrdiff_t* best);

/* Predictions for every record of the trace, record-major: out holds
   n_records * space_size entries and best n_records entries. */
EFFSNR_API effsnr_status effsnr_predict_trace(const effsnr_trace* trace, const effsnr_space* space,
                                              const effsnr_thresholds* table, effsnr_prediction* out,
                                              ptrdiff_t* best);

/* ---- calibration ---- */

typedef struct effsnr_calibration_row {
    int mcs;
    double threshold_db;
    double balanced_error;
    const char* flag; /* "", "unconstrained-low" or "unconstrained-high" */
    int has_w5_95;
    double w5_95_db;
    int has_w25_75;
    double w25_75_db;
    size_t n_good;
    size_t n_bad;
} effsnr_calibration_row;

/* samples CSV with columns mcs,link_id,snr_db,prr; metric names the SNR domain */
EFFSNR_API effsnr_status effsnr_calibrate(const char* samples_path, const char* metric, int packet_len_bytes,
                                          effsnr_calibration** out);
EFFSNR_API void effsnr_calibration_free(effsnr_calibration* cal);
EFFSNR_API size_t effsnr_calibration_size(const effsnr_calibration* cal);
EFFSNR_API effsnr_status effsnr_calibration_row_get(const effsnr_calibration* cal, size_t index,
                                                    effsnr_calibration_row* out);
EFFSNR_API effsnr_status effsnr_calibration_table(const effsnr_calibration* cal, effsnr_thresholds** out);

/* ---- bit-level oracle ---- */

/* PRR of `mcs` when every subchannel of every stream has SNR snr_db. */
EFFSNR_API effsnr_status effsnr_flat_prr(int mcs, double snr_db, size_t n_packets, size_t payload_bytes,
                                         uint64_t seed, double* prr);
/* PRR of one config of the space on one record of the trace. */
EFFSNR_API effsnr_status effsnr_record_prr(const effsnr_trace* trace, size_t record, const effsnr_space* space,
                                           size_t config, size_t n_packets, size_t payload_bytes, uint64_t seed,
                                           double* prr);

/* ---- link simulation ---- */

typedef struct effsnr_sim_options {
    double speedup;
    uint64_t seed;
    size_t probe_payload_bytes; /* 0 = per_packet_bytes */
    int compare_with_optimal;
    double slot_us;
    double difs_us;
    int cw_min;
    int cw_max;
    size_t max_batch_bytes;
    double max_batch_duration_us;
    double batch_success_fraction;
    size_t per_packet_bytes;
} effsnr_sim_options;

typedef struct effsnr_sim_event {
    double t_us;
    size_t config;
    int mcs;
    size_t batch_bytes;
    int success;
    size_t bytes_delivered;
} effsnr_sim_event;

typedef struct effsnr_sim_summary {
    const char* algorithm;
    double speedup;
    size_t total_bytes;
    double duration_us;
    double throughput_mbps;
    size_t n_batches;
    size_t n_success;
    int has_optimal;
    size_t optimal_total_bytes;
    double fraction_of_optimal; /* NaN without an Optimal replay or when Optimal delivers nothing */
} effsnr_sim_summary;

EFFSNR_API void effsnr_sim_options_default(effsnr_sim_options* options);
/* algorithm: effsnr, samplerate, samplerate-nofallback, optimal, delayed-optimal;
   table may be NULL except for effsnr */
EFFSNR_API effsnr_status effsnr_simulate(const effsnr_trace* trace, const effsnr_space* space, const char* algorithm,
                                         const effsnr_thresholds* table, const effsnr_sim_options* options,
                                         effsnr_sim_result** out);
EFFSNR_API void effsnr_sim_result_free(effsnr_sim_result* result);
EFFSNR_API size_t effsnr_sim_event_count(const effsnr_sim_result* result);
EFFSNR_API effsnr_status effsnr_sim_event_get(const effsnr_sim_result* result, size_t index, effsnr_sim_event* out);
EFFSNR_API effsnr_status effsnr_sim_summary_get(const effsnr_sim_result* result, effsnr_sim_summary* out);

/* ---- network decisions ---- */

typedef struct effsnr_link_metric {
    const char* kind;                /* "packet-snr" or "effective-snr" */
    const effsnr_thresholds* table;  /* effective-snr */
    const char* mcs_set;             /* NULL = all */
    int adc_bits;                    /* <= 0 disables */
    const effsnr_curve* curve;       /* packet-snr relay throughput */
} effsnr_link_metric;

EFFSNR_API effsnr_status effsnr_curve_fit(const double* packet_snr_db, const double* mbps, size_t n,
                                          effsnr_curve** out);
EFFSNR_API void effsnr_curve_free(effsnr_curve* curve);
EFFSNR_API double effsnr_curve_eval(const effsnr_curve* curve, double packet_snr_db);

/* Packet SNR (dB) or predicted bitrate (Mbps) of one record. */
EFFSNR_API effsnr_status effsnr_link_metric_value(const effsnr_trace* trace, size_t record,
                                                  const effsnr_link_metric* metric, double* out);
/* Throughput (Mbps) for relay decisions. */
EFFSNR_API effsnr_status effsnr_link_throughput(const effsnr_trace* trace, size_t record,
                                                const effsnr_link_metric* metric, double* out);

/* Argmax over candidates (record `record` of each trace), ties to the lowest id.
   values receives n metric values. */
EFFSNR_API effsnr_status effsnr_select_best(const effsnr_trace* const* traces, const char* const* ids, size_t n,
                                            size_t record, const effsnr_link_metric* metric, size_t* chosen,
                                            double* values);

/* direct_mbps 0 = unreachable. path_mbps receives n two-hop throughputs;
   *chosen is the relay index or -1. */
EFFSNR_API effsnr_status effsnr_select_relay(double direct_mbps, const double* first_mbps, const double* second_mbps,
                                             const char* const* ids, size_t n, ptrdiff_t* chosen,
                                             double* path_mbps);

typedef struct effsnr_trim_result {
    double offset_db;
    ptrdiff_t best; /* config index, -1 without a baseline */
    double rate_mbps;
    int no_baseline;
} effsnr_trim_result;

EFFSNR_API effsnr_status effsnr_trim_power(const effsnr_trace* trace, size_t record, const effsnr_space* space,
                                           const effsnr_thresholds* table, double step_db, double floor_db,
                                           effsnr_trim_result* out);

typedef struct effsnr_mobility_result {
    const char* state; /* STATIC, ENVIRONMENT_MOBILE or DEVICE_MOBILE */
    double c_min;
    size_t records_used;
} effsnr_mobility_result;

EFFSNR_API effsnr_status effsnr_classify_mobility(const effsnr_trace* trace, int win, double tau_device,
                                                  double tau_env, effsnr_mobility_result* out);

#ifdef __cplusplus
}
#endif

#endif

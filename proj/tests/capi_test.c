/* SPDX-License-Identifier: Apache-2.0 */
/* Exercises the shared library through its C header only. */
#include "effsnr/effsnr.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define CHECK(cond)                                                                                 \
    do {                                                                                            \
        if (!(cond)) {                                                                              \
            fprintf(stderr, "%s:%d: CHECK(%s) failed; last error: %s\n", __FILE__, __LINE__, #cond, \
                    effsnr_last_error());                                                           \
            ++failures;                                                                             \
        }                                                                                           \
    } while (0)

static char dir[4096];

static const char* path_in(const char* name)
{
    static char buf[8192];
    snprintf(buf, sizeof buf, "%s/%s", dir, name);
    return buf;
}

static void write_file(const char* name, const char* text)
{
    FILE* f = fopen(path_in(name), "w");
    if (!f) {
        perror(name);
        exit(2);
    }
    fputs(text, f);
    fclose(f);
}

static const char* kTable =
    "{\"receiver_model\":\"mmse\",\"packet_len_bytes\":1500,\"metric\":\"effective-snr\",\"thresholds\":{"
    "\"0\":2,\"1\":5,\"2\":7.5,\"3\":10.5,\"4\":14,\"5\":18.5,\"6\":20,\"7\":21.5,"
    "\"8\":2,\"9\":5,\"10\":7.5,\"11\":10.5,\"12\":14,\"13\":18.5,\"14\":20,\"15\":21.5}}\n";

static void test_errors(void)
{
    effsnr_trace* t = NULL;
    CHECK(effsnr_trace_read(path_in("does-not-exist.trace"), &t) != EFFSNR_OK);
    CHECK(t == NULL);
    CHECK(strlen(effsnr_last_error()) > 0);
    CHECK(effsnr_trace_generate(NULL, &t) == EFFSNR_E_ARGUMENT);

    effsnr_gen_spec spec;
    effsnr_gen_spec_default(&spec);
    spec.doppler_coeff = 1.5;
    CHECK(effsnr_trace_generate(&spec, &t) == EFFSNR_E_ARGUMENT);

    write_file("bad.trace", "{\"format\":\"nope\"}\n");
    CHECK(effsnr_trace_read(path_in("bad.trace"), &t) == EFFSNR_E_PARSE);

    effsnr_space* s = NULL;
    CHECK(effsnr_space_create("mimo9", 2, 2, 6, &s) == EFFSNR_E_ARGUMENT);
    CHECK(effsnr_space_create("mimo3", 2, 2, 6, &s) == EFFSNR_E_ARGUMENT);
    CHECK(effsnr_space_size(NULL) == 0);

    /* freeing NULL is a no-op */
    effsnr_trace_free(NULL);
    effsnr_space_free(NULL);
    effsnr_thresholds_free(NULL);
    effsnr_sim_result_free(NULL);
    effsnr_calibration_free(NULL);
    effsnr_curve_free(NULL);
}

static void test_predict_and_simulate(void)
{
    effsnr_gen_spec spec;
    effsnr_gen_spec_default(&spec);
    spec.n_rx = 2;
    spec.n_tx = 2;
    spec.n_records = 50;
    spec.mean_snr_db = 20.0;
    spec.seed = 7;
    effsnr_trace* t = NULL;
    CHECK(effsnr_trace_generate(&spec, &t) == EFFSNR_OK);

    effsnr_trace_info info;
    CHECK(effsnr_trace_info_get(t, &info) == EFFSNR_OK);
    CHECK(info.n_rx == 2 && info.n_tx == 2 && info.n_sub == 56 && info.n_records == 50);
    int64_t ts = -1;
    CHECK(effsnr_trace_timestamp(t, 3, &ts) == EFFSNR_OK && ts == 3 * info.interval_us);
    CHECK(effsnr_trace_timestamp(t, 50, &ts) == EFFSNR_E_ARGUMENT);

    /* write, read back, compare a derived quantity */
    CHECK(effsnr_trace_write(t, path_in("c.trace"), "f32") == EFFSNR_OK);
    effsnr_trace* back = NULL;
    CHECK(effsnr_trace_read(path_in("c.trace"), &back) == EFFSNR_OK);
    double a = 0, b = 1;
    CHECK(effsnr_trace_packet_snr(t, 10, &a) == EFFSNR_OK);
    CHECK(effsnr_trace_packet_snr(back, 10, &b) == EFFSNR_OK);
    CHECK(fabs(a - b) < 1e-9);
    CHECK(effsnr_trace_write(t, path_in("c.trace"), "f16") == EFFSNR_E_ARGUMENT);

    write_file("table.json", kTable);
    effsnr_thresholds* table = NULL;
    CHECK(effsnr_thresholds_read(path_in("table.json"), &table) == EFFSNR_OK);
    CHECK(strcmp(effsnr_thresholds_metric(table), "effective-snr") == 0);

    effsnr_space* space = NULL;
    CHECK(effsnr_space_create("all", 2, 2, 6, &space) == EFFSNR_OK);
    CHECK(effsnr_space_size(space) == 16);
    int mcs = -1;
    double rate = 0;
    CHECK(effsnr_space_mcs(space, 15, &mcs, &rate) == EFFSNR_OK && mcs == 15 && rate == 130.0);
    char label[64];
    CHECK(effsnr_space_label(space, 3, label, sizeof label) == EFFSNR_OK && strcmp(label, "mcs3") == 0);
    char tiny[3];
    CHECK(effsnr_space_label(space, 3, tiny, sizeof tiny) == EFFSNR_OK && strcmp(tiny, "mc") == 0);

    effsnr_prediction pred[16];
    ptrdiff_t best = -2;
    CHECK(effsnr_predict(t, 0, space, table, pred, &best) == EFFSNR_OK);
    CHECK(best >= -1 && best < 16);
    static const double tau[8] = {2, 5, 7.5, 10.5, 14, 18.5, 20, 21.5};
    for (int i = 0; i < 16; ++i) {
        CHECK(pred[i].mcs == i);
        CHECK(pred[i].works == (pred[i].metric_db >= tau[i % 8]));
    }
    if (best >= 0)
        CHECK(pred[best].works);

    effsnr_prediction* all = malloc(sizeof(effsnr_prediction) * 50 * 16);
    ptrdiff_t bests[50];
    CHECK(effsnr_predict_trace(t, space, table, all, bests) == EFFSNR_OK);
    CHECK(bests[0] == best);
    for (int i = 0; i < 16; ++i)
        CHECK(all[i].metric_db == pred[i].metric_db && all[i].works == pred[i].works);
    free(all);

    /* a table missing MIMO entries is a configuration error for a MIMO space */
    write_file("siso.json", "{\"thresholds\":{\"0\":2,\"1\":5,\"2\":7.5,\"3\":10.5,\"4\":14,\"5\":18.5,\"6\":20,\"7\":21.5}}");
    effsnr_thresholds* siso = NULL;
    CHECK(effsnr_thresholds_read(path_in("siso.json"), &siso) == EFFSNR_OK);
    CHECK(effsnr_predict(t, 0, space, siso, pred, &best) == EFFSNR_E_CONFIG);
    effsnr_thresholds_free(siso);

    double prr = -1;
    CHECK(effsnr_flat_prr(0, 30.0, 5, 100, 1, &prr) == EFFSNR_OK && prr == 1.0);
    CHECK(effsnr_flat_prr(7, -5.0, 5, 100, 1, &prr) == EFFSNR_OK && prr == 0.0);
    CHECK(effsnr_flat_prr(30, 10.0, 5, 100, 1, &prr) == EFFSNR_E_ARGUMENT);
    CHECK(effsnr_record_prr(t, 0, space, 0, 5, 100, 1, &prr) == EFFSNR_OK);

    effsnr_sim_options opt;
    effsnr_sim_options_default(&opt);
    CHECK(opt.speedup == 1.0 && opt.compare_with_optimal);
    opt.probe_payload_bytes = 100;
    effsnr_sim_result* res = NULL;
    CHECK(effsnr_simulate(t, space, "effsnr", table, &opt, &res) == EFFSNR_OK);
    effsnr_sim_summary sum;
    CHECK(effsnr_sim_summary_get(res, &sum) == EFFSNR_OK);
    CHECK(strcmp(sum.algorithm, "effsnr") == 0);
    CHECK(sum.n_batches == effsnr_sim_event_count(res));
    size_t total = 0;
    for (size_t i = 0; i < effsnr_sim_event_count(res); ++i) {
        effsnr_sim_event e;
        CHECK(effsnr_sim_event_get(res, i, &e) == EFFSNR_OK);
        total += e.bytes_delivered;
    }
    CHECK(total == sum.total_bytes);
    CHECK(sum.has_optimal);
    effsnr_sim_event e;
    CHECK(effsnr_sim_event_get(res, sum.n_batches, &e) == EFFSNR_E_ARGUMENT);
    effsnr_sim_result_free(res);

    res = NULL;
    CHECK(effsnr_simulate(t, space, "effsnr", NULL, &opt, &res) == EFFSNR_E_ARGUMENT);
    CHECK(effsnr_simulate(t, space, "minstrel", NULL, &opt, &res) == EFFSNR_E_ARGUMENT);
    opt.compare_with_optimal = 0;
    CHECK(effsnr_simulate(t, space, "samplerate", NULL, &opt, &res) == EFFSNR_OK);
    CHECK(effsnr_sim_summary_get(res, &sum) == EFFSNR_OK);
    CHECK(!sum.has_optimal && isnan(sum.fraction_of_optimal));
    effsnr_sim_result_free(res);

    effsnr_trim_result trim;
    CHECK(effsnr_trim_power(t, 0, space, table, 2.0, -26.0, &trim) == EFFSNR_OK);
    CHECK(trim.offset_db <= 0.0 && trim.offset_db >= -26.0);
    CHECK((trim.best == -1) == (trim.no_baseline != 0));

    effsnr_mobility_result mob;
    CHECK(effsnr_classify_mobility(t, 10, 0.9, 0.99, &mob) == EFFSNR_E_ARGUMENT); /* 50 ms at 4 ms spacing */

    effsnr_link_metric m = {"effective-snr", table, NULL, 6, NULL};
    double v = -1;
    CHECK(effsnr_link_metric_value(t, 0, &m, &v) == EFFSNR_OK);
    CHECK(v == (best >= 0 ? pred[best].rate_mbps : 0.0));
    const effsnr_trace* cands[2] = {t, back};
    const char* ids[2] = {"9", "10"};
    size_t chosen = 99;
    double values[2];
    CHECK(effsnr_select_best(cands, ids, 2, 0, &m, &chosen, values) == EFFSNR_OK);
    CHECK(chosen == 0); /* equal metrics: lowest id, compared numerically */
    m.kind = "loudness";
    CHECK(effsnr_link_metric_value(t, 0, &m, &v) == EFFSNR_E_ARGUMENT);

    effsnr_trace_free(back);
    effsnr_trace_free(t);
    effsnr_space_free(space);
    effsnr_thresholds_free(table);
}

static void test_calibration_and_decisions(void)
{
    write_file("samples.csv",
               "mcs,link_id,snr_db,prr\n"
               "0,a,1,0\n0,b,2,0.1\n0,c,5,0.95\n0,d,6,1\n"
               "1,a,3,0\n1,b,9,1\n");
    effsnr_calibration* cal = NULL;
    CHECK(effsnr_calibrate(path_in("samples.csv"), "effective-snr", 1500, &cal) == EFFSNR_OK);
    CHECK(effsnr_calibration_size(cal) == 2);
    effsnr_calibration_row row;
    CHECK(effsnr_calibration_row_get(cal, 0, &row) == EFFSNR_OK);
    CHECK(row.mcs == 0 && row.threshold_db == 3.5 && row.balanced_error == 0.0 && row.flag[0] == '\0');
    CHECK(row.n_good == 2 && row.n_bad == 2 && !row.has_w5_95);
    effsnr_thresholds* t = NULL;
    CHECK(effsnr_calibration_table(cal, &t) == EFFSNR_OK);
    CHECK(effsnr_thresholds_write(t, path_in("cal.json")) == EFFSNR_OK);
    effsnr_thresholds_free(t);
    effsnr_calibration_free(cal);

    write_file("bad.csv", "mcs,snr_db\n0,1\n");
    CHECK(effsnr_calibrate(path_in("bad.csv"), "effective-snr", 1500, &cal) == EFFSNR_E_PARSE);

    const double snr[6] = {10.1, 10.5, 10.9, 11.2, 11.3, 11.8};
    const double mbps[6] = {5, 7, 6, 3, 4, 5};
    effsnr_curve* curve = NULL;
    CHECK(effsnr_curve_fit(snr, mbps, 6, &curve) == EFFSNR_OK);
    CHECK(effsnr_curve_eval(curve, 9.0) == 0.0);
    CHECK(effsnr_curve_eval(curve, 11.5) == 6.0);
    effsnr_curve_free(curve);

    const double first[2] = {195, 100};
    const double second[2] = {195, 100};
    const char* ids[2] = {"r1", "r2"};
    ptrdiff_t chosen = -2;
    double path[2];
    CHECK(effsnr_select_relay(65.0, first, second, ids, 2, &chosen, path) == EFFSNR_OK);
    CHECK(chosen == 0 && fabs(path[0] - 97.5) < 1e-9 && fabs(path[1] - 50.0) < 1e-9);
    CHECK(effsnr_select_relay(90.0, first, second, ids, 2, &chosen, path) == EFFSNR_OK && chosen == -1);
}

int main(int argc, char** argv)
{
    if (argc < 2) {
        fprintf(stderr, "usage: %s SCRATCH_DIR\n", argv[0]);
        return 2;
    }
    snprintf(dir, sizeof dir, "%s", argv[1]);
    CHECK(strlen(effsnr_version()) > 0);
    test_errors();
    test_predict_and_simulate();
    test_calibration_and_decisions();
    if (failures) {
        fprintf(stderr, "%d check(s) failed\n", failures);
        return 1;
    }
    printf("c api: all checks passed\n");
    return 0;
}

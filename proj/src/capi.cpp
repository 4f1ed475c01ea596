// SPDX-License-Identifier: Apache-2.0
#include "effsnr/effsnr.h"

#include "effsnr/calibration.hpp"
#include "effsnr/error.hpp"
#include "effsnr/link_sim.hpp"
#include "effsnr/net_config.hpp"
#include "effsnr/packet_sim.hpp"
#include "effsnr/predict.hpp"
#include "effsnr/trace.hpp"

#include <cmath>
#include <cstring>
#include <iostream>
#include <limits>
#include <string>

struct effsnr_trace {
    effsnr::ChannelTrace trace;
};
struct effsnr_thresholds {
    effsnr::ThresholdTable table;
};
struct effsnr_space {
    std::vector<effsnr::ConfigPoint> points;
};
struct effsnr_calibration {
    effsnr::CalibrationReport report;
};
struct effsnr_sim_result {
    effsnr::SimResult result;
};
struct effsnr_curve {
    effsnr::SnrThroughputCurve curve;
};

namespace {

thread_local std::string g_error;

template <class Fn>
effsnr_status guard(Fn&& fn) noexcept
{
    try {
        fn();
        return EFFSNR_OK;
    } catch (const effsnr::ParseError& e) {
        g_error = e.what();
        return EFFSNR_E_PARSE;
    } catch (const effsnr::ConfigError& e) {
        g_error = e.what();
        return EFFSNR_E_CONFIG;
    } catch (const std::invalid_argument& e) {
        g_error = e.what();
        return EFFSNR_E_ARGUMENT;
    } catch (const std::out_of_range& e) {
        g_error = e.what();
        return EFFSNR_E_ARGUMENT;
    } catch (const std::exception& e) {
        g_error = e.what();
        return EFFSNR_E_RUNTIME;
    } catch (...) {
        g_error = "unknown error";
        return EFFSNR_E_RUNTIME;
    }
}

template <class T>
const T& need(const T* p, const char* what)
{
    if (!p)
        throw effsnr::ArgumentError(std::string(what) + " is NULL");
    return *p;
}

const char* need_str(const char* s, const char* what)
{
    if (!s)
        throw effsnr::ArgumentError(std::string(what) + " is NULL");
    return s;
}

template <class T>
T* need_out(T* p)
{
    if (!p)
        throw effsnr::ArgumentError("output pointer is NULL");
    return p;
}

const effsnr::CsiMeasurement& record_of(const effsnr_trace* t, size_t record)
{
    const auto& tr = need(t, "trace").trace;
    if (record >= tr.records.size())
        throw effsnr::ArgumentError("record " + std::to_string(record) + " out of range (trace has " +
                                    std::to_string(tr.records.size()) + ")");
    return tr.records[record];
}

effsnr::LinkMetric to_metric(const effsnr_link_metric* m)
{
    const auto& in = need(m, "metric");
    effsnr::LinkMetric out;
    const effsnr::MetricKind k = effsnr::parse_metric(in.kind ? in.kind : "");
    out.kind = k == effsnr::MetricKind::packet_snr ? effsnr::LinkMetricKind::packet_snr
                                                   : effsnr::LinkMetricKind::effective_snr_bitrate;
    if (in.table)
        out.thresholds = in.table->table;
    if (in.mcs_set)
        out.mcs_set = effsnr::parse_mcs_set(in.mcs_set);
    out.adc_bits = in.adc_bits > 0 ? std::optional<int>(in.adc_bits) : std::nullopt;
    if (in.curve)
        out.curve = in.curve->curve;
    return out;
}

effsnr_prediction to_c(const effsnr::ConfigPrediction& p)
{
    return {p.mcs, p.metric_db, p.works ? 1 : 0, p.rate_mbps};
}

} // namespace

extern "C" {

const char* effsnr_last_error(void)
{
    return g_error.c_str();
}

const char* effsnr_version(void)
{
    return "0.1.0";
}

void effsnr_gen_spec_default(effsnr_gen_spec* spec)
{
    if (!spec)
        return;
    const effsnr::ChannelGenSpec d;
    *spec = {d.seed,          d.n_tx,          d.n_rx,      d.n_sub,     d.n_taps, d.delay_spread_samples,
             d.mean_snr_db,   d.doppler_coeff, d.n_records, d.interval_us};
}

effsnr_status effsnr_trace_generate(const effsnr_gen_spec* spec, effsnr_trace** out)
{
    return guard([&] {
        const auto& s = need(spec, "spec");
        effsnr::ChannelGenSpec g;
        g.seed = s.seed;
        g.n_tx = s.n_tx;
        g.n_rx = s.n_rx;
        g.n_sub = s.n_sub;
        g.n_taps = s.n_taps;
        g.delay_spread_samples = s.delay_spread_samples;
        g.mean_snr_db = s.mean_snr_db;
        g.doppler_coeff = s.doppler_coeff;
        g.n_records = s.n_records;
        g.interval_us = s.interval_us;
        *need_out(out) = new effsnr_trace{effsnr::generate_trace(g)};
    });
}

effsnr_status effsnr_trace_read(const char* path, effsnr_trace** out)
{
    return guard([&] { *need_out(out) = new effsnr_trace{effsnr::read_trace(std::filesystem::path(need_str(path, "path")))}; });
}

effsnr_status effsnr_trace_write(const effsnr_trace* trace, const char* path, const char* encoding)
{
    return guard([&] {
        const auto enc = effsnr::parse_encoding(encoding ? encoding : "f32");
        const std::string p = need_str(path, "path");
        if (p == "-") {
            effsnr::write_trace(need(trace, "trace").trace, std::cout, enc);
            std::cout.flush();
        } else {
            effsnr::write_trace(need(trace, "trace").trace, std::filesystem::path(p), enc);
        }
    });
}

void effsnr_trace_free(effsnr_trace* trace)
{
    delete trace;
}

effsnr_status effsnr_trace_info_get(const effsnr_trace* trace, effsnr_trace_info* out)
{
    return guard([&] {
        const auto& t = need(trace, "trace").trace;
        *need_out(out) = {t.header.n_rx, t.header.n_tx, t.header.n_sub, t.records.size(), t.header.interval_us};
    });
}

effsnr_status effsnr_trace_timestamp(const effsnr_trace* trace, size_t record, int64_t* out)
{
    return guard([&] { *need_out(out) = record_of(trace, record).timestamp_us; });
}

effsnr_status effsnr_trace_packet_snr(const effsnr_trace* trace, size_t record, double* out_db)
{
    return guard([&] { *need_out(out_db) = effsnr::packet_snr(record_of(trace, record)); });
}

effsnr_status effsnr_thresholds_read(const char* path, effsnr_thresholds** out)
{
    return guard([&] {
        *need_out(out) = new effsnr_thresholds{effsnr::read_thresholds(std::filesystem::path(need_str(path, "path")))};
    });
}

effsnr_status effsnr_thresholds_write(const effsnr_thresholds* table, const char* path)
{
    return guard([&] {
        const std::string p = need_str(path, "path");
        if (p == "-") {
            effsnr::write_thresholds(need(table, "table").table, std::cout);
            std::cout.flush();
        } else {
            effsnr::write_thresholds(need(table, "table").table, std::filesystem::path(p));
        }
    });
}

void effsnr_thresholds_free(effsnr_thresholds* table)
{
    delete table;
}

const char* effsnr_thresholds_metric(const effsnr_thresholds* table)
{
    if (!table)
        return "";
    return table->table.metric == effsnr::MetricKind::packet_snr ? "packet-snr" : "effective-snr";
}

effsnr_status effsnr_space_create(const char* mcs_set, int n_rx, int n_tx, int adc_bits, effsnr_space** out)
{
    return guard([&] {
        const auto set = effsnr::parse_mcs_set(mcs_set ? mcs_set : "all");
        const std::optional<int> adc = adc_bits > 0 ? std::optional<int>(adc_bits) : std::nullopt;
        *need_out(out) = new effsnr_space{effsnr::make_config_space(set, n_rx, n_tx, adc)};
    });
}

void effsnr_space_free(effsnr_space* space)
{
    delete space;
}

size_t effsnr_space_size(const effsnr_space* space)
{
    return space ? space->points.size() : 0;
}

effsnr_status effsnr_space_mcs(const effsnr_space* space, size_t index, int* mcs, double* rate_mbps)
{
    return guard([&] {
        const auto& pts = need(space, "space").points;
        if (index >= pts.size())
            throw effsnr::ArgumentError("config index out of range");
        const effsnr::McsEntry& m = effsnr::mcs(pts[index].tx.mcs);
        if (mcs)
            *mcs = m.index;
        if (rate_mbps)
            *rate_mbps = m.rate_mbps;
    });
}

effsnr_status effsnr_space_label(const effsnr_space* space, size_t index, char* buf, size_t buf_len)
{
    return guard([&] {
        const auto& pts = need(space, "space").points;
        if (index >= pts.size())
            throw effsnr::ArgumentError("config index out of range");
        if (!buf || buf_len == 0)
            throw effsnr::ArgumentError("label buffer is empty");
        const std::string label = effsnr::config_label(pts[index]);
        const size_t n = std::min(label.size(), buf_len - 1);
        std::memcpy(buf, label.data(), n);
        buf[n] = '\0';
    });
}

effsnr_status effsnr_predict(const effsnr_trace* trace, size_t record, const effsnr_space* space,
                             const effsnr_thresholds* table, effsnr_prediction* out, ptrdiff_t* best)
{
    return guard([&] {
        const auto rep =
            effsnr::predict(record_of(trace, record), need(space, "space").points, need(table, "table").table);
        need_out(out);
        for (size_t i = 0; i < rep.configs.size(); ++i)
            out[i] = to_c(rep.configs[i]);
        if (best)
            *best = rep.best ? static_cast<ptrdiff_t>(*rep.best) : -1;
    });
}

effsnr_status effsnr_predict_trace(const effsnr_trace* trace, const effsnr_space* space,
                                   const effsnr_thresholds* table, effsnr_prediction* out, ptrdiff_t* best)
{
    return guard([&] {
        const auto& t = need(trace, "trace").trace;
        const effsnr::Predictor predictor(need(space, "space").points, need(table, "table").table);
        need_out(out);
        const size_t n = predictor.space().size();
        for (size_t r = 0; r < t.records.size(); ++r) {
            const auto rep = predictor.predict(t.records[r]);
            for (size_t i = 0; i < n; ++i)
                out[r * n + i] = to_c(rep.configs[i]);
            if (best)
                best[r] = rep.best ? static_cast<ptrdiff_t>(*rep.best) : -1;
        }
    });
}

effsnr_status effsnr_calibrate(const char* samples_path, const char* metric, int packet_len_bytes,
                               effsnr_calibration** out)
{
    return guard([&] {
        const auto samples = effsnr::read_samples_csv(std::filesystem::path(need_str(samples_path, "path")));
        const auto kind = effsnr::parse_metric(metric ? metric : "effective-snr");
        *need_out(out) = new effsnr_calibration{effsnr::fit_thresholds(samples, kind, packet_len_bytes)};
    });
}

void effsnr_calibration_free(effsnr_calibration* cal)
{
    delete cal;
}

size_t effsnr_calibration_size(const effsnr_calibration* cal)
{
    return cal ? cal->report.per_mcs.size() : 0;
}

effsnr_status effsnr_calibration_row_get(const effsnr_calibration* cal, size_t index, effsnr_calibration_row* out)
{
    return guard([&] {
        const auto& rows = need(cal, "calibration").report.per_mcs;
        if (index >= rows.size())
            throw effsnr::ArgumentError("calibration row out of range");
        const effsnr::McsCalibration& c = rows[index];
        effsnr_calibration_row r{};
        r.mcs = c.mcs;
        r.threshold_db = c.fit.threshold_db;
        r.balanced_error = c.fit.balanced_error;
        r.flag = effsnr::to_string(c.fit.flag).data();
        r.has_w5_95 = c.windows.w5_95_db.has_value();
        r.w5_95_db = c.windows.w5_95_db.value_or(0.0);
        r.has_w25_75 = c.windows.w25_75_db.has_value();
        r.w25_75_db = c.windows.w25_75_db.value_or(0.0);
        r.n_good = c.fit.n_good;
        r.n_bad = c.fit.n_bad;
        *need_out(out) = r;
    });
}

effsnr_status effsnr_calibration_table(const effsnr_calibration* cal, effsnr_thresholds** out)
{
    return guard([&] { *need_out(out) = new effsnr_thresholds{need(cal, "calibration").report.thresholds}; });
}

effsnr_status effsnr_flat_prr(int mcs, double snr_db, size_t n_packets, size_t payload_bytes, uint64_t seed,
                              double* prr)
{
    return guard([&] {
        const effsnr::McsEntry& m = effsnr::mcs(mcs);
        if (!std::isfinite(snr_db))
            throw effsnr::ArgumentError("SNR must be finite");
        std::vector<double> snrs(56 * static_cast<size_t>(m.n_streams), std::pow(10.0, snr_db / 10.0));
        const effsnr::PacketSimulator sim(mcs, std::move(snrs));
        *need_out(prr) = sim.measure_prr(n_packets, payload_bytes, seed);
    });
}

effsnr_status effsnr_record_prr(const effsnr_trace* trace, size_t record, const effsnr_space* space, size_t config,
                                size_t n_packets, size_t payload_bytes, uint64_t seed, double* prr)
{
    return guard([&] {
        const auto& pts = need(space, "space").points;
        if (config >= pts.size())
            throw effsnr::ArgumentError("config index out of range");
        *need_out(prr) = effsnr::measure_prr(record_of(trace, record), pts[config].tx, pts[config].rx, n_packets,
                                             payload_bytes, seed);
    });
}

void effsnr_sim_options_default(effsnr_sim_options* o)
{
    if (!o)
        return;
    const effsnr::SimOptions d;
    *o = {d.speedup,
          d.seed,
          d.probe_payload_bytes,
          d.compare_with_optimal ? 1 : 0,
          d.mac.slot_us,
          d.mac.difs_us,
          d.mac.cw_min,
          d.mac.cw_max,
          d.mac.max_batch_bytes,
          d.mac.max_batch_duration_us,
          d.mac.batch_success_fraction,
          d.mac.per_packet_bytes};
}

effsnr_status effsnr_simulate(const effsnr_trace* trace, const effsnr_space* space, const char* algorithm,
                              const effsnr_thresholds* table, const effsnr_sim_options* options,
                              effsnr_sim_result** out)
{
    return guard([&] {
        const auto algo = effsnr::parse_algorithm(need_str(algorithm, "algorithm"));
        effsnr_sim_options c;
        if (options)
            c = *options;
        else
            effsnr_sim_options_default(&c);
        effsnr::SimOptions o;
        o.speedup = c.speedup;
        o.seed = c.seed;
        o.probe_payload_bytes = c.probe_payload_bytes;
        o.compare_with_optimal = c.compare_with_optimal != 0;
        o.mac = {c.slot_us,
                 c.difs_us,
                 c.cw_min,
                 c.cw_max,
                 c.max_batch_bytes,
                 c.max_batch_duration_us,
                 c.batch_success_fraction,
                 c.per_packet_bytes};
        if (table)
            o.thresholds = table->table;
        *need_out(out) = new effsnr_sim_result{
            effsnr::run_simulation(need(trace, "trace").trace, need(space, "space").points, algo, o)};
    });
}

void effsnr_sim_result_free(effsnr_sim_result* result)
{
    delete result;
}

size_t effsnr_sim_event_count(const effsnr_sim_result* result)
{
    return result ? result->result.events.size() : 0;
}

effsnr_status effsnr_sim_event_get(const effsnr_sim_result* result, size_t index, effsnr_sim_event* out)
{
    return guard([&] {
        const auto& ev = need(result, "result").result.events;
        if (index >= ev.size())
            throw effsnr::ArgumentError("event index out of range");
        const effsnr::SimEvent& e = ev[index];
        *need_out(out) = {e.t_us, e.config, e.mcs, e.batch_bytes, e.success ? 1 : 0, e.bytes_delivered};
    });
}

effsnr_status effsnr_sim_summary_get(const effsnr_sim_result* result, effsnr_sim_summary* out)
{
    return guard([&] {
        const effsnr::SimSummary& s = need(result, "result").result.summary;
        *need_out(out) = {effsnr::to_string(s.algorithm).data(),
                          s.speedup,
                          s.total_bytes,
                          s.duration_us,
                          s.throughput_mbps,
                          s.n_batches,
                          s.n_success,
                          s.optimal_total_bytes ? 1 : 0,
                          s.optimal_total_bytes.value_or(0),
                          s.fraction_of_optimal.value_or(std::numeric_limits<double>::quiet_NaN())};
    });
}

effsnr_status effsnr_curve_fit(const double* packet_snr_db, const double* mbps, size_t n, effsnr_curve** out)
{
    return guard([&] {
        if (n > 0 && (!packet_snr_db || !mbps))
            throw effsnr::ArgumentError("sample arrays are NULL");
        std::vector<effsnr::SnrThroughputSample> samples;
        for (size_t i = 0; i < n; ++i)
            samples.push_back({packet_snr_db[i], mbps[i]});
        *need_out(out) = new effsnr_curve{effsnr::fit_snr_throughput_curve(samples)};
    });
}

void effsnr_curve_free(effsnr_curve* curve)
{
    delete curve;
}

double effsnr_curve_eval(const effsnr_curve* curve, double packet_snr_db)
{
    return curve ? curve->curve(packet_snr_db) : 0.0;
}

effsnr_status effsnr_link_metric_value(const effsnr_trace* trace, size_t record, const effsnr_link_metric* metric,
                                       double* out)
{
    return guard([&] { *need_out(out) = effsnr::link_metric(record_of(trace, record), to_metric(metric)); });
}

effsnr_status effsnr_link_throughput(const effsnr_trace* trace, size_t record, const effsnr_link_metric* metric,
                                     double* out)
{
    return guard([&] { *need_out(out) = effsnr::link_throughput(record_of(trace, record), to_metric(metric)); });
}

effsnr_status effsnr_select_best(const effsnr_trace* const* traces, const char* const* ids, size_t n, size_t record,
                                 const effsnr_link_metric* metric, size_t* chosen, double* values)
{
    return guard([&] {
        if (n > 0 && (!traces || !ids))
            throw effsnr::ArgumentError("candidate arrays are NULL");
        std::vector<effsnr::Candidate> cands;
        for (size_t i = 0; i < n; ++i)
            cands.push_back({need_str(ids[i], "candidate id"), record_of(traces[i], record)});
        const auto d = effsnr::select_best(cands, to_metric(metric));
        for (size_t i = 0; i < n; ++i) {
            if (cands[i].id == d.chosen)
                *need_out(chosen) = i;
            if (values)
                values[i] = d.metrics[i].second;
        }
    });
}

effsnr_status effsnr_select_relay(double direct_mbps, const double* first_mbps, const double* second_mbps,
                                  const char* const* ids, size_t n, ptrdiff_t* chosen, double* path_mbps)
{
    return guard([&] {
        if (n > 0 && (!first_mbps || !second_mbps || !ids))
            throw effsnr::ArgumentError("relay arrays are NULL");
        std::vector<effsnr::RelayHops> hops;
        for (size_t i = 0; i < n; ++i)
            hops.push_back({need_str(ids[i], "relay id"), first_mbps[i], second_mbps[i]});
        const auto d = effsnr::select_relay(direct_mbps, hops);
        *need_out(chosen) = -1;
        for (size_t i = 0; i < n; ++i) {
            if (d.relay && hops[i].id == *d.relay)
                *chosen = static_cast<ptrdiff_t>(i);
            if (path_mbps)
                path_mbps[i] = d.path_mbps[i].second;
        }
    });
}

effsnr_status effsnr_trim_power(const effsnr_trace* trace, size_t record, const effsnr_space* space,
                                const effsnr_thresholds* table, double step_db, double floor_db,
                                effsnr_trim_result* out)
{
    return guard([&] {
        const auto r = effsnr::trim_power(record_of(trace, record), need(space, "space").points,
                                          need(table, "table").table, step_db, floor_db);
        *need_out(out) = {r.offset_db, r.best ? static_cast<ptrdiff_t>(*r.best) : -1, r.rate_mbps,
                          r.no_baseline ? 1 : 0};
    });
}

effsnr_status effsnr_classify_mobility(const effsnr_trace* trace, int win, double tau_device, double tau_env,
                                       effsnr_mobility_result* out)
{
    return guard([&] {
        effsnr::MobilityParams p;
        p.win = win;
        p.tau_device = tau_device;
        p.tau_env = tau_env;
        const auto r = effsnr::classify_mobility(need(trace, "trace").trace.records, p);
        *need_out(out) = {effsnr::to_string(r.state).data(), r.c_min, r.records_used};
    });
}

} // extern "C"

// SPDX-License-Identifier: Apache-2.0
// effsnr command-line front end. Uses only the C API.
#include "effsnr/effsnr.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Failure : std::runtime_error {
    Failure(int code, const std::string& what) : std::runtime_error(what), code(code) {}
    int code;
};

void check(effsnr_status s)
{
    if (s == EFFSNR_OK)
        return;
    throw Failure(s == EFFSNR_E_ARGUMENT ? 2 : 1, effsnr_last_error());
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using TracePtr = std::unique_ptr<effsnr_trace, Deleter<effsnr_trace, effsnr_trace_free>>;
using TablePtr = std::unique_ptr<effsnr_thresholds, Deleter<effsnr_thresholds, effsnr_thresholds_free>>;
using SpacePtr = std::unique_ptr<effsnr_space, Deleter<effsnr_space, effsnr_space_free>>;
using CalPtr = std::unique_ptr<effsnr_calibration, Deleter<effsnr_calibration, effsnr_calibration_free>>;
using SimPtr = std::unique_ptr<effsnr_sim_result, Deleter<effsnr_sim_result, effsnr_sim_result_free>>;
using CurvePtr = std::unique_ptr<effsnr_curve, Deleter<effsnr_curve, effsnr_curve_free>>;

TracePtr load_trace(const std::string& path)
{
    effsnr_trace* t = nullptr;
    check(effsnr_trace_read(path.c_str(), &t));
    return TracePtr(t);
}

TablePtr load_table(const std::string& path)
{
    effsnr_thresholds* t = nullptr;
    check(effsnr_thresholds_read(path.c_str(), &t));
    return TablePtr(t);
}

SpacePtr make_space(const std::string& set, int n_rx, int n_tx, int adc_bits)
{
    effsnr_space* s = nullptr;
    check(effsnr_space_create(set.c_str(), n_rx, n_tx, adc_bits, &s));
    return SpacePtr(s);
}

effsnr_trace_info info(const effsnr_trace* t)
{
    effsnr_trace_info i{};
    check(effsnr_trace_info_get(t, &i));
    return i;
}

std::string label(const effsnr_space* s, size_t i)
{
    char buf[128];
    check(effsnr_space_label(s, i, buf, sizeof buf));
    return buf;
}

std::string num(double v)
{
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

// Tabular output written as CSV or as a JSON array of records.
class Table {
public:
    using Cell = std::variant<std::string, double, long long>;

    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
    void add(std::vector<Cell> row) { rows_.push_back(std::move(row)); }

    void write(std::ostream& out, bool json) const
    {
        if (json) {
            ordered_json arr = ordered_json::array();
            for (const auto& row : rows_) {
                ordered_json rec = ordered_json::object();
                for (size_t i = 0; i < columns_.size(); ++i)
                    std::visit([&](const auto& v) { rec[columns_[i]] = v; }, row[i]);
                arr.push_back(std::move(rec));
            }
            out << arr.dump(2) << '\n';
            return;
        }
        for (size_t i = 0; i < columns_.size(); ++i)
            out << (i ? "," : "") << columns_[i];
        out << '\n';
        for (const auto& row : rows_) {
            for (size_t i = 0; i < row.size(); ++i) {
                out << (i ? "," : "");
                if (const auto* s = std::get_if<std::string>(&row[i]))
                    out << *s;
                else if (const auto* d = std::get_if<double>(&row[i]))
                    out << num(*d);
                else
                    out << std::get<long long>(row[i]);
            }
            out << '\n';
        }
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

template <class Fn>
void with_output(const std::string& path, Fn&& fn)
{
    if (path.empty() || path == "-") {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Failure(1, "cannot open '" + path + "' for writing");
    fn(out);
    if (!out)
        throw Failure(1, "write to '" + path + "' failed");
}

void emit(const ordered_json& j, const std::string& path)
{
    with_output(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

// Directory of {src}-{dst}[-{channel}].trace files.
struct LinkFile {
    std::string src, dst, channel;
    fs::path path;
};

std::vector<LinkFile> scan_links(const std::string& dir)
{
    static const std::regex name(R"(^([^-]+)-([^-]+)(?:-([^-]+))?\.trace$)");
    std::error_code ec;
    fs::directory_iterator it(dir, ec);
    if (ec)
        throw Failure(1, "cannot list directory '" + dir + "': " + ec.message());
    std::vector<LinkFile> out;
    for (const auto& e : it) {
        std::smatch m;
        const std::string f = e.path().filename().string();
        if (e.is_regular_file() && std::regex_match(f, m, name))
            out.push_back({m[1], m[2], m[3], e.path()});
    }
    std::sort(out.begin(), out.end(), [](const LinkFile& a, const LinkFile& b) { return a.path < b.path; });
    return out;
}

struct MetricArgs {
    std::string metric = "effective-snr";
    std::string thresholds;
    std::string mcs_set = "all";
    int adc_bits = 6;
    TablePtr table;
    CurvePtr curve;

    effsnr_link_metric get()
    {
        if (metric == "effective-snr" && !table) {
            if (thresholds.empty())
                throw Failure(2, "--thresholds is required with --metric effective-snr");
            table = load_table(thresholds);
        }
        return {metric.c_str(), table.get(), mcs_set.c_str(), adc_bits, curve.get()};
    }
};

void add_metric_flags(CLI::App* c, MetricArgs& m)
{
    c->add_option("--metric", m.metric, "Link metric")
        ->check(CLI::IsMember({"packet-snr", "effective-snr"}))
        ->capture_default_str();
    c->add_option("--thresholds", m.thresholds, "Threshold table (effective-snr)");
    c->add_option("--mcs-set", m.mcs_set, "Config space per link")
        ->check(CLI::IsMember({"siso", "mimo2", "mimo3", "all"}))
        ->capture_default_str();
    c->add_option("--adc-bits", m.adc_bits, "ADC resolution, 0 disables the correction")->capture_default_str();
}

int run(int argc, char** argv)
{
    CLI::App app{"Effective SNR link prediction, packet-level oracle and network decisions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(effsnr_version()));

    std::string format = "csv";
    auto add_format = [&](CLI::App* c) {
        c->add_option("--format", format, "Output format for tables")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
    };

    // gen
    effsnr_gen_spec spec;
    effsnr_gen_spec_default(&spec);
    std::string out_path, encoding = "f32";
    auto* gen = app.add_subcommand("gen", "Write a synthetic Gauss-Markov fading trace");
    gen->add_option("--out", out_path, "Trace file (stdout if omitted)");
    gen->add_option("--seed", spec.seed, "RNG seed")->capture_default_str();
    gen->add_option("--n-tx", spec.n_tx, "Transmit antennas")->capture_default_str();
    gen->add_option("--n-rx", spec.n_rx, "Receive antennas")->capture_default_str();
    gen->add_option("--n-sub", spec.n_sub, "Subcarriers, 56 or 114")->capture_default_str();
    gen->add_option("--taps", spec.n_taps, "Channel taps")->capture_default_str();
    gen->add_option("--delay-spread", spec.delay_spread_samples, "RMS delay spread in samples")
        ->capture_default_str();
    gen->add_option("--snr", spec.mean_snr_db, "Mean per-antenna SNR in dB")->capture_default_str();
    gen->add_option("--doppler", spec.doppler_coeff, "Gauss-Markov coefficient per record")->capture_default_str();
    gen->add_option("--records", spec.n_records, "Number of records")->capture_default_str();
    gen->add_option("--interval-us", spec.interval_us, "Record spacing")->capture_default_str();
    gen->add_option("--encoding", encoding, "f32 or q8")
        ->check(CLI::IsMember({"f32", "q8"}))
        ->capture_default_str();

    // predict
    std::string trace_path, thresholds_path, mcs_set = "all";
    int adc_bits = 6;
    auto* pred = app.add_subcommand("predict", "Per-record, per-config prediction");
    pred->footer("CSV columns: t_us,config,rho_eff_db,works,rate_mbps (rho_eff_db holds the table's metric)");
    pred->add_option("--trace", trace_path, "Input trace")->required();
    pred->add_option("--thresholds", thresholds_path, "Threshold table")->required();
    pred->add_option("--mcs-set", mcs_set, "Config space")
        ->check(CLI::IsMember({"siso", "mimo2", "mimo3", "all"}))
        ->capture_default_str();
    pred->add_option("--adc-bits", adc_bits, "ADC resolution, 0 disables the correction")->capture_default_str();
    pred->add_option("--out", out_path, "Output file (stdout if omitted)");
    add_format(pred);

    // calibrate
    std::string samples_path, windows_path, metric = "effective-snr";
    int packet_len = 1500;
    auto* cal = app.add_subcommand("calibrate", "Fit per-MCS thresholds from delivery samples");
    cal->footer("Input CSV columns: mcs,link_id,snr_db,prr. Windows CSV columns: "
                "mcs,threshold_db,balanced_error,flag,window_5_95_db,window_25_75_db,n_good,n_bad");
    cal->add_option("--samples", samples_path, "Delivery sample CSV")->required();
    cal->add_option("--metric", metric, "Domain of snr_db")
        ->check(CLI::IsMember({"packet-snr", "effective-snr"}))
        ->capture_default_str();
    cal->add_option("--packet-len", packet_len, "Packet length the samples were taken with")->capture_default_str();
    cal->add_option("--out", out_path, "Threshold table output (stdout if omitted)");
    cal->add_option("--windows", windows_path, "Windows and errors table (stdout if omitted)");
    add_format(cal);

    // sweep-prr
    std::vector<int> sweep_mcs{0, 1, 2, 3, 4, 5, 6, 7};
    double snr_min = -2.0, snr_max = 25.0, snr_step = 1.0;
    size_t packets = 100, payload = 1500;
    uint64_t seed = 1;
    auto* sweep = app.add_subcommand("sweep-prr", "Oracle PRR against SNR on flat channels");
    sweep->footer("CSV columns: mcs,snr_db,prr");
    sweep->add_option("--mcs", sweep_mcs, "MCS indices")->delimiter(',');
    sweep->add_option("--snr-min", snr_min, "First SNR in dB")->capture_default_str();
    sweep->add_option("--snr-max", snr_max, "Last SNR in dB")->capture_default_str();
    sweep->add_option("--snr-step", snr_step, "SNR step in dB")->capture_default_str()->check(CLI::PositiveNumber);
    sweep->add_option("--packets", packets, "Packets per point")->capture_default_str();
    sweep->add_option("--payload", payload, "Payload bytes")->capture_default_str();
    sweep->add_option("--seed", seed, "RNG seed")->capture_default_str();
    sweep->add_option("--out", out_path, "Output file (stdout if omitted)");
    add_format(sweep);

    // simulate
    std::string algo;
    std::string summary_path;
    effsnr_sim_options sim_opt;
    effsnr_sim_options_default(&sim_opt);
    bool no_optimal = false;
    auto* sim = app.add_subcommand("simulate", "Trace-driven rate adaptation");
    sim->footer("Events CSV columns: t_us,mcs,bytes,success. The summary object goes to --summary or stdout.");
    sim->add_option("--trace", trace_path, "Input trace")->required();
    sim->add_option("--algo", algo, "effsnr, samplerate, samplerate-nofallback, optimal, delayed-optimal")
        ->required();
    sim->add_option("--thresholds", thresholds_path, "Threshold table (effsnr)");
    sim->add_option("--speedup", sim_opt.speedup, "Playback speedup")->capture_default_str();
    sim->add_option("--seed", sim_opt.seed, "RNG seed")->capture_default_str();
    sim->add_option("--mcs-set", mcs_set, "Config space")
        ->check(CLI::IsMember({"siso", "mimo2", "mimo3", "all"}))
        ->capture_default_str();
    sim->add_option("--adc-bits", adc_bits, "ADC resolution, 0 disables the correction")->capture_default_str();
    sim->add_option("--probe-bytes", sim_opt.probe_payload_bytes,
                    "Payload simulated per record, 0 = packet size")
        ->capture_default_str();
    sim->add_flag("--no-optimal", no_optimal, "Skip the Optimal replay");
    sim->add_option("--out", out_path, "Event output (omitted: no events written)");
    sim->add_option("--summary", summary_path, "Summary output (stdout if omitted)");
    add_format(sim);

    // select-ap / select-channel / select-relay
    MetricArgs metric_args;
    std::string dir, client, src, dst, curve_path;
    std::vector<std::string> relays;
    size_t record = 0;
    bool no_direct = false;
    auto* ap = app.add_subcommand("select-ap", "Choose the access point with the best downlink metric");
    ap->footer("Candidates are {ap}-{client}.trace files in --dir");
    ap->add_option("--dir", dir, "Link trace directory")->required();
    ap->add_option("--client", client, "Client id")->required();
    ap->add_option("--record", record, "Record index used from each trace")->capture_default_str();
    ap->add_option("--out", out_path, "Decision output (stdout if omitted)");
    add_metric_flags(ap, metric_args);

    auto* chan = app.add_subcommand("select-channel", "Choose the channel with the best metric");
    chan->footer("Candidates are {src}-{dst}-{channel}.trace files in --dir");
    chan->add_option("--dir", dir, "Link trace directory")->required();
    chan->add_option("--src", src, "Transmitter id")->required();
    chan->add_option("--dst", dst, "Receiver id")->required();
    chan->add_option("--record", record, "Record index used from each trace")->capture_default_str();
    chan->add_option("--out", out_path, "Decision output (stdout if omitted)");
    add_metric_flags(chan, metric_args);

    auto* relay = app.add_subcommand("select-relay", "Choose a relay by expected transmission time");
    relay->footer("Links are {a}-{b}.trace files in --dir. --curve is a CSV with packet_snr_db,mbps used for "
                  "packet-snr bitrates.");
    relay->add_option("--dir", dir, "Link trace directory")->required();
    relay->add_option("--src", src, "Source id")->required();
    relay->add_option("--dst", dst, "Destination id")->required();
    relay->add_option("--relays", relays, "Relay ids (default: every other node in --dir)")->delimiter(',');
    relay->add_option("--curve", curve_path, "SNR-to-throughput samples for packet-snr");
    relay->add_flag("--no-direct", no_direct, "Treat the direct link as unreachable");
    relay->add_option("--record", record, "Record index used from each trace")->capture_default_str();
    relay->add_option("--out", out_path, "Decision output (stdout if omitted)");
    add_metric_flags(relay, metric_args);

    // trim-power
    double step_db = 2.0, floor_db = -26.0;
    auto* trim = app.add_subcommand("trim-power", "Lowest transmit power keeping the best rate");
    trim->add_option("--trace", trace_path, "Input trace")->required();
    trim->add_option("--thresholds", thresholds_path, "Threshold table")->required();
    trim->add_option("--record", record, "Record index")->capture_default_str();
    trim->add_option("--mcs-set", mcs_set, "Config space")
        ->check(CLI::IsMember({"siso", "mimo2", "mimo3", "all"}))
        ->capture_default_str();
    trim->add_option("--adc-bits", adc_bits, "ADC resolution, 0 disables the correction")->capture_default_str();
    trim->add_option("--step", step_db, "Offset step in dB")->capture_default_str();
    trim->add_option("--floor", floor_db, "Lowest offset in dB")->capture_default_str();
    trim->add_option("--out", out_path, "Decision output (stdout if omitted)");

    // mobility
    int win = 10;
    double tau_device = 0.9, tau_env = 0.99;
    auto* mob = app.add_subcommand("mobility", "Classify a link as static, environment- or device-mobile");
    mob->add_option("--trace", trace_path, "Input trace")->required();
    mob->add_option("--win", win, "Records averaged per window")->capture_default_str();
    mob->add_option("--tau-device", tau_device, "Device-mobility correlation threshold")->capture_default_str();
    mob->add_option("--tau-env", tau_env, "Environment-mobility correlation threshold")->capture_default_str();
    mob->add_option("--out", out_path, "Decision output (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const bool json = format == "json";

    if (gen->parsed()) {
        effsnr_trace* t = nullptr;
        check(effsnr_trace_generate(&spec, &t));
        TracePtr trace(t);
        check(effsnr_trace_write(trace.get(), out_path.empty() ? "-" : out_path.c_str(), encoding.c_str()));
        return 0;
    }

    if (pred->parsed()) {
        auto trace = load_trace(trace_path);
        auto table = load_table(thresholds_path);
        const auto ti = info(trace.get());
        auto space = make_space(mcs_set, ti.n_rx, ti.n_tx, adc_bits);
        const size_t n = effsnr_space_size(space.get());
        std::vector<effsnr_prediction> preds(ti.n_records * n);
        std::vector<ptrdiff_t> best(ti.n_records);
        check(effsnr_predict_trace(trace.get(), space.get(), table.get(), preds.data(), best.data()));
        std::vector<std::string> labels;
        for (size_t i = 0; i < n; ++i)
            labels.push_back(label(space.get(), i));
        Table out({"t_us", "config", "rho_eff_db", "works", "rate_mbps"});
        for (size_t r = 0; r < ti.n_records; ++r) {
            int64_t ts = 0;
            check(effsnr_trace_timestamp(trace.get(), r, &ts));
            for (size_t i = 0; i < n; ++i) {
                const effsnr_prediction& p = preds[r * n + i];
                out.add({static_cast<long long>(ts), labels[i], p.metric_db, static_cast<long long>(p.works),
                         p.rate_mbps});
            }
        }
        with_output(out_path, [&](std::ostream& o) { out.write(o, json); });
        return 0;
    }

    if (cal->parsed()) {
        effsnr_calibration* c = nullptr;
        check(effsnr_calibrate(samples_path.c_str(), metric.c_str(), packet_len, &c));
        CalPtr report(c);
        effsnr_thresholds* t = nullptr;
        check(effsnr_calibration_table(report.get(), &t));
        TablePtr table(t);
        Table rows({"mcs", "threshold_db", "balanced_error", "flag", "window_5_95_db", "window_25_75_db", "n_good",
                    "n_bad"});
        for (size_t i = 0; i < effsnr_calibration_size(report.get()); ++i) {
            effsnr_calibration_row r{};
            check(effsnr_calibration_row_get(report.get(), i, &r));
            rows.add({static_cast<long long>(r.mcs), r.threshold_db, r.balanced_error, std::string(r.flag),
                      r.has_w5_95 ? Table::Cell(r.w5_95_db) : Table::Cell(std::string()),
                      r.has_w25_75 ? Table::Cell(r.w25_75_db) : Table::Cell(std::string()),
                      static_cast<long long>(r.n_good), static_cast<long long>(r.n_bad)});
        }
        check(effsnr_thresholds_write(table.get(), out_path.empty() ? "-" : out_path.c_str()));
        with_output(windows_path, [&](std::ostream& o) { rows.write(o, json); });
        return 0;
    }

    if (sweep->parsed()) {
        if (snr_max < snr_min)
            throw Failure(2, "--snr-max must not be below --snr-min");
        Table out({"mcs", "snr_db", "prr"});
        const auto steps = static_cast<long>(std::floor((snr_max - snr_min) / snr_step + 1e-9));
        for (int m : sweep_mcs) {
            for (long k = 0; k <= steps; ++k) {
                const double snr = snr_min + snr_step * static_cast<double>(k);
                double prr = 0.0;
                check(effsnr_flat_prr(m, snr, packets, payload, seed, &prr));
                out.add({static_cast<long long>(m), snr, prr});
            }
        }
        with_output(out_path, [&](std::ostream& o) { out.write(o, json); });
        return 0;
    }

    if (sim->parsed()) {
        auto trace = load_trace(trace_path);
        TablePtr table;
        if (!thresholds_path.empty())
            table = load_table(thresholds_path);
        const auto ti = info(trace.get());
        auto space = make_space(mcs_set, ti.n_rx, ti.n_tx, adc_bits);
        sim_opt.compare_with_optimal = no_optimal ? 0 : 1;
        effsnr_sim_result* r = nullptr;
        check(effsnr_simulate(trace.get(), space.get(), algo.c_str(), table.get(), &sim_opt, &r));
        SimPtr res(r);
        if (!out_path.empty()) {
            Table ev({"t_us", "mcs", "bytes", "success"});
            for (size_t i = 0; i < effsnr_sim_event_count(res.get()); ++i) {
                effsnr_sim_event e{};
                check(effsnr_sim_event_get(res.get(), i, &e));
                ev.add({e.t_us, static_cast<long long>(e.mcs), static_cast<long long>(e.batch_bytes),
                        static_cast<long long>(e.success)});
            }
            with_output(out_path, [&](std::ostream& o) { ev.write(o, json); });
        }
        effsnr_sim_summary s{};
        check(effsnr_sim_summary_get(res.get(), &s));
        ordered_json j;
        j["algorithm"] = s.algorithm;
        j["speedup"] = s.speedup;
        j["total_bytes"] = s.total_bytes;
        j["duration_us"] = s.duration_us;
        j["throughput_mbps"] = s.throughput_mbps;
        j["n_batches"] = s.n_batches;
        j["n_success"] = s.n_success;
        j["optimal_total_bytes"] = s.has_optimal ? ordered_json(s.optimal_total_bytes) : ordered_json();
        j["fraction_of_optimal"] = std::isfinite(s.fraction_of_optimal) ? ordered_json(s.fraction_of_optimal)
                                                                        : ordered_json();
        emit(j, summary_path);
        return 0;
    }

    if (ap->parsed() || chan->parsed()) {
        const bool is_ap = ap->parsed();
        std::vector<TracePtr> traces;
        std::vector<std::string> ids;
        for (const LinkFile& f : scan_links(dir)) {
            if (is_ap ? (f.channel.empty() && f.dst == client) : (f.channel.size() && f.src == src && f.dst == dst)) {
                traces.push_back(load_trace(f.path.string()));
                ids.push_back(is_ap ? f.src : f.channel);
            }
        }
        if (traces.empty())
            throw Failure(1, "no candidate traces in '" + dir + "'");
        std::vector<const effsnr_trace*> tp;
        std::vector<const char*> idp;
        for (size_t i = 0; i < traces.size(); ++i) {
            tp.push_back(traces[i].get());
            idp.push_back(ids[i].c_str());
        }
        const effsnr_link_metric m = metric_args.get();
        size_t chosen = 0;
        std::vector<double> values(traces.size());
        check(effsnr_select_best(tp.data(), idp.data(), tp.size(), record, &m, &chosen, values.data()));
        ordered_json j;
        j["chosen"] = ids[chosen];
        j["metric"] = metric_args.metric;
        j["unit"] = metric_args.metric == "packet-snr" ? "dB" : "Mbps";
        j["candidates"] = ordered_json::array();
        for (size_t i = 0; i < ids.size(); ++i)
            j["candidates"].push_back({{"id", ids[i]}, {"value", values[i]}});
        emit(j, out_path);
        return 0;
    }

    if (relay->parsed()) {
        std::map<std::pair<std::string, std::string>, fs::path> links;
        std::set<std::string> nodes;
        for (const LinkFile& f : scan_links(dir)) {
            if (!f.channel.empty())
                continue;
            links[{f.src, f.dst}] = f.path;
            nodes.insert(f.src);
            nodes.insert(f.dst);
        }
        if (relays.empty())
            for (const std::string& n : nodes)
                if (n != src && n != dst)
                    relays.push_back(n);
        if (metric_args.metric == "packet-snr") {
            if (curve_path.empty())
                throw Failure(2, "--curve is required with --metric packet-snr");
            std::ifstream in(curve_path);
            if (!in)
                throw Failure(1, "cannot open '" + curve_path + "'");
            std::vector<double> snr, mbps;
            std::string line;
            std::getline(in, line);
            size_t row = 0;
            while (std::getline(in, line)) {
                if (line.empty() || line == "\r")
                    continue;
                std::istringstream ls(line);
                ls.imbue(std::locale::classic());
                double a = 0, b = 0;
                char comma = 0;
                if (!(ls >> a >> comma >> b) || comma != ',')
                    throw Failure(1, "curve row " + std::to_string(row) + ": expected packet_snr_db,mbps");
                snr.push_back(a);
                mbps.push_back(b);
                ++row;
            }
            effsnr_curve* c = nullptr;
            check(effsnr_curve_fit(snr.data(), mbps.data(), snr.size(), &c));
            metric_args.curve.reset(c);
        }
        const effsnr_link_metric m = metric_args.get();
        auto rate = [&](const std::string& a, const std::string& b) {
            auto it = links.find({a, b});
            if (it == links.end())
                throw Failure(1, "missing CSI for link " + a + "->" + b);
            auto t = load_trace(it->second.string());
            double v = 0.0;
            check(effsnr_link_throughput(t.get(), record, &m, &v));
            return v;
        };
        const double direct = no_direct ? 0.0 : rate(src, dst);
        std::vector<double> first, second, path(relays.size());
        std::vector<const char*> idp;
        for (const std::string& r : relays) {
            first.push_back(rate(src, r));
            second.push_back(rate(r, dst));
            idp.push_back(r.c_str());
        }
        ptrdiff_t chosen = -1;
        check(effsnr_select_relay(direct, first.data(), second.data(), idp.data(), relays.size(), &chosen,
                                  path.data()));
        ordered_json j;
        j["chosen"] = chosen >= 0 ? ordered_json(relays[static_cast<size_t>(chosen)]) : ordered_json();
        j["direct_mbps"] = direct;
        j["relays"] = ordered_json::array();
        for (size_t i = 0; i < relays.size(); ++i)
            j["relays"].push_back(
                {{"id", relays[i]}, {"first_mbps", first[i]}, {"second_mbps", second[i]}, {"path_mbps", path[i]}});
        emit(j, out_path);
        return 0;
    }

    if (trim->parsed()) {
        auto trace = load_trace(trace_path);
        auto table = load_table(thresholds_path);
        const auto ti = info(trace.get());
        auto space = make_space(mcs_set, ti.n_rx, ti.n_tx, adc_bits);
        effsnr_trim_result r{};
        check(effsnr_trim_power(trace.get(), record, space.get(), table.get(), step_db, floor_db, &r));
        ordered_json j;
        j["offset_db"] = r.offset_db;
        j["best_config"] = r.best >= 0 ? ordered_json(label(space.get(), static_cast<size_t>(r.best))) : ordered_json();
        j["rate_mbps"] = r.rate_mbps;
        j["no_baseline"] = r.no_baseline != 0;
        emit(j, out_path);
        return 0;
    }

    if (mob->parsed()) {
        auto trace = load_trace(trace_path);
        effsnr_mobility_result r{};
        check(effsnr_classify_mobility(trace.get(), win, tau_device, tau_env, &r));
        ordered_json j;
        j["state"] = r.state;
        j["c_min"] = r.c_min;
        j["records_used"] = r.records_used;
        emit(j, out_path);
        return 0;
    }
    return 2;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.what() << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

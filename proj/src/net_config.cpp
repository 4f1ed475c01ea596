// SPDX-License-Identifier: Apache-2.0
#include "effsnr/error.hpp"
#include "effsnr/net_config.hpp"
#include "text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace effsnr {

double link_bitrate(const CsiMeasurement& csi, const ThresholdTable& thresholds, const std::vector<ConfigPoint>& space)
{
    return predict(csi, space, thresholds).best_rate_mbps;
}

double SnrThroughputCurve::operator()(double snr_db) const
{
    if (bins.empty() || !(snr_db >= bins.front().first))
        return 0.0;
    const int b = static_cast<int>(std::floor(snr_db));
    auto it = std::upper_bound(bins.begin(), bins.end(), b,
                               [](int v, const std::pair<int, double>& bin) { return v < bin.first; });
    return std::prev(it)->second;
}

SnrThroughputCurve fit_snr_throughput_curve(std::span<const SnrThroughputSample> samples)
{
    if (samples.empty())
        throw ArgumentError("throughput curve needs at least one sample");
    std::map<int, std::vector<double>> bins;
    for (const SnrThroughputSample& s : samples) {
        if (!std::isfinite(s.packet_snr_db) || !std::isfinite(s.mbps))
            throw ArgumentError("non-finite throughput sample");
        bins[static_cast<int>(std::floor(s.packet_snr_db))].push_back(s.mbps);
    }
    SnrThroughputCurve curve;
    double running = 0.0;
    for (auto& [b, v] : bins) {
        if (v.size() < 3)
            continue;
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        const double median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
        running = curve.bins.empty() ? median : std::max(running, median);
        curve.bins.emplace_back(b, running);
    }
    return curve;
}

std::string_view to_string(LinkMetricKind k)
{
    return k == LinkMetricKind::packet_snr ? "packet-snr" : "effective-snr";
}

namespace {

const ThresholdTable& require_table(const LinkMetric& m)
{
    if (!m.thresholds)
        throw ArgumentError("the effective-snr metric needs a threshold table");
    return *m.thresholds;
}

double bitrate(const CsiMeasurement& csi, const LinkMetric& m)
{
    return link_bitrate(csi, require_table(m), make_config_space(m.mcs_set, csi.n_rx, csi.n_tx, m.adc_bits));
}

} // namespace

double link_metric(const CsiMeasurement& csi, const LinkMetric& m)
{
    return m.kind == LinkMetricKind::packet_snr ? packet_snr(csi) : bitrate(csi, m);
}

double link_throughput(const CsiMeasurement& csi, const LinkMetric& m)
{
    if (m.kind == LinkMetricKind::effective_snr_bitrate)
        return bitrate(csi, m);
    if (!m.curve)
        throw ArgumentError("packet-snr relay selection needs an SNR-to-throughput curve");
    return (*m.curve)(packet_snr(csi));
}

bool id_less(const std::string& a, const std::string& b)
{
    long long x = 0, y = 0;
    if (text::parse(a, x) && text::parse(b, y))
        return x < y;
    return a < b;
}

Decision select_best(std::span<const Candidate> candidates, const LinkMetric& metric)
{
    if (candidates.empty())
        throw ArgumentError("no candidates to choose from");
    Decision d;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double v = link_metric(candidates[i].csi, metric);
        d.metrics.emplace_back(candidates[i].id, v);
        if (!best || v > d.metrics[*best].second ||
            (v == d.metrics[*best].second && id_less(candidates[i].id, candidates[*best].id)))
            best = i;
    }
    d.chosen = candidates[*best].id;
    return d;
}

double relay_path_mbps(double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0))
        return 0.0;
    return a * b / (a + b);
}

RelayDecision select_relay(double direct_mbps, std::span<const RelayHops> relays)
{
    RelayDecision d;
    d.direct_mbps = direct_mbps;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < relays.size(); ++i) {
        const double p = relay_path_mbps(relays[i].first_mbps, relays[i].second_mbps);
        d.path_mbps.emplace_back(relays[i].id, p);
        if (!best || p > d.path_mbps[*best].second ||
            (p == d.path_mbps[*best].second && id_less(relays[i].id, relays[*best].id)))
            best = i;
    }
    if (best) {
        const double p = d.path_mbps[*best].second;
        if (p > 0.0 && p >= kRelayGain * direct_mbps)
            d.relay = relays[*best].id;
    }
    return d;
}

RelayDecision select_relay(const std::string& source, const std::string& dest, const std::vector<std::string>& relays,
                           const LinkMap& links, const LinkMetric& metric)
{
    auto rate = [&](const std::string& a, const std::string& b) {
        auto it = links.find({a, b});
        if (it == links.end())
            throw ArgumentError("missing CSI for link " + a + "->" + b);
        return it->second ? link_throughput(*it->second, metric) : 0.0;
    };
    const double direct = rate(source, dest);
    std::vector<RelayHops> hops;
    for (const std::string& r : relays)
        hops.push_back({r, rate(source, r), rate(r, dest)});
    return select_relay(direct, hops);
}

TrimResult trim_power(const CsiMeasurement& csi, const std::vector<ConfigPoint>& space,
                      const ThresholdTable& thresholds, double step_db, double floor_db)
{
    if (!(step_db > 0.0) || !(floor_db <= 0.0))
        throw ArgumentError("trim step must be positive and floor non-positive");
    TrimResult r;
    const PredictionReport base = predict(csi, space, thresholds);
    if (!base.best) {
        r.no_baseline = true;
        return r;
    }
    r.best = base.best;
    r.rate_mbps = base.best_rate_mbps;
    std::vector<ConfigPoint> shifted = space;
    for (int k = 1;; ++k) {
        const double off = -step_db * k;
        if (off < floor_db - 1e-9)
            break;
        for (std::size_t i = 0; i < space.size(); ++i)
            shifted[i].tx.power_offset_db = space[i].tx.power_offset_db + off;
        const PredictionReport p = predict(csi, shifted, thresholds);
        if (p.best == base.best && p.best_rate_mbps == base.best_rate_mbps)
            r.offset_db = off;
    }
    return r;
}

} // namespace effsnr

// SPDX-License-Identifier: Apache-2.0
#include "effsnr/error.hpp"
#include "effsnr/predict.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>

namespace effsnr {

namespace {

bool same_stream_setup(const TxConfig& a, const TxConfig& b)
{
    return a.antennas == b.antennas && a.mapping == b.mapping && a.power_offset_db == b.power_offset_db &&
           a.width == b.width && mcs(a.mcs).n_streams == mcs(b.mcs).n_streams;
}

double rx_packet_snr(const CsiMeasurement& csi, const ConfigPoint& c)
{
    std::array<double, kMaxAntennas> rssi{};
    std::size_t n = 0;
    for (int a : c.rx.antennas) {
        if (a < 0 || a >= csi.n_rx)
            throw ArgumentError("RX antenna index out of range");
        rssi[n++] = csi.rssi_dbm.at(static_cast<std::size_t>(a));
    }
    return packet_snr(std::span<const double>(rssi.data(), n), csi.noise_dbm, csi.agc_db) + c.tx.power_offset_db;
}

} // namespace

std::string_view to_string(MetricKind k)
{
    return k == MetricKind::packet_snr ? "packet-snr" : "effective-snr";
}

MetricKind parse_metric(std::string_view name)
{
    if (name == "packet-snr")
        return MetricKind::packet_snr;
    if (name == "effective-snr")
        return MetricKind::effective_snr;
    throw ArgumentError("unknown metric '" + std::string(name) + "'");
}

std::optional<double> ThresholdTable::find(int m) const
{
    auto it = thresholds.find(m);
    if (it == thresholds.end())
        return std::nullopt;
    return it->second;
}

std::string_view to_string(McsSet s)
{
    switch (s) {
    case McsSet::siso: return "siso";
    case McsSet::mimo2: return "mimo2";
    case McsSet::mimo3: return "mimo3";
    case McsSet::all: return "all";
    }
    return "?";
}

McsSet parse_mcs_set(std::string_view name)
{
    if (name == "siso")
        return McsSet::siso;
    if (name == "mimo2")
        return McsSet::mimo2;
    if (name == "mimo3")
        return McsSet::mimo3;
    if (name == "all")
        return McsSet::all;
    throw ArgumentError("unknown MCS set '" + std::string(name) + "'");
}

std::string config_label(const ConfigPoint& c)
{
    std::string s = "mcs" + std::to_string(c.tx.mcs);
    const int streams = mcs(c.tx.mcs).n_streams;
    bool default_tx = static_cast<int>(c.tx.antennas.size()) == streams;
    for (int i = 0; default_tx && i < streams; ++i)
        default_tx = c.tx.antennas[i] == i;
    if (!default_tx) {
        s += "/tx";
        for (std::size_t i = 0; i < c.tx.antennas.size(); ++i)
            s += (i ? "," : "") + std::to_string(c.tx.antennas[i]);
    }
    if (c.tx.power_offset_db != 0.0) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "/%+gdB", c.tx.power_offset_db);
        s += buf;
    }
    if (c.tx.width == ChannelWidth::lower20)
        s += "/lower20";
    else if (c.tx.width == ChannelWidth::upper20)
        s += "/upper20";
    return s;
}

std::vector<ConfigPoint> make_config_space(McsSet set, int n_rx, int n_tx, std::optional<int> adc_bits)
{
    if (n_rx < 1 || n_rx > kMaxAntennas || n_tx < 1 || n_tx > kMaxAntennas)
        throw ArgumentError("antenna counts must be in 1..4");
    int lo = 1, hi = 3;
    switch (set) {
    case McsSet::siso: lo = hi = 1; break;
    case McsSet::mimo2: lo = hi = 2; break;
    case McsSet::mimo3: lo = hi = 3; break;
    case McsSet::all: hi = std::min({3, n_rx, n_tx}); break;
    }
    if (hi > std::min(n_rx, n_tx))
        throw ArgumentError("MCS set '" + std::string(to_string(set)) + "' needs " + std::to_string(hi) +
                            "x" + std::to_string(hi) + " antennas");
    RxConfig rx;
    rx.antennas.clear();
    for (int a = 0; a < n_rx; ++a)
        rx.antennas.push_back(a);
    rx.combiner = Combiner::mmse;
    rx.adc_bits = adc_bits;

    std::vector<ConfigPoint> space;
    for (int s = lo; s <= hi; ++s)
        for (int i = 0; i < 8; ++i) {
            ConfigPoint c;
            c.tx.mcs = 8 * (s - 1) + i;
            c.tx.antennas.clear();
            for (int a = 0; a < s; ++a)
                c.tx.antennas.push_back(a);
            c.rx = rx;
            space.push_back(std::move(c));
        }
    return space;
}

std::optional<std::size_t> fastest(const std::vector<ConfigPoint>& space, const std::vector<bool>& works)
{
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (!works[i])
            continue;
        if (!best) {
            best = i;
            continue;
        }
        const McsEntry& a = mcs(space[i].tx.mcs);
        const McsEntry& b = mcs(space[*best].tx.mcs);
        if (a.rate_mbps > b.rate_mbps ||
            (a.rate_mbps == b.rate_mbps &&
             (a.n_streams < b.n_streams || (a.n_streams == b.n_streams && a.index < b.index))))
            best = i;
    }
    return best;
}

Predictor::Predictor(std::vector<ConfigPoint> space, ThresholdTable thresholds)
    : space_(std::move(space))
    , table_(std::move(thresholds))
{
    tau_.reserve(space_.size());
    for (const ConfigPoint& c : space_) {
        mcs(c.tx.mcs);
        auto t = table_.find(c.tx.mcs);
        if (!t)
            throw ConfigError("threshold table has no entry for MCS " + std::to_string(c.tx.mcs));
        if (!std::isfinite(*t))
            throw ConfigError("threshold for MCS " + std::to_string(c.tx.mcs) + " is not finite");
        tau_.push_back(*t);
    }
    for (std::size_t i = 0; i < space_.size(); ++i) {
        auto it = std::find_if(groups_.begin(), groups_.end(), [&](const Group& g) {
            const ConfigPoint& r = space_[g.representative];
            return same_stream_setup(r.tx, space_[i].tx) && r.rx == space_[i].rx;
        });
        if (it == groups_.end())
            groups_.push_back({i, {i}});
        else
            it->members.push_back(i);
    }
}

std::vector<double> Predictor::metrics(const CsiMeasurement& csi) const
{
    std::vector<double> out(space_.size(), 0.0);
    if (table_.metric == MetricKind::packet_snr) {
        for (std::size_t i = 0; i < space_.size(); ++i)
            out[i] = rx_packet_snr(csi, space_[i]);
        return out;
    }
    std::vector<double> snrs;
    for (const Group& g : groups_) {
        const ConfigPoint& rep = space_[g.representative];
        subchannel_snrs(effective_csi(csi, rep.tx), rep.rx, snrs);
        std::array<std::optional<double>, 4> by_modulation;
        for (std::size_t i : g.members) {
            const Modulation m = mcs(space_[i].tx.mcs).modulation;
            auto& slot = by_modulation[static_cast<std::size_t>(modulation_slot(m))];
            if (!slot)
                slot = effective_snr(snrs, m).rho_eff_db;
            out[i] = *slot;
        }
    }
    return out;
}

PredictionReport Predictor::predict(const CsiMeasurement& csi) const
{
    const std::vector<double> values = metrics(csi);
    PredictionReport rep;
    rep.configs.reserve(space_.size());
    std::vector<bool> works(space_.size());
    for (std::size_t i = 0; i < space_.size(); ++i) {
        works[i] = values[i] >= tau_[i];
        const McsEntry& e = mcs(space_[i].tx.mcs);
        rep.configs.push_back({e.index, values[i], works[i], e.rate_mbps});
    }
    rep.best = fastest(space_, works);
    if (rep.best)
        rep.best_rate_mbps = rep.configs[*rep.best].rate_mbps;
    return rep;
}

PredictionReport predict(const CsiMeasurement& csi, const std::vector<ConfigPoint>& space,
                         const ThresholdTable& thresholds)
{
    return Predictor(space, thresholds).predict(csi);
}

std::vector<EffectiveSnrResult> effective_snrs(const CsiMeasurement& csi, const TxConfig& tx, const RxConfig& rx)
{
    const std::vector<double> snrs = subchannel_snrs(effective_csi(csi, tx), rx);
    std::vector<EffectiveSnrResult> out;
    for (Modulation m : kModulations)
        out.push_back(effective_snr(snrs, m));
    return out;
}

} // namespace effsnr

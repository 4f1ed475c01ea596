// SPDX-License-Identifier: Apache-2.0
#include "effsnr/calibration.hpp"
#include "effsnr/error.hpp"
#include "text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace effsnr {

std::string_view to_string(FitFlag f)
{
    switch (f) {
    case FitFlag::none: return "";
    case FitFlag::unconstrained_low: return "unconstrained-low";
    case FitFlag::unconstrained_high: return "unconstrained-high";
    }
    return "";
}

ThresholdFit fit_threshold(std::span<const double> good_in, std::span<const double> bad_in)
{
    std::vector<double> good(good_in.begin(), good_in.end());
    std::vector<double> bad(bad_in.begin(), bad_in.end());
    for (double v : good)
        if (!std::isfinite(v))
            throw ArgumentError("non-finite SNR in calibration samples");
    for (double v : bad)
        if (!std::isfinite(v))
            throw ArgumentError("non-finite SNR in calibration samples");
    std::sort(good.begin(), good.end());
    std::sort(bad.begin(), bad.end());

    ThresholdFit fit;
    fit.n_good = good.size();
    fit.n_bad = bad.size();
    if (good.empty() && bad.empty())
        throw ArgumentError("threshold fit needs at least one good or bad sample");
    if (bad.empty()) {
        fit.threshold_db = good.front() - 1.0;
        fit.flag = FitFlag::unconstrained_low;
        return fit;
    }
    if (good.empty()) {
        fit.threshold_db = bad.back() + 1.0;
        fit.flag = FitFlag::unconstrained_high;
        return fit;
    }

    std::vector<double> values;
    values.reserve(good.size() + bad.size());
    values.insert(values.end(), good.begin(), good.end());
    values.insert(values.end(), bad.begin(), bad.end());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<double> candidates;
    candidates.reserve(2 * values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0)
            candidates.push_back(0.5 * (values[i - 1] + values[i]));
        candidates.push_back(values[i]);
    }

    const double n_good = static_cast<double>(good.size());
    const double n_bad = static_cast<double>(bad.size());
    double best_gap = 2.0;
    for (double tau : candidates) {
        const auto below = std::lower_bound(good.begin(), good.end(), tau) - good.begin();
        const auto bad_below = std::lower_bound(bad.begin(), bad.end(), tau) - bad.begin();
        const double fn = static_cast<double>(below) / n_good;
        const double fp = static_cast<double>(bad.size() - static_cast<std::size_t>(bad_below)) / n_bad;
        const double gap = std::abs(fn - fp);
        if (gap < best_gap) {
            best_gap = gap;
            fit.threshold_db = tau;
            fit.false_negative = fn;
            fit.false_positive = fp;
        }
    }
    fit.balanced_error = std::max(fit.false_negative, fit.false_positive);
    return fit;
}

double percentile(std::span<const double> sorted, double p)
{
    if (sorted.empty())
        throw ArgumentError("percentile of an empty sample");
    const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

WindowWidths window_widths(std::span<const double> snrs)
{
    WindowWidths w;
    w.n_transitional = snrs.size();
    if (snrs.size() < 4)
        return w;
    std::vector<double> s(snrs.begin(), snrs.end());
    std::sort(s.begin(), s.end());
    w.w5_95_db = percentile(s, 0.95) - percentile(s, 0.05);
    w.w25_75_db = percentile(s, 0.75) - percentile(s, 0.25);
    return w;
}

std::map<int, WindowWidths> transition_windows(std::span<const DeliverySample> samples)
{
    std::map<int, std::vector<double>> by_mcs;
    for (const DeliverySample& s : samples) {
        auto& v = by_mcs[s.mcs];
        if (s.prr > 0.1 && s.prr < 0.9)
            v.push_back(s.snr_db);
    }
    std::map<int, WindowWidths> out;
    for (const auto& [m, v] : by_mcs)
        out[m] = window_widths(v);
    return out;
}

CalibrationReport fit_thresholds(std::span<const DeliverySample> samples, MetricKind metric, int packet_len_bytes)
{
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_mcs;
    std::map<int, bool> seen;
    for (const DeliverySample& s : samples) {
        if (!(s.prr >= 0.0 && s.prr <= 1.0))
            throw ArgumentError("prr must lie in [0, 1]");
        mcs(s.mcs);
        seen[s.mcs] = true;
        auto& [good, bad] = by_mcs[s.mcs];
        if (s.prr >= kGoodPrr)
            good.push_back(s.snr_db);
        else if (s.prr < kBadPrr)
            bad.push_back(s.snr_db);
    }
    const auto windows = transition_windows(samples);

    CalibrationReport rep;
    rep.thresholds.metric = metric;
    rep.thresholds.packet_len_bytes = packet_len_bytes;
    for (const auto& [m, _] : seen) {
        const auto& [good, bad] = by_mcs[m];
        if (good.empty() && bad.empty())
            throw ArgumentError("MCS " + std::to_string(m) + " has no good or bad samples");
        McsCalibration c;
        c.mcs = m;
        c.fit = fit_threshold(good, bad);
        c.windows = windows.at(m);
        rep.thresholds.thresholds[m] = c.fit.threshold_db;
        rep.per_mcs.push_back(std::move(c));
    }
    return rep;
}

std::vector<ConfusionBin> rate_confusion(std::span<const LinkRatePoint> links)
{
    std::map<int, ConfusionBin> bins;
    for (const LinkRatePoint& l : links) {
        if (!std::isfinite(l.metric_db))
            throw ArgumentError("non-finite metric in rate confusion input");
        const int b = static_cast<int>(std::floor(l.metric_db));
        auto [it, inserted] = bins.try_emplace(b, ConfusionBin{b, l.fastest_rate_mbps, l.fastest_rate_mbps, 0});
        ConfusionBin& bin = it->second;
        bin.best_rate_mbps = std::max(bin.best_rate_mbps, l.fastest_rate_mbps);
        bin.worst_rate_mbps = std::min(bin.worst_rate_mbps, l.fastest_rate_mbps);
        ++bin.n_links;
    }
    std::vector<ConfusionBin> out;
    for (const auto& [_, b] : bins)
        out.push_back(b);
    return out;
}

std::vector<DeliverySample> read_samples_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw ParseError(std::nullopt, "empty sample file");
    const auto header = text::split(line, ',');
    int col_mcs = -1, col_link = -1, col_snr = -1, col_prr = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto h = text::trim(header[i]);
        const int idx = static_cast<int>(i);
        if (h == "mcs")
            col_mcs = idx;
        else if (h == "link_id")
            col_link = idx;
        else if (h == "snr_db")
            col_snr = idx;
        else if (h == "prr")
            col_prr = idx;
    }
    if (col_mcs < 0 || col_link < 0 || col_snr < 0 || col_prr < 0)
        throw ParseError(std::nullopt, "sample CSV header must name mcs, link_id, snr_db and prr");

    std::vector<DeliverySample> out;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (text::trim(line).empty())
            continue;
        const auto f = text::split(line, ',');
        const auto need = static_cast<std::size_t>(std::max({col_mcs, col_link, col_snr, col_prr}));
        if (f.size() <= need)
            throw ParseError(row, "too few columns");
        DeliverySample s;
        if (!text::parse(f[col_mcs], s.mcs) || s.mcs < 0 || s.mcs >= kMcsCount)
            throw ParseError(row, "bad mcs value");
        s.link_id = std::string(text::trim(f[col_link]));
        if (!text::parse(f[col_snr], s.snr_db) || !std::isfinite(s.snr_db))
            throw ParseError(row, "bad snr_db value");
        if (!text::parse(f[col_prr], s.prr) || !(s.prr >= 0.0 && s.prr <= 1.0))
            throw ParseError(row, "bad prr value");
        out.push_back(std::move(s));
        ++row;
    }
    return out;
}

std::vector<DeliverySample> read_samples_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open sample file '" + path.string() + "'");
    return read_samples_csv(in);
}

void write_samples_csv(std::span<const DeliverySample> samples, std::ostream& out)
{
    out << "mcs,link_id,snr_db,prr\n";
    for (const DeliverySample& s : samples)
        out << s.mcs << ',' << s.link_id << ',' << text::number(s.snr_db) << ',' << text::number(s.prr) << '\n';
}

void write_report_csv(const CalibrationReport& rep, std::ostream& out)
{
    out << "mcs,threshold_db,balanced_error,flag,window_5_95_db,window_25_75_db,n_good,n_bad\n";
    for (const McsCalibration& c : rep.per_mcs) {
        out << c.mcs << ',' << text::number(c.fit.threshold_db) << ',' << text::number(c.fit.balanced_error) << ','
            << to_string(c.fit.flag) << ',' << (c.windows.w5_95_db ? text::number(*c.windows.w5_95_db) : "") << ','
            << (c.windows.w25_75_db ? text::number(*c.windows.w25_75_db) : "") << ',' << c.fit.n_good << ','
            << c.fit.n_bad << '\n';
    }
}

} // namespace effsnr

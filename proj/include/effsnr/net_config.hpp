// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "effsnr/predict.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace effsnr {

/// Fastest predicted rate over `space`, 0 when nothing works.
double link_bitrate(const CsiMeasurement& csi, const ThresholdTable& thresholds, const std::vector<ConfigPoint>& space);

/// Monotone step function from Packet SNR (dB) to throughput (Mbps).
struct SnrThroughputCurve {
    std::vector<std::pair<int, double>> bins;   // bin floor in dB -> Mbps, ascending, nondecreasing

    /// 0 below the first bin, the last value above the last bin, otherwise the
    /// value of the highest bin at or below floor(snr_db).
    double operator()(double snr_db) const;
};

struct SnrThroughputSample {
    double packet_snr_db;
    double mbps;
};

/// 1 dB bins, per-bin median, bins with fewer than 3 samples dropped, then a
/// running maximum.
SnrThroughputCurve fit_snr_throughput_curve(std::span<const SnrThroughputSample> samples);

enum class LinkMetricKind { packet_snr, effective_snr_bitrate };

std::string_view to_string(LinkMetricKind k);

struct LinkMetric {
    LinkMetricKind kind = LinkMetricKind::packet_snr;
    std::optional<ThresholdTable> thresholds;   // effective_snr_bitrate
    McsSet mcs_set = McsSet::all;               // space is built per measurement from its antenna counts
    std::optional<int> adc_bits = 6;
    std::optional<SnrThroughputCurve> curve;    // packet_snr relay bitrates
};

/// Packet SNR in dB, or link_bitrate in Mbps.
double link_metric(const CsiMeasurement& csi, const LinkMetric& metric);
/// Mbps for relay decisions: link_bitrate, or curve(packet SNR).
double link_throughput(const CsiMeasurement& csi, const LinkMetric& metric);

/// Orders ids numerically when both are integers, otherwise lexicographically.
bool id_less(const std::string& a, const std::string& b);

struct Candidate {
    std::string id;
    CsiMeasurement csi;
};

struct Decision {
    std::string chosen;
    std::vector<std::pair<std::string, double>> metrics;   // per candidate, input order
};

/// Argmax of the metric, ties to the lowest id. Used for both AP and channel choice.
Decision select_best(std::span<const Candidate> candidates, const LinkMetric& metric);
inline Decision select_ap(std::span<const Candidate> c, const LinkMetric& m) { return select_best(c, m); }
inline Decision select_channel(std::span<const Candidate> c, const LinkMetric& m) { return select_best(c, m); }

inline constexpr double kRelayGain = 1.2;

struct RelayHops {
    std::string id;
    double first_mbps;    // source -> relay
    double second_mbps;   // relay -> destination
};

struct RelayDecision {
    std::optional<std::string> relay;
    double direct_mbps = 0.0;
    std::vector<std::pair<std::string, double>> path_mbps;   // per relay, input order
};

/// Two-hop throughput under ETT: 1 / (1/a + 1/b), 0 if either hop is 0.
double relay_path_mbps(double a, double b);

RelayDecision select_relay(double direct_mbps, std::span<const RelayHops> relays);

/// Directed links keyed (src, dst); a present key with no value marks an unreachable pair.
using LinkMap = std::map<std::pair<std::string, std::string>, std::optional<CsiMeasurement>>;

RelayDecision select_relay(const std::string& source, const std::string& dest, const std::vector<std::string>& relays,
                           const LinkMap& links, const LinkMetric& metric);

struct TrimResult {
    double offset_db = 0.0;
    std::optional<std::size_t> best;   // baseline best config
    double rate_mbps = 0.0;
    bool no_baseline = false;
};

/// Most negative offset in 0, -step, -2 step, ... >= floor at which the
/// predicted best config and rate match the unmodified prediction.
TrimResult trim_power(const CsiMeasurement& csi, const std::vector<ConfigPoint>& space,
                      const ThresholdTable& thresholds, double step_db = 2.0, double floor_db = -26.0);

enum class MobilityState { static_link, environment_mobile, device_mobile };

std::string_view to_string(MobilityState s);

struct MobilityParams {
    int win = 10;
    double tau_device = 0.9;
    double tau_env = 0.99;
    double min_spacing_us = 4000.0;
};

struct MobilityResult {
    MobilityState state;
    double c_min;
    std::vector<double> path_min;   // per (rx, tx) path, rx-major
    std::size_t records_used;
};

/// Pearson correlation; for zero-variance input 1 if the vectors are equal, else 0.
double pearson(std::span<const double> a, std::span<const double> b);

MobilityResult classify_mobility(std::span<const CsiMeasurement> records, const MobilityParams& params = {});

} // namespace effsnr

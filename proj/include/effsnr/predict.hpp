// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "effsnr/ber.hpp"
#include "effsnr/effective_csi.hpp"
#include "effsnr/mcs.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace effsnr {

enum class MetricKind { packet_snr, effective_snr };

std::string_view to_string(MetricKind k);
MetricKind parse_metric(std::string_view name);

/// Per-MCS decision thresholds in one metric domain.
struct ThresholdTable {
    std::string receiver_model = "mmse";
    int packet_len_bytes = 1500;
    MetricKind metric = MetricKind::effective_snr;
    std::map<int, double> thresholds;   // MCS index -> dB

    std::optional<double> find(int mcs) const;

    bool operator==(const ThresholdTable&) const = default;
};

// {"receiver_model": .., "packet_len_bytes": .., "metric": "effective-snr", "thresholds": {"0": dB, ..}}
ThresholdTable read_thresholds(std::istream& in);
ThresholdTable read_thresholds(const std::filesystem::path& path);
void write_thresholds(const ThresholdTable& table, std::ostream& out);
void write_thresholds(const ThresholdTable& table, const std::filesystem::path& path);

struct ConfigPoint {
    TxConfig tx;
    RxConfig rx;
};

/// Short human-readable name such as "mcs12" or "mcs3/tx1/-4dB".
std::string config_label(const ConfigPoint& c);

enum class McsSet { siso, mimo2, mimo3, all };

std::string_view to_string(McsSet s);
McsSet parse_mcs_set(std::string_view name);

/// Built-in space: one config per MCS of the set; S streams use direct mapping
/// on TX antennas 0..S-1 and MMSE over all receive antennas. `all` keeps the
/// stream counts the antenna counts allow, the other sets throw ArgumentError
/// when they do not fit.
std::vector<ConfigPoint> make_config_space(McsSet set, int n_rx, int n_tx, std::optional<int> adc_bits = 6);

struct ConfigPrediction {
    int mcs;
    double metric_db;    // Effective SNR, or Packet SNR for packet-snr tables
    bool works;
    double rate_mbps;
};

struct PredictionReport {
    std::vector<ConfigPrediction> configs;   // same order as the space
    std::optional<std::size_t> best;         // index into the space
    double best_rate_mbps = 0.0;
};

/// Evaluates a fixed configuration space against many measurements. Configs
/// that differ only in MCS within the same stream count share one Effective
/// CSI and one set of subchannel SNRs.
class Predictor {
public:
    Predictor(std::vector<ConfigPoint> space, ThresholdTable thresholds);

    PredictionReport predict(const CsiMeasurement& csi) const;

    /// Metric value of every config, without thresholding.
    std::vector<double> metrics(const CsiMeasurement& csi) const;

    const std::vector<ConfigPoint>& space() const { return space_; }
    const ThresholdTable& thresholds() const { return table_; }

private:
    struct Group {
        std::size_t representative;
        std::vector<std::size_t> members;
    };

    std::vector<ConfigPoint> space_;
    ThresholdTable table_;
    std::vector<double> tau_;
    std::vector<Group> groups_;
};

/// One-shot form of Predictor::predict.
PredictionReport predict(const CsiMeasurement& csi, const std::vector<ConfigPoint>& space,
                         const ThresholdTable& thresholds);

/// Index of the fastest config among `works`, ties to fewer streams, then to
/// the lower MCS index, then to the earlier config.
std::optional<std::size_t> fastest(const std::vector<ConfigPoint>& space, const std::vector<bool>& works);

/// Four Effective SNRs (one per modulation) of a single configuration.
std::vector<EffectiveSnrResult> effective_snrs(const CsiMeasurement& csi, const TxConfig& tx, const RxConfig& rx);

} // namespace effsnr

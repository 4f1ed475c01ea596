// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "effsnr/predict.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace effsnr {

/// One (link, MCS) delivery measurement in some SNR domain.
struct DeliverySample {
    int mcs = 0;
    std::string link_id;
    double snr_db = 0.0;
    double prr = 0.0;
};

inline constexpr double kGoodPrr = 0.9;
inline constexpr double kBadPrr = 0.8;

enum class FitFlag { none, unconstrained_low, unconstrained_high };
std::string_view to_string(FitFlag f);

struct ThresholdFit {
    double threshold_db = 0.0;
    double balanced_error = 0.0;
    double false_negative = 0.0;   // good links below the threshold
    double false_positive = 0.0;   // bad links at or above it
    FitFlag flag = FitFlag::none;
    std::size_t n_good = 0;
    std::size_t n_bad = 0;
};

/// Threshold between the SNRs of good and bad links that balances false
/// negatives against false positives. Candidates are the observed values and
/// the midpoints between neighbours; ties go to the lowest candidate.
ThresholdFit fit_threshold(std::span<const double> good, std::span<const double> bad);

struct WindowWidths {
    std::optional<double> w5_95_db;
    std::optional<double> w25_75_db;
    std::size_t n_transitional = 0;
};

/// Percentile spreads of the SNRs of transitional links (0.1 < prr < 0.9);
/// empty when fewer than four such links exist.
WindowWidths window_widths(std::span<const double> transitional_snrs);

/// Linear interpolation between order statistics of sorted data, p in [0, 1].
double percentile(std::span<const double> sorted, double p);

std::map<int, WindowWidths> transition_windows(std::span<const DeliverySample> samples);

struct McsCalibration {
    int mcs = 0;
    ThresholdFit fit;
    WindowWidths windows;
};

struct CalibrationReport {
    ThresholdTable thresholds;
    std::vector<McsCalibration> per_mcs;   // ascending MCS
};

/// Per-MCS thresholds from good (prr >= 0.9) and bad (prr < 0.8) samples;
/// samples in between are ignored. Throws ArgumentError for an MCS whose
/// samples all fall in the ignored band.
CalibrationReport fit_thresholds(std::span<const DeliverySample> samples,
                                 MetricKind metric = MetricKind::effective_snr, int packet_len_bytes = 1500);

struct LinkRatePoint {
    double metric_db;
    double fastest_rate_mbps;
};

struct ConfusionBin {
    int bin_db;   // covers [bin_db, bin_db + 1)
    double best_rate_mbps;
    double worst_rate_mbps;
    std::size_t n_links;
};

std::vector<ConfusionBin> rate_confusion(std::span<const LinkRatePoint> links);

// CSV with header naming the columns mcs, link_id, snr_db, prr (any order).
std::vector<DeliverySample> read_samples_csv(std::istream& in);
std::vector<DeliverySample> read_samples_csv(const std::filesystem::path& path);
void write_samples_csv(std::span<const DeliverySample> samples, std::ostream& out);

// mcs,threshold_db,balanced_error,flag,window_5_95_db,window_25_75_db,n_good,n_bad
void write_report_csv(const CalibrationReport& report, std::ostream& out);

} // namespace effsnr

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "effsnr/csi.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace effsnr {

enum class TraceEncoding { f32, q8 };

std::string_view to_string(TraceEncoding e);
TraceEncoding parse_encoding(std::string_view name);

struct TraceHeader {
    int n_rx = 1;
    int n_tx = 1;
    int n_sub = 56;
    std::int64_t interval_us = 1000;
    TraceEncoding encoding = TraceEncoding::f32;

    bool operator==(const TraceHeader&) const = default;
};

/// Time-ordered measurements sharing one set of dimensions.
struct ChannelTrace {
    TraceHeader header;
    std::vector<CsiMeasurement> records;

    bool operator==(const ChannelTrace&) const = default;
};

/// Throws ArgumentError on dimension mismatch or non-increasing timestamps.
void validate(const ChannelTrace& trace);

// Line-oriented text format. Line 1 is the header object
//   {"format":"effsnr-trace/1","n_rx":..,"n_tx":..,"n_sub":..,"interval_us":..,"encoding":"f32"|"q8"}
// and every further line one record
//   {"t_us":..,"rssi_dbm":[..],"noise_dbm":..,"agc_db":..,"csi":[sub][rx][tx] = [re,im]}
// q8 records carry integer codes plus the per-record "scale" (grid step).
ChannelTrace read_trace(std::istream& in);
ChannelTrace read_trace(const std::filesystem::path& path);
void write_trace(const ChannelTrace& trace, std::ostream& out, TraceEncoding encoding);
void write_trace(const ChannelTrace& trace, const std::filesystem::path& path, TraceEncoding encoding);

/// Synthetic tapped-delay-line Rayleigh channel with Gauss-Markov tap evolution.
struct ChannelGenSpec {
    std::uint64_t seed = 1;
    int n_tx = 1;
    int n_rx = 1;
    int n_sub = 56;
    int n_taps = 6;
    double delay_spread_samples = 2.0;
    double mean_snr_db = 20.0;
    double doppler_coeff = 0.99;
    std::size_t n_records = 100;
    std::int64_t interval_us = 1000;
};

void validate(const ChannelGenSpec& spec);

/// Deterministic given spec.seed. The expected per-subcarrier sum over TX of
/// |h|^2 on each receive antenna equals 10^(mean_snr_db/10).
ChannelTrace generate_trace(const ChannelGenSpec& spec);

} // namespace effsnr

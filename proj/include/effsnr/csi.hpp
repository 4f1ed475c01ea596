// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace effsnr {

using Gain = std::complex<float>;

/// 802.11n devices have at most four RF chains per side.
inline constexpr int kMaxAntennas = 4;

/// One channel measurement: per-subcarrier N x M gain matrices plus the RSSI
/// metadata reported with the packet.
///
/// Gains are noise-normalized: |h|^2 is the linear SNR contribution of the
/// (rx, tx) path on that subcarrier, with unit noise power per receive chain.
struct CsiMeasurement {
    int n_rx = 0;
    int n_tx = 0;
    int n_sub = 0;
    std::vector<Gain> gains;        // [sub][rx][tx], row-major
    std::vector<double> rssi_dbm;   // one per receive antenna
    double noise_dbm = -92.0;
    double agc_db = 0.0;
    std::int64_t timestamp_us = 0;

    CsiMeasurement() = default;
    CsiMeasurement(int n_rx, int n_tx, int n_sub);

    std::size_t index(int sub, int rx, int tx) const noexcept
    {
        return (static_cast<std::size_t>(sub) * n_rx + rx) * n_tx + tx;
    }
    Gain& at(int sub, int rx, int tx) noexcept { return gains[index(sub, rx, tx)]; }
    Gain at(int sub, int rx, int tx) const noexcept { return gains[index(sub, rx, tx)]; }

    bool operator==(const CsiMeasurement&) const = default;
};

/// Checks dimensions, subcarrier count (56 or 114), RSSI length and finiteness.
void validate(const CsiMeasurement& csi);

/// Packet SNR in dB: per-antenna rssi - noise - agc, summed in linear units.
double packet_snr(std::span<const double> rssi_dbm, double noise_dbm, double agc_db);
double packet_snr(const CsiMeasurement& csi);

/// Sets rssi_dbm so that each antenna's Packet SNR equals its mean CSI power
/// (sum over TX of |h|^2, averaged over subcarriers). agc_db is left as is.
void derive_rssi_from_gains(CsiMeasurement& csi);

/// Integer codes of one quantized measurement: value = code * step.
struct QuantizedGains {
    float step = 0.0f;
    std::vector<std::int32_t> codes;   // re, im interleaved, same order as gains
};

QuantizedGains quantize_codes(const CsiMeasurement& csi, int bits);
void apply_codes(CsiMeasurement& csi, const QuantizedGains& q);

/// Emulates b-bit CSI reporting: the largest |re| or |im| of the record maps to
/// 2^(bits-1) - 1, entries are rounded to that grid and scaled back.
/// An all-zero measurement is returned unchanged.
CsiMeasurement quantize_csi(const CsiMeasurement& csi, int bits);

/// Frequency-flat measurement with every path at `snr_db_per_path`
/// (gain real and positive). RSSI is derived from the gains.
CsiMeasurement flat_csi(int n_rx, int n_tx, double snr_db_per_path, int n_sub = 56);

} // namespace effsnr

// SPDX-License-Identifier: Apache-2.0
#include "effsnr/csi.hpp"
#include "effsnr/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace effsnr {

ParseError::ParseError(std::optional<std::size_t> record, const std::string& what)
    : std::runtime_error(record ? "record " + std::to_string(*record) + ": " + what : what)
    , record_(record)
{
}

CsiMeasurement::CsiMeasurement(int rx, int tx, int sub)
    : n_rx(rx)
    , n_tx(tx)
    , n_sub(sub)
    , gains(static_cast<std::size_t>(std::max(0, rx * tx * sub)))
    , rssi_dbm(static_cast<std::size_t>(std::max(0, rx)), 0.0)
{
}

void validate(const CsiMeasurement& csi)
{
    if (csi.n_rx < 1 || csi.n_rx > kMaxAntennas || csi.n_tx < 1 || csi.n_tx > kMaxAntennas)
        throw ArgumentError("antenna counts must be in 1.." + std::to_string(kMaxAntennas));
    if (csi.n_sub != 56 && csi.n_sub != 114)
        throw ArgumentError("n_sub must be 56 or 114, got " + std::to_string(csi.n_sub));
    if (csi.gains.size() != static_cast<std::size_t>(csi.n_rx) * csi.n_tx * csi.n_sub)
        throw ArgumentError("gain array does not match n_sub x n_rx x n_tx");
    if (csi.rssi_dbm.size() != static_cast<std::size_t>(csi.n_rx))
        throw ArgumentError("rssi_dbm length must equal n_rx");
    for (const Gain& g : csi.gains)
        if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
            throw ArgumentError("non-finite CSI entry");
    for (double r : csi.rssi_dbm)
        if (!std::isfinite(r))
            throw ArgumentError("non-finite rssi");
    if (!std::isfinite(csi.noise_dbm) || !std::isfinite(csi.agc_db))
        throw ArgumentError("non-finite noise or agc");
}

double packet_snr(std::span<const double> rssi_dbm, double noise_dbm, double agc_db)
{
    if (rssi_dbm.empty())
        throw ArgumentError("packet_snr needs at least one antenna");
    double total = 0.0;
    for (double r : rssi_dbm)
        total += std::pow(10.0, (r - noise_dbm - agc_db) / 10.0);
    return 10.0 * std::log10(total);
}

double packet_snr(const CsiMeasurement& csi)
{
    return packet_snr(csi.rssi_dbm, csi.noise_dbm, csi.agc_db);
}

void derive_rssi_from_gains(CsiMeasurement& csi)
{
    csi.rssi_dbm.assign(static_cast<std::size_t>(csi.n_rx), 0.0);
    for (int r = 0; r < csi.n_rx; ++r) {
        double power = 0.0;
        for (int s = 0; s < csi.n_sub; ++s)
            for (int t = 0; t < csi.n_tx; ++t)
                power += std::norm(std::complex<double>(csi.at(s, r, t)));
        power /= csi.n_sub;
        // keep the value finite for dead antennas
        power = std::max(power, 1e-30);
        csi.rssi_dbm[r] = csi.noise_dbm + csi.agc_db + 10.0 * std::log10(power);
    }
}

QuantizedGains quantize_codes(const CsiMeasurement& csi, int bits)
{
    if (bits < 2 || bits > 16)
        throw ArgumentError("quantization depth must be in 2..16 bits");
    float max_abs = 0.0f;
    for (const Gain& g : csi.gains)
        max_abs = std::max({max_abs, std::abs(g.real()), std::abs(g.imag())});

    QuantizedGains q;
    q.codes.resize(csi.gains.size() * 2, 0);
    if (max_abs == 0.0f)
        return q;
    const double full_scale = std::ldexp(1.0, bits - 1) - 1.0;
    q.step = static_cast<float>(static_cast<double>(max_abs) / full_scale);
    const double step = q.step;
    for (std::size_t i = 0; i < csi.gains.size(); ++i) {
        q.codes[2 * i] = static_cast<std::int32_t>(std::lround(csi.gains[i].real() / step));
        q.codes[2 * i + 1] = static_cast<std::int32_t>(std::lround(csi.gains[i].imag() / step));
    }
    return q;
}

void apply_codes(CsiMeasurement& csi, const QuantizedGains& q)
{
    if (q.codes.size() != csi.gains.size() * 2)
        throw ArgumentError("code count does not match gain count");
    const double step = q.step;
    for (std::size_t i = 0; i < csi.gains.size(); ++i)
        csi.gains[i] = Gain(static_cast<float>(q.codes[2 * i] * step),
                            static_cast<float>(q.codes[2 * i + 1] * step));
}

CsiMeasurement quantize_csi(const CsiMeasurement& csi, int bits)
{
    QuantizedGains q = quantize_codes(csi, bits);
    CsiMeasurement out = csi;
    if (q.step == 0.0f)
        return out;
    apply_codes(out, q);
    return out;
}

CsiMeasurement flat_csi(int n_rx, int n_tx, double snr_db_per_path, int n_sub)
{
    CsiMeasurement csi(n_rx, n_tx, n_sub);
    const auto amp = static_cast<float>(std::pow(10.0, snr_db_per_path / 20.0));
    std::fill(csi.gains.begin(), csi.gains.end(), Gain(amp, 0.0f));
    derive_rssi_from_gains(csi);
    validate(csi);
    return csi;
}

} // namespace effsnr

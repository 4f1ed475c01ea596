// SPDX-License-Identifier: Apache-2.0
#include "effsnr/error.hpp"
#include "effsnr/trace.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace effsnr {

namespace {

using cd = std::complex<double>;

// Data/pilot tone indices carried in the CSI, relative to DC.
std::vector<int> tone_indices(int n_sub)
{
    std::vector<int> tones;
    if (n_sub == 56) {
        for (int k = -28; k <= 28; ++k)
            if (k != 0)
                tones.push_back(k);
    } else {
        for (int k = -58; k <= 58; ++k)
            if (k < -1 || k > 1)
                tones.push_back(k);
    }
    return tones;
}

} // namespace

void validate(const ChannelGenSpec& s)
{
    if (s.n_tx < 1 || s.n_tx > kMaxAntennas || s.n_rx < 1 || s.n_rx > kMaxAntennas)
        throw ArgumentError("antenna counts must be in 1.." + std::to_string(kMaxAntennas));
    if (s.n_sub != 56 && s.n_sub != 114)
        throw ArgumentError("n_sub must be 56 or 114");
    if (s.n_taps < 1)
        throw ArgumentError("n_taps must be at least 1");
    if (!(s.delay_spread_samples >= 0.0) || !std::isfinite(s.delay_spread_samples))
        throw ArgumentError("delay_spread_samples must be >= 0");
    if (!(s.doppler_coeff >= 0.0 && s.doppler_coeff < 1.0))
        throw ArgumentError("doppler_coeff must be in [0, 1)");
    if (!std::isfinite(s.mean_snr_db))
        throw ArgumentError("mean_snr_db must be finite");
    if (s.n_records < 1)
        throw ArgumentError("n_records must be positive");
    if (s.interval_us < 1)
        throw ArgumentError("interval_us must be positive");
}

ChannelTrace generate_trace(const ChannelGenSpec& spec)
{
    validate(spec);
    const int n_paths = spec.n_rx * spec.n_tx;
    const int n_taps = spec.n_taps;

    std::vector<double> tap_sigma(static_cast<std::size_t>(n_taps), 0.0);
    if (spec.delay_spread_samples == 0.0) {
        tap_sigma[0] = 1.0;
    } else {
        double total = 0.0;
        for (int l = 0; l < n_taps; ++l) {
            tap_sigma[l] = std::exp(-l / spec.delay_spread_samples);
            total += tap_sigma[l];
        }
        for (double& p : tap_sigma)
            p = std::sqrt(p / total);
    }

    const std::vector<int> tones = tone_indices(spec.n_sub);
    const int n_fft = spec.n_sub == 56 ? 64 : 128;
    std::vector<cd> twiddle(tones.size() * n_taps);
    for (std::size_t k = 0; k < tones.size(); ++k)
        for (int l = 0; l < n_taps; ++l)
            twiddle[k * n_taps + l] = std::polar(1.0, -2.0 * std::numbers::pi * tones[k] * l / n_fft);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, std::numbers::sqrt2 / 2.0);
    auto cgauss = [&] {
        const double re = normal(rng);
        return cd(re, normal(rng));
    };

    std::vector<cd> taps(static_cast<std::size_t>(n_paths) * n_taps);
    for (int p = 0; p < n_paths; ++p)
        for (int l = 0; l < n_taps; ++l)
            taps[p * n_taps + l] = tap_sigma[l] * cgauss();

    const double amp = std::sqrt(std::pow(10.0, spec.mean_snr_db / 10.0) / spec.n_tx);
    const double a = spec.doppler_coeff;
    const double innovation = std::sqrt(1.0 - a * a);

    ChannelTrace trace;
    trace.header = {spec.n_rx, spec.n_tx, spec.n_sub, spec.interval_us, TraceEncoding::f32};
    trace.records.reserve(spec.n_records);
    for (std::size_t i = 0; i < spec.n_records; ++i) {
        if (i > 0) {
            for (int p = 0; p < n_paths; ++p)
                for (int l = 0; l < n_taps; ++l) {
                    cd& g = taps[p * n_taps + l];
                    g = a * g + innovation * tap_sigma[l] * cgauss();
                }
        }
        CsiMeasurement m(spec.n_rx, spec.n_tx, spec.n_sub);
        m.timestamp_us = static_cast<std::int64_t>(i) * spec.interval_us;
        for (int r = 0; r < spec.n_rx; ++r)
            for (int t = 0; t < spec.n_tx; ++t) {
                const cd* g = &taps[(r * spec.n_tx + t) * n_taps];
                for (std::size_t k = 0; k < tones.size(); ++k) {
                    cd h = 0.0;
                    for (int l = 0; l < n_taps; ++l)
                        h += g[l] * twiddle[k * n_taps + l];
                    h *= amp;
                    m.at(static_cast<int>(k), r, t) = Gain(static_cast<float>(h.real()), static_cast<float>(h.imag()));
                }
            }
        derive_rssi_from_gains(m);
        trace.records.push_back(std::move(m));
    }
    return trace;
}

} // namespace effsnr

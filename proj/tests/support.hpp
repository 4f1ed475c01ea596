// SPDX-License-Identifier: Apache-2.0
// Random generators and straightforward reference implementations used as
// test oracles. Nothing here calls into the code it is compared against,
// except for the data types.
#pragma once

#include "effsnr/csi.hpp"
#include "effsnr/effective_csi.hpp"
#include "effsnr/mcs.hpp"
#include "effsnr/predict.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace testing {

using cd = std::complex<double>;
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline cd cgauss(Rng& rng, double var = 1.0)
{
    std::normal_distribution<double> n(0.0, std::sqrt(var / 2.0));
    return {n(rng), n(rng)};
}

/// Rayleigh per entry, i.i.d. across tones, mean |h|^2 = snr.
inline effsnr::CsiMeasurement random_csi(Rng& rng, int n_rx, int n_tx, double snr_db, int n_sub = 56)
{
    effsnr::CsiMeasurement c(n_rx, n_tx, n_sub);
    const double var = std::pow(10.0, snr_db / 10.0);
    for (auto& g : c.gains) {
        const cd v = cgauss(rng, var);
        g = effsnr::Gain(static_cast<float>(v.real()), static_cast<float>(v.imag()));
    }
    effsnr::derive_rssi_from_gains(c);
    return c;
}

/// Frequency-selective channel built from a few random taps.
inline effsnr::CsiMeasurement multipath_csi(Rng& rng, int n_rx, int n_tx, double snr_db, int taps = 6)
{
    effsnr::CsiMeasurement c(n_rx, n_tx, 56);
    const double amp = std::sqrt(std::pow(10.0, snr_db / 10.0) / n_tx);
    const double pi = std::acos(-1.0);
    for (int r = 0; r < n_rx; ++r)
        for (int t = 0; t < n_tx; ++t) {
            std::vector<cd> h(taps);
            double total = 0.0;
            for (int l = 0; l < taps; ++l) {
                h[l] = cgauss(rng, std::exp(-l / 2.0));
                total += std::exp(-l / 2.0);
            }
            for (int s = 0; s < 56; ++s) {
                const int k = s < 28 ? s - 28 : s - 27;
                cd acc = 0.0;
                for (int l = 0; l < taps; ++l)
                    acc += h[l] * std::polar(1.0, -2.0 * pi * k * l / 64.0);
                acc *= amp / std::sqrt(total);
                c.at(s, r, t) = effsnr::Gain(static_cast<float>(acc.real()), static_cast<float>(acc.imag()));
            }
        }
    effsnr::derive_rssi_from_gains(c);
    return c;
}

// ---- BER and Effective SNR ----

inline double ref_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline double ref_ber(effsnr::Modulation m, double rho)
{
    using effsnr::Modulation;
    switch (m) {
    case Modulation::bpsk: return ref_q(std::sqrt(2.0 * rho));
    case Modulation::qpsk: return ref_q(std::sqrt(rho));
    case Modulation::qam16: return 0.75 * ref_q(std::sqrt(rho / 5.0));
    case Modulation::qam64: return 7.0 / 12.0 * ref_q(std::sqrt(rho / 21.0));
    }
    return 0.0;
}

/// Bisection on log SNR; valid for beta strictly inside the row's range.
inline double ref_inv_ber(effsnr::Modulation m, double beta)
{
    double lo = -60.0, hi = 60.0;   // dB
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (ref_ber(m, std::pow(10.0, mid / 10.0)) > beta)
            lo = mid;
        else
            hi = mid;
    }
    return std::pow(10.0, 0.5 * (lo + hi) / 10.0);
}

inline double ref_effective_snr_db(const std::vector<double>& snrs, effsnr::Modulation m)
{
    double sum = 0.0;
    for (double s : snrs)
        sum += ref_ber(m, s);
    const double beta = std::max(sum / static_cast<double>(snrs.size()), 1e-15);
    return 10.0 * std::log10(ref_inv_ber(m, beta));
}

// ---- Effective CSI and combiners ----

using Mat = Eigen::MatrixXcd;

inline Mat sylvester(int order)
{
    Mat h = Mat::Ones(1, 1);
    while (h.rows() < order) {
        const Eigen::Index n = h.rows();
        Mat g(2 * n, 2 * n);
        g << h, h, h, -h;
        h = g;
    }
    return h;
}

inline Mat ref_mapping(const effsnr::SpatialMapping& mp, int m, int s, int sub)
{
    using Kind = effsnr::SpatialMapping::Kind;
    auto walsh = [](int rows, int cols) {
        int order = 1;
        while (order < std::max(rows, cols))
            order *= 2;
        return Mat(sylvester(order).topLeftCorner(rows, cols) / std::sqrt(static_cast<double>(rows)));
    };
    switch (mp.kind) {
    case Kind::direct: return Mat::Identity(m, s);
    case Kind::walsh: return walsh(m, s);
    case Kind::expansion: {
        Mat e = Mat::Zero(m, s);
        for (int i = 0; i < m; ++i)
            e(i, i % s) = 1.0;
        e *= std::sqrt(static_cast<double>(s) / m);
        return mp.inner == Kind::walsh ? Mat(walsh(m, m) * e) : e;
    }
    case Kind::explicit_matrices:
        return mp.matrices.size() == 1 ? Mat(mp.matrices[0]) : Mat(mp.matrices[static_cast<std::size_t>(sub)]);
    }
    return {};
}

/// Per tone N x S matrices.
inline std::vector<Mat> ref_effective(const effsnr::CsiMeasurement& csi, const effsnr::TxConfig& tx)
{
    const int s = effsnr::mcs(tx.mcs).n_streams;
    const int m = static_cast<int>(tx.antennas.size());
    int first = 0, count = csi.n_sub;
    if (tx.width == effsnr::ChannelWidth::lower20)
        count = 56;
    if (tx.width == effsnr::ChannelWidth::upper20) {
        first = 58;
        count = 56;
    }
    std::vector<Mat> out;
    for (int i = 0; i < count; ++i) {
        Mat h(csi.n_rx, m);
        for (int r = 0; r < csi.n_rx; ++r)
            for (int a = 0; a < m; ++a) {
                const auto g = csi.at(first + i, r, tx.antennas[a]);
                h(r, a) = cd(g.real(), g.imag());
            }
        Mat e = h * ref_mapping(tx.mapping, m, s, i);
        e *= std::pow(10.0, tx.power_offset_db / 20.0);
        e /= std::sqrt(static_cast<double>(s));
        out.push_back(e);
    }
    return out;
}

/// 1/Y_jj - 1 with Y = (H^H H + I)^-1, by a general matrix inverse.
inline std::vector<double> ref_mmse(const Mat& h)
{
    const Eigen::Index s = h.cols();
    const Mat y = (h.adjoint() * h + Mat::Identity(s, s)).inverse();
    std::vector<double> out;
    for (Eigen::Index j = 0; j < s; ++j)
        out.push_back(1.0 / y(j, j).real() - 1.0);
    return out;
}

inline std::vector<double> ref_subchannel_snrs(const std::vector<Mat>& eff, const effsnr::RxConfig& rx)
{
    std::vector<double> out;
    const Eigen::Index s = eff.front().cols();
    int sel = -1;
    if (rx.combiner == effsnr::Combiner::selection) {
        double best = -1.0;
        for (int a : rx.antennas) {
            double p = 0.0;
            for (const Mat& t : eff)
                p += std::norm(t(a, 0));
            if (p > best || (p == best && a < sel)) {
                best = p;
                sel = a;
            }
        }
    }
    for (const Mat& t : eff) {
        Mat rows(static_cast<Eigen::Index>(rx.antennas.size()), s);
        for (std::size_t r = 0; r < rx.antennas.size(); ++r)
            rows.row(static_cast<Eigen::Index>(r)) = t.row(rx.antennas[r]);
        std::vector<double> v;
        switch (rx.combiner) {
        case effsnr::Combiner::selection: v = {std::norm(t(sel, 0))}; break;
        case effsnr::Combiner::mrc: v = {rows.col(0).squaredNorm()}; break;
        case effsnr::Combiner::mmse: v = ref_mmse(rows); break;
        }
        for (double x : v) {
            if (rx.adc_bits && x > 0.0)
                x = 1.0 / (1.0 / x + std::pow(10.0, -6.02 * *rx.adc_bits / 10.0));
            x *= std::pow(10.0, rx.ml_gain_db / 10.0);
            out.push_back(x);
        }
    }
    return out;
}

struct RefPrediction {
    std::vector<double> metric_db;
    std::vector<bool> works;
    std::optional<std::size_t> best;
};

inline double ref_packet_snr(const std::vector<double>& rssi, double noise, double agc)
{
    double sum = 0.0;
    for (double r : rssi)
        sum += std::pow(10.0, (r - noise - agc) / 10.0);
    return 10.0 * std::log10(sum);
}

/// Config-by-config loop with no sharing between configs.
inline RefPrediction ref_predict(const effsnr::CsiMeasurement& csi, const std::vector<effsnr::ConfigPoint>& space,
                                 const effsnr::ThresholdTable& table)
{
    RefPrediction p;
    for (const auto& c : space) {
        double metric;
        if (table.metric == effsnr::MetricKind::packet_snr) {
            std::vector<double> rssi;
            for (int a : c.rx.antennas)
                rssi.push_back(csi.rssi_dbm[static_cast<std::size_t>(a)]);
            metric = ref_packet_snr(rssi, csi.noise_dbm, csi.agc_db) + c.tx.power_offset_db;
        } else {
            const auto snrs = ref_subchannel_snrs(ref_effective(csi, c.tx), c.rx);
            const double db = ref_effective_snr_db(snrs, effsnr::mcs(c.tx.mcs).modulation);
            metric = std::max(db, -100.0);
        }
        p.metric_db.push_back(metric);
        p.works.push_back(metric >= table.thresholds.at(c.tx.mcs));
    }
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (!p.works[i])
            continue;
        if (!p.best) {
            p.best = i;
            continue;
        }
        const auto& a = effsnr::mcs(space[i].tx.mcs);
        const auto& b = effsnr::mcs(space[*p.best].tx.mcs);
        if (a.rate_mbps > b.rate_mbps ||
            (a.rate_mbps == b.rate_mbps &&
             (a.n_streams < b.n_streams || (a.n_streams == b.n_streams && a.index < b.index))))
            p.best = i;
    }
    return p;
}

/// Thresholds placed at the flat-channel SNR where the effective-SNR model
/// would sit comfortably; handy when a plausible table is needed.
inline effsnr::ThresholdTable nominal_table()
{
    effsnr::ThresholdTable t;
    const double tau[8] = {2.0, 5.0, 7.5, 10.5, 14.0, 18.5, 20.0, 21.5};
    for (int m = 0; m < 24; ++m)
        t.thresholds[m] = tau[m % 8];
    return t;
}

} // namespace testing

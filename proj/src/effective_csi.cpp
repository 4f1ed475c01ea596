// SPDX-License-Identifier: Apache-2.0
#include "effsnr/effective_csi.hpp"
#include "effsnr/error.hpp"
#include "effsnr/mcs.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace effsnr {

namespace {

using cd = std::complex<double>;

// Sylvester construction; entry (r, c) is the same for every order 2^k > max(r, c).
double hadamard(int r, int c) { return (std::popcount(static_cast<unsigned>(r & c)) & 1) ? -1.0 : 1.0; }

MappingMatrix walsh_matrix(int m, int s)
{
    MappingMatrix v(m, s);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < s; ++c)
            v(r, c) = hadamard(r, c) * scale;
    return v;
}

void check_antennas(const std::vector<int>& subset, int available, const char* side)
{
    if (subset.empty() || subset.size() > static_cast<std::size_t>(kMaxAntennas))
        throw ArgumentError(std::string(side) + " antenna subset must hold 1..4 antennas");
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (subset[i] < 0 || subset[i] >= available)
            throw ArgumentError(std::string(side) + " antenna index " + std::to_string(subset[i]) + " out of range");
        for (std::size_t j = 0; j < i; ++j)
            if (subset[j] == subset[i])
                throw ArgumentError(std::string(side) + " antenna subset has duplicates");
    }
}

// rho_j = 1/Y_jj - 1 with Y = (A + I)^-1, A = H^H H, written as the Schur
// complement A_jj - b^H (I + A_rr)^-1 b.
template <int S>
void mmse_tone(const Eigen::Matrix<cd, Eigen::Dynamic, S, 0, kMaxAntennas, S>& h, double* out)
{
    using Gram = Eigen::Matrix<cd, S, S>;
    const Gram a = h.adjoint() * h;
    if constexpr (S == 1) {
        out[0] = a(0, 0).real();
    } else {
        for (int j = 0; j < S; ++j) {
            Eigen::Matrix<cd, S - 1, S - 1> rest;
            Eigen::Matrix<cd, S - 1, 1> b;
            for (int r = 0, rr = 0; r < S; ++r) {
                if (r == j)
                    continue;
                b(rr) = a(r, j);
                for (int c = 0, cc = 0; c < S; ++c) {
                    if (c == j)
                        continue;
                    rest(rr, cc) = a(r, c);
                    ++cc;
                }
                rest(rr, rr) += 1.0;
                ++rr;
            }
            const double rho = a(j, j).real() - (b.adjoint() * rest.inverse() * b)(0, 0).real();
            out[j] = std::max(rho, 0.0);
        }
    }
}

template <int S>
void mmse_all(const EffectiveCsi& eff, const std::vector<int>& rows, double* out)
{
    Eigen::Matrix<cd, Eigen::Dynamic, S, 0, kMaxAntennas, S> h(static_cast<int>(rows.size()), S);
    for (int sub = 0; sub < eff.n_sub; ++sub) {
        for (int r = 0; r < static_cast<int>(rows.size()); ++r)
            for (int s = 0; s < S; ++s)
                h(r, s) = eff.at(sub, rows[r], s);
        mmse_tone<S>(h, out + static_cast<std::size_t>(sub) * S);
    }
}

} // namespace

MappingMatrix mapping_matrix(const SpatialMapping& mapping, int m, int s, int sub)
{
    using Kind = SpatialMapping::Kind;
    if (s < 1 || s > kMaxAntennas || m < 1 || m > kMaxAntennas)
        throw ArgumentError("mapping dimensions out of range");
    switch (mapping.kind) {
    case Kind::direct: {
        if (m < s)
            throw ArgumentError("direct mapping needs at least as many antennas as streams");
        MappingMatrix v = MappingMatrix::Zero(m, s);
        for (int i = 0; i < s; ++i)
            v(i, i) = 1.0;
        return v;
    }
    case Kind::walsh:
        if (m < s)
            throw ArgumentError("walsh mapping needs at least as many antennas as streams");
        return walsh_matrix(m, s);
    case Kind::expansion: {
        if (m < s)
            throw ArgumentError("spatial expansion needs at least as many antennas as streams");
        if (mapping.inner != Kind::direct && mapping.inner != Kind::walsh)
            throw ArgumentError("expansion inner mapping must be direct or walsh");
        MappingMatrix e = MappingMatrix::Zero(m, s);
        for (int i = 0; i < m; ++i)
            e(i, i % s) = std::sqrt(static_cast<double>(s) / m);
        if (mapping.inner == Kind::direct)
            return e;
        return walsh_matrix(m, m) * e;
    }
    case Kind::explicit_matrices: {
        if (mapping.matrices.empty())
            throw ArgumentError("explicit mapping without matrices");
        const MappingMatrix& v = mapping.matrices.size() == 1 ? mapping.matrices[0]
                                                              : mapping.matrices.at(static_cast<std::size_t>(sub));
        if (v.rows() != m || v.cols() != s)
            throw ArgumentError("explicit mapping matrix must be " + std::to_string(m) + "x" + std::to_string(s));
        if (!v.allFinite())
            throw ArgumentError("explicit mapping matrix has non-finite entries");
        return v;
    }
    }
    throw ArgumentError("unknown mapping");
}

EffectiveCsi effective_csi(const CsiMeasurement& csi, const TxConfig& tx)
{
    const int s = mcs(tx.mcs).n_streams;
    const int m = static_cast<int>(tx.antennas.size());
    check_antennas(tx.antennas, csi.n_tx, "TX");
    if (csi.gains.size() != static_cast<std::size_t>(csi.n_rx) * csi.n_tx * csi.n_sub)
        throw ArgumentError("CSI gain array does not match its dimensions");

    int first = 0;
    int count = csi.n_sub;
    if (tx.width != ChannelWidth::full) {
        if (csi.n_sub != 114)
            throw ArgumentError("20 MHz sub-band selection needs a 114-tone measurement");
        count = 56;
        first = tx.width == ChannelWidth::lower20 ? 0 : 58;
    }

    const bool per_tone = tx.mapping.kind == SpatialMapping::Kind::explicit_matrices;
    if (per_tone && tx.mapping.matrices.size() != 1 && tx.mapping.matrices.size() != static_cast<std::size_t>(count))
        throw ArgumentError("explicit mapping needs 1 or " + std::to_string(count) + " matrices");
    MappingMatrix v = mapping_matrix(tx.mapping, m, s, 0);

    const double scale = std::pow(10.0, tx.power_offset_db / 20.0) / std::sqrt(static_cast<double>(s));
    if (!std::isfinite(scale))
        throw ArgumentError("power offset out of range");

    EffectiveCsi out;
    out.n_rx = csi.n_rx;
    out.n_streams = s;
    out.n_sub = count;
    out.gains.resize(static_cast<std::size_t>(count) * csi.n_rx * s);
    for (int i = 0; i < count; ++i) {
        const int src = first + i;
        if (per_tone && tx.mapping.matrices.size() > 1)
            v = mapping_matrix(tx.mapping, m, s, i);
        for (int r = 0; r < csi.n_rx; ++r)
            for (int j = 0; j < s; ++j) {
                cd acc = 0.0;
                for (int a = 0; a < m; ++a) {
                    const Gain g = csi.at(src, r, tx.antennas[a]);
                    acc += cd(g.real(), g.imag()) * v(a, j);
                }
                out.gains[(static_cast<std::size_t>(i) * csi.n_rx + r) * s + j] = acc * scale;
            }
    }
    return out;
}

void subchannel_snrs(const EffectiveCsi& eff, const RxConfig& rx, std::vector<double>& out)
{
    check_antennas(rx.antennas, eff.n_rx, "RX");
    const int s = eff.n_streams;
    const int n = static_cast<int>(rx.antennas.size());
    out.assign(static_cast<std::size_t>(eff.n_sub) * s, 0.0);
    for (const cd& g : eff.gains)
        if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
            throw ArgumentError("non-finite effective CSI entry");

    switch (rx.combiner) {
    case Combiner::selection: {
        if (s != 1)
            throw ArgumentError("selection combining supports a single stream");
        int best = -1;
        double best_power = -1.0;
        for (int a : rx.antennas) {
            double p = 0.0;
            for (int t = 0; t < eff.n_sub; ++t)
                p += std::norm(eff.at(t, a, 0));
            if (p > best_power || (p == best_power && a < best)) {
                best_power = p;
                best = a;
            }
        }
        for (int t = 0; t < eff.n_sub; ++t)
            out[t] = std::norm(eff.at(t, best, 0));
        break;
    }
    case Combiner::mrc:
        if (s != 1)
            throw ArgumentError("maximal-ratio combining supports a single stream");
        for (int t = 0; t < eff.n_sub; ++t)
            for (int a : rx.antennas)
                out[t] += std::norm(eff.at(t, a, 0));
        break;
    case Combiner::mmse:
        if (n < s)
            throw ArgumentError("MMSE needs at least as many receive antennas as streams");
        switch (s) {
        case 1: mmse_all<1>(eff, rx.antennas, out.data()); break;
        case 2: mmse_all<2>(eff, rx.antennas, out.data()); break;
        case 3: mmse_all<3>(eff, rx.antennas, out.data()); break;
        case 4: mmse_all<4>(eff, rx.antennas, out.data()); break;
        default: throw ArgumentError("unsupported stream count");
        }
        break;
    }

    if (rx.adc_bits) {
        if (*rx.adc_bits < 1 || *rx.adc_bits > 24)
            throw ArgumentError("adc_bits must be in 1..24");
        const double inv_q = 1.0 / std::pow(10.0, 6.02 * *rx.adc_bits / 10.0);
        for (double& v : out)
            if (v > 0.0)
                v = 1.0 / (1.0 / v + inv_q);
    }
    if (rx.ml_gain_db != 0.0) {
        if (!(rx.ml_gain_db >= 0.0) || !std::isfinite(rx.ml_gain_db))
            throw ArgumentError("ml_gain_db must be finite and non-negative");
        const double g = std::pow(10.0, rx.ml_gain_db / 10.0);
        for (double& v : out)
            v *= g;
    }
}

std::vector<double> subchannel_snrs(const EffectiveCsi& eff, const RxConfig& rx)
{
    std::vector<double> out;
    subchannel_snrs(eff, rx, out);
    return out;
}

} // namespace effsnr

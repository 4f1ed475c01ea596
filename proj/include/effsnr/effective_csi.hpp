// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "effsnr/csi.hpp"

#include <Eigen/Core>

#include <complex>
#include <optional>
#include <vector>

namespace effsnr {

using MappingMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAntennas,
                                    kMaxAntennas>;

enum class ChannelWidth { full, lower20, upper20 };

/// Stream-to-antenna mapping V (M antennas x S streams).
struct SpatialMapping {
    enum class Kind { direct, walsh, expansion, explicit_matrices };

    Kind kind = Kind::direct;
    /// Antenna-level mapping applied on top of an expansion: direct or walsh.
    Kind inner = Kind::direct;
    /// Explicit mapping: either one matrix for all tones or one per tone.
    std::vector<MappingMatrix> matrices;

    static SpatialMapping direct() { return {}; }
    static SpatialMapping walsh() { return {Kind::walsh, Kind::direct, {}}; }
    static SpatialMapping expansion(Kind inner = Kind::direct) { return {Kind::expansion, inner, {}}; }
    static SpatialMapping explicit_matrices(std::vector<MappingMatrix> v)
    {
        return {Kind::explicit_matrices, Kind::direct, std::move(v)};
    }

    bool operator==(const SpatialMapping&) const = default;
};

struct TxConfig {
    std::vector<int> antennas{0};
    SpatialMapping mapping;
    double power_offset_db = 0.0;
    ChannelWidth width = ChannelWidth::full;
    int mcs = 0;
};

enum class Combiner { selection, mrc, mmse };

struct RxConfig {
    std::vector<int> antennas{0};
    Combiner combiner = Combiner::mmse;
    double ml_gain_db = 0.0;
    std::optional<int> adc_bits = 6;

    bool operator==(const RxConfig&) const = default;
};

/// Per-tone N x S matrices; columns are spatial streams.
struct EffectiveCsi {
    int n_rx = 0;
    int n_streams = 0;
    int n_sub = 0;
    std::vector<std::complex<double>> gains;   // [sub][rx][stream]

    std::complex<double> at(int sub, int rx, int s) const
    {
        return gains[(static_cast<std::size_t>(sub) * n_rx + rx) * n_streams + s];
    }
};

/// The mapping matrix for M antennas and S streams (explicit mappings: tone `sub`).
MappingMatrix mapping_matrix(const SpatialMapping& mapping, int n_antennas, int n_streams, int sub = 0);

/// Applies antenna subset, channel width, spatial mapping, power offset and the
/// equal per-stream power split, in that order. The stream count is taken from
/// the MCS of `tx`.
EffectiveCsi effective_csi(const CsiMeasurement& csi, const TxConfig& tx);

/// Per-tone, per-stream post-combining linear SNRs, tone-major (length T*S).
std::vector<double> subchannel_snrs(const EffectiveCsi& eff, const RxConfig& rx);
void subchannel_snrs(const EffectiveCsi& eff, const RxConfig& rx, std::vector<double>& out);

} // namespace effsnr

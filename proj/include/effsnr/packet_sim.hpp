// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "effsnr/csi.hpp"
#include "effsnr/effective_csi.hpp"
#include "effsnr/mcs.hpp"
#include "effsnr/predict.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace effsnr {

/// Largest payload one simulated transmission may carry (one aggregate).
inline constexpr std::size_t kMaxPayloadBytes = 65000;

struct PacketSimOutcome {
    bool delivered = false;
    std::size_t pre_decode_bit_errors = 0;
    std::size_t post_decode_bit_errors = 0;
    std::size_t payload_bits = 0;
};

/// Bit-level packet simulation over per-subchannel AWGN: random payload,
/// convolutional coding, random interleaving over every coded-bit slot,
/// Gray-mapped square constellations, max-log soft demapping and Viterbi
/// decoding. The post-combining subchannel SNRs are computed once at
/// construction and shared by every packet.
class PacketSimulator {
public:
    PacketSimulator(const CsiMeasurement& csi, const TxConfig& tx, const RxConfig& rx);
    /// `snrs` are linear per-subchannel SNRs, one OFDM symbol's worth (tones x streams).
    PacketSimulator(int mcs_index, std::vector<double> snrs);

    PacketSimOutcome simulate(std::size_t payload_bytes, std::uint64_t seed) const;

    /// Fraction delivered over `n_packets` packets with seeds derived from `seed`.
    double measure_prr(std::size_t n_packets, std::size_t payload_bytes, std::uint64_t seed) const;

    const McsEntry& mcs_entry() const { return *mcs_; }
    const std::vector<double>& snrs() const { return snrs_; }

private:
    const McsEntry* mcs_;
    std::vector<double> snrs_;
};

PacketSimOutcome simulate_packet(const CsiMeasurement& csi, const TxConfig& tx, const RxConfig& rx,
                                 std::size_t payload_bytes, std::uint64_t seed);

double measure_prr(const CsiMeasurement& csi, const TxConfig& tx, const RxConfig& rx, std::size_t n_packets,
                   std::size_t payload_bytes, std::uint64_t seed);

struct OracleRateResult {
    std::optional<std::size_t> best;   // index into the space
    std::vector<double> prr;           // per config; NaN where not evaluated
};

/// Fastest config of `space` whose measured PRR reaches `prr_floor`. Configs are
/// tried fastest first and evaluation stops at the first that qualifies.
OracleRateResult optimal_rate(const CsiMeasurement& csi, const std::vector<ConfigPoint>& space,
                              std::size_t n_packets, std::size_t payload_bytes, std::uint64_t seed,
                              double prr_floor = 0.9);

/// Config indices in decreasing rate order, ties to fewer streams, then lower MCS.
std::vector<std::size_t> rate_order(const std::vector<ConfigPoint>& space);

} // namespace effsnr

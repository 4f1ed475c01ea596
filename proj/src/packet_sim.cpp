// SPDX-License-Identifier: Apache-2.0
#include "effsnr/coding.hpp"
#include "effsnr/error.hpp"
#include "effsnr/packet_sim.hpp"
#include "effsnr/parallel.hpp"

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace effsnr {

namespace {

// One real dimension of a square Gray-labelled constellation.
struct Pam {
    int bits = 1;
    std::array<double, 8> level{};          // amplitude of level index i
    std::array<unsigned, 8> label{};        // Gray label of level index i
    std::array<unsigned, 8> index_of{};     // level index carrying a label
};

Pam make_pam(Modulation m)
{
    Pam p;
    double norm = 1.0;
    switch (m) {
    case Modulation::bpsk: p.bits = 1; norm = 1.0; break;
    case Modulation::qpsk: p.bits = 1; norm = 1.0 / std::sqrt(2.0); break;
    case Modulation::qam16: p.bits = 2; norm = 1.0 / std::sqrt(10.0); break;
    case Modulation::qam64: p.bits = 3; norm = 1.0 / std::sqrt(42.0); break;
    }
    const int n = 1 << p.bits;
    for (int i = 0; i < n; ++i) {
        p.level[i] = (2 * i - (n - 1)) * norm;
        p.label[i] = static_cast<unsigned>(i ^ (i >> 1));
        p.index_of[p.label[i]] = static_cast<unsigned>(i);
    }
    return p;
}

// Max-log LLRs of the p.bits bits (MSB first) carried by one dimension.
void demap(const Pam& p, double y, double rho, float* llr)
{
    if (p.bits == 1) {
        llr[0] = static_cast<float>(-4.0 * p.level[1] * rho * y);
        return;
    }
    const int n = 1 << p.bits;
    std::array<double, 8> dist{};
    for (int i = 0; i < n; ++i) {
        const double d = y - p.level[i];
        dist[i] = d * d;
    }
    for (int b = 0; b < p.bits; ++b) {
        const unsigned bit = 1u << (p.bits - 1 - b);
        double d0 = std::numeric_limits<double>::infinity();
        double d1 = d0;
        for (int i = 0; i < n; ++i) {
            if (p.label[i] & bit)
                d1 = std::min(d1, dist[i]);
            else
                d0 = std::min(d0, dist[i]);
        }
        llr[b] = static_cast<float>(rho * (d1 - d0));
    }
}

struct Scratch {
    std::vector<std::uint8_t> payload;
    std::vector<std::uint8_t> slot_bits;
    std::vector<std::uint32_t> perm;
    std::vector<float> slot_llr;
    std::vector<float> llr;
    std::vector<std::uint8_t> decoded;
    ViterbiDecoder decoder;
};

} // namespace

PacketSimulator::PacketSimulator(const CsiMeasurement& csi, const TxConfig& tx, const RxConfig& rx)
    : mcs_(&mcs(tx.mcs))
    , snrs_(subchannel_snrs(effective_csi(csi, tx), rx))
{
}

PacketSimulator::PacketSimulator(int mcs_index, std::vector<double> snrs)
    : mcs_(&mcs(mcs_index))
    , snrs_(std::move(snrs))
{
    if (snrs_.empty())
        throw ArgumentError("packet simulation needs at least one subchannel");
    for (double s : snrs_)
        if (!(s >= 0.0) || std::isinf(s))
            throw ArgumentError("subchannel SNRs must be finite and non-negative");
}

PacketSimOutcome PacketSimulator::simulate(std::size_t payload_bytes, std::uint64_t seed) const
{
    if (payload_bytes < 1 || payload_bytes > kMaxPayloadBytes)
        throw ArgumentError("payload must be 1.." + std::to_string(kMaxPayloadBytes) +
                            " bytes; segment larger transfers");
    thread_local Scratch sc;
    std::mt19937_64 rng(seed);

    const std::size_t n_bits = payload_bytes * 8;
    sc.payload.resize(n_bits);
    for (std::size_t i = 0; i < n_bits; i += 64) {
        std::uint64_t word = rng();
        for (std::size_t j = i; j < std::min(n_bits, i + 64); ++j, word >>= 1)
            sc.payload[j] = static_cast<std::uint8_t>(word & 1);
    }
    const std::vector<std::uint8_t> coded = conv_encode(sc.payload, mcs_->code_rate);

    const int k = bits_per_symbol(mcs_->modulation);
    const std::size_t n_sub = snrs_.size();
    const std::size_t per_symbol = n_sub * static_cast<std::size_t>(k);
    const std::size_t n_slots = (coded.size() + per_symbol - 1) / per_symbol * per_symbol;

    sc.perm.resize(n_slots);
    std::iota(sc.perm.begin(), sc.perm.end(), 0u);
    std::shuffle(sc.perm.begin(), sc.perm.end(), rng);

    // coded bit i travels in slot perm[i]; leftover slots carry random padding
    sc.slot_bits.resize(n_slots);
    {
        std::uint64_t word = rng();
        int left = 64;
        for (std::size_t i = coded.size(); i < n_slots; ++i) {
            if (left == 0) {
                word = rng();
                left = 64;
            }
            sc.slot_bits[sc.perm[i]] = static_cast<std::uint8_t>(word & 1);
            word >>= 1;
            --left;
        }
    }
    for (std::size_t i = 0; i < coded.size(); ++i)
        sc.slot_bits[sc.perm[i]] = coded[i];

    const Pam pam = make_pam(mcs_->modulation);
    const int half = mcs_->modulation == Modulation::bpsk ? 1 : k / 2;
    const bool complex_symbols = mcs_->modulation != Modulation::bpsk;
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    sc.slot_llr.resize(n_slots);
    for (std::size_t g = 0; g < n_slots / k; ++g) {
        const double rho = snrs_[g % n_sub];
        const std::uint8_t* bits = sc.slot_bits.data() + g * k;
        float* out = sc.slot_llr.data() + g * k;
        const int dims = complex_symbols ? 2 : 1;
        for (int d = 0; d < dims; ++d) {
            unsigned label = 0;
            for (int b = 0; b < half; ++b)
                label = (label << 1) | bits[d * half + b];
            const double x = pam.level[pam.index_of[label]];
            if (rho <= 0.0) {
                std::fill(out + d * half, out + (d + 1) * half, 0.0f);
                normal(rng);
                continue;
            }
            const double y = x + normal(rng) * std::sqrt(0.5 / rho);
            demap(pam, y, rho, out + d * half);
        }
    }

    PacketSimOutcome res;
    res.payload_bits = n_bits;
    sc.llr.resize(coded.size());
    for (std::size_t i = 0; i < coded.size(); ++i) {
        const float l = sc.slot_llr[sc.perm[i]];
        sc.llr[i] = l;
        const std::uint8_t hard = l < 0.0f ? 1 : 0;
        res.pre_decode_bit_errors += hard != coded[i];
    }
    sc.decoder.decode(sc.llr, n_bits, mcs_->code_rate, sc.decoded);
    for (std::size_t i = 0; i < n_bits; ++i)
        res.post_decode_bit_errors += sc.decoded[i] != sc.payload[i];
    res.delivered = res.post_decode_bit_errors == 0;
    return res;
}

double PacketSimulator::measure_prr(std::size_t n_packets, std::size_t payload_bytes, std::uint64_t seed) const
{
    if (n_packets < 1)
        throw ArgumentError("measure_prr needs at least one packet");
    std::size_t delivered = 0;
    for (std::size_t i = 0; i < n_packets; ++i)
        delivered += simulate(payload_bytes, derive_seed(seed, i)).delivered;
    return static_cast<double>(delivered) / static_cast<double>(n_packets);
}

PacketSimOutcome simulate_packet(const CsiMeasurement& csi, const TxConfig& tx, const RxConfig& rx,
                                 std::size_t payload_bytes, std::uint64_t seed)
{
    return PacketSimulator(csi, tx, rx).simulate(payload_bytes, seed);
}

double measure_prr(const CsiMeasurement& csi, const TxConfig& tx, const RxConfig& rx, std::size_t n_packets,
                   std::size_t payload_bytes, std::uint64_t seed)
{
    return PacketSimulator(csi, tx, rx).measure_prr(n_packets, payload_bytes, seed);
}

std::vector<std::size_t> rate_order(const std::vector<ConfigPoint>& space)
{
    std::vector<std::size_t> order(space.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const McsEntry& a = mcs(space[x].tx.mcs);
        const McsEntry& b = mcs(space[y].tx.mcs);
        if (a.rate_mbps != b.rate_mbps)
            return a.rate_mbps > b.rate_mbps;
        if (a.n_streams != b.n_streams)
            return a.n_streams < b.n_streams;
        return a.index < b.index;
    });
    return order;
}

OracleRateResult optimal_rate(const CsiMeasurement& csi, const std::vector<ConfigPoint>& space,
                              std::size_t n_packets, std::size_t payload_bytes, std::uint64_t seed,
                              double prr_floor)
{
    if (space.empty())
        throw ArgumentError("optimal_rate needs a non-empty configuration space");
    OracleRateResult res;
    res.prr.assign(space.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i : rate_order(space)) {
        const ConfigPoint& c = space[i];
        res.prr[i] = measure_prr(csi, c.tx, c.rx, n_packets, payload_bytes, seed);
        if (res.prr[i] >= prr_floor) {
            res.best = i;
            break;
        }
    }
    return res;
}

} // namespace effsnr

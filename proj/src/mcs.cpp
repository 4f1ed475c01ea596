// SPDX-License-Identifier: Apache-2.0
#include "effsnr/error.hpp"
#include "effsnr/mcs.hpp"

#include <array>
#include <string>

namespace effsnr {

namespace {

constexpr std::array<McsEntry, 8> kSingleStream{{
    {0, Modulation::bpsk, CodeRate::r1_2, 1, 6.5},
    {1, Modulation::qpsk, CodeRate::r1_2, 1, 13.0},
    {2, Modulation::qpsk, CodeRate::r3_4, 1, 19.5},
    {3, Modulation::qam16, CodeRate::r1_2, 1, 26.0},
    {4, Modulation::qam16, CodeRate::r3_4, 1, 39.0},
    {5, Modulation::qam64, CodeRate::r2_3, 1, 52.0},
    {6, Modulation::qam64, CodeRate::r3_4, 1, 58.5},
    {7, Modulation::qam64, CodeRate::r5_6, 1, 65.0},
}};

constexpr std::array<McsEntry, kMcsCount> build_table()
{
    std::array<McsEntry, kMcsCount> t{};
    for (int s = 0; s < 3; ++s)
        for (int i = 0; i < 8; ++i) {
            McsEntry e = kSingleStream[i];
            e.index = 8 * s + i;
            e.n_streams = s + 1;
            e.rate_mbps *= s + 1;
            t[e.index] = e;
        }
    return t;
}

constexpr auto kTable = build_table();

} // namespace

std::string_view to_string(Modulation m)
{
    switch (m) {
    case Modulation::bpsk: return "BPSK";
    case Modulation::qpsk: return "QPSK";
    case Modulation::qam16: return "16QAM";
    case Modulation::qam64: return "64QAM";
    }
    return "?";
}

std::string_view to_string(CodeRate r)
{
    switch (r) {
    case CodeRate::r1_2: return "1/2";
    case CodeRate::r2_3: return "2/3";
    case CodeRate::r3_4: return "3/4";
    case CodeRate::r5_6: return "5/6";
    }
    return "?";
}

std::span<const McsEntry> mcs_table() { return kTable; }

const McsEntry& mcs(int index)
{
    if (index < 0 || index >= kMcsCount)
        throw ArgumentError("MCS index out of range: " + std::to_string(index));
    return kTable[static_cast<std::size_t>(index)];
}

} // namespace effsnr

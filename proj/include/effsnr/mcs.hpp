// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string_view>

namespace effsnr {

/// Value is the number of coded bits per subcarrier symbol.
enum class Modulation { bpsk = 1, qpsk = 2, qam16 = 4, qam64 = 6 };

inline constexpr Modulation kModulations[] = {Modulation::bpsk, Modulation::qpsk, Modulation::qam16,
                                              Modulation::qam64};

constexpr int bits_per_symbol(Modulation m) noexcept { return static_cast<int>(m); }
constexpr int modulation_slot(Modulation m) noexcept
{
    switch (m) {
    case Modulation::bpsk: return 0;
    case Modulation::qpsk: return 1;
    case Modulation::qam16: return 2;
    case Modulation::qam64: return 3;
    }
    return 0;
}
std::string_view to_string(Modulation m);

enum class CodeRate { r1_2, r2_3, r3_4, r5_6 };

struct Fraction {
    int num;
    int den;
};
constexpr Fraction fraction(CodeRate r) noexcept
{
    switch (r) {
    case CodeRate::r1_2: return {1, 2};
    case CodeRate::r2_3: return {2, 3};
    case CodeRate::r3_4: return {3, 4};
    case CodeRate::r5_6: return {5, 6};
    }
    return {1, 2};
}
std::string_view to_string(CodeRate r);

struct McsEntry {
    int index;
    Modulation modulation;
    CodeRate code_rate;
    int n_streams;
    double rate_mbps;   // 800 ns guard interval, 20 MHz
};

inline constexpr int kMcsCount = 24;

/// All 24 entries, indexed by MCS number.
std::span<const McsEntry> mcs_table();

/// Throws ArgumentError for an index outside 0..23.
const McsEntry& mcs(int index);

} // namespace effsnr

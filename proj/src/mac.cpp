// SPDX-License-Identifier: Apache-2.0
#include "effsnr/error.hpp"
#include "effsnr/link_sim.hpp"
#include "text.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace effsnr {

void validate(const MacParams& p)
{
    if (!(p.slot_us >= 0.0) || !(p.difs_us >= 0.0))
        throw ArgumentError("slot and DIFS durations must be non-negative");
    if (p.cw_min < 0 || p.cw_min >= p.cw_max)
        throw ArgumentError("contention window bounds must satisfy 0 <= cw_min < cw_max");
    if (p.per_packet_bytes < 1 || p.max_batch_bytes < p.per_packet_bytes)
        throw ArgumentError("batch byte cap must hold at least one packet");
    if (!(p.max_batch_duration_us > 0.0))
        throw ArgumentError("batch duration cap must be positive");
    if (!(p.batch_success_fraction > 0.0 && p.batch_success_fraction <= 1.0))
        throw ArgumentError("batch success fraction must be in (0, 1]");
}

BatchPlan batch_plan(const McsEntry& m, const MacParams& p)
{
    const double airtime_bytes = std::floor(m.rate_mbps * p.max_batch_duration_us / 8.0);
    const double cap = std::min(static_cast<double>(p.max_batch_bytes), airtime_bytes);
    const auto packets = std::max<std::size_t>(1, static_cast<std::size_t>(cap) / p.per_packet_bytes);
    const std::size_t bytes = packets * p.per_packet_bytes;
    return {bytes, static_cast<double>(bytes) * 8.0 / m.rate_mbps};
}

bool batch_succeeds(std::size_t delivered, std::size_t total, const MacParams& p)
{
    if (total == 0)
        return false;
    return static_cast<double>(delivered) >= p.batch_success_fraction * static_cast<double>(total) - 1e-9;
}

std::string_view to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::effsnr: return "effsnr";
    case Algorithm::samplerate: return "samplerate";
    case Algorithm::samplerate_no_fallback: return "samplerate-nofallback";
    case Algorithm::optimal: return "optimal";
    case Algorithm::delayed_optimal: return "delayed-optimal";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name)
{
    std::string n(name);
    std::replace(n.begin(), n.end(), '_', '-');
    if (n == "effsnr" || n == "effective-snr")
        return Algorithm::effsnr;
    if (n == "samplerate")
        return Algorithm::samplerate;
    if (n == "samplerate-nofallback" || n == "samplerate-no-fallback")
        return Algorithm::samplerate_no_fallback;
    if (n == "optimal")
        return Algorithm::optimal;
    if (n == "delayed-optimal")
        return Algorithm::delayed_optimal;
    throw ArgumentError("unknown algorithm '" + std::string(name) + "'");
}

void write_events_csv(const std::vector<SimEvent>& events, std::ostream& out)
{
    out << "t_us,mcs,bytes,success\n";
    for (const SimEvent& e : events)
        out << text::number(e.t_us) << ',' << e.mcs << ',' << e.batch_bytes << ',' << (e.success ? 1 : 0) << '\n';
}

} // namespace effsnr

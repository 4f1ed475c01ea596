// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "effsnr/predict.hpp"
#include "effsnr/trace.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace effsnr {

struct MacParams {
    double slot_us = 9.0;
    double difs_us = 34.0;
    int cw_min = 15;
    int cw_max = 1023;
    std::size_t max_batch_bytes = 65000;
    double max_batch_duration_us = 4000.0;
    double batch_success_fraction = 0.8;
    std::size_t per_packet_bytes = 1500;
};

void validate(const MacParams& p);

struct BatchPlan {
    std::size_t bytes;
    double duration_us;
};

/// Aggregate size for one transmission: as many whole packets as fit in both
/// the byte cap and the airtime cap at this rate (at least one packet).
BatchPlan batch_plan(const McsEntry& m, const MacParams& p);

/// Success rule for a batch given per-record delivery results.
bool batch_succeeds(std::size_t delivered, std::size_t total, const MacParams& p);

enum class Algorithm { effsnr, samplerate, samplerate_no_fallback, optimal, delayed_optimal };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct SimEvent {
    double t_us;
    std::size_t config;
    int mcs;
    std::size_t batch_bytes;
    bool success;
    std::size_t bytes_delivered;
};

/// Per-(record, config) packet outcomes, computed on demand with the bit-level
/// packet simulator and cached, so every algorithm replaying the same trace
/// sees the same channel realisation.
class DeliveryOracle {
public:
    DeliveryOracle(const ChannelTrace& trace, std::vector<ConfigPoint> space, std::size_t payload_bytes,
                   std::uint64_t seed);

    bool delivered(std::size_t record, std::size_t config) const;

    const ChannelTrace& trace() const { return *trace_; }
    const std::vector<ConfigPoint>& space() const { return space_; }
    std::size_t payload_bytes() const { return payload_bytes_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t evaluations() const { return evaluations_; }

private:
    const ChannelTrace* trace_;
    std::vector<ConfigPoint> space_;
    std::size_t payload_bytes_;
    std::uint64_t seed_;
    mutable std::vector<std::int8_t> cache_;
    mutable std::size_t evaluations_ = 0;
};

struct SimOptions {
    MacParams mac;
    double speedup = 1.0;
    std::uint64_t seed = 1;
    /// Payload of the one packet simulated per overlapping record; 0 = mac.per_packet_bytes.
    std::size_t probe_payload_bytes = 0;
    std::optional<ThresholdTable> thresholds;   // required by effsnr
    /// Also replay Optimal to report fraction_of_optimal.
    bool compare_with_optimal = true;
    int samplerate_probe_interval = 10;
    double samplerate_ewma = 0.25;
    double effsnr_fallback_db = 0.5;
};

struct SimSummary {
    Algorithm algorithm;
    double speedup;
    std::size_t total_bytes = 0;
    double duration_us = 0.0;
    double throughput_mbps = 0.0;
    std::size_t n_batches = 0;
    std::size_t n_success = 0;
    std::optional<std::size_t> optimal_total_bytes;
    std::optional<double> fraction_of_optimal;
};

struct SimResult {
    std::vector<SimEvent> events;
    SimSummary summary;
};

/// Replays `trace` at `speedup` through the MAC model with the given rate
/// selection algorithm over `space`. When `oracle` is given it must have been
/// built for the same trace and space; it is reused (and filled) across calls.
SimResult run_simulation(const ChannelTrace& trace, const std::vector<ConfigPoint>& space, Algorithm algorithm,
                         const SimOptions& options, const DeliveryOracle* oracle = nullptr);

// t_us,mcs,bytes,success
void write_events_csv(const std::vector<SimEvent>& events, std::ostream& out);

} // namespace effsnr

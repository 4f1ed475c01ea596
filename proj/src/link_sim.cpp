// SPDX-License-Identifier: Apache-2.0
#include "effsnr/error.hpp"
#include "effsnr/link_sim.hpp"
#include "effsnr/packet_sim.hpp"
#include "effsnr/parallel.hpp"
#include "rate_algorithms.hpp"

#include <algorithm>
#include <random>

namespace effsnr {

DeliveryOracle::DeliveryOracle(const ChannelTrace& trace, std::vector<ConfigPoint> space, std::size_t payload_bytes,
                               std::uint64_t seed)
    : trace_(&trace)
    , space_(std::move(space))
    , payload_bytes_(payload_bytes)
    , seed_(seed)
    , cache_(trace.records.size() * space_.size(), -1)
{
    if (space_.empty())
        throw ArgumentError("config space is empty");
    if (payload_bytes_ < 1 || payload_bytes_ > kMaxPayloadBytes)
        throw ArgumentError("oracle payload size out of range");
}

bool DeliveryOracle::delivered(std::size_t record, std::size_t config) const
{
    if (record >= trace_->records.size() || config >= space_.size())
        throw ArgumentError("oracle lookup out of range");
    std::int8_t& slot = cache_[record * space_.size() + config];
    if (slot < 0) {
        const ConfigPoint& c = space_[config];
        const PacketSimulator sim(trace_->records[record], c.tx, c.rx);
        slot = sim.simulate(payload_bytes_, derive_seed(seed_, record, config)).delivered ? 1 : 0;
        ++evaluations_;
    }
    return slot == 1;
}

SimResult run_simulation(const ChannelTrace& trace, const std::vector<ConfigPoint>& space, Algorithm algorithm,
                         const SimOptions& options, const DeliveryOracle* oracle)
{
    validate(options.mac);
    if (!(options.speedup > 0.0))
        throw ArgumentError("speedup must be positive");
    if (space.empty())
        throw ArgumentError("config space is empty");
    if (trace.records.empty())
        throw ArgumentError("trace has no records");
    if (algorithm == Algorithm::effsnr && !options.thresholds)
        throw ArgumentError("the effsnr algorithm needs a threshold table");

    std::optional<DeliveryOracle> local;
    if (oracle) {
        if (&oracle->trace() != &trace || oracle->space().size() != space.size())
            throw ArgumentError("delivery oracle was built for a different trace or config space");
    } else {
        const std::size_t payload =
            options.probe_payload_bytes ? options.probe_payload_bytes : options.mac.per_packet_bytes;
        local.emplace(trace, space, payload, options.seed);
        oracle = &*local;
    }

    const detail::SimContext ctx(trace, space, *oracle, options.mac, options.speedup);
    auto algo = detail::make_algorithm(algorithm, ctx, options);
    std::mt19937_64 backoff_rng(derive_seed(options.seed, 1));

    SimResult res;
    res.summary.algorithm = algorithm;
    res.summary.speedup = options.speedup;
    res.summary.duration_us = ctx.end_us();

    const MacParams& mac = options.mac;
    int cw = mac.cw_min;
    double t = 0.0;
    while (t < ctx.end_us()) {
        const std::size_t c = algo->choose(t);
        const McsEntry& m = mcs(space[c].tx.mcs);
        const BatchPlan plan = batch_plan(m, mac);
        const bool ok = ctx.batch_ok(t, c);
        res.events.push_back({t, c, m.index, plan.bytes, ok, ok ? plan.bytes : 0});
        res.summary.total_bytes += ok ? plan.bytes : 0;
        ++res.summary.n_batches;
        res.summary.n_success += ok ? 1 : 0;
        algo->feedback(c, ok, t);

        cw = ok ? mac.cw_min : std::min(2 * cw + 1, mac.cw_max);
        std::uniform_int_distribution<int> slots(0, cw);
        t += plan.duration_us + mac.difs_us + slots(backoff_rng) * mac.slot_us;
    }
    res.summary.throughput_mbps = static_cast<double>(res.summary.total_bytes) * 8.0 / ctx.end_us();

    if (options.compare_with_optimal) {
        std::size_t optimal_bytes = res.summary.total_bytes;
        if (algorithm != Algorithm::optimal) {
            SimOptions o = options;
            o.compare_with_optimal = false;
            optimal_bytes = run_simulation(trace, space, Algorithm::optimal, o, oracle).summary.total_bytes;
        }
        res.summary.optimal_total_bytes = optimal_bytes;
        if (optimal_bytes > 0)
            res.summary.fraction_of_optimal =
                static_cast<double>(res.summary.total_bytes) / static_cast<double>(optimal_bytes);
    }
    return res;
}

} // namespace effsnr

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "effsnr/link_sim.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace effsnr::detail {

/// Timing view of a trace replayed at some speedup, plus oracle access.
class SimContext {
public:
    SimContext(const ChannelTrace& trace, const std::vector<ConfigPoint>& space, const DeliveryOracle& oracle,
               const MacParams& mac, double speedup);

    /// Records whose playback interval intersects [t, t + duration).
    std::pair<std::size_t, std::size_t> overlapping(double t_us, double duration_us) const;
    std::size_t record_at(double t_us) const;

    bool batch_ok(double t_us, std::size_t config) const;
    /// Fastest config whose batch starting at t succeeds; the slowest config if none does.
    std::size_t optimal_at(double t_us) const;

    double end_us() const { return end_us_; }
    std::size_t lowest() const { return order_.back(); }
    const std::vector<std::size_t>& rate_order() const { return order_; }
    const std::vector<ConfigPoint>& space() const { return *space_; }
    const ChannelTrace& trace() const { return *trace_; }
    const MacParams& mac() const { return mac_; }

private:
    const ChannelTrace* trace_;
    const std::vector<ConfigPoint>* space_;
    const DeliveryOracle* oracle_;
    MacParams mac_;
    std::vector<double> start_us_;
    double end_us_;
    std::vector<std::size_t> order_;
};

class RateAlgorithm {
public:
    virtual ~RateAlgorithm() = default;
    virtual std::size_t choose(double t_us) = 0;
    virtual void feedback(std::size_t config, bool success, double t_us) = 0;
};

std::unique_ptr<RateAlgorithm> make_algorithm(Algorithm a, const SimContext& ctx, const SimOptions& options);

} // namespace effsnr::detail

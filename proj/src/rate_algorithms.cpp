// SPDX-License-Identifier: Apache-2.0
#include "rate_algorithms.hpp"

#include "effsnr/error.hpp"
#include "effsnr/packet_sim.hpp"
#include "effsnr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace effsnr::detail {

SimContext::SimContext(const ChannelTrace& trace, const std::vector<ConfigPoint>& space,
                       const DeliveryOracle& oracle, const MacParams& mac, double speedup)
    : trace_(&trace)
    , space_(&space)
    , oracle_(&oracle)
    , mac_(mac)
    , order_(effsnr::rate_order(space))
{
    const double t0 = static_cast<double>(trace.records.front().timestamp_us);
    start_us_.reserve(trace.records.size());
    for (const CsiMeasurement& m : trace.records)
        start_us_.push_back((static_cast<double>(m.timestamp_us) - t0) / speedup);
    end_us_ = (static_cast<double>(trace.records.back().timestamp_us) - t0 +
               static_cast<double>(trace.header.interval_us)) /
              speedup;
}

std::size_t SimContext::record_at(double t) const
{
    auto it = std::upper_bound(start_us_.begin(), start_us_.end(), t);
    return it == start_us_.begin() ? 0 : static_cast<std::size_t>(it - start_us_.begin()) - 1;
}

std::pair<std::size_t, std::size_t> SimContext::overlapping(double t, double duration) const
{
    const std::size_t first = record_at(t);
    const double stop = std::min(t + duration, end_us_);
    auto it = std::lower_bound(start_us_.begin(), start_us_.end(), stop);
    const std::size_t last = std::max(first + 1, static_cast<std::size_t>(it - start_us_.begin()));
    return {first, std::min(last, start_us_.size())};
}

bool SimContext::batch_ok(double t, std::size_t config) const
{
    const BatchPlan plan = batch_plan(mcs((*space_)[config].tx.mcs), mac_);
    const auto [first, last] = overlapping(t, plan.duration_us);
    std::size_t delivered = 0;
    for (std::size_t r = first; r < last; ++r)
        delivered += oracle_->delivered(r, config);
    return batch_succeeds(delivered, last - first, mac_);
}

std::size_t SimContext::optimal_at(double t) const
{
    for (std::size_t c : order_)
        if (batch_ok(t, c))
            return c;
    return lowest();
}

namespace {

class Optimal final : public RateAlgorithm {
public:
    explicit Optimal(const SimContext& ctx) : ctx_(ctx) {}
    std::size_t choose(double t) override { return ctx_.optimal_at(t); }
    void feedback(std::size_t, bool, double) override {}

private:
    const SimContext& ctx_;
};

class DelayedOptimal final : public RateAlgorithm {
public:
    explicit DelayedOptimal(const SimContext& ctx) : ctx_(ctx) {}
    std::size_t choose(double) override { return previous_ ? ctx_.optimal_at(*previous_) : ctx_.lowest(); }
    void feedback(std::size_t, bool, double t) override { previous_ = t; }

private:
    const SimContext& ctx_;
    std::optional<double> previous_;
};

class EffectiveSnrSelector final : public RateAlgorithm {
public:
    EffectiveSnrSelector(const SimContext& ctx, const SimOptions& opt)
        : ctx_(ctx)
        , predictor_(ctx.space(), *opt.thresholds)
        , tolerance_db_(opt.effsnr_fallback_db)
        , choice_(ctx.lowest())
    {
    }

    std::size_t choose(double) override { return choice_; }

    void feedback(std::size_t config, bool success, double t) override
    {
        const CsiMeasurement csi = quantize_csi(ctx_.trace().records[ctx_.record_at(t)], 8);
        PredictionReport report = predictor_.predict(csi);
        if (success) {
            failures_ = 0;
            step_down_ = 0;
        } else {
            ++failures_;
            if (failures_ >= 2 && last_ &&
                std::abs(report.configs[config].metric_db - last_->configs[config].metric_db) < tolerance_db_)
                ++step_down_;
        }
        choice_ = report.best ? *report.best : ctx_.lowest();
        for (int i = 0; i < step_down_; ++i)
            choice_ = one_lower(choice_);
        last_ = std::move(report);
    }

private:
    // Next lower MCS with the same stream count and otherwise identical setup.
    std::size_t one_lower(std::size_t c) const
    {
        const ConfigPoint& cur = ctx_.space()[c];
        if (cur.tx.mcs % 8 == 0)
            return c;
        for (std::size_t i = 0; i < ctx_.space().size(); ++i) {
            const ConfigPoint& o = ctx_.space()[i];
            if (o.tx.mcs == cur.tx.mcs - 1 && o.tx.antennas == cur.tx.antennas &&
                o.tx.power_offset_db == cur.tx.power_offset_db && o.tx.width == cur.tx.width && o.rx == cur.rx)
                return i;
        }
        return c;
    }

    const SimContext& ctx_;
    Predictor predictor_;
    double tolerance_db_;
    std::size_t choice_;
    int failures_ = 0;
    int step_down_ = 0;
    std::optional<PredictionReport> last_;
};

// Minstrel-style sampling: EWMA delivery probability per config, throughput
// ranking, a probe of a faster config every few batches and a retry chain.
class SampleRate final : public RateAlgorithm {
public:
    SampleRate(const SimContext& ctx, const SimOptions& opt, bool fallback)
        : ctx_(ctx)
        , fallback_(fallback)
        , probe_interval_(std::max(1, opt.samplerate_probe_interval))
        , alpha_(opt.samplerate_ewma)
        , prob_(ctx.space().size(), std::numeric_limits<double>::quiet_NaN())
        , rng_(derive_seed(opt.seed, 2))
    {
    }

    std::size_t choose(double) override
    {
        const auto ranked = by_throughput();
        if (retry_ > 0) {
            if (!fallback_)
                return ranked[0];
            switch (retry_) {
            case 1: return ranked.size() > 1 ? ranked[1] : ctx_.lowest();
            case 2: return best_probability();
            default: return ctx_.lowest();
            }
        }
        ++batches_;
        if (batches_ % probe_interval_ == 0) {
            const double floor = rate(ranked[0]);
            std::vector<std::size_t> faster;
            for (std::size_t c = 0; c < prob_.size(); ++c)
                if (rate(c) > floor)
                    faster.push_back(c);
            if (!faster.empty()) {
                std::uniform_int_distribution<std::size_t> pick(0, faster.size() - 1);
                return faster[pick(rng_)];
            }
        }
        return ranked[0];
    }

    void feedback(std::size_t config, bool success, double) override
    {
        const double s = success ? 1.0 : 0.0;
        double& p = prob_[config];
        p = std::isnan(p) ? s : (1.0 - alpha_) * p + alpha_ * s;
        if (success)
            retry_ = 0;
        else
            retry_ = retry_ >= kMaxRetries ? 0 : retry_ + 1;
    }

private:
    static constexpr int kMaxRetries = 3;

    double rate(std::size_t c) const { return mcs(ctx_.space()[c].tx.mcs).rate_mbps; }

    std::vector<std::size_t> by_throughput() const
    {
        std::vector<std::size_t> known;
        for (std::size_t c : ctx_.rate_order())
            if (!std::isnan(prob_[c]) && prob_[c] > 0.0)
                known.push_back(c);
        std::stable_sort(known.begin(), known.end(), [&](std::size_t a, std::size_t b) {
            return rate(a) * prob_[a] > rate(b) * prob_[b];
        });
        if (known.empty())
            known.push_back(ctx_.lowest());
        return known;
    }

    std::size_t best_probability() const
    {
        std::optional<std::size_t> best;
        for (std::size_t c : ctx_.rate_order())
            if (!std::isnan(prob_[c]) && (!best || prob_[c] > prob_[*best]))
                best = c;
        return best ? *best : ctx_.lowest();
    }

    const SimContext& ctx_;
    bool fallback_;
    int probe_interval_;
    double alpha_;
    std::vector<double> prob_;
    std::mt19937_64 rng_;
    long batches_ = 0;
    int retry_ = 0;
};

} // namespace

std::unique_ptr<RateAlgorithm> make_algorithm(Algorithm a, const SimContext& ctx, const SimOptions& opt)
{
    switch (a) {
    case Algorithm::optimal: return std::make_unique<Optimal>(ctx);
    case Algorithm::delayed_optimal: return std::make_unique<DelayedOptimal>(ctx);
    case Algorithm::effsnr:
        if (!opt.thresholds)
            throw ArgumentError("the effsnr algorithm needs a threshold table");
        return std::make_unique<EffectiveSnrSelector>(ctx, opt);
    case Algorithm::samplerate: return std::make_unique<SampleRate>(ctx, opt, true);
    case Algorithm::samplerate_no_fallback: return std::make_unique<SampleRate>(ctx, opt, false);
    }
    throw ArgumentError("unknown algorithm");
}

} // namespace effsnr::detail

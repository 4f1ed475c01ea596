// SPDX-License-Identifier: Apache-2.0
#include "effsnr/error.hpp"
#include "effsnr/net_config.hpp"
#include "effsnr/trace.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace effsnr;
using testing::Rng;

namespace {

LinkMetric effsnr_metric()
{
    LinkMetric m;
    m.kind = LinkMetricKind::effective_snr_bitrate;
    m.thresholds = testing::nominal_table();
    return m;
}

// Median of each 1 dB bin with at least 3 samples, then the running maximum.
std::vector<std::pair<int, double>> naive_curve(const std::vector<SnrThroughputSample>& s)
{
    std::map<int, std::vector<double>> bins;
    for (const auto& x : s)
        bins[static_cast<int>(std::floor(x.packet_snr_db))].push_back(x.mbps);
    std::vector<std::pair<int, double>> out;
    double run = -1.0;
    for (auto& [b, v] : bins) {
        if (v.size() < 3)
            continue;
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        const double med = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
        run = std::max(run, med);
        out.emplace_back(b, run);
    }
    return out;
}

} // namespace

TEST_CASE("snr to throughput curve")
{
    SUBCASE("worked example")
    {
        const std::vector<SnrThroughputSample> s{{10.1, 5}, {10.5, 7}, {10.9, 6}, {11.2, 3}, {11.3, 4},
                                                 {11.8, 5}, {12.0, 20}, {12.5, 30}};
        const SnrThroughputCurve c = fit_snr_throughput_curve(s);
        REQUIRE(c.bins.size() == 2);
        CHECK(c.bins[0] == std::pair<int, double>{10, 6.0});
        CHECK(c.bins[1] == std::pair<int, double>{11, 6.0});
        CHECK(c(9.99) == 0.0);
        CHECK(c(10.0) == 6.0);
        CHECK(c(11.7) == 6.0);
        CHECK(c(40.0) == 6.0);
    }
    SUBCASE("matches the naive binning")
    {
        Rng rng(41);
        for (int iter = 0; iter < 200; ++iter) {
            std::vector<SnrThroughputSample> s;
            const int n = testing::uniform_int(rng, 3, 120);
            for (int i = 0; i < n; ++i) {
                const double snr = testing::uniform(rng, 0.0, 12.0);
                s.push_back({snr, std::max(0.0, 3.0 * snr + testing::uniform(rng, -10.0, 10.0))});
            }
            const auto want = naive_curve(s);
            if (want.empty())
                continue;
            const SnrThroughputCurve c = fit_snr_throughput_curve(s);
            REQUIRE(c.bins.size() == want.size());
            for (std::size_t i = 0; i < want.size(); ++i) {
                CHECK(c.bins[i].first == want[i].first);
                CHECK(c.bins[i].second == doctest::Approx(want[i].second));
            }
            for (double x = -1.0; x < 14.0; x += 0.37) {
                const double a = c(x), b = c(x + 0.5);
                CHECK(b >= a);
            }
        }
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(fit_snr_throughput_curve(std::vector<SnrThroughputSample>{}), ArgumentError);
        const std::vector<SnrThroughputSample> bad{{std::nan(""), 1.0}};
        CHECK_THROWS_AS(fit_snr_throughput_curve(bad), ArgumentError);
    }
}

TEST_CASE("link metrics")
{
    const CsiMeasurement strong = flat_csi(2, 2, 30.0);
    // Equal gains on every path: rank one, so only single-stream rates work.
    CHECK(link_bitrate(strong, testing::nominal_table(), make_config_space(McsSet::all, 2, 2)) == 65.0);
    CHECK(link_bitrate(flat_csi(2, 2, -20.0), testing::nominal_table(), make_config_space(McsSet::all, 2, 2)) == 0.0);
    CHECK(link_metric(strong, effsnr_metric()) == 65.0);

    LinkMetric pkt;
    CHECK(link_metric(strong, pkt) == doctest::Approx(packet_snr(strong)));
    CHECK_THROWS_AS(link_throughput(strong, pkt), ArgumentError);
    pkt.curve = SnrThroughputCurve{{{10, 5.0}, {30, 50.0}}};
    CHECK(link_throughput(strong, pkt) == 50.0);

    LinkMetric missing = effsnr_metric();
    missing.thresholds.reset();
    CHECK_THROWS_AS(link_metric(strong, missing), ArgumentError);

    CHECK(id_less("2", "10"));
    CHECK_FALSE(id_less("10", "2"));
    CHECK(id_less("10", "2a"));
    CHECK(id_less("ap1", "ap2"));
}

TEST_CASE("best candidate selection")
{
    Rng rng(42);
    for (int iter = 0; iter < 40; ++iter) {
        std::vector<Candidate> c;
        const int n = testing::uniform_int(rng, 1, 6);
        for (int i = 0; i < n; ++i)
            c.push_back({std::to_string(testing::uniform_int(rng, 0, 30)) + (i % 2 ? "" : "x"),
                         testing::multipath_csi(rng, 2, 2, testing::uniform(rng, -5, 35))});
        for (const LinkMetric& m : {LinkMetric{}, effsnr_metric()}) {
            const Decision d = select_best(c, m);
            REQUIRE(d.metrics.size() == c.size());
            // Brute force: collect maxima, then the smallest id among them.
            double top = -1e300;
            for (std::size_t i = 0; i < c.size(); ++i) {
                CHECK(d.metrics[i].first == c[i].id);
                CHECK(d.metrics[i].second == link_metric(c[i].csi, m));
                top = std::max(top, d.metrics[i].second);
            }
            std::optional<std::string> want;
            for (const auto& [id, v] : d.metrics)
                if (v == top && (!want || id_less(id, *want)))
                    want = id;
            CHECK(d.chosen == *want);
        }
    }
    const std::vector<Candidate> tie{{"7", flat_csi(1, 1, 10.0)}, {"3", flat_csi(1, 1, 10.0)}};
    CHECK(select_ap(tie, LinkMetric{}).chosen == "3");
    CHECK(select_channel(tie, LinkMetric{}).chosen == "3");
    CHECK_THROWS_AS(select_best(std::vector<Candidate>{}, LinkMetric{}), ArgumentError);
}

TEST_CASE("relay selection")
{
    CHECK(relay_path_mbps(195.0, 195.0) == doctest::Approx(97.5));
    CHECK(relay_path_mbps(0.0, 100.0) == 0.0);
    CHECK(relay_path_mbps(60.0, 30.0) == doctest::Approx(20.0));

    SUBCASE("gain gate")
    {
        const std::vector<RelayHops> hops{{"r1", 195.0, 195.0}};
        CHECK(select_relay(65.0, hops).relay == std::optional<std::string>("r1"));
        CHECK_FALSE(select_relay(82.0, hops).relay);
        CHECK(select_relay(81.25, hops).relay);   // exactly 1.2x
        CHECK(select_relay(0.0, hops).relay);
        const std::vector<RelayHops> dead{{"r1", 0.0, 195.0}};
        CHECK_FALSE(select_relay(0.0, dead).relay);
    }
    SUBCASE("best relay, ties to the lowest id")
    {
        const std::vector<RelayHops> hops{{"9", 100, 100}, {"4", 100, 100}, {"5", 60, 300}};
        const RelayDecision d = select_relay(10.0, hops);
        CHECK(d.relay == std::optional<std::string>("4"));
        REQUIRE(d.path_mbps.size() == 3);
        CHECK(d.path_mbps[2].second == doctest::Approx(50.0));
        CHECK(d.direct_mbps == 10.0);
    }
    SUBCASE("link map")
    {
        LinkMap links;
        links[{"s", "d"}] = flat_csi(2, 2, 3.0);
        links[{"s", "r"}] = flat_csi(2, 2, 30.0);
        links[{"r", "d"}] = flat_csi(2, 2, 30.0);
        links[{"s", "q"}] = std::nullopt;
        links[{"q", "d"}] = flat_csi(2, 2, 30.0);
        const RelayDecision d = select_relay("s", "d", {"r", "q"}, links, effsnr_metric());
        CHECK(d.relay == std::optional<std::string>("r"));
        CHECK(d.path_mbps[1].second == 0.0);
        CHECK_THROWS_AS(select_relay("s", "d", {"z"}, links, effsnr_metric()), ArgumentError);
    }
}

TEST_CASE("transmit power trimming")
{
    SUBCASE("headroom is given back in whole steps")
    {
        // 1x1 flat at 40 dB with tau_7 = 21.5 and a 6-bit ADC cap near 36 dB:
        // the best rate survives down to an Effective SNR of 21.5 dB.
        const auto space = make_config_space(McsSet::siso, 1, 1);
        const TrimResult r = trim_power(flat_csi(1, 1, 40.0), space, testing::nominal_table());
        REQUIRE(r.best);
        CHECK(r.rate_mbps == 65.0);
        CHECK(r.offset_db <= -12.0);
        CHECK(r.offset_db >= -18.0);
        CHECK(std::fmod(-r.offset_db, 2.0) == 0.0);
    }
    SUBCASE("invariants on random channels")
    {
        Rng rng(43);
        const auto space = make_config_space(McsSet::all, 3, 3);
        const Predictor base(space, testing::nominal_table());
        for (int iter = 0; iter < 30; ++iter) {
            const CsiMeasurement c = testing::multipath_csi(rng, 3, 3, testing::uniform(rng, 0, 40));
            const TrimResult r = trim_power(c, space, testing::nominal_table());
            const PredictionReport rep = base.predict(c);
            CHECK(r.best == rep.best);
            CHECK(r.no_baseline == !rep.best);
            if (!rep.best) {
                CHECK(r.offset_db == 0.0);
                continue;
            }
            CHECK(r.offset_db <= 0.0);
            CHECK(r.offset_db >= -26.0);
            // The chosen offset keeps the decision.
            std::vector<ConfigPoint> trimmed = space;
            for (auto& p : trimmed)
                p.tx.power_offset_db = r.offset_db;
            const PredictionReport at = predict(c, trimmed, testing::nominal_table());
            CHECK(at.best == rep.best);
            CHECK(at.best_rate_mbps == rep.best_rate_mbps);
        }
    }
    SUBCASE("argument checks")
    {
        const auto space = make_config_space(McsSet::siso, 1, 1);
        CHECK_THROWS_AS(trim_power(flat_csi(1, 1, 20.0), space, testing::nominal_table(), 0.0), ArgumentError);
        CHECK_THROWS_AS(trim_power(flat_csi(1, 1, 20.0), space, testing::nominal_table(), 2.0, 3.0), ArgumentError);
        const TrimResult none = trim_power(flat_csi(1, 1, -30.0), space, testing::nominal_table());
        CHECK(none.no_baseline);
        CHECK_FALSE(none.best);
    }
}

TEST_CASE("mobility classification")
{
    Rng rng(44);
    auto series = [](std::vector<CsiMeasurement> v, std::int64_t spacing) {
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i].timestamp_us = static_cast<std::int64_t>(i) * spacing;
        return v;
    };
    SUBCASE("identical records are static")
    {
        const std::vector<CsiMeasurement> v(40, testing::multipath_csi(rng, 2, 2, 20.0));
        const MobilityResult r = classify_mobility(series(v, 5000));
        CHECK(r.state == MobilityState::static_link);
        CHECK(r.c_min == doctest::Approx(1.0));
        CHECK(r.records_used == 40);
        CHECK(r.path_min.size() == 4);
    }
    SUBCASE("independent records are device mobility")
    {
        std::vector<CsiMeasurement> v;
        for (int i = 0; i < 40; ++i)
            v.push_back(testing::random_csi(rng, 2, 2, 20.0));
        CHECK(classify_mobility(series(v, 5000)).state == MobilityState::device_mobile);
    }
    SUBCASE("scale invariance and downsampling")
    {
        ChannelGenSpec spec;
        spec.n_rx = 2;
        spec.n_tx = 2;
        spec.n_records = 400;
        spec.doppler_coeff = 0.995;
        spec.seed = 12;
        const ChannelTrace tr = generate_trace(spec);
        const MobilityResult a = classify_mobility(tr.records);
        CHECK(a.records_used == 100);
        std::vector<CsiMeasurement> louder = tr.records;
        for (auto& m : louder)
            for (auto& g : m.gains)
                g *= 3.0f;
        const MobilityResult b = classify_mobility(louder);
        CHECK(b.c_min == doctest::Approx(a.c_min).epsilon(1e-5));
        CHECK(b.state == a.state);
        CHECK(a.c_min <= 1.0);
        CHECK(a.c_min >= -1.0);
    }
    SUBCASE("errors")
    {
        const std::vector<CsiMeasurement> few = series(std::vector<CsiMeasurement>(19, flat_csi(1, 1, 10.0)), 5000);
        CHECK_THROWS_AS(classify_mobility(few), ArgumentError);
        const std::vector<CsiMeasurement> dense = series(std::vector<CsiMeasurement>(60, flat_csi(1, 1, 10.0)), 1000);
        CHECK_THROWS_AS(classify_mobility(dense), ArgumentError);
        MobilityParams p;
        p.tau_device = 0.995;
        CHECK_THROWS_AS(classify_mobility(series(std::vector<CsiMeasurement>(40, flat_csi(1, 1, 10.0)), 5000), p),
                        ArgumentError);
    }
    SUBCASE("pearson")
    {
        const std::vector<double> a{1, 2, 3}, b{2, 4, 6}, c{3, 2, 1}, k{5, 5, 5};
        CHECK(pearson(a, b) == doctest::Approx(1.0));
        CHECK(pearson(a, c) == doctest::Approx(-1.0));
        CHECK(pearson(k, k) == 1.0);
        CHECK(pearson(k, a) == 0.0);
        CHECK(to_string(MobilityState::environment_mobile) == "ENVIRONMENT_MOBILE");
    }
}

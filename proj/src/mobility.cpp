// SPDX-License-Identifier: Apache-2.0
#include "effsnr/error.hpp"
#include "effsnr/net_config.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace effsnr {

std::string_view to_string(MobilityState s)
{
    switch (s) {
    case MobilityState::static_link: return "STATIC";
    case MobilityState::environment_mobile: return "ENVIRONMENT_MOBILE";
    case MobilityState::device_mobile: return "DEVICE_MOBILE";
    }
    return "?";
}

double pearson(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size() || a.empty())
        throw ArgumentError("correlation needs two non-empty vectors of equal length");
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i] - ma, y = b[i] - mb;
        sab += x * y;
        saa += x * x;
        sbb += y * y;
    }
    if (saa == 0.0 || sbb == 0.0)
        return std::equal(a.begin(), a.end(), b.begin()) ? 1.0 : 0.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

MobilityResult classify_mobility(std::span<const CsiMeasurement> records, const MobilityParams& p)
{
    if (p.win < 1)
        throw ArgumentError("window length must be at least 1");
    if (!(p.tau_device <= p.tau_env))
        throw ArgumentError("device threshold must not exceed the environment threshold");

    std::vector<const CsiMeasurement*> used;
    for (const CsiMeasurement& r : records) {
        if (used.empty() ||
            static_cast<double>(r.timestamp_us - used.back()->timestamp_us) >= p.min_spacing_us - 1e-9)
            used.push_back(&r);
    }
    const auto win = static_cast<std::size_t>(p.win);
    if (used.size() < 2 * win)
        throw ArgumentError("mobility classification needs at least " + std::to_string(2 * win) +
                            " records at the minimum spacing, got " + std::to_string(used.size()));
    const CsiMeasurement& first = *used.front();
    for (const CsiMeasurement* r : used)
        if (r->n_rx != first.n_rx || r->n_tx != first.n_tx || r->n_sub != first.n_sub)
            throw ArgumentError("mobility window records must share dimensions");

    const std::size_t n_blocks = used.size() / win;
    const int n_sub = first.n_sub;
    MobilityResult res;
    res.records_used = n_blocks * win;
    res.c_min = 1.0;
    std::vector<double> prev(n_sub), cur(n_sub);
    for (int rx = 0; rx < first.n_rx; ++rx) {
        for (int tx = 0; tx < first.n_tx; ++tx) {
            double path_min = 1.0;
            for (std::size_t b = 0; b < n_blocks; ++b) {
                std::fill(cur.begin(), cur.end(), 0.0);
                for (std::size_t k = 0; k < win; ++k) {
                    const CsiMeasurement& r = *used[b * win + k];
                    for (int s = 0; s < n_sub; ++s)
                        cur[s] += std::abs(std::complex<double>(r.at(s, rx, tx)));
                }
                for (double& v : cur)
                    v /= static_cast<double>(win);
                if (b > 0)
                    path_min = std::min(path_min, pearson(prev, cur));
                std::swap(prev, cur);
            }
            res.path_min.push_back(path_min);
            res.c_min = std::min(res.c_min, path_min);
        }
    }
    res.state = res.c_min < p.tau_device ? MobilityState::device_mobile
              : res.c_min < p.tau_env    ? MobilityState::environment_mobile
                                         : MobilityState::static_link;
    return res;
}

} // namespace effsnr

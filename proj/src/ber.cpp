// SPDX-License-Identifier: Apache-2.0
#include "effsnr/ber.hpp"
#include "effsnr/error.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace effsnr {

namespace {

// ber = c * Q(sqrt(a * snr))
struct BerRow {
    double c;
    double a;
};

constexpr BerRow row(Modulation m)
{
    switch (m) {
    case Modulation::bpsk: return {1.0, 2.0};
    case Modulation::qpsk: return {1.0, 1.0};
    case Modulation::qam16: return {0.75, 0.2};
    case Modulation::qam64: return {7.0 / 12.0, 1.0 / 21.0};
    }
    return {1.0, 1.0};
}

} // namespace

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double inv_q(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw ArgumentError("inv_q needs p in (0, 1)");
    return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double ber(Modulation m, double snr)
{
    if (!(snr >= 0.0))
        throw ArgumentError("ber needs a non-negative SNR");
    const BerRow r = row(m);
    return r.c * q_function(std::sqrt(r.a * snr));
}

double ber_ceiling(Modulation m) { return 0.5 * row(m).c; }

double inv_ber(Modulation m, double beta, bool* clamped)
{
    if (std::isnan(beta))
        throw ArgumentError("inv_ber of NaN");
    const BerRow r = row(m);
    bool clip = false;
    if (beta <= kBetaFloor) {
        beta = kBetaFloor;
        clip = true;
    }
    const bool top = beta >= 0.5 * r.c * (1.0 - 1e-12);
    if (clamped)
        *clamped = clip || top;
    if (top)
        return 0.0;
    const double x = inv_q(beta / r.c);
    return x * x / r.a;
}

EffectiveSnrResult effective_snr(std::span<const double> snrs, Modulation m)
{
    if (snrs.empty())
        throw ArgumentError("effective_snr needs at least one subchannel");
    const BerRow r = row(m);
    double sum = 0.0;
    for (double s : snrs) {
        if (!(s >= 0.0) || std::isinf(s))
            throw ArgumentError("subchannel SNRs must be finite and non-negative");
        sum += r.c * q_function(std::sqrt(r.a * s));
    }
    EffectiveSnrResult res{m, sum / static_cast<double>(snrs.size()), 0.0, false};
    const double rho = inv_ber(m, res.beta_eff, &res.clamped);
    res.rho_eff_db = std::max(to_db(rho), kRhoFloorDb);
    return res;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

} // namespace effsnr

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "effsnr/mcs.hpp"

#include <span>

namespace effsnr {

/// Effective BERs below this are clamped before inversion.
inline constexpr double kBetaFloor = 1e-15;
/// Lower bound on reported Effective SNR so results stay finite.
inline constexpr double kRhoFloorDb = -100.0;

/// Gaussian tail probability Q(x).
double q_function(double x);
/// Inverse of Q on (0, 1).
double inv_q(double p);

/// Uncoded bit error rate of `m` on an AWGN channel at linear SNR `snr`.
double ber(Modulation m, double snr);

/// Largest BER the row can produce (at zero SNR).
double ber_ceiling(Modulation m);

/// Linear SNR at which ber(m, .) equals `beta`. Values at or below kBetaFloor
/// are clamped to it and values at or above ber_ceiling give 0; `clamped`
/// reports either case.
double inv_ber(Modulation m, double beta, bool* clamped = nullptr);

struct EffectiveSnrResult {
    Modulation modulation;
    double beta_eff;     // mean subchannel BER, unclamped
    double rho_eff_db;
    bool clamped;
};

/// Mean subchannel BER and the flat-channel SNR giving the same BER.
EffectiveSnrResult effective_snr(std::span<const double> snrs, Modulation m);

double to_db(double linear);
double from_db(double db);

} // namespace effsnr

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "effsnr/mcs.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace effsnr {

/// K = 7 convolutional code with generators 133 and 171 (octal), terminated
/// with six zero tail bits and punctured to the requested rate.
inline constexpr int kConstraintLength = 7;
inline constexpr int kTailBits = kConstraintLength - 1;

/// Retention mask over the interleaved mother-code output (a0 b0 a1 b1 ...).
std::span<const std::uint8_t> puncture_mask(CodeRate r);

/// Number of coded bits for `n_bits` information bits (tail included).
std::size_t coded_length(std::size_t n_bits, CodeRate r);

/// Bits are 0/1 bytes.
std::vector<std::uint8_t> conv_encode(std::span<const std::uint8_t> bits, CodeRate r);

/// Expands a punctured soft stream to mother-code length 2 * (n_bits + 6),
/// inserting 0 (erasure) at removed positions.
std::vector<float> depuncture(std::span<const float> llr, std::size_t n_bits, CodeRate r);

/// Soft-input Viterbi decoder. LLR sign convention: positive favours bit 0;
/// magnitude is confidence, 0 is an erasure. Buffers are reused across calls,
/// so one instance must not be shared between threads.
class ViterbiDecoder {
public:
    /// `llr` is the punctured stream of a frame carrying `n_bits` information bits.
    std::vector<std::uint8_t> decode(std::span<const float> llr, std::size_t n_bits, CodeRate r);
    void decode(std::span<const float> llr, std::size_t n_bits, CodeRate r, std::vector<std::uint8_t>& out);

private:
    std::vector<float> mother_;
    std::vector<std::uint64_t> decisions_;   // one survivor bit per state per step
};

std::vector<std::uint8_t> viterbi_decode(std::span<const float> llr, std::size_t n_bits, CodeRate r);

} // namespace effsnr

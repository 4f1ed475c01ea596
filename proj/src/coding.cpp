// SPDX-License-Identifier: Apache-2.0
#include "effsnr/coding.hpp"
#include "effsnr/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <string>

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

namespace effsnr {

namespace {

constexpr unsigned kG0 = 0133;
constexpr unsigned kG1 = 0171;
constexpr int kStates = 64;

constexpr std::uint8_t kMask12[] = {1, 1};
constexpr std::uint8_t kMask23[] = {1, 1, 1, 0};
constexpr std::uint8_t kMask34[] = {1, 1, 1, 0, 0, 1};
constexpr std::uint8_t kMask56[] = {1, 1, 1, 0, 0, 1, 1, 0, 0, 1};

constexpr int parity(unsigned x) { return std::popcount(x) & 1; }

// Window layout: bit 6 is the current input, bits 5..0 the state (bit 5 newest).
struct BranchTable {
    alignas(16) std::array<float, 32> s0{};
    alignas(16) std::array<float, 32> s1{};
};

constexpr BranchTable make_branch_table()
{
    BranchTable t;
    for (int j = 0; j < 32; ++j) {
        const unsigned w = static_cast<unsigned>(2 * j);
        t.s0[j] = parity(w & kG0) ? -1.0f : 1.0f;
        t.s1[j] = parity(w & kG1) ? -1.0f : 1.0f;
    }
    return t;
}

constexpr BranchTable kBranch = make_branch_table();

} // namespace

std::span<const std::uint8_t> puncture_mask(CodeRate r)
{
    switch (r) {
    case CodeRate::r1_2: return kMask12;
    case CodeRate::r2_3: return kMask23;
    case CodeRate::r3_4: return kMask34;
    case CodeRate::r5_6: return kMask56;
    }
    return kMask12;
}

std::size_t coded_length(std::size_t n_bits, CodeRate r)
{
    const auto mask = puncture_mask(r);
    const std::size_t mother = 2 * (n_bits + kTailBits);
    const std::size_t kept_per_period = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
    std::size_t n = (mother / mask.size()) * kept_per_period;
    for (std::size_t i = 0; i < mother % mask.size(); ++i)
        n += mask[i];
    return n;
}

std::vector<std::uint8_t> conv_encode(std::span<const std::uint8_t> bits, CodeRate r)
{
    const auto mask = puncture_mask(r);
    std::vector<std::uint8_t> out(coded_length(bits.size(), r));
    unsigned state = 0;
    std::size_t pos = 0;
    std::size_t k = 0;
    const std::size_t total = bits.size() + kTailBits;
    for (std::size_t i = 0; i < total; ++i) {
        const unsigned u = i < bits.size() ? (bits[i] & 1u) : 0u;
        const unsigned w = (u << 6) | state;
        if (mask[pos])
            out[k++] = static_cast<std::uint8_t>(parity(w & kG0));
        if (mask[pos + 1])
            out[k++] = static_cast<std::uint8_t>(parity(w & kG1));
        pos += 2;
        if (pos == mask.size())
            pos = 0;
        state = w >> 1;
    }
    return out;
}

std::vector<float> depuncture(std::span<const float> llr, std::size_t n_bits, CodeRate r)
{
    if (llr.size() != coded_length(n_bits, r))
        throw ArgumentError("soft stream length " + std::to_string(llr.size()) + " does not match a frame of " +
                            std::to_string(n_bits) + " bits");
    const auto mask = puncture_mask(r);
    const std::size_t mother = 2 * (n_bits + kTailBits);
    std::vector<float> out(mother, 0.0f);
    std::size_t k = 0;
    for (std::size_t i = 0; i < mother; ++i)
        if (mask[i % mask.size()])
            out[i] = llr[k++];
    return out;
}

void ViterbiDecoder::decode(std::span<const float> llr, std::size_t n_bits, CodeRate r,
                            std::vector<std::uint8_t>& out)
{
    if (llr.size() != coded_length(n_bits, r))
        throw ArgumentError("soft stream length " + std::to_string(llr.size()) + " does not match a frame of " +
                            std::to_string(n_bits) + " bits");
    const auto mask = puncture_mask(r);
    const std::size_t steps = n_bits + kTailBits;
    mother_.assign(2 * steps, 0.0f);
    for (std::size_t i = 0, k = 0, p = 0; i < mother_.size(); ++i) {
        if (mask[p])
            mother_[i] = std::clamp(llr[k++], -1000.0f, 1000.0f);
        if (++p == mask.size())
            p = 0;
    }

    decisions_.resize(steps);
    alignas(16) float buf[2][kStates];
    float* metric = buf[0];
    float* next = buf[1];
    std::fill(metric, metric + kStates, -1e9f);
    metric[0] = 0.0f;

    for (std::size_t t = 0; t < steps; ++t) {
        const float l0 = mother_[2 * t];
        const float l1 = mother_[2 * t + 1];
        std::uint64_t dec = 0;
#if defined(__SSE2__)
        const __m128 vl0 = _mm_set1_ps(l0);
        const __m128 vl1 = _mm_set1_ps(l1);
        for (int j = 0; j < 32; j += 4) {
            const __m128 v0 = _mm_load_ps(metric + 2 * j);
            const __m128 v1 = _mm_load_ps(metric + 2 * j + 4);
            const __m128 even = _mm_shuffle_ps(v0, v1, _MM_SHUFFLE(2, 0, 2, 0));
            const __m128 odd = _mm_shuffle_ps(v0, v1, _MM_SHUFFLE(3, 1, 3, 1));
            const __m128 m = _mm_add_ps(_mm_mul_ps(_mm_load_ps(kBranch.s0.data() + j), vl0),
                                        _mm_mul_ps(_mm_load_ps(kBranch.s1.data() + j), vl1));
            const __m128 a0 = _mm_add_ps(even, m);
            const __m128 b0 = _mm_sub_ps(odd, m);
            const __m128 a1 = _mm_sub_ps(even, m);
            const __m128 b1 = _mm_add_ps(odd, m);
            _mm_store_ps(next + j, _mm_max_ps(a0, b0));
            _mm_store_ps(next + j + 32, _mm_max_ps(a1, b1));
            dec |= static_cast<std::uint64_t>(_mm_movemask_ps(_mm_cmpgt_ps(b0, a0))) << j;
            dec |= static_cast<std::uint64_t>(_mm_movemask_ps(_mm_cmpgt_ps(b1, a1))) << (j + 32);
        }
#else
        for (int j = 0; j < 32; ++j) {
            const float m = kBranch.s0[j] * l0 + kBranch.s1[j] * l1;
            const float a0 = metric[2 * j] + m;
            const float b0 = metric[2 * j + 1] - m;
            const float a1 = metric[2 * j] - m;
            const float b1 = metric[2 * j + 1] + m;
            next[j] = std::max(a0, b0);
            next[j + 32] = std::max(a1, b1);
            dec |= static_cast<std::uint64_t>(b0 > a0) << j;
            dec |= static_cast<std::uint64_t>(b1 > a1) << (j + 32);
        }
#endif
        decisions_[t] = dec;
        if ((t & 31) == 31) {
            const float top = *std::max_element(next, next + kStates);
            for (int j = 0; j < kStates; ++j)
                next[j] -= top;
        }
        std::swap(metric, next);
    }

    out.assign(n_bits, 0);
    unsigned state = 0;
    for (std::size_t t = steps; t-- > 0;) {
        const unsigned u = state >> 5;
        if (t < n_bits)
            out[t] = static_cast<std::uint8_t>(u);
        state = ((state & 31u) << 1) | static_cast<unsigned>((decisions_[t] >> state) & 1u);
    }
}

std::vector<std::uint8_t> ViterbiDecoder::decode(std::span<const float> llr, std::size_t n_bits, CodeRate r)
{
    std::vector<std::uint8_t> out;
    decode(llr, n_bits, r, out);
    return out;
}

std::vector<std::uint8_t> viterbi_decode(std::span<const float> llr, std::size_t n_bits, CodeRate r)
{
    ViterbiDecoder d;
    return d.decode(llr, n_bits, r);
}

} // namespace effsnr

// random.hpp: Philox4x32-10 counter-based generator.
//
// The key is the 64-bit seed. The 128-bit counter is {draw_lo, draw_hi,
// stream_lo, stream_hi}: every (seed, stream) pair owns an independent
// sequence of 2^64 blocks, so trajectory i of an ensemble simply uses
// stream i and the result does not depend on thread scheduling.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace polar_tls {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

namespace detail {
inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}
}  // namespace detail

/// One application of the 10-round Philox4x32 bijection.
constexpr PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += detail::kPhiloxW0;
            key[1] += detail::kPhiloxW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        detail::mulhilo(detail::kPhiloxM0, ctr[0], hi0, lo0);
        detail::mulhilo(detail::kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

/// UniformRandomBitGenerator over one (seed, stream) sequence.
class Philox {
public:
    using result_type = std::uint32_t;

    explicit Philox(std::uint64_t seed = 0, std::uint64_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (index_ == 4) refill();
        return buffer_[index_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = (*this)();
        return (hi << 32) | (*this)();
    }

    /// Uniform double strictly inside (0, 1), 53 random bits.
    double uniform_open() {
        const std::uint64_t bits = next_u64() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    /// Exponential waiting time with the given rate (> 0).
    double exponential(double rate) { return -std::log(uniform_open()) / rate; }

    std::uint64_t stream() const { return stream_; }

private:
    void refill() {
        const PhiloxBlock ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                              static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        buffer_ = philox4x32_10(ctr, key_);
        ++block_;
        index_ = 0;
    }

    PhiloxKey key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    PhiloxBlock buffer_{};
    int index_ = 4;
};

}  // namespace polar_tls

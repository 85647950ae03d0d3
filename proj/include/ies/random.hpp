#ifndef IES_RANDOM_HPP
#define IES_RANDOM_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace ies {

/// splitmix64 finalizer; used to derive substream ids.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/**
 * Counter-based random source (Philox4x32-10).
 *
 * The key is the 64-bit seed; the 128-bit counter holds the stream id in its
 * upper half and the block index in its lower half. Two sources with the same
 * (seed, stream) produce the same sequence on every platform, and distinct
 * streams never share a counter value.
 *
 * Satisfies UniformRandomBitGenerator.
 */
class RandomSource {
public:
    using result_type = std::uint64_t;

    explicit RandomSource(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept
        : seed_(seed), stream_(stream)
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    /// Independent source sharing the seed; deterministic in (stream, id).
    RandomSource substream(std::uint64_t id) const noexcept
    {
        return RandomSource(seed_, mix64(stream_ ^ mix64(id + 0x632BE59BD9B4E019ULL)));
    }

    result_type operator()() noexcept { return next_u64(); }

    std::uint64_t next_u64() noexcept
    {
        if (pos_ == 2) {
            refill();
        }
        return buffer_[pos_++];
    }

    /// Uniform on [0, 1) with 53 random bits; 1.0 is never returned.
    double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal deviate (Box-Muller, two uniforms per call).
    double normal() noexcept
    {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform integer on [lo, hi], unbiased.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept
    {
        const std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
        if (range == max()) {
            return static_cast<std::int64_t>(next_u64());
        }
        const std::uint64_t span = range + 1;
        const std::uint64_t limit = max() - (max() % span + 1) % span;
        std::uint64_t v = next_u64();
        while (v > limit) {
            v = next_u64();
        }
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + v % span);
    }

private:
    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept
    {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    void refill() noexcept
    {
        std::array<std::uint32_t, 4> c{static_cast<std::uint32_t>(counter_),
                                       static_cast<std::uint32_t>(counter_ >> 32),
                                       static_cast<std::uint32_t>(stream_),
                                       static_cast<std::uint32_t>(stream_ >> 32)};
        std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
        std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(0xD2511F53U, c[0], hi0, lo0);
            mulhilo(0xCD9E8D57U, c[2], hi1, lo1);
            c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
            k0 += 0x9E3779B9U;
            k1 += 0xBB67AE85U;
        }
        buffer_[0] = (static_cast<std::uint64_t>(c[1]) << 32) | c[0];
        buffer_[1] = (static_cast<std::uint64_t>(c[3]) << 32) | c[2];
        ++counter_;
        pos_ = 0;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int pos_ = 2;
};

} // namespace ies

#endif // IES_RANDOM_HPP

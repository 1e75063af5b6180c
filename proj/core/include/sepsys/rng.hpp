#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace sepsys {

// SplitMix64 finalizer; used both to seed generators and to derive
// independent sub-stream seeds from a parent seed plus tags.
constexpr auto splitmix64(std::uint64_t x) noexcept -> std::uint64_t
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31U);
}

constexpr auto derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) noexcept -> std::uint64_t
{
    auto h = splitmix64(seed);
    for (auto t : tags) {
        h = splitmix64(h ^ splitmix64(t + 0x632BE59BD9B4E019ULL));
    }
    return h;
}

// xoshiro256** with explicit, platform-independent conversions, so a
// seed reproduces the same stream everywhere.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept
    {
        auto s = seed;
        for (auto& w : state_) {
            s = splitmix64(s);
            w = s;
        }
    }

    static constexpr auto min() noexcept -> result_type { return 0; }
    static constexpr auto max() noexcept -> result_type { return std::numeric_limits<result_type>::max(); }

    auto operator()() noexcept -> result_type
    {
        auto const result = rotl(state_[1] * 5, 7) * 9;
        auto const t = state_[1] << 17U;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    auto uniform() noexcept -> double
    {
        return static_cast<double>((*this)() >> 11U) * 0x1.0p-53;
    }

    auto uniform(double a, double b) noexcept -> double { return a + (b - a) * uniform(); }

    // uniform integer in [0, n)
    auto below(std::uint64_t n) noexcept -> std::uint64_t
    {
        auto const m = static_cast<unsigned __int128>((*this)()) * n;
        return static_cast<std::uint64_t>(m >> 64U);
    }

private:
    static constexpr auto rotl(std::uint64_t x, int k) noexcept -> std::uint64_t
    {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4] {};
};

} // namespace sepsys

#pragma once

// Counter-keyed random streams. A stream is fully determined by
// (seed, stream_id), so parallel trials never share state and every
// result is reproducible bit for bit.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hypercol::rng {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

}  // namespace detail

// xoshiro256++ seeded through splitmix64 from (seed, stream_id).
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t x = seed ^ (0x632BE59BD9B4E019ULL + 0x9E3779B97F4A7C15ULL * (stream_id + 1));
        for (auto& w : state_) w = detail::splitmix64(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(2.0 * std::numbers::pi * u2);
        have_spare_ = true;
        return mag * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace hypercol::rng

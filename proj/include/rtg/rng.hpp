// rng.hpp — Counter-derived random streams for reproducible parallel Monte Carlo.
//
// A stream is identified by (master_seed, stream_id). Distinct ids yield
// statistically independent sequences, so replications can run on any number
// of workers in any order and still produce bit-identical results: worker
// scheduling never touches the stream state.
//
// Core generator is splitmix64; each stream starts from a mixed counter
// offset. Poisson sampling delegates to std::poisson_distribution, which
// stays O(1) for large means.
#pragma once

#include <cstdint>
#include <random>

namespace rtg {

namespace detail {

// splitmix64 finalizer (Stafford mix13).
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

} // namespace detail

class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
        : state_(detail::mix64(master_seed + detail::kGolden * (stream_id + 1)) ^
                 detail::mix64(stream_id + detail::kGolden)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    // Uniform on [0, 1) with 53-bit resolution; never returns 1.
    double uniform01() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    std::int64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        std::poisson_distribution<std::int64_t> dist(mean);
        return dist(*this);
    }

private:
    std::uint64_t state_;
};

// Deterministic derivation of a sub-seed, e.g. one master seed per grid point.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) noexcept {
    return detail::mix64(master ^ detail::mix64(salt + detail::kGolden));
}

} // namespace rtg

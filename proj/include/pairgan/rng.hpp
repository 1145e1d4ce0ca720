#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace pairgan {

/// SplitMix64 step; used for seeding and substream derivation.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// xoshiro256** 1.0 (Blackman & Vigna), seeded by expanding a 64-bit seed
/// through SplitMix64. Normal variates use the Marsaglia polar method with
/// the spare value cached, so a stream is fully determined by its seed and
/// the sequence of calls made on it.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    result_type operator()() noexcept { return next(); }

    std::uint64_t next() noexcept;
    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept;
    /// Unbiased integer in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept;
    double normal() noexcept;
    double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }

    /// Independent generator for a named purpose; the parent stream is not
    /// advanced, so substreams never perturb each other.
    Rng substream(std::string_view tag, std::uint64_t index = 0) const noexcept;

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Seed of the substream `tag`/`index` under a root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index) noexcept;

}  // namespace pairgan

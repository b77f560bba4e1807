#pragma once

#include <array>
#include <cstdint>

namespace hjs {

/// Philox4x32-10 block function (Salmon et al., counter-based RNG).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

std::uint64_t splitmix64(std::uint64_t z) noexcept;

/// Seed of path `index` in an ensemble driven by `master`.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Standard normal quantile.
double normal_quantile(double p);

/// A counter-based uniform stream keyed by (seed, stream id). Draw k is a
/// pure function of (seed, stream id, k), so results do not depend on how
/// paths are scheduled across threads.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint32_t stream_id = 0) noexcept;

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Standard normal via inverse CDF of one uniform.
    double normal();
    /// Exponential with the given rate (> 0).
    double exponential(double rate) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t draws() const noexcept { return draws_; }

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    unsigned next_ = 4;
    std::uint64_t draws_ = 0;
};

} // namespace hjs

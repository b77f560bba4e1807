#include "hjs/random.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/policies/policy.hpp>

#include <cmath>
#include <stdexcept>

namespace hjs {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

using NoPromotion = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(index ^ 0x5851F42D4C957F2Dull));
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("normal_quantile: p must lie in (0, 1)");
    }
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p, NoPromotion());
}

RandomStream::RandomStream(std::uint64_t seed, std::uint32_t stream_id) noexcept
    : seed_(seed),
      key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_id_(stream_id) {}

void RandomStream::refill() noexcept {
    buffer_ = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                          stream_id_, 0u},
                         key_);
    ++block_;
    next_ = 0;
}

double RandomStream::uniform() noexcept {
    if (next_ >= 4) {
        refill();
    }
    const std::uint32_t a = buffer_[next_] >> 5;
    const std::uint32_t b = buffer_[next_ + 1] >> 6;
    next_ += 2;
    ++draws_;
    // 53-bit integer shifted by one half so that 0 and 1 are never produced.
    return (static_cast<double>(a) * 67108864.0 + static_cast<double>(b) + 0.5) *
           (1.0 / 9007199254740992.0);
}

double RandomStream::normal() {
    return normal_quantile(uniform());
}

double RandomStream::exponential(double rate) noexcept {
    return -std::log(uniform()) / rate;
}

} // namespace hjs

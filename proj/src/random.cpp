#include "ksense/random.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace ksense {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) noexcept {
    for (auto& word : s_) {
        word = splitmix64(seed);
        seed += 0x9e3779b97f4a7c15ULL;
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t Rng::next_u64() noexcept {
    const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
}

double Rng::uniform() noexcept {
    // 53 random mantissa bits, shifted off zero.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t trial_seed(std::uint64_t base_seed, SeedPurpose purpose, double snr_db,
                         std::uint64_t trial) noexcept {
    const std::uint64_t point =
        splitmix64(std::bit_cast<std::uint64_t>(snr_db) ^ (static_cast<std::uint64_t>(purpose) << 56));
    return base_seed ^ splitmix64(trial ^ point);
}

}  // namespace ksense

#pragma once

#include <array>
#include <cstdint>

namespace ksense {

/// splitmix64 finalizer; also used to expand seeds and derive per-trial seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// xoshiro256++ generator with Box-Muller standard normals.
///
/// Seeded from a single 64-bit value via four splitmix64 steps. The stream is
/// a pure function of the seed, so runs are bitwise repeatable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;

    /// Standard normal deviate.
    double normal() noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Streams of randomness the Monte Carlo harness draws from. Each purpose
/// gets a disjoint seed family so that calibration and held-out checks never
/// share noise realizations.
enum class SeedPurpose : std::uint64_t {
    calibration = 1,
    detection = 2,
    heldout = 3,
    roc_noise = 4,
    roc_signal = 5,
};

/// base_seed XOR splitmix64(trial key), where the key mixes the purpose, the
/// SNR point, and the trial index. Independent of scheduling order.
std::uint64_t trial_seed(std::uint64_t base_seed, SeedPurpose purpose, double snr_db,
                         std::uint64_t trial) noexcept;

}  // namespace ksense
